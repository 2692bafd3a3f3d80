#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "netgrab/batch.hpp"
#include "netgrab/graphio.hpp"
#include "netgrab/pipeline.hpp"
#include "netgrab/png_io.hpp"
#include "synthetic.hpp"

using namespace netgrab;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({"name": "mini", "stages": [
  {"category": "segmentation", "algorithm": "otsu_threshold", "params": {}},
  {"category": "thinning", "algorithm": "guo_hall", "params": {}}]})";

std::optional<std::size_t> validation_stage(const std::string& text) {
  try {
    parse_pipeline(text);
  } catch (const ValidationError& e) {
    return e.stage();
  }
  FAIL("expected ValidationError");
  return std::nullopt;
}

std::string validation_detail(const std::string& text) {
  try {
    parse_pipeline(text);
  } catch (const ValidationError& e) {
    return e.detail();
  }
  return "";
}

std::string stages(const std::string& body) { return R"({"name": "t", "stages": [)" + body + "]}"; }

const std::string kOtsu = R"({"category": "segmentation", "algorithm": "otsu_threshold"})";
const std::string kThin = R"({"category": "thinning", "algorithm": "guo_hall"})";

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("netgrab_pipeline_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("minimal pipeline parses with defaults filled in") {
  const Pipeline p = parse_pipeline(kMinimal);
  CHECK(p.name == "mini");
  REQUIRE(p.stages.size() == 2);
  CHECK(p.stages[0].string_param("foreground") == "below");
  CHECK(stage_summary(p) == "otsu_threshold -> guo_hall");
  CHECK(parse_pipeline(to_json(p).dump()).stages.size() == 2);
}

TEST_CASE("thinning before segmentation names stage 0") {
  CHECK(validation_stage(stages(kThin + "," + kOtsu)) == 0u);
}

TEST_CASE("even block size is rejected") {
  const auto text =
      stages(R"({"category": "segmentation", "algorithm": "adaptive_mean_threshold", "params": {"block_size": 4}},)" +
             kThin);
  CHECK(validation_stage(text) == 0u);
  CHECK(validation_detail(text) == "block_size must be odd");
}

TEST_CASE("order rules") {
  const std::string blur = R"({"category": "preprocessing", "algorithm": "gaussian_blur"})";
  const std::string prune = R"({"category": "graph_filter", "algorithm": "prune_dead_ends"})";
  CHECK_NOTHROW(parse_pipeline(stages(blur + "," + blur + "," + kOtsu + "," + kThin + "," + prune + "," + prune)));
  CHECK(validation_stage(stages(kOtsu + "," + blur + "," + kThin)) == 1u);
  CHECK(validation_stage(stages(kOtsu + "," + kOtsu + "," + kThin)) == 1u);
  CHECK(validation_stage(stages(kOtsu + "," + kThin + "," + kThin)) == 2u);
  CHECK(validation_stage(stages(kOtsu + "," + prune + "," + kThin)) == 1u);
  CHECK(validation_stage(stages(kOtsu)) == std::nullopt);
  CHECK(validation_stage(stages(blur)) == std::nullopt);
  CHECK(validation_stage(stages("")) == std::nullopt);
}

TEST_CASE("algorithm and parameter validation") {
  CHECK(validation_stage(stages(R"({"category": "segmentation", "algorithm": "grabcut"},)" + kThin)) == 0u);
  CHECK(validation_stage(stages(R"({"category": "segmentation", "algorithm": "nope"},)" + kThin)) == 0u);
  CHECK(validation_stage(stages(R"({"category": "thinning", "algorithm": "otsu_threshold"},)" + kThin)) == 0u);
  CHECK(validation_stage(stages(R"({"category": "colour", "algorithm": "otsu_threshold"},)" + kThin)) == 0u);
  const auto param = [&](const std::string& algo, const std::string& params) {
    return stages(R"({"category": "segmentation", "algorithm": ")" + algo + R"(", "params": )" + params + "}," + kThin);
  };
  CHECK(validation_stage(param("constant_threshold", R"({"threshold": 256})")) == 0u);
  CHECK(validation_stage(param("constant_threshold", R"({"threshold": 12.5})")) == 0u);
  CHECK(validation_stage(param("constant_threshold", R"({"threshold": "12"})")) == 0u);
  CHECK(validation_stage(param("constant_threshold", R"({"foreground": "sideways"})")) == 0u);
  CHECK(validation_stage(param("constant_threshold", R"({"colour": 1})")) == 0u);
  CHECK(validation_stage(param("guided_watershed", R"({"fg_erosions": 0})")) == 0u);
  CHECK_NOTHROW(parse_pipeline(param("constant_threshold", R"({"threshold": 12.0})")));

  const auto filter = [&](const std::string& params) {
    return stages(kOtsu + "," + kThin + R"(,{"category": "graph_filter", "algorithm": "filter_small_components", "params": )" +
                  params + "}");
  };
  CHECK(validation_stage(filter(R"({"mode": "absolute", "threshold": 2.5})")) == 2u);
  CHECK(validation_stage(filter(R"({"mode": "relative", "threshold": 1.5})")) == 2u);
  CHECK_NOTHROW(parse_pipeline(filter(R"({"mode": "absolute", "threshold": 3})")));
  const auto merge = stages(kOtsu + "," + kThin +
                            R"(,{"category": "graph_filter", "algorithm": "merge_close_junctions", "params": {"radius": 0}})");
  CHECK(validation_stage(merge) == 2u);
}

TEST_CASE("malformed documents are parse errors") {
  const auto kind = [](const std::string& text) {
    try {
      parse_pipeline(text);
    } catch (const ValidationError&) {
      return std::string("validation");
    } catch (const Error& e) {
      return std::string(to_string(e.kind()));
    }
    return std::string("ok");
  };
  CHECK(kind("{") == "ParseError");
  CHECK(kind("[]") == "ParseError");
  CHECK(kind(R"({"name": "x", "stages": [], "extra": 1})") == "ParseError");
  CHECK(kind(R"({"stages": []})") == "ParseError");
  CHECK(kind(stages(R"({"category": "segmentation", "algorithm": "otsu_threshold", "opts": {}})")) == "ParseError");
  CHECK(kind(stages(R"({"category": "segmentation", "algorithm": "otsu_threshold", "params": []})")) == "ParseError");
}

TEST_CASE("bundled pipelines ship as data") {
  const auto all = bundled_pipelines();
  REQUIRE(all.size() >= 2);
  const auto t = find_bundled_pipeline("default_thresholding");
  REQUIRE(t);
  CHECK(stage_summary(*t) == "otsu_threshold -> guo_hall -> keep_largest_component");
  const auto w = find_bundled_pipeline("default_watershed");
  REQUIRE(w);
  CHECK(stage_summary(*w) ==
        "gaussian_blur -> guided_watershed -> guo_hall -> filter_small_components -> merge_close_junctions");
  CHECK(w->stages[3].real_param("threshold") == 0.05);
  CHECK(w->stages[4].real_param("radius") == 4.0);
}

TEST_CASE("extra pipeline directories from the environment") {
  const auto dir = scratch("envdir");
  {
    std::ofstream f(dir / "mine.json");
    f << R"({"name": "zz_custom", "stages": [)" << kOtsu << "," << kThin << "]}";
  }
  setenv("NETGRAB_PIPELINE_DIR", (dir.string() + ":/nonexistent").c_str(), 1);
  CHECK(find_bundled_pipeline("zz_custom").has_value());
  unsetenv("NETGRAB_PIPELINE_DIR");
  CHECK_FALSE(find_bundled_pipeline("zz_custom").has_value());
}

TEST_CASE("run: artifacts, timings and graph") {
  const RgbImage img = testsupport::render_grid({3, 200, 40, 60, 7.0});
  const Pipeline p = *find_bundled_pipeline("default_thresholding");
  const RunResult r = run_pipeline(p, img);
  REQUIRE(r.status.ok);
  REQUIRE(r.artifacts.size() == p.stages.size() + 2);
  CHECK(r.artifacts[0].name == "otsu_threshold");
  CHECK(r.artifacts[2].name == "graph_detection");
  CHECK(r.artifacts[2].kind == ArtifactKind::Graph);
  CHECK(r.artifacts.back().name == "overlay");
  CHECK(std::holds_alternative<BinaryImage>(r.artifacts[1].payload));
  REQUIRE(r.graph);
  CHECK(r.graph->vertices.size() == 5);  // four T-junctions and the centre crossing
  CHECK(r.graph->edges.size() == 8);
  REQUIRE(r.overlay);
  CHECK(r.timings.front().name == "to_grayscale");
  const std::string timings = format_timings(r.timings);
  CHECK(timings.find("guo_hall ") != std::string::npos);
  CHECK(timings.find("compute_weights ") != std::string::npos);
  for (std::size_t i = 0; i < r.artifacts.size(); ++i) CHECK(artifact_picture(r, i).has_value());
}

TEST_CASE("run: capture off keeps only graph and overlay") {
  const RgbImage img = testsupport::render_grid({3, 200, 40, 60, 7.0});
  const RunResult r = run_pipeline(*find_bundled_pipeline("default_thresholding"), img, {false, {}});
  REQUIRE(r.status.ok);
  CHECK(r.artifacts.size() == 5);
  for (const auto& a : r.artifacts) CHECK(std::holds_alternative<std::monostate>(a.payload));
  CHECK(r.graph.has_value());
  CHECK(r.overlay.has_value());
  CHECK(r.timings.size() >= 8);
}

TEST_CASE("run: failure keeps earlier artifacts") {
  const std::string text = R"({"name": "b", "stages": [
    {"category": "preprocessing", "algorithm": "gaussian_blur"},
    {"category": "segmentation", "algorithm": "otsu_threshold"},
    {"category": "thinning", "algorithm": "guo_hall"}]})";
  const RunResult r = run_pipeline(parse_pipeline(text), RgbImage(32, 32, Rgb{0, 0, 0}));
  CHECK_FALSE(r.status.ok);
  CHECK(r.status.stage == "otsu_threshold");
  CHECK(r.status.message.find("distinct") != std::string::npos);
  REQUIRE(r.artifacts.size() == 1);
  CHECK(r.artifacts[0].name == "gaussian_blur");
  CHECK_FALSE(r.graph.has_value());
}

TEST_CASE("run: default_watershed on a network image") {
  const RgbImage img = testsupport::render_network(400, 300, 4, 80);
  const RunResult r = run_pipeline(*find_bundled_pipeline("default_watershed"), img);
  REQUIRE(r.status.ok);
  CHECK(r.artifacts.size() == 7);
  CHECK(r.graph->edges.size() > 5);
}

TEST_CASE("write_run_outputs") {
  const auto dir = scratch("outputs");
  const RgbImage img = testsupport::render_grid({3, 200, 40, 60, 7.0});
  const RunResult r = run_pipeline(*find_bundled_pipeline("default_thresholding"), img);
  write_run_outputs(r, dir, {true, true});
  CHECK(fs::exists(dir / "graph.txt"));
  CHECK(fs::exists(dir / "overlay.png"));
  CHECK(fs::exists(dir / "timings.txt"));
  CHECK(fs::exists(dir / "00_otsu_threshold.png"));
  CHECK(fs::exists(dir / "02_graph_detection.png"));
  CHECK(slurp(dir / "graph.txt") == serialize_graph(*r.graph));
  CHECK(load_png(dir / "overlay.png") == *r.overlay);
}

TEST_CASE("batch: mixed inputs and parallel determinism") {
  const auto in = scratch("batch_in");
  for (int i = 0; i < 6; ++i) {
    save_png(testsupport::render_network(160, 120, 100 + i, 40), in / ("img" + std::to_string(i) + ".png"));
  }
  {
    std::ofstream bad(in / "broken.png");
    bad << "not a png";
  }
  {
    std::ofstream txt(in / "notes.txt");
    txt << "ignored";
  }
  const Pipeline p = *find_bundled_pipeline("default_thresholding");
  const auto out1 = scratch("batch_out1");
  const auto out4 = scratch("batch_out4");
  const BatchReport r1 = run_batch(p, in, out1, 1);
  const BatchReport r4 = run_batch(p, in, out4, 4);
  REQUIRE(r1.entries.size() == 7);
  CHECK(r1.failures() == 1);
  CHECK(r1.entries[0].name == "broken.png");
  CHECK(r1.entries[0].stage == "load");
  CHECK_FALSE(r1.entries[0].ok);
  CHECK(r4.failures() == 1);
  for (int i = 0; i < 6; ++i) {
    const auto sub = "img" + std::to_string(i);
    CHECK(fs::exists(out1 / sub / "graph.txt"));
    CHECK(slurp(out1 / sub / "graph.txt") == slurp(out4 / sub / "graph.txt"));
    CHECK(slurp(out1 / sub / "overlay.png") == slurp(out4 / sub / "overlay.png"));
  }
  try {
    run_batch(p, "/nonexistent/input", out1, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
}
