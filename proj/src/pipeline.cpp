#include "netgrab/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "netgrab/distance.hpp"
#include "netgrab/graphdetect.hpp"
#include "netgrab/graphfilter.hpp"
#include "netgrab/graphio.hpp"
#include "netgrab/png_io.hpp"
#include "netgrab/preprocess.hpp"
#include "netgrab/segment.hpp"
#include "netgrab/thinning.hpp"

namespace netgrab {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& message) { throw Error(ErrorKind::ParseError, message); }

std::string describe(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

std::string format_bound(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

ParamValue validate_param(std::size_t stage, const ParamSpec& spec, const json& v) {
  const auto bad = [&](const std::string& why) -> ValidationError { return {stage, spec.name + " " + why}; };
  double numeric = 0.0;
  ParamValue value;
  switch (spec.type) {
    case ParamType::Boolean:
      if (!v.is_boolean()) throw bad("must be a boolean, got " + describe(v));
      return v.get<bool>();
    case ParamType::String: {
      if (!v.is_string()) throw bad("must be a string, got " + describe(v));
      const auto s = v.get<std::string>();
      if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), s) == spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : "|") + c;
        throw bad("must be one of " + allowed + ", got '" + s + "'");
      }
      return s;
    }
    case ParamType::Integer: {
      if (!v.is_number()) throw bad("must be an integer, got " + describe(v));
      numeric = v.get<double>();
      if (!std::isfinite(numeric) || numeric != std::floor(numeric) || std::fabs(numeric) > 1e15) {
        throw bad("must be an integer");
      }
      value = static_cast<std::int64_t>(numeric);
      break;
    }
    case ParamType::Real:
      if (!v.is_number()) throw bad("must be a number, got " + describe(v));
      numeric = v.get<double>();
      if (!std::isfinite(numeric)) throw bad("must be finite");
      value = numeric;
      break;
  }
  if (spec.min) {
    if (spec.min_exclusive ? !(numeric > *spec.min) : !(numeric >= *spec.min)) {
      throw bad(std::string("must be ") + (spec.min_exclusive ? "> " : ">= ") + format_bound(*spec.min));
    }
  }
  if (spec.max && numeric > *spec.max) throw bad("must be <= " + format_bound(*spec.max));
  if (spec.odd && static_cast<std::int64_t>(numeric) % 2 == 0) throw bad("must be odd");
  return value;
}

void cross_check(std::size_t stage, const StageDescriptor& d) {
  if (d.algorithm == "filter_small_components") {
    const double t = d.real_param("threshold");
    if (d.string_param("mode") == "absolute" && t != std::floor(t)) {
      throw ValidationError(stage, "threshold must be a whole vertex count in absolute mode");
    }
    if (d.string_param("mode") == "relative" && t > 1.0) {
      throw ValidationError(stage, "threshold must lie in [0, 1] in relative mode");
    }
  }
}

json param_to_json(const ParamValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

Side side_param(const StageDescriptor& d) {
  return d.string_param("foreground") == "above" ? Side::Above : Side::Below;
}

GrayImage apply_preprocessing(const StageDescriptor& d, const GrayImage& in) {
  if (d.algorithm == "gaussian_blur") return gaussian_blur(in, static_cast<int>(d.int_param("kernel_size")));
  if (d.algorithm == "median_blur") return median_blur(in, static_cast<int>(d.int_param("kernel_size")));
  if (d.algorithm == "invert") return invert(in);
  throw Error(ErrorKind::InvalidParameter, "no preprocessing stage named " + d.algorithm);
}

SegmentationResult apply_segmentation(const StageDescriptor& d, const GrayImage& in) {
  if (d.algorithm == "constant_threshold") {
    return constant_threshold(in, static_cast<int>(d.int_param("threshold")), side_param(d));
  }
  if (d.algorithm == "otsu_threshold") return otsu_threshold(in, side_param(d));
  if (d.algorithm == "adaptive_mean_threshold") {
    return adaptive_mean_threshold(in, static_cast<int>(d.int_param("block_size")),
                                   static_cast<int>(d.int_param("c")), side_param(d));
  }
  if (d.algorithm == "guided_watershed") {
    return guided_watershed(in, static_cast<int>(d.int_param("fg_erosions")),
                            static_cast<int>(d.int_param("bg_dilations")),
                            d.string_param("foreground") == "light" ? Polarity::Light : Polarity::Dark);
  }
  throw Error(ErrorKind::InvalidParameter, "no segmentation stage named " + d.algorithm);
}

ExtractedGraph apply_filter(const StageDescriptor& d, const ExtractedGraph& g) {
  if (d.algorithm == "filter_small_components") {
    return filter_small_components(g, d.string_param("mode") == "absolute" ? SizeMode::Absolute : SizeMode::Relative,
                                   d.real_param("threshold"));
  }
  if (d.algorithm == "keep_largest_component") return keep_largest_component(g);
  if (d.algorithm == "prune_dead_ends") return prune_dead_ends(g);
  if (d.algorithm == "merge_close_junctions") return merge_close_junctions(g, d.real_param("radius"));
  if (d.algorithm == "smooth_filtered_ends") return smooth_filtered_ends(g);
  throw Error(ErrorKind::InvalidParameter, "no graph filter named " + d.algorithm);
}

std::string artifact_category(const StageDescriptor& d) { return std::string(to_string(d.category)); }

}  // namespace

std::int64_t StageDescriptor::int_param(const std::string& key) const {
  return std::get<std::int64_t>(params.at(key));
}

double StageDescriptor::real_param(const std::string& key) const {
  const auto& v = params.at(key);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

const std::string& StageDescriptor::string_param(const std::string& key) const {
  return std::get<std::string>(params.at(key));
}

Pipeline pipeline_from_json(const json& doc) {
  if (!doc.is_object()) parse_error("pipeline document must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "name" && key != "stages") parse_error("unknown top-level key '" + key + "'");
  }
  if (!doc.contains("name") || !doc["name"].is_string()) parse_error("\"name\" must be a string");
  if (!doc.contains("stages") || !doc["stages"].is_array()) parse_error("\"stages\" must be an array");

  Pipeline p;
  p.name = doc["name"].get<std::string>();
  const auto& stages = doc["stages"];
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const std::string where = "stage " + std::to_string(i) + ": ";
    if (!s.is_object()) parse_error(where + "must be a JSON object");
    for (const auto& [key, value] : s.items()) {
      if (key != "category" && key != "algorithm" && key != "params") parse_error(where + "unknown key '" + key + "'");
    }
    if (!s.contains("category") || !s["category"].is_string()) parse_error(where + "\"category\" must be a string");
    if (!s.contains("algorithm") || !s["algorithm"].is_string()) parse_error(where + "\"algorithm\" must be a string");
    if (s.contains("params") && !s["params"].is_object()) parse_error(where + "\"params\" must be an object");
  }

  enum Phase { kBeforeSegmentation, kAfterSegmentation, kAfterThinning };
  Phase phase = kBeforeSegmentation;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const auto category_name = s["category"].get<std::string>();
    const auto algorithm = s["algorithm"].get<std::string>();
    const auto category = parse_category(category_name);
    if (!category) throw ValidationError(i, "unknown category '" + category_name + "'");
    const AlgorithmSpec* spec = find_algorithm(algorithm);
    if (!spec) throw ValidationError(i, "unknown algorithm '" + algorithm + "'");
    if (spec->reserved) throw ValidationError(i, "algorithm '" + algorithm + "' is reserved and not implemented");
    if (spec->category != *category) {
      throw ValidationError(i, "algorithm '" + algorithm + "' belongs to category " +
                                   std::string(to_string(spec->category)) + ", not " + category_name);
    }

    switch (*category) {
      case Category::Preprocessing:
        if (phase != kBeforeSegmentation) throw ValidationError(i, "preprocessing must come before segmentation");
        break;
      case Category::Segmentation:
        if (phase == kAfterSegmentation) throw ValidationError(i, "only one segmentation stage is allowed");
        if (phase == kAfterThinning) throw ValidationError(i, "segmentation must come before thinning");
        phase = kAfterSegmentation;
        break;
      case Category::Thinning:
        if (phase == kBeforeSegmentation) throw ValidationError(i, "thinning requires a preceding segmentation stage");
        if (phase == kAfterThinning) throw ValidationError(i, "only one thinning stage is allowed");
        phase = kAfterThinning;
        break;
      case Category::GraphFilter:
        if (phase != kAfterThinning) throw ValidationError(i, "graph filters must follow thinning");
        break;
    }

    StageDescriptor d;
    d.category = *category;
    d.algorithm = algorithm;
    const json params = s.value("params", json::object());
    for (const auto& [key, value] : params.items()) {
      const bool known = std::any_of(spec->params.begin(), spec->params.end(),
                                     [&](const ParamSpec& ps) { return ps.name == key; });
      if (!known) throw ValidationError(i, "unknown parameter '" + key + "' for " + algorithm);
    }
    for (const auto& ps : spec->params) {
      d.params[ps.name] = params.contains(ps.name) ? validate_param(i, ps, params[ps.name]) : ps.default_value;
    }
    cross_check(i, d);
    p.stages.push_back(std::move(d));
  }
  if (phase == kBeforeSegmentation) throw ValidationError(std::nullopt, "pipeline has no segmentation stage");
  if (phase == kAfterSegmentation) throw ValidationError(std::nullopt, "pipeline has no thinning stage");
  return p;
}

Pipeline parse_pipeline(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_error(std::string("malformed JSON: ") + e.what());
  }
  return pipeline_from_json(doc);
}

json to_json(const Pipeline& pipeline) {
  json stages = json::array();
  for (const auto& s : pipeline.stages) {
    json params = json::object();
    for (const auto& [k, v] : s.params) params[k] = param_to_json(v);
    stages.push_back({{"category", std::string(to_string(s.category))}, {"algorithm", s.algorithm}, {"params", params}});
  }
  return {{"name", pipeline.name}, {"stages", stages}};
}

std::string stage_summary(const Pipeline& pipeline) {
  std::string out;
  for (const auto& s : pipeline.stages) out += (out.empty() ? "" : " -> ") + s.algorithm;
  return out;
}

Pipeline load_pipeline_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open pipeline file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pipeline(buf.str());
}

std::vector<std::filesystem::path> pipeline_search_path() {
  std::vector<std::filesystem::path> dirs{NETGRAB_DEFAULT_PIPELINE_DIR};
  if (const char* extra = std::getenv("NETGRAB_PIPELINE_DIR")) {
    std::string_view rest(extra);
    while (!rest.empty()) {
      const auto colon = rest.find(':');
      const auto part = rest.substr(0, colon);
      if (!part.empty()) dirs.emplace_back(std::string(part));
      if (colon == std::string_view::npos) break;
      rest.remove_prefix(colon + 1);
    }
  }
  return dirs;
}

std::vector<Pipeline> bundled_pipelines() {
  std::vector<Pipeline> out;
  std::set<std::string> seen;
  for (const auto& dir : pipeline_search_path()) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) continue;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      Pipeline p = load_pipeline_file(f);
      if (seen.insert(p.name).second) out.push_back(std::move(p));
    }
  }
  std::sort(out.begin(), out.end(), [](const Pipeline& a, const Pipeline& b) { return a.name < b.name; });
  return out;
}

std::optional<Pipeline> find_bundled_pipeline(std::string_view name) {
  for (auto& p : bundled_pipelines()) {
    if (p.name == name) return std::move(p);
  }
  return std::nullopt;
}

std::string_view to_string(ArtifactKind k) noexcept { return k == ArtifactKind::Image ? "image" : "graph"; }

RunResult run_pipeline(const Pipeline& pipeline, const RgbImage& image, const RunOptions& options) {
  using clock = std::chrono::steady_clock;
  RunResult result;
  result.input = image;

  auto record = [&](StageArtifact artifact) {
    if (!options.capture_intermediates) artifact.payload = std::monostate{};
    result.artifacts.push_back(std::move(artifact));
    if (options.on_artifact) options.on_artifact(result.artifacts.back(), result.artifacts.size() - 1);
  };
  std::string current = "to_grayscale";
  try {
    std::optional<GrayImage> gray;
    auto ensure_gray = [&] {
      if (gray) return;
      const auto t0 = clock::now();
      gray = to_grayscale(image);
      result.timings.push_back({"to_grayscale", elapsed_ms(t0)});
    };
    std::optional<BinaryImage> mask;
    std::optional<Skeleton> skeleton;
    std::optional<ExtractedGraph> graph;

    for (const auto& stage : pipeline.stages) {
      current = stage.algorithm;
      if (stage.category == Category::Preprocessing || stage.category == Category::Segmentation) ensure_gray();
      const auto t0 = clock::now();
      StageArtifact artifact{stage.algorithm, artifact_category(stage), ArtifactKind::Image, 0.0, {}};
      switch (stage.category) {
        case Category::Preprocessing:
          gray = apply_preprocessing(stage, *gray);
          artifact.payload = *gray;
          break;
        case Category::Segmentation:
          mask = apply_segmentation(stage, *gray).mask;
          artifact.payload = *mask;
          break;
        case Category::Thinning:
          skeleton = guo_hall_thin(*mask);
          artifact.payload = skeleton->mask;
          break;
        case Category::GraphFilter:
          graph = apply_filter(stage, *graph);
          artifact.kind = ArtifactKind::Graph;
          artifact.payload = *graph;
          break;
      }
      artifact.milliseconds = elapsed_ms(t0);
      result.timings.push_back({stage.algorithm, artifact.milliseconds});
      record(std::move(artifact));

      if (stage.category == Category::Thinning) {
        current = "graph_detection";
        double total = 0.0;
        auto timed = [&](const char* name, auto&& fn) {
          const auto t = clock::now();
          auto out = fn();
          const double ms = elapsed_ms(t);
          total += ms;
          result.timings.push_back({name, ms});
          return out;
        };
        const DistanceField field = timed("distance_transform", [&] { return distance_transform(*mask); });
        const auto vertices = timed("detect_vertices", [&] { return detect_vertices(*skeleton); });
        auto traced = timed("trace_edges", [&] { return trace_edges(*skeleton, vertices); });
        graph = timed("compute_weights", [&] { return compute_weights(std::move(traced), field); });
        record({"graph_detection", "detection", ArtifactKind::Graph, total, *graph});
      }
    }

    current = "overlay";
    const auto t0 = clock::now();
    RgbImage overlay = render_overlay(image, *graph);
    const double ms = elapsed_ms(t0);
    result.timings.push_back({"render_overlay", ms});
    record({"overlay", "overlay", ArtifactKind::Image, ms, overlay});
    result.graph = std::move(graph);
    result.overlay = std::move(overlay);
  } catch (const std::exception& e) {
    result.status = {false, current, e.what()};
  }
  return result;
}

std::optional<RgbImage> artifact_picture(const RunResult& result, std::size_t index) {
  if (index >= result.artifacts.size()) return std::nullopt;
  const auto& payload = result.artifacts[index].payload;
  if (const auto* g = std::get_if<GrayImage>(&payload)) return to_rgb(*g);
  if (const auto* b = std::get_if<BinaryImage>(&payload)) return to_rgb(to_gray(*b));
  if (const auto* rgb = std::get_if<RgbImage>(&payload)) return *rgb;
  if (const auto* graph = std::get_if<ExtractedGraph>(&payload)) return render_overlay(result.input, *graph);
  return std::nullopt;
}

std::string format_timings(const std::vector<StageTiming>& timings) {
  std::string out;
  char buf[64];
  for (const auto& t : timings) {
    std::snprintf(buf, sizeof(buf), " %.3f\n", t.milliseconds);
    out += t.name + buf;
  }
  return out;
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& dir, const OutputOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
  {
    std::ofstream t(dir / "timings.txt", std::ios::binary | std::ios::trunc);
    if (!t) throw Error(ErrorKind::IoError, "cannot write timings.txt in " + dir.string());
    t << format_timings(result.timings);
  }
  if (result.status.ok && result.graph) write_graph(*result.graph, dir / "graph.txt");
  if (result.status.ok && result.overlay && options.overlay) save_png(*result.overlay, dir / "overlay.png");
  if (options.intermediates) {
    for (std::size_t i = 0; i < result.artifacts.size(); ++i) {
      if (result.artifacts[i].name == "overlay") continue;
      const auto picture = artifact_picture(result, i);
      if (!picture) continue;
      char prefix[16];
      std::snprintf(prefix, sizeof(prefix), "%02zu_", i);
      save_png(*picture, dir / (prefix + result.artifacts[i].name + ".png"));
    }
  }
}

}  // namespace netgrab
