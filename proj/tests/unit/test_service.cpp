#include <doctest.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "netgrab/graphio.hpp"
#include "netgrab/pipeline.hpp"
#include "netgrab/png_io.hpp"
#include "netgrab/service.hpp"
#include "synthetic.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Running {
 public:
  explicit Running(netgrab::ServiceOptions options = {}) : service_(std::move(options)) {
    port_ = service_.bind_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { service_.run(); });
  }
  ~Running() {
    service_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }

 private:
  netgrab::Service service_;
  int port_ = -1;
  std::thread thread_;
};

std::string png_of(const netgrab::RgbImage& img) {
  const auto bytes = netgrab::encode_png(img);
  return {bytes.begin(), bytes.end()};
}

json wait_done(httplib::Client& c, const std::string& run_id) {
  for (int i = 0; i < 600; ++i) {
    const auto res = c.Get("/api/runs/" + run_id);
    REQUIRE(res);
    REQUIRE(res->status == 200);
    const json rec = json::parse(res->body);
    if (rec["status"] == "done" || rec["status"] == "error") return rec;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  FAIL("run did not finish");
  return {};
}

std::string upload(httplib::Client& c, const netgrab::RgbImage& img) {
  const auto res = c.Post("/api/images", png_of(img), "image/png");
  REQUIRE(res);
  REQUIRE(res->status == 201);
  return json::parse(res->body)["image_id"];
}

std::string submit(httplib::Client& c, const json& body) {
  const auto res = c.Post("/api/runs", body.dump(), "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 202);
  return json::parse(res->body)["run_id"];
}

}  // namespace

TEST_CASE("service: health and CORS") {
  Running svc;
  auto c = svc.client();
  const auto res = c.Get("/api/health");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["version"] == NETGRAB_VERSION);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  const auto pre = c.Options("/api/runs");
  REQUIRE(pre);
  CHECK(pre->status == 204);
}

TEST_CASE("service: images") {
  Running svc;
  auto c = svc.client();
  const netgrab::RgbImage img = testsupport::render_grid({3, 200, 40, 60, 7.0});
  const std::string id = upload(c, img);
  const auto back = c.Get("/api/images/" + id);
  REQUIRE(back);
  CHECK(back->status == 200);
  CHECK(back->get_header_value("Content-Type") == "image/png");
  CHECK(back->body == png_of(img));
  const auto junk = c.Post("/api/images", "GIF89a....", "image/gif");
  REQUIRE(junk);
  CHECK(junk->status == 415);
  CHECK(c.Get("/api/images/img-999999")->status == 404);
}

TEST_CASE("service: pipelines and stage schema") {
  Running svc;
  auto c = svc.client();
  const auto list = c.Get("/api/pipelines");
  REQUIRE(list);
  const json pipelines = json::parse(list->body);
  REQUIRE(pipelines.is_array());
  CHECK(pipelines.size() >= 2);
  for (const auto& p : pipelines) CHECK_NOTHROW(netgrab::pipeline_from_json(p));

  const auto schema = c.Get("/api/stages");
  REQUIRE(schema);
  const json stages = json::parse(schema->body);
  bool saw_block = false;
  for (const auto& s : stages) {
    for (const auto& p : s["params"]) {
      if (p["name"] == "block_size") {
        saw_block = true;
        CHECK(p["odd"] == true);
        CHECK(p["default"] == 41);
      }
    }
  }
  CHECK(saw_block);

  const json custom = {{"name", "session_one"},
                       {"stages", json::array({{{"category", "segmentation"}, {"algorithm", "otsu_threshold"}},
                                               {{"category", "thinning"}, {"algorithm", "guo_hall"}}})}};
  const auto saved = c.Post("/api/pipelines", custom.dump(), "application/json");
  REQUIRE(saved);
  CHECK(saved->status == 201);
  CHECK(json::parse(c.Get("/api/pipelines")->body).size() == pipelines.size() + 1);
  json bad = custom;
  bad["stages"] = json::array({{{"category", "thinning"}, {"algorithm", "guo_hall"}}});
  const auto rejected = c.Post("/api/pipelines", bad.dump(), "application/json");
  REQUIRE(rejected);
  CHECK(rejected->status == 422);
  json clash = custom;
  clash["name"] = "default_watershed";
  CHECK(c.Post("/api/pipelines", clash.dump(), "application/json")->status == 409);
}

TEST_CASE("service: run lifecycle and artifacts") {
  Running svc({2, std::nullopt, std::nullopt});
  auto c = svc.client();
  const netgrab::RgbImage img = testsupport::render_grid({3, 200, 40, 60, 7.0});
  const std::string image_id = upload(c, img);
  const netgrab::Pipeline pipeline = *netgrab::find_bundled_pipeline("default_thresholding");
  const std::string run_id = submit(c, {{"image_id", image_id}, {"pipeline", netgrab::to_json(pipeline)}});
  const json rec = wait_done(c, run_id);
  CHECK(rec["status"] == "done");
  CHECK(rec["run_id"] == run_id);
  CHECK(rec["image_id"] == image_id);
  CHECK(rec["created_at"].get<std::string>().size() == 20);
  REQUIRE(rec["stage_artifacts"].size() == pipeline.stages.size() + 2);
  CHECK(rec["stage_artifacts"][2]["name"] == "graph_detection");
  CHECK(rec["stage_artifacts"][2]["kind"] == "graph");

  for (std::size_t i = 0; i < rec["stage_artifacts"].size(); ++i) {
    const auto url = rec["stage_artifacts"][i]["url"].get<std::string>();
    const auto res = c.Get(url);
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto bytes = std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(res->body.data()),
                                                     res->body.size());
    const netgrab::RgbImage pic = netgrab::decode_png(bytes);
    CHECK(pic.width() == 200);
  }
  const auto thumb = c.Get("/api/runs/" + run_id + "/stages/0/image?max=50");
  REQUIRE(thumb);
  const auto tb = std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(thumb->body.data()),
                                                thumb->body.size());
  CHECK(netgrab::decode_png(tb).width() == 50);
  CHECK(c.Get("/api/runs/" + run_id + "/stages/0/image?max=0")->status == 400);
  CHECK(c.Get("/api/runs/" + run_id + "/stages/9/image")->status == 404);

  const auto graph = c.Get("/api/runs/" + run_id + "/graph");
  REQUIRE(graph);
  CHECK(graph->status == 200);
  const auto direct = netgrab::run_pipeline(pipeline, img);
  CHECK(graph->body == netgrab::serialize_graph(*direct.graph));

  const auto overlay = c.Get("/api/runs/" + run_id + "/overlay");
  REQUIRE(overlay);
  CHECK(overlay->body == png_of(*direct.overlay));

  const auto hist = c.Get("/api/runs/" + run_id + "/histogram?attr=width&bins=4");
  REQUIRE(hist);
  const json h = json::parse(hist->body);
  CHECK(h["edges"].size() == 5);
  std::size_t total = 0;
  for (const auto& n : h["counts"]) total += n.get<std::size_t>();
  CHECK(total == direct.graph->edges.size());
  CHECK(c.Get("/api/runs/" + run_id + "/histogram?attr=colour")->status == 400);
  CHECK(c.Get("/api/runs/" + run_id + "/histogram?bins=0")->status == 400);

  CHECK(c.Get("/api/runs/run-999999")->status == 404);
  CHECK(c.Get("/api/runs/run-999999/graph")->status == 404);
}

TEST_CASE("service: run by bundled name matches the CLI graph bytes") {
  Running svc;
  auto c = svc.client();
  const netgrab::RgbImage img = testsupport::render_network(300, 200, 77, 60);
  const std::string image_id = upload(c, img);
  const std::string run_id = submit(c, {{"image_id", image_id}, {"pipeline", "default_watershed"}});
  const json rec = wait_done(c, run_id);
  REQUIRE(rec["status"] == "done");

  const auto dir = fs::temp_directory_path() / "netgrab_service_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  netgrab::save_png(img, dir / "in.png");
  const std::string cmd = std::string(NETGRAB_CLI_PATH) + " run --pipeline default_watershed --input " +
                          (dir / "in.png").string() + " --out " + (dir / "out").string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::ifstream in(dir / "out" / "graph.txt", std::ios::binary);
  std::ostringstream cli_graph;
  cli_graph << in.rdbuf();
  CHECK(c.Get("/api/runs/" + run_id + "/graph")->body == cli_graph.str());
}

TEST_CASE("service: validation and request errors") {
  Running svc;
  auto c = svc.client();
  const std::string image_id = upload(c, testsupport::render_grid({3, 200, 40, 60, 7.0}));
  const json out_of_order = {{"name", "x"},
                             {"stages", json::array({{{"category", "thinning"}, {"algorithm", "guo_hall"}},
                                                     {{"category", "segmentation"}, {"algorithm", "otsu_threshold"}}})}};
  const auto res = c.Post("/api/runs", json{{"image_id", image_id}, {"pipeline", out_of_order}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 422);
  const json err = json::parse(res->body);
  CHECK(err["stage"] == 0);
  CHECK_FALSE(err["message"].get<std::string>().empty());

  CHECK(c.Post("/api/runs", "{nope", "application/json")->status == 400);
  CHECK(c.Post("/api/runs", json{{"pipeline", "default_watershed"}}.dump(), "application/json")->status == 400);
  CHECK(c.Post("/api/runs", json{{"image_id", "img-424242"}, {"pipeline", "default_watershed"}}.dump(),
               "application/json")
            ->status == 404);
  CHECK(c.Post("/api/runs", json{{"image_id", image_id}, {"pipeline", "no_such"}}.dump(), "application/json")->status ==
        404);
}

TEST_CASE("service: failed run reports stage and blocks final artifacts") {
  Running svc;
  auto c = svc.client();
  const std::string image_id = upload(c, netgrab::RgbImage(40, 40, netgrab::Rgb{0, 0, 0}));
  const std::string run_id = submit(c, {{"image_id", image_id}, {"pipeline", "default_watershed"}});
  const json rec = wait_done(c, run_id);
  CHECK(rec["status"] == "error");
  CHECK(rec["error"]["stage"] == "guided_watershed");
  CHECK(rec["stage_artifacts"].size() == 1);
  CHECK(c.Get("/api/runs/" + run_id + "/graph")->status == 409);
  CHECK(c.Get("/api/runs/" + run_id + "/overlay")->status == 409);
  CHECK(c.Get("/api/runs/" + run_id + "/stages/3/image")->status == 409);
}

TEST_CASE("service: spilled artifacts are served from the state directory") {
  const auto state = fs::temp_directory_path() / "netgrab_service_state";
  fs::remove_all(state);
  Running svc({1, state, std::nullopt});
  auto c = svc.client();
  const netgrab::RgbImage img = testsupport::render_grid({3, 200, 40, 60, 7.0});
  const std::string run_id = submit(c, {{"image_id", upload(c, img)}, {"pipeline", "default_thresholding"}});
  REQUIRE(wait_done(c, run_id)["status"] == "done");
  CHECK(fs::exists(state / run_id / "00_otsu_threshold.png"));
  const auto res = c.Get("/api/runs/" + run_id + "/overlay");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto direct = netgrab::run_pipeline(*netgrab::find_bundled_pipeline("default_thresholding"), img);
  CHECK(res->body == png_of(*direct.overlay));
  const auto thumb = c.Get("/api/runs/" + run_id + "/stages/1/image?max=20");
  REQUIRE(thumb);
  CHECK(thumb->status == 200);
}

TEST_CASE("service: concurrent runs stay isolated") {
  Running svc({3, std::nullopt, std::nullopt});
  auto c = svc.client();
  std::vector<std::string> runs;
  std::vector<netgrab::RgbImage> images;
  for (int i = 0; i < 6; ++i) {
    images.push_back(testsupport::render_network(160, 120, 300 + i, 40));
    runs.push_back(submit(c, {{"image_id", upload(c, images.back())}, {"pipeline", "default_thresholding"}}));
  }
  const auto pipeline = *netgrab::find_bundled_pipeline("default_thresholding");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    REQUIRE(wait_done(c, runs[i])["status"] == "done");
    const auto direct = netgrab::run_pipeline(pipeline, images[i]);
    CHECK(c.Get("/api/runs/" + runs[i] + "/graph")->body == netgrab::serialize_graph(*direct.graph));
  }
}
