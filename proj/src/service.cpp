#include "netgrab/service.hpp"

#include <condition_variable>
#include <cstdio>
#include <ctime>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>
#include <omp.h>

#include "netgrab/graphio.hpp"
#include "netgrab/pipeline.hpp"
#include "netgrab/png_io.hpp"

namespace netgrab {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kPng = "image/png";

struct StoredImage {
  std::string png;
  RgbImage rgb;
};

struct ArtifactEntry {
  StageArtifact meta;  // payload always empty
  std::shared_ptr<const ArtifactPayload> payload;
  std::optional<std::filesystem::path> file;
};

struct RunRecord {
  std::string id;
  std::string image_id;
  Pipeline pipeline;
  std::string status = "queued";
  std::string created_at;
  std::shared_ptr<const StoredImage> image;
  std::vector<ArtifactEntry> artifacts;
  std::vector<StageTiming> timings;
  std::optional<std::string> graph_text;
  std::shared_ptr<const ExtractedGraph> graph;
  std::optional<RunStatus> error;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string make_id(const char* prefix, std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%06llu", prefix, static_cast<unsigned long long>(n));
  return buf;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
  send_json(res, status, {{"error", kind}, {"message", message}});
}

std::string png_bytes(const std::vector<std::uint8_t>& v) { return {v.begin(), v.end()}; }

RgbImage payload_picture(const ArtifactPayload& payload, const RgbImage& input) {
  if (const auto* g = std::get_if<GrayImage>(&payload)) return to_rgb(*g);
  if (const auto* b = std::get_if<BinaryImage>(&payload)) return to_rgb(to_gray(*b));
  if (const auto* rgb = std::get_if<RgbImage>(&payload)) return *rgb;
  if (const auto* graph = std::get_if<ExtractedGraph>(&payload)) return render_overlay(input, *graph);
  throw Error(ErrorKind::InvalidParameter, "artifact has no picture");
}

std::string encode_payload(const ArtifactPayload& payload, const RgbImage& input) {
  if (const auto* g = std::get_if<GrayImage>(&payload)) return png_bytes(encode_png(*g));
  if (const auto* b = std::get_if<BinaryImage>(&payload)) return png_bytes(encode_png(*b));
  return png_bytes(encode_png(payload_picture(payload, input)));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json param_schema(const ParamSpec& p) {
  json j = {{"name", p.name}, {"type", std::string(to_string(p.type))}, {"help", p.help}, {"odd", p.odd},
            {"min_exclusive", p.min_exclusive}};
  j["default"] = std::visit([](const auto& v) { return json(v); }, p.default_value);
  j["min"] = p.min ? json(*p.min) : json(nullptr);
  j["max"] = p.max ? json(*p.max) : json(nullptr);
  j["choices"] = p.choices;
  return j;
}

json stage_schema() {
  json out = json::array();
  for (const auto& a : algorithm_registry()) {
    json params = json::array();
    for (const auto& p : a.params) params.push_back(param_schema(p));
    out.push_back({{"id", a.id},
                   {"category", std::string(to_string(a.category))},
                   {"summary", a.summary},
                   {"reserved", a.reserved},
                   {"params", params}});
  }
  return out;
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  httplib::Server server;

  std::mutex mu;
  std::condition_variable cv;
  std::map<std::string, std::shared_ptr<const StoredImage>> images;
  std::map<std::string, std::shared_ptr<RunRecord>> runs;
  std::map<std::string, Pipeline> session_pipelines;
  std::deque<std::shared_ptr<RunRecord>> queue;
  std::uint64_t next_image = 1;
  std::uint64_t next_run = 1;
  bool stopping = false;
  bool stopped = false;
  std::vector<std::thread> workers;

  explicit Impl(ServiceOptions opts) : options(std::move(opts)) {
    int n = options.workers > 0 ? options.workers : static_cast<int>(std::thread::hardware_concurrency());
    n = std::max(n, 1);
    for (int i = 0; i < n; ++i) workers.emplace_back([this, n] { worker_loop(n > 1); });
    routes();
  }

  void worker_loop(bool single_threaded_kernels) {
    if (single_threaded_kernels) omp_set_num_threads(1);
    for (;;) {
      std::shared_ptr<RunRecord> rec;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        rec = queue.front();
        queue.pop_front();
        rec->status = "running";
      }
      execute(*rec);
    }
  }

  void execute(RunRecord& rec) {
    const auto image = rec.image;
    std::optional<std::filesystem::path> spill;
    if (options.state_dir) {
      spill = *options.state_dir / rec.id;
      std::filesystem::create_directories(*spill);
    }
    RunOptions run_options;
    run_options.capture_intermediates = true;
    run_options.on_artifact = [&](const StageArtifact& artifact, std::size_t index) {
      ArtifactEntry entry;
      entry.meta = artifact;
      entry.meta.payload = std::monostate{};
      if (spill) {
        char prefix[16];
        std::snprintf(prefix, sizeof(prefix), "%02zu_", index);
        const auto path = *spill / (prefix + artifact.name + ".png");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        const std::string bytes = encode_payload(artifact.payload, image->rgb);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        entry.file = path;
      } else {
        entry.payload = std::make_shared<const ArtifactPayload>(artifact.payload);
      }
      std::lock_guard lock(mu);
      rec.artifacts.push_back(std::move(entry));
    };
    RunResult result;
    try {
      result = run_pipeline(rec.pipeline, image->rgb, run_options);
    } catch (const std::exception& e) {
      result.status = {false, "service", e.what()};
    }
    std::optional<std::string> text;
    if (result.status.ok && result.graph) text = serialize_graph(*result.graph);
    std::lock_guard lock(mu);
    rec.timings = result.timings;
    if (result.status.ok) {
      rec.graph_text = std::move(text);
      rec.graph = std::make_shared<const ExtractedGraph>(std::move(*result.graph));
      rec.status = "done";
    } else {
      rec.error = result.status;
      rec.status = "error";
    }
  }

  std::shared_ptr<RunRecord> find_run(const std::string& id) {
    std::lock_guard lock(mu);
    const auto it = runs.find(id);
    return it == runs.end() ? nullptr : it->second;
  }

  json record_json(const RunRecord& rec) {
    json artifacts = json::array();
    for (std::size_t i = 0; i < rec.artifacts.size(); ++i) {
      const auto& m = rec.artifacts[i].meta;
      artifacts.push_back({{"index", i},
                           {"name", m.name},
                           {"category", m.category},
                           {"kind", std::string(to_string(m.kind))},
                           {"milliseconds", m.milliseconds},
                           {"url", "/api/runs/" + rec.id + "/stages/" + std::to_string(i) + "/image"}});
    }
    json timings = json::array();
    for (const auto& t : rec.timings) timings.push_back({{"name", t.name}, {"milliseconds", t.milliseconds}});
    json j = {{"run_id", rec.id},
              {"image_id", rec.image_id},
              {"pipeline", to_json(rec.pipeline)},
              {"status", rec.status},
              {"created_at", rec.created_at},
              {"expected_artifacts", rec.pipeline.stages.size() + 2},
              {"stage_artifacts", artifacts},
              {"timings", timings}};
    j["error"] = rec.error ? json{{"stage", rec.error->stage}, {"message", rec.error->message}} : json(nullptr);
    j["graph_summary"] = rec.graph ? json{{"vertex_count", rec.graph->vertices.size()},
                                          {"edge_count", rec.graph->edges.size()}}
                                   : json(nullptr);
    return j;
  }

  std::vector<Pipeline> all_pipelines() {
    std::vector<Pipeline> out = bundled_pipelines();
    std::lock_guard lock(mu);
    for (const auto& [name, p] : session_pipelines) out.push_back(p);
    return out;
  }

  void post_image(const httplib::Request& req, httplib::Response& res) {
    const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size());
    if (!has_png_signature(bytes)) return send_error(res, 415, "unsupported_media_type", "body is not a PNG image");
    std::shared_ptr<StoredImage> stored;
    try {
      stored = std::make_shared<StoredImage>(StoredImage{req.body, decode_png(bytes)});
    } catch (const Error& e) {
      return send_error(res, 415, to_string(e.kind()), e.what());
    }
    const json reply = {{"width", stored->rgb.width()}, {"height", stored->rgb.height()}};
    std::string id;
    {
      std::lock_guard lock(mu);
      id = make_id("img", next_image++);
      images[id] = std::move(stored);
    }
    json body = reply;
    body["image_id"] = id;
    send_json(res, 201, body);
  }

  std::shared_ptr<const StoredImage> images_at(const std::string& id) {
    std::lock_guard lock(mu);
    const auto it = images.find(id);
    return it == images.end() ? nullptr : it->second;
  }

  void post_pipeline(const httplib::Request& req, httplib::Response& res) {
    Pipeline p;
    try {
      p = parse_pipeline(req.body);
    } catch (const ValidationError& e) {
      return send_validation(res, e);
    } catch (const Error& e) {
      return send_json(res, 422, {{"error", to_string(e.kind())}, {"stage", nullptr}, {"message", e.what()}});
    }
    for (const auto& b : bundled_pipelines()) {
      if (b.name == p.name) return send_error(res, 409, "conflict", "'" + p.name + "' is a bundled pipeline");
    }
    {
      std::lock_guard lock(mu);
      session_pipelines[p.name] = p;
    }
    send_json(res, 201, to_json(p));
  }

  static void send_validation(httplib::Response& res, const ValidationError& e) {
    send_json(res, 422, {{"error", "ValidationError"},
                         {"stage", e.stage() ? json(*e.stage()) : json(nullptr)},
                         {"message", e.detail()}});
  }

  void post_run(const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      return send_error(res, 400, "bad_request", std::string("malformed JSON: ") + e.what());
    }
    if (!body.is_object() || !body.contains("image_id") || !body["image_id"].is_string() || !body.contains("pipeline")) {
      return send_error(res, 400, "bad_request", "body must be {\"image_id\": string, \"pipeline\": object|string}");
    }
    const auto image_id = body["image_id"].get<std::string>();
    auto image = images_at(image_id);
    if (!image) return send_error(res, 404, "not_found", "unknown image " + image_id);

    Pipeline pipeline;
    const auto& spec = body["pipeline"];
    if (spec.is_string()) {
      const auto name = spec.get<std::string>();
      bool found = false;
      for (auto& p : all_pipelines()) {
        if (p.name == name) {
          pipeline = std::move(p);
          found = true;
          break;
        }
      }
      if (!found) return send_error(res, 404, "not_found", "unknown pipeline " + name);
    } else {
      try {
        pipeline = pipeline_from_json(spec);
      } catch (const ValidationError& e) {
        return send_validation(res, e);
      } catch (const Error& e) {
        return send_json(res, 422, {{"error", to_string(e.kind())}, {"stage", nullptr}, {"message", e.what()}});
      }
    }

    auto rec = std::make_shared<RunRecord>();
    rec->image_id = image_id;
    rec->image = std::move(image);
    rec->pipeline = std::move(pipeline);
    rec->created_at = utc_now();
    {
      std::lock_guard lock(mu);
      if (stopping) return send_error(res, 503, "unavailable", "service is shutting down");
      rec->id = make_id("run", next_run++);
      runs[rec->id] = rec;
      queue.push_back(rec);
    }
    cv.notify_one();
    send_json(res, 202, {{"run_id", rec->id}});
  }

  void get_run(const httplib::Request& req, httplib::Response& res) {
    const auto rec = find_run(req.matches[1]);
    if (!rec) return send_error(res, 404, "not_found", "unknown run " + std::string(req.matches[1]));
    json j;
    {
      std::lock_guard lock(mu);
      j = record_json(*rec);
    }
    send_json(res, 200, j);
  }

  void get_stage_image(const httplib::Request& req, httplib::Response& res) {
    const auto rec = find_run(req.matches[1]);
    if (!rec) return send_error(res, 404, "not_found", "unknown run " + std::string(req.matches[1]));
    std::size_t index = 0;
    try {
      index = std::stoul(req.matches[2]);
    } catch (const std::exception&) {
      return send_error(res, 404, "not_found", "bad stage index");
    }
    std::optional<int> max_side;
    if (req.has_param("max")) {
      try {
        max_side = std::stoi(req.get_param_value("max"));
      } catch (const std::exception&) {
        max_side = 0;
      }
      if (*max_side < 1) return send_error(res, 400, "bad_request", "max must be a positive integer");
    }
    ArtifactEntry entry;
    {
      std::lock_guard lock(mu);
      if (index >= rec->pipeline.stages.size() + 2) {
        return send_error(res, 404, "not_found", "run has no stage " + std::to_string(index));
      }
      if (index >= rec->artifacts.size()) {
        return send_error(res, 409, "not_ready", "stage " + std::to_string(index) + " has not completed");
      }
      entry = rec->artifacts[index];
    }
    try {
      std::string bytes;
      if (entry.file) {
        bytes = read_file(*entry.file);
        if (max_side) {
          const std::span<const std::uint8_t> raw(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
          bytes = png_bytes(encode_png(downscale_to_fit(decode_png(raw), *max_side)));
        }
      } else if (max_side) {
        bytes = png_bytes(encode_png(downscale_to_fit(payload_picture(*entry.payload, rec->image->rgb), *max_side)));
      } else {
        bytes = encode_payload(*entry.payload, rec->image->rgb);
      }
      res.set_content(bytes, kPng);
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  }

  std::shared_ptr<RunRecord> finished_run(const httplib::Request& req, httplib::Response& res) {
    const auto rec = find_run(req.matches[1]);
    if (!rec) {
      send_error(res, 404, "not_found", "unknown run " + std::string(req.matches[1]));
      return nullptr;
    }
    std::lock_guard lock(mu);
    if (rec->status != "done") {
      send_error(res, 409, "not_ready", "run " + rec->id + " is " + rec->status);
      return nullptr;
    }
    return rec;
  }

  void get_graph(const httplib::Request& req, httplib::Response& res) {
    const auto rec = finished_run(req, res);
    if (!rec) return;
    res.set_content(*rec->graph_text, "text/plain");
  }

  void get_overlay(const httplib::Request& req, httplib::Response& res) {
    const auto rec = finished_run(req, res);
    if (!rec) return;
    ArtifactEntry entry;
    {
      std::lock_guard lock(mu);
      entry = rec->artifacts.back();
    }
    const std::string bytes =
        entry.file ? read_file(*entry.file) : encode_payload(*entry.payload, rec->image->rgb);
    res.set_content(bytes, kPng);
  }

  void get_histogram(const httplib::Request& req, httplib::Response& res) {
    const auto rec = finished_run(req, res);
    if (!rec) return;
    EdgeAttribute attr = EdgeAttribute::Length;
    int bins = 20;
    try {
      if (req.has_param("attr")) attr = parse_edge_attribute(req.get_param_value("attr"));
      if (req.has_param("bins")) bins = std::stoi(req.get_param_value("bins"));
    } catch (const std::exception& e) {
      return send_error(res, 400, "bad_request", e.what());
    }
    if (bins < 1) return send_error(res, 400, "bad_request", "bins must be >= 1");
    if (rec->graph->edges.empty()) return send_json(res, 200, {{"edges", json::array()}, {"counts", json::array()}});
    const auto h = edge_histogram(*rec->graph, attr, bins);
    send_json(res, 200, {{"edges", h.bin_edges}, {"counts", h.counts}});
  }

  void get_image(const httplib::Request& req, httplib::Response& res) {
    const auto image = images_at(req.matches[1]);
    if (!image) return send_error(res, 404, "not_found", "unknown image " + std::string(req.matches[1]));
    res.set_content(image->png, kPng);
  }

  void routes() {
    server.set_payload_max_length(512ull << 20);
    // The library default enables SO_REUSEPORT, which lets a second
    // instance bind an occupied port silently.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}, {"version", NETGRAB_VERSION}});
    });
    server.Post("/api/images", [this](const auto& req, auto& res) { post_image(req, res); });
    server.Get(R"(/api/images/([^/]+))", [this](const auto& req, auto& res) { get_image(req, res); });
    server.Get("/api/pipelines", [this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& p : all_pipelines()) out.push_back(to_json(p));
      send_json(res, 200, out);
    });
    server.Post("/api/pipelines", [this](const auto& req, auto& res) { post_pipeline(req, res); });
    server.Get("/api/stages", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, stage_schema());
    });
    server.Post("/api/runs", [this](const auto& req, auto& res) { post_run(req, res); });
    server.Get(R"(/api/runs/([^/]+))", [this](const auto& req, auto& res) { get_run(req, res); });
    server.Get(R"(/api/runs/([^/]+)/stages/([0-9]+)/image)",
               [this](const auto& req, auto& res) { get_stage_image(req, res); });
    server.Get(R"(/api/runs/([^/]+)/graph)", [this](const auto& req, auto& res) { get_graph(req, res); });
    server.Get(R"(/api/runs/([^/]+)/overlay)", [this](const auto& req, auto& res) { get_overlay(req, res); });
    server.Get(R"(/api/runs/([^/]+)/histogram)", [this](const auto& req, auto& res) { get_histogram(req, res); });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      } catch (...) {
        send_error(res, 500, "internal", "unknown error");
      }
    });
    if (options.static_dir) server.set_mount_point("/", options.static_dir->string());
  }

  void shutdown() {
    {
      std::lock_guard lock(mu);
      if (stopped) return;
      stopped = true;
    }
    server.stop();
    {
      std::lock_guard lock(mu);
      stopping = true;
      for (auto& rec : queue) {
        rec->status = "error";
        rec->error = RunStatus{false, "queued", "service shut down before the run started"};
      }
      queue.clear();
    }
    cv.notify_all();
    for (auto& t : workers) {
      if (t.joinable()) t.join();
    }
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() { impl_->shutdown(); }

bool Service::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

int Service::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->shutdown(); }

}  // namespace netgrab
