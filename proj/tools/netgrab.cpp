#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "netgrab/batch.hpp"
#include "netgrab/pipeline.hpp"
#include "netgrab/png_io.hpp"
#include "netgrab/service.hpp"

namespace fs = std::filesystem;
using namespace netgrab;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError {
  std::string message;
};

void print_schema(std::ostream& out) {
  out << "Pipeline file format (JSON):\n"
         "  {\"name\": \"...\", \"stages\": [{\"category\": \"...\", \"algorithm\": \"...\", \"params\": {...}}]}\n"
         "Stage order: preprocessing*, exactly one segmentation, exactly one thinning, graph_filter*.\n"
         "Available stages:\n";
  for (const auto& a : algorithm_registry()) {
    if (a.reserved) continue;
    out << "  " << to_string(a.category) << "/" << a.id << ": " << a.summary << "\n";
    for (const auto& p : a.params) {
      out << "      " << p.name << " (" << to_string(p.type) << ", default ";
      std::visit([&](const auto& v) { out << nlohmann::json(v).dump(); }, p.default_value);
      out << "): " << p.help << "\n";
    }
  }
}

Pipeline resolve_pipeline(const std::string& spec) {
  std::error_code ec;
  if (fs::is_regular_file(spec, ec)) {
    try {
      return load_pipeline_file(spec);
    } catch (const Error& e) {
      throw UsageError{spec + ": " + e.what()};
    }
  }
  if (auto p = find_bundled_pipeline(spec)) return std::move(*p);
  throw UsageError{"no pipeline file or bundled pipeline named '" + spec + "'"};
}

int usage_failure(const UsageError& e) {
  std::cerr << "error: " << e.message << "\n\n";
  print_schema(std::cerr);
  return kUsage;
}

struct RunArgs {
  std::string pipeline;
  std::string input;
  std::string out;
  bool intermediates = false;
  bool no_overlay = false;
};

int cmd_run(const RunArgs& args) {
  const Pipeline pipeline = resolve_pipeline(args.pipeline);
  if (!fs::is_regular_file(args.input)) throw UsageError{"input file not found: " + args.input};
  RgbImage image{1, 1};
  try {
    image = load_png(args.input);
  } catch (const Error& e) {
    std::cerr << "error: load: " << e.what() << "\n";
    return kFailed;
  }
  const RunResult result = run_pipeline(pipeline, image, {args.intermediates, {}});
  try {
    write_run_outputs(result, args.out, {!args.no_overlay, args.intermediates});
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  if (!result.status.ok) {
    std::cerr << "error: " << result.status.stage << ": " << result.status.message << "\n";
    return kFailed;
  }
  return kOk;
}

struct BatchArgs {
  std::string pipeline;
  std::string input_dir;
  std::string out_dir;
  int jobs = 1;
  bool intermediates = false;
};

int cmd_batch(const BatchArgs& args) {
  const Pipeline pipeline = resolve_pipeline(args.pipeline);
  BatchReport report;
  try {
    report = run_batch(pipeline, args.input_dir, args.out_dir, args.jobs, {true, args.intermediates});
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  for (const auto& e : report.entries) {
    if (e.ok) {
      std::printf("OK %s %.3f\n", e.name.c_str(), e.milliseconds);
    } else {
      std::printf("ERR %s %s: %s\n", e.name.c_str(), e.stage.c_str(), e.message.c_str());
    }
  }
  std::printf("%zu ok, %zu failed, %.3f ms total\n", report.entries.size() - report.failures(), report.failures(),
              report.total_milliseconds);
  return report.failures() == 0 ? kOk : kFailed;
}

int cmd_pipelines(bool as_json) {
  std::vector<Pipeline> pipelines;
  try {
    pipelines = bundled_pipelines();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  if (as_json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : pipelines) {
      auto j = to_json(p);
      j["summary"] = stage_summary(p);
      out.push_back(j);
    }
    std::cout << out.dump(2) << "\n";
    return kOk;
  }
  for (const auto& p : pipelines) std::cout << p.name << "  " << stage_summary(p) << "\n";
  return kOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8315;
  std::string static_dir;
  std::string state_dir;
  int workers = 0;
};

int cmd_serve(const ServeArgs& args) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ServiceOptions options;
  options.workers = args.workers;
  if (!args.static_dir.empty()) options.static_dir = args.static_dir;
  if (!args.state_dir.empty()) options.state_dir = args.state_dir;
  Service service(options);
  if (!service.bind(args.host, args.port)) {
    std::cerr << "error: cannot bind " << args.host << ":" << args.port << "\n";
    return kFailed;
  }
  std::atomic<bool> signalled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    service.stop();
  });
  std::cout << "listening on http://" << args.host << ":" << args.port << std::endl;
  service.run();
  service.stop();
  if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netgrab: extract weighted graphs from images of network-like structures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NETGRAB_VERSION);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Process one image");
  run->add_option("--pipeline", run_args.pipeline, "pipeline file or bundled pipeline name")->required();
  run->add_option("--input", run_args.input, "input PNG")->required();
  run->add_option("--out", run_args.out, "output directory")->required();
  run->add_flag("--intermediates", run_args.intermediates, "write numbered stage images");
  run->add_flag("--no-overlay", run_args.no_overlay, "skip overlay.png");

  BatchArgs batch_args;
  auto* batch = app.add_subcommand("batch", "Process every PNG in a directory");
  batch->add_option("--pipeline", batch_args.pipeline, "pipeline file or bundled pipeline name")->required();
  batch->add_option("--input-dir", batch_args.input_dir, "directory of input PNGs")
      ->required()
      ->check(CLI::ExistingDirectory);
  batch->add_option("--out-dir", batch_args.out_dir, "output directory")->required();
  batch->add_option("--jobs", batch_args.jobs, "images processed concurrently")->check(CLI::PositiveNumber);
  batch->add_flag("--intermediates", batch_args.intermediates, "write numbered stage images");

  bool as_json = false;
  auto* list = app.add_subcommand("pipelines", "List bundled pipelines");
  list->add_flag("--json", as_json, "print as a JSON array");

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", serve_args.host, "listen address");
  serve->add_option("--port", serve_args.port, "listen port")->check(CLI::Range(0, 65535));
  serve->add_option("--static-dir", serve_args.static_dir, "UI assets served at /")->check(CLI::ExistingDirectory);
  serve->add_option("--state-dir", serve_args.state_dir, "spill stage artifacts to this directory");
  serve->add_option("--workers", serve_args.workers, "run worker threads (0 = hardware concurrency)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (run->parsed() || batch->parsed()) print_schema(std::cerr);
    return kUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (batch->parsed()) return cmd_batch(batch_args);
    if (list->parsed()) return cmd_pipelines(as_json);
    if (serve->parsed()) return cmd_serve(serve_args);
  } catch (const UsageError& e) {
    return usage_failure(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
