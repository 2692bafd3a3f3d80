#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace netgrab {

struct ServiceOptions {
  /// Run worker threads; 0 means hardware concurrency.
  int workers = 0;
  /// When set, stage artifacts are written here as PNG instead of being
  /// held in memory.
  std::optional<std::filesystem::path> state_dir;
  /// Served at "/" when set.
  std::optional<std::filesystem::path> static_dir;
};

/// HTTP API for uploading images, submitting pipeline runs and fetching
/// their per-stage artifacts. Runs execute on a FIFO worker pool.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Returns false when the address cannot be bound.
  bool bind(const std::string& host, int port);
  /// Bind to an ephemeral port and return it, or -1 on failure.
  int bind_any_port(const std::string& host);
  /// Serve until stop() is called. Requires a successful bind.
  void run();
  /// Stop accepting requests and wait for running extractions to finish.
  /// Runs still queued are marked as errors.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace netgrab
