#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "netgrab/graph.hpp"
#include "netgrab/raster.hpp"
#include "netgrab/registry.hpp"

namespace netgrab {

struct StageDescriptor {
  Category category = Category::Preprocessing;
  std::string algorithm;
  /// Validated parameters with defaults filled in.
  ParamMap params;

  std::int64_t int_param(const std::string& key) const;
  double real_param(const std::string& key) const;
  const std::string& string_param(const std::string& key) const;
};

/// Preprocessing*, exactly one segmentation, exactly one thinning, then
/// graph filters*. Graph detection always runs after thinning.
struct Pipeline {
  std::string name;
  std::vector<StageDescriptor> stages;
};

/// Parse and validate pipeline JSON text. Throws Error(ParseError) for
/// malformed documents or unknown keys and ValidationError for order,
/// algorithm or parameter problems.
Pipeline parse_pipeline(std::string_view text);
Pipeline pipeline_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Pipeline& pipeline);
/// "a -> b -> c"
std::string stage_summary(const Pipeline& pipeline);

Pipeline load_pipeline_file(const std::filesystem::path& path);

/// Directories searched for bundled pipelines: the built-in directory, then
/// each entry of NETGRAB_PIPELINE_DIR (':'-separated).
std::vector<std::filesystem::path> pipeline_search_path();
/// Bundled pipelines sorted by name; the first definition of a name wins.
std::vector<Pipeline> bundled_pipelines();
std::optional<Pipeline> find_bundled_pipeline(std::string_view name);

enum class ArtifactKind { Image, Graph };

std::string_view to_string(ArtifactKind k) noexcept;

using ArtifactPayload = std::variant<std::monostate, GrayImage, BinaryImage, RgbImage, ExtractedGraph>;

struct StageArtifact {
  std::string name;      // algorithm id, "graph_detection" or "overlay"
  std::string category;  // registry category, "detection" or "overlay"
  ArtifactKind kind = ArtifactKind::Image;
  double milliseconds = 0.0;
  /// Empty when intermediates are not captured (final graph/overlay are
  /// always available on RunResult).
  ArtifactPayload payload;
};

struct StageTiming {
  std::string name;
  double milliseconds = 0.0;
};

struct RunStatus {
  bool ok = true;
  std::string stage;
  std::string message;
};

struct RunResult {
  RgbImage input{1, 1};
  /// One entry per executed stage, then graph_detection, then overlay.
  std::vector<StageArtifact> artifacts;
  /// Fine-grained timings, one line per pipeline element.
  std::vector<StageTiming> timings;
  std::optional<ExtractedGraph> graph;
  std::optional<RgbImage> overlay;
  RunStatus status;
};

struct RunOptions {
  bool capture_intermediates = true;
  /// Called after each artifact is appended, with its index.
  std::function<void(const StageArtifact&, std::size_t)> on_artifact;
};

RunResult run_pipeline(const Pipeline& pipeline, const RgbImage& image, const RunOptions& options = {});

/// Render artifact `index` as an RGB picture: images as-is (binary as
/// black/white), graph snapshots as overlays on the run input.
std::optional<RgbImage> artifact_picture(const RunResult& result, std::size_t index);

/// "<name> <ms>" per line, milliseconds with three decimals.
std::string format_timings(const std::vector<StageTiming>& timings);

struct OutputOptions {
  bool overlay = true;
  bool intermediates = false;
};

/// graph.txt, overlay.png, timings.txt and NN_<stage>.png intermediates.
/// graph.txt and overlay.png are only written for successful runs.
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir, const OutputOptions& options);

}  // namespace netgrab
