#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "netgrab/graph.hpp"
#include "netgrab/raster.hpp"

namespace netgrab {

// Graph file v1 (UTF-8, LF line endings):
//   netgraph v1 <width> <height>
//   node <id> <x> <y>
//   edge <id> <u> <v> length=<l> width=<w> pixels=<n>
// Reals carry exactly four decimals, rounded half away from zero. Lines
// starting with '#' are comments. Pixel paths are not stored.

/// Fixed four-decimal rendering used by the file format.
std::string format_fixed4(double value);

std::string serialize_graph(const ExtractedGraph& graph);
ExtractedGraph parse_graph(std::string_view text);

void write_graph(const ExtractedGraph& graph, const std::filesystem::path& path);
ExtractedGraph read_graph(const std::filesystem::path& path);

inline constexpr Rgb kEdgeColor{255, 0, 0};
inline constexpr Rgb kVertexColor{0, 0, 255};

/// Side of the square drawn for a vertex on a width x height image.
int vertex_marker_side(int width, int height) noexcept;

/// Edges as red strokes along their paths, thickness round(width) (min 1),
/// then vertices as filled blue squares centred on their centroids. Edges
/// without stored paths are drawn as straight segments between centroids.
RgbImage render_overlay(const RgbImage& base, const ExtractedGraph& graph);

enum class EdgeAttribute { Length, Width, PixelCount };

struct EdgeHistogram {
  std::vector<double> bin_edges;  // bins + 1 boundaries
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the last bin is closed on the right.
/// A degenerate range yields one bin holding every edge.
EdgeHistogram edge_histogram(const ExtractedGraph& graph, EdgeAttribute attribute, int bin_count);

EdgeAttribute parse_edge_attribute(std::string_view name);

}  // namespace netgrab
