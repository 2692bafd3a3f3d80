#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "netgrab/raster.hpp"

namespace netgrab {

struct Vertex {
  int id = 0;
  /// Centroid of the pixel cluster.
  double x = 0.0;
  double y = 0.0;
  std::vector<Pixel> pixels;
  /// Artificial vertex placed on an otherwise junction-free cycle.
  bool anchor = false;
};

struct Edge {
  int id = 0;
  int u = 0;
  int v = 0;
  /// Interior skeleton pixels, ordered from the u end to the v end.
  std::vector<Pixel> path;
  double length = 0.0;
  double width = 0.0;
  int pixel_count = 0;
  /// Cluster pixels the path touches at each end, when known.
  std::optional<Pixel> u_attach;
  std::optional<Pixel> v_attach;

  bool is_loop() const noexcept { return u == v; }
  int other(int id) const noexcept { return id == u ? v : u; }
};

/// Undirected multigraph with pixel geometry. Vertices and edges are kept
/// sorted by id; ids need not be contiguous after filtering.
struct ExtractedGraph {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  int width = 0;
  int height = 0;
  /// Read back from a file: no pixel paths or clusters.
  bool weights_only = false;

  const Vertex* find_vertex(int id) const noexcept;
  const Edge* find_edge(int id) const noexcept;
};

/// Degree per vertex id; a self-loop contributes 2.
std::unordered_map<int, int> degrees(const ExtractedGraph& graph);

/// Connected components as sorted vertex-id lists, ordered by smallest id.
std::vector<std::vector<int>> graph_components(const ExtractedGraph& graph);

/// Subgraph induced by the given vertex ids (edges need both ends kept).
ExtractedGraph induced_subgraph(const ExtractedGraph& graph, const std::vector<int>& keep_ids);

/// Re-sort vertices and edges by id.
void sort_by_id(ExtractedGraph& graph);

}  // namespace netgrab
