#pragma once

#include <string>
#include <vector>

#include "netgrab/graph.hpp"
#include "netgrab/raster.hpp"
#include "netgrab/thinning.hpp"

namespace netgrab {

/// Number of 8-neighbours of (x, y) that are set.
int skeleton_degree(const BinaryImage& skeleton, int x, int y) noexcept;

/// Vertex candidates are skeleton pixels whose 8-neighbour count is not 2.
/// 8-connected clusters of candidates become single vertices, numbered in
/// raster order of each cluster's first pixel.
std::vector<Vertex> detect_vertices(const Skeleton& skeleton);

/// Walk the degree-2 pixel chains leaving each cluster until another (or the
/// same) cluster is reached. Chains not touching any cluster are closed
/// cycles; each gets an anchor vertex at its raster-first pixel and becomes
/// a self-loop. Edges are numbered by (min end, max end, first path pixel).
/// Lengths and widths are left at zero; see compute_weights.
ExtractedGraph trace_edges(const Skeleton& skeleton, const std::vector<Vertex>& vertices);

/// length: 1 per orthogonal step and sqrt(2) per diagonal step along the
/// path, including the step onto each end cluster.
/// width: mean over path pixels of 2 * sqrt(sq_dist) - 1.
ExtractedGraph compute_weights(ExtractedGraph graph, const DistanceField& distance);

/// Empty string when vertex clusters and edge paths partition the skeleton
/// foreground exactly; otherwise a description of the first violation.
std::string check_pixel_partition(const BinaryImage& skeleton, const ExtractedGraph& graph);

/// Length of one step between 8-adjacent pixels.
double step_length(Pixel a, Pixel b) noexcept;

}  // namespace netgrab
