#pragma once

#include "netgrab/graph.hpp"

namespace netgrab {

enum class SizeMode { Absolute, Relative };

/// Drop components with fewer vertices than `threshold` (Absolute) or than
/// threshold * largest component size (Relative). Survivors are untouched.
ExtractedGraph filter_small_components(const ExtractedGraph& graph, SizeMode mode, double threshold);

/// Keep the component with the most vertices; ties go to the component
/// holding the smallest vertex id. Throws EmptyGraph on an empty graph.
ExtractedGraph keep_largest_component(const ExtractedGraph& graph);

/// 2-core: repeatedly delete vertices of degree < 2 (self-loops count 2).
ExtractedGraph prune_dead_ends(const ExtractedGraph& graph);

/// Collapse groups of vertices chained by centroid distance <= radius into
/// one vertex at the mean member centroid, id = smallest member id. Edges
/// inside a group are removed (their pixels join the merged cluster); other
/// edges are re-attached unchanged. Repeats until no two vertices are within
/// radius, which makes the filter idempotent.
ExtractedGraph merge_close_junctions(const ExtractedGraph& graph, double radius);

/// Splice out every non-anchor vertex of degree exactly 2 by concatenating
/// its two edges through the vertex's cluster. A vertex left holding only a
/// self-loop becomes an anchor.
ExtractedGraph smooth_filtered_ends(const ExtractedGraph& graph);

}  // namespace netgrab
