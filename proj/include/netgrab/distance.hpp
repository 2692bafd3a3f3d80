#pragma once

#include "netgrab/raster.hpp"

namespace netgrab {

/// Exact squared Euclidean distance of every pixel to the nearest background
/// pixel, by separable lower envelopes of parabolas (columns, then rows).
/// Rows and columns are processed in parallel. An image without background
/// yields DistanceField::unbounded_sentinel everywhere.
DistanceField distance_transform(const BinaryImage& image);

namespace serial {

/// Single-threaded reference (Meijster's two-phase scan). Same output as the
/// parallel kernel; kept for cross-checking and benchmarking.
DistanceField distance_transform(const BinaryImage& image);

}  // namespace serial
}  // namespace netgrab
