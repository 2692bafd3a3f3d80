#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "netgrab/raster.hpp"

namespace netgrab {

/// Which side of a threshold is foreground. Comparisons are strict.
enum class Side { Above, Below };

/// Which intensity the network material has, for watershed flooding.
enum class Polarity { Dark, Light };

struct SegmentationResult {
  BinaryImage mask;
  std::string method;
  std::optional<int> chosen_threshold;
};

using Histogram = std::array<std::uint64_t, 256>;

Histogram histogram(const GrayImage& image);

/// Above: pixel > t is foreground. Below: pixel < t is foreground.
SegmentationResult constant_threshold(const GrayImage& image, int t, Side side);

/// Level t in 0..254 maximising between-class variance of {<= t} vs {> t};
/// smallest t on ties. Exact rational comparison, no floating point.
/// Throws DegenerateImage when fewer than two levels are populated.
int otsu_level(const Histogram& hist);

/// Foreground is the Otsu class on the requested side of the split:
/// Above -> {> t}, Below -> {<= t}.
SegmentationResult otsu_threshold(const GrayImage& image, Side side);

/// Local threshold = mean of the block_size^2 window (mirrored borders) - c.
/// Window sums come from an integral image, so cost does not depend on block_size.
SegmentationResult adaptive_mean_threshold(const GrayImage& image, int block_size, int c, Side side);

/// Marker-based watershed seeded from an Otsu mask: the mask eroded
/// fg_erosions times gives sure foreground, the complement of the mask
/// dilated bg_dilations times gives sure background (3x3 element). The rest
/// is claimed by priority flood over raw intensity, darkest first for Dark
/// and brightest first for Light, FIFO among equal intensities.
SegmentationResult guided_watershed(const GrayImage& image, int fg_erosions, int bg_dilations,
                                    Polarity polarity);

/// 3x3 erosion/dilation repeated `times`; pixels outside the image are ignored.
BinaryImage erode(const BinaryImage& mask, int times);
BinaryImage dilate(const BinaryImage& mask, int times);

namespace serial {

/// Running column sums + sliding row window instead of an integral image.
SegmentationResult adaptive_mean_threshold(const GrayImage& image, int block_size, int c, Side side);

}  // namespace serial
}  // namespace netgrab
