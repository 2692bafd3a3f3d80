#pragma once

#include "netgrab/raster.hpp"

namespace netgrab {

/// Mirror index i into [0, n) about the edge pixels (…2 1 | 0 1 2 … n-1 | n-2 …).
int reflect_index(int i, int n) noexcept;

/// luma = round(0.299 R + 0.587 G + 0.114 B).
GrayImage to_grayscale(const RgbImage& image);

GrayImage invert(const GrayImage& image);

/// Separable Gaussian with sigma = 0.3 * ((k - 1) / 2 - 1) + 0.8 and mirrored
/// borders. kernel_size must be odd and >= 3.
GrayImage gaussian_blur(const GrayImage& image, int kernel_size);

/// k x k median with mirrored borders, via a per-row sliding histogram.
GrayImage median_blur(const GrayImage& image, int kernel_size);

namespace serial {

GrayImage gaussian_blur(const GrayImage& image, int kernel_size);
/// Window gather + nth_element at every pixel.
GrayImage median_blur(const GrayImage& image, int kernel_size);

}  // namespace serial
}  // namespace netgrab
