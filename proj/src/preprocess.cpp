#include "netgrab/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace netgrab {
namespace {

void check_kernel(int kernel_size, const char* what) {
  if (kernel_size < 3 || kernel_size % 2 == 0) {
    throw Error(ErrorKind::InvalidParameter,
                std::string(what) + " kernel_size must be odd and >= 3, got " + std::to_string(kernel_size));
  }
}

std::vector<double> gaussian_weights(int kernel_size) {
  const int r = kernel_size / 2;
  const double sigma = 0.3 * ((kernel_size - 1) * 0.5 - 1.0) + 0.8;
  std::vector<double> w(static_cast<std::size_t>(kernel_size));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    w[static_cast<std::size_t>(i + r)] = v;
    sum += v;
  }
  for (double& v : w) v /= sum;
  return w;
}

void blur_row_h(const GrayImage& image, const std::vector<double>& weights, int y,
                std::span<double> out) {
  const int w = image.width();
  const int r = static_cast<int>(weights.size()) / 2;
  const auto src = image.row(y);
  for (int x = 0; x < w; ++x) {
    double acc = 0.0;
    for (int k = -r; k <= r; ++k) {
      acc += weights[static_cast<std::size_t>(k + r)] * src[static_cast<std::size_t>(reflect_index(x + k, w))];
    }
    out[static_cast<std::size_t>(x)] = acc;
  }
}

void blur_row_v(const std::vector<double>& horiz, int w, int h, const std::vector<double>& weights,
                int y, std::span<std::uint8_t> out) {
  const int r = static_cast<int>(weights.size()) / 2;
  for (int x = 0; x < w; ++x) {
    double acc = 0.0;
    for (int k = -r; k <= r; ++k) {
      const auto yy = static_cast<std::size_t>(reflect_index(y + k, h));
      acc += weights[static_cast<std::size_t>(k + r)] * horiz[yy * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
    }
    out[static_cast<std::size_t>(x)] = clamp_u8(acc);
  }
}

}  // namespace

int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

GrayImage to_grayscale(const RgbImage& image) {
  GrayImage out(image.width(), image.height());
  const auto src = image.data();
  auto dst = out.data();
  const auto n = static_cast<std::ptrdiff_t>(dst.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto p = static_cast<std::size_t>(i);
    // Integer weights in thousandths; +500 rounds half away for non-negatives.
    const unsigned luma = 299u * src[3 * p] + 587u * src[3 * p + 1] + 114u * src[3 * p + 2];
    dst[p] = static_cast<std::uint8_t>(std::min(255u, (luma + 500u) / 1000u));
  }
  return out;
}

GrayImage invert(const GrayImage& image) {
  GrayImage out(image.width(), image.height());
  const auto src = image.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<std::uint8_t>(255 - src[i]);
  return out;
}

GrayImage gaussian_blur(const GrayImage& image, int kernel_size) {
  check_kernel(kernel_size, "gaussian_blur");
  const auto weights = gaussian_weights(kernel_size);
  const int w = image.width();
  const int h = image.height();
  std::vector<double> horiz(image.size());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    blur_row_h(image, weights, y,
               std::span<double>(horiz).subspan(static_cast<std::size_t>(y) * static_cast<std::size_t>(w),
                                                static_cast<std::size_t>(w)));
  }
  GrayImage out(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) blur_row_v(horiz, w, h, weights, y, out.row(y));
  return out;
}

GrayImage median_blur(const GrayImage& image, int kernel_size) {
  check_kernel(kernel_size, "median_blur");
  const int w = image.width();
  const int h = image.height();
  const int r = kernel_size / 2;
  const int rank = kernel_size * kernel_size / 2;  // 0-based rank of the median
  GrayImage out(w, h);

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    std::array<int, 256> hist{};
    std::array<int, 16> coarse{};  // 16 buckets of 16 levels
    auto add = [&](int x, int delta) {
      for (int k = -r; k <= r; ++k) {
        const std::uint8_t v = image(reflect_index(x, w), reflect_index(y + k, h));
        hist[v] += delta;
        coarse[v >> 4] += delta;
      }
    };
    for (int k = -r; k <= r; ++k) add(k, +1);
    auto dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      int seen = 0;
      int bucket = 0;
      while (seen + coarse[static_cast<std::size_t>(bucket)] <= rank) seen += coarse[static_cast<std::size_t>(bucket++)];
      int level = bucket << 4;
      while (seen + hist[static_cast<std::size_t>(level)] <= rank) seen += hist[static_cast<std::size_t>(level++)];
      dst[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(level);
      if (x + 1 < w) {
        add(x - r, -1);
        add(x + r + 1, +1);
      }
    }
  }
  return out;
}

namespace serial {

GrayImage gaussian_blur(const GrayImage& image, int kernel_size) {
  check_kernel(kernel_size, "gaussian_blur");
  const auto weights = gaussian_weights(kernel_size);
  const int w = image.width();
  const int h = image.height();
  std::vector<double> horiz(image.size());
  for (int y = 0; y < h; ++y) {
    blur_row_h(image, weights, y,
               std::span<double>(horiz).subspan(static_cast<std::size_t>(y) * static_cast<std::size_t>(w),
                                                static_cast<std::size_t>(w)));
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) blur_row_v(horiz, w, h, weights, y, out.row(y));
  return out;
}

GrayImage median_blur(const GrayImage& image, int kernel_size) {
  check_kernel(kernel_size, "median_blur");
  const int w = image.width();
  const int h = image.height();
  const int r = kernel_size / 2;
  GrayImage out(w, h);
  std::vector<std::uint8_t> window;
  window.reserve(static_cast<std::size_t>(kernel_size) * static_cast<std::size_t>(kernel_size));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      window.clear();
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          window.push_back(image(reflect_index(x + dx, w), reflect_index(y + dy, h)));
        }
      }
      const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      out(x, y) = *mid;
    }
  }
  return out;
}

}  // namespace serial
}  // namespace netgrab
