#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "netgrab/error.hpp"

namespace netgrab {

// Coordinates everywhere: x = column, y = row, origin top-left.
struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Offsets of the 8 neighbours, clockwise from north: N, NE, E, SE, S, SW, W, NW.
inline constexpr std::array<Pixel, 8> kNeighbors8 = {{
    {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1},
}};

inline constexpr std::array<Pixel, 4> kNeighbors4 = {{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

/// Round half away from zero. The single rounding rule used by every stage.
inline double round_half_away(double v) { return std::round(v); }

inline std::uint8_t clamp_u8(double v) {
  const double r = round_half_away(v);
  return static_cast<std::uint8_t>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
}

/// Fixed-size row-major 2D grid. Base for all single-channel raster kinds.
template <typename T>
class Plane {
 public:
  using value_type = T;

  Plane(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Plane(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw Error(ErrorKind::InvalidParameter, "pixel buffer length does not match dimensions");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }
  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }

  /// Value at (x, y), or `outside` for coordinates off the grid.
  T at_or(int x, int y, T outside) const noexcept {
    return contains(x, y) ? data_[index(x, y)] : outside;
  }

  std::span<const T> data() const noexcept { return data_; }
  std::span<T> data() noexcept { return data_; }
  std::span<const T> row(int y) const noexcept {
    return std::span<const T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }
  std::span<T> row(int y) noexcept {
    return std::span<T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  bool same_size(int w, int h) const noexcept { return w == width_ && h == height_; }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorKind::InvalidParameter, "raster dimensions must be at least 1x1");
    }
  }

  int width_;
  int height_;
  std::vector<T> data_;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

class RgbImage {
 public:
  RgbImage(int width, int height, Rgb fill = {});
  RgbImage(int width, int height, std::vector<std::uint8_t> interleaved);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  Rgb get(int x, int y) const noexcept {
    const std::size_t i = offset(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set(int x, int y, Rgb c) noexcept {
    const std::size_t i = offset(x, y);
    data_[i] = c.r;
    data_[i + 1] = c.g;
    data_[i + 2] = c.b;
  }

  /// Interleaved R,G,B bytes, row-major.
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

class GrayImage : public Plane<std::uint8_t> {
 public:
  using Plane::Plane;
};

/// Foreground = 1, background = 0.
class BinaryImage : public Plane<std::uint8_t> {
 public:
  using Plane::Plane;

  std::size_t count() const noexcept;
};

class LabelImage : public Plane<std::int32_t> {
 public:
  LabelImage(int width, int height) : Plane(width, height, 0) {}

  int component_count = 0;
};

/// Squared Euclidean distance to the nearest background pixel (0 on background).
class DistanceField : public Plane<std::uint32_t> {
 public:
  using Plane::Plane;

  /// Value stored everywhere when the source image has no background at all.
  static std::uint32_t unbounded_sentinel(int width, int height) noexcept {
    return static_cast<std::uint32_t>(width) * static_cast<std::uint32_t>(width) +
           static_cast<std::uint32_t>(height) * static_cast<std::uint32_t>(height);
  }
};

/// Replicate a grayscale image into RGB.
RgbImage to_rgb(const GrayImage& image);
/// Foreground = 255, background = 0.
GrayImage to_gray(const BinaryImage& image);
/// Box-filter downscale so the longer side is at most `max_side`; images
/// already within the bound are returned unchanged.
RgbImage downscale_to_fit(const RgbImage& image, int max_side);

}  // namespace netgrab
