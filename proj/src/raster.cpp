#include "netgrab/raster.hpp"

#include <algorithm>

namespace netgrab {

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::InvalidParameter, "raster dimensions must be at least 1x1");
  }
  data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> interleaved)
    : width_(width), height_(height), data_(std::move(interleaved)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::InvalidParameter, "raster dimensions must be at least 1x1");
  }
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
    throw Error(ErrorKind::InvalidParameter, "pixel buffer length does not match dimensions");
  }
}

std::size_t BinaryImage::count() const noexcept {
  const auto px = data();
  return static_cast<std::size_t>(std::count_if(px.begin(), px.end(), [](auto v) { return v != 0; }));
}

RgbImage to_rgb(const GrayImage& image) {
  RgbImage out(image.width(), image.height());
  auto dst = out.data();
  const auto src = image.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
  }
  return out;
}

GrayImage to_gray(const BinaryImage& image) {
  GrayImage out(image.width(), image.height());
  auto dst = out.data();
  const auto src = image.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 255 : 0;
  return out;
}

RgbImage downscale_to_fit(const RgbImage& image, int max_side) {
  if (max_side < 1) throw Error(ErrorKind::InvalidParameter, "max side must be >= 1");
  const int w = image.width();
  const int h = image.height();
  const int longest = std::max(w, h);
  if (longest <= max_side) return image;
  const auto scaled = [&](int n) {
    return std::max(1, static_cast<int>((static_cast<std::int64_t>(n) * max_side + longest / 2) / longest));
  };
  const int ow = scaled(w);
  const int oh = scaled(h);
  RgbImage out(ow, oh);
  for (int oy = 0; oy < oh; ++oy) {
    const int y0 = static_cast<int>(static_cast<std::int64_t>(oy) * h / oh);
    const int y1 = std::max(y0 + 1, static_cast<int>(static_cast<std::int64_t>(oy + 1) * h / oh));
    for (int ox = 0; ox < ow; ++ox) {
      const int x0 = static_cast<int>(static_cast<std::int64_t>(ox) * w / ow);
      const int x1 = std::max(x0 + 1, static_cast<int>(static_cast<std::int64_t>(ox + 1) * w / ow));
      std::uint64_t r = 0, g = 0, b = 0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          const Rgb c = image.get(x, y);
          r += c.r;
          g += c.g;
          b += c.b;
        }
      }
      const std::uint64_t n = static_cast<std::uint64_t>(x1 - x0) * static_cast<std::uint64_t>(y1 - y0);
      out.set(ox, oy, {static_cast<std::uint8_t>((r + n / 2) / n), static_cast<std::uint8_t>((g + n / 2) / n),
                       static_cast<std::uint8_t>((b + n / 2) / n)});
    }
  }
  return out;
}

}  // namespace netgrab
