#include "netgrab/segment.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <vector>

#include "netgrab/preprocess.hpp"

namespace netgrab {
namespace {

using u128 = unsigned __int128;

void check_block(int block_size) {
  if (block_size < 3 || block_size % 2 == 0) {
    throw Error(ErrorKind::InvalidParameter, "block_size must be odd and >= 3");
  }
}

// Between-class variance up to the constant factor 1/N^2, as the fraction
// num/den with num = X^2 and den = n0 * n1.
struct Score {
  u128 num = 0;
  u128 den = 1;
};

bool greater(const Score& a, const Score& b) {
  const u128 qa = a.num / a.den;
  const u128 qb = b.num / b.den;
  if (qa != qb) return qa > qb;
  // remainders < den < 2^64, so the cross products fit.
  return (a.num % a.den) * b.den > (b.num % b.den) * a.den;
}

template <typename Sum>
std::vector<Sum> padded_integral(const GrayImage& image, int r) {
  const int w = image.width();
  const int h = image.height();
  const int pw = w + 2 * r;
  const int ph = h + 2 * r;
  const std::size_t stride = static_cast<std::size_t>(pw) + 1;
  std::vector<Sum> sums(stride * (static_cast<std::size_t>(ph) + 1), 0);
  std::vector<int> col_src(static_cast<std::size_t>(pw));
  for (int i = 0; i < pw; ++i) col_src[static_cast<std::size_t>(i)] = reflect_index(i - r, w);

  // Row prefix sums, independent per row.
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ph; ++j) {
    const auto src = image.row(reflect_index(j - r, h));
    Sum* dst = sums.data() + (static_cast<std::size_t>(j) + 1) * stride;
    Sum acc = 0;
    for (int i = 0; i < pw; ++i) {
      acc += src[static_cast<std::size_t>(col_src[static_cast<std::size_t>(i)])];
      dst[i + 1] = acc;
    }
  }
  // Column prefix sums, independent per column.
#pragma omp parallel for schedule(static)
  for (int i = 1; i <= pw; ++i) {
    for (int j = 2; j <= ph; ++j) {
      sums[static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(i)] +=
          sums[static_cast<std::size_t>(j - 1) * stride + static_cast<std::size_t>(i)];
    }
  }
  return sums;
}

bool local_foreground(std::int64_t pixel, std::int64_t window_sum, std::int64_t area, int c, Side side) {
  // pixel > sum/area - c  <=>  (pixel + c) * area > sum
  const std::int64_t lhs = (pixel + c) * area;
  return side == Side::Above ? lhs > window_sum : lhs < window_sum;
}

template <typename Sum>
BinaryImage adaptive_with(const GrayImage& image, int block_size, int c, Side side) {
  const int r = block_size / 2;
  const auto sums = padded_integral<Sum>(image, r);
  const int w = image.width();
  const int h = image.height();
  const std::size_t stride = static_cast<std::size_t>(w + 2 * r) + 1;
  const std::int64_t area = std::int64_t{block_size} * block_size;
  BinaryImage mask(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const Sum* top = sums.data() + static_cast<std::size_t>(y) * stride;
    const Sum* bottom = sums.data() + static_cast<std::size_t>(y + block_size) * stride;
    const auto src = image.row(y);
    auto dst = mask.row(y);
    for (int x = 0; x < w; ++x) {
      // Unsigned wrap-around cancels as long as the true sum fits in Sum.
      const Sum s = bottom[x + block_size] - top[x + block_size] - bottom[x] + top[x];
      dst[static_cast<std::size_t>(x)] =
          local_foreground(src[static_cast<std::size_t>(x)], static_cast<std::int64_t>(s), area, c, side) ? 1 : 0;
    }
  }
  return mask;
}

// One 3x3 min/max pass, separable; out-of-image pixels are skipped.
BinaryImage morph_step(const BinaryImage& in, bool erosion) {
  const int w = in.width();
  const int h = in.height();
  BinaryImage tmp(w, h);
  BinaryImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = in(x, y);
      if (x > 0) v = erosion ? std::min(v, in(x - 1, y)) : std::max(v, in(x - 1, y));
      if (x + 1 < w) v = erosion ? std::min(v, in(x + 1, y)) : std::max(v, in(x + 1, y));
      tmp(x, y) = v;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = tmp(x, y);
      if (y > 0) v = erosion ? std::min(v, tmp(x, y - 1)) : std::max(v, tmp(x, y - 1));
      if (y + 1 < h) v = erosion ? std::min(v, tmp(x, y + 1)) : std::max(v, tmp(x, y + 1));
      out(x, y) = v;
    }
  }
  return out;
}

// 256 FIFO buckets: pops lowest priority first, insertion order within a level.
class BucketQueue {
 public:
  struct Entry {
    std::uint32_t index;
    std::uint8_t label;
  };

  void push(std::uint8_t priority, Entry e) {
    buckets_[priority].push_back(e);
    lowest_ = std::min<int>(lowest_, priority);
    ++size_;
  }
  bool empty() const noexcept { return size_ == 0; }
  Entry pop() {
    while (buckets_[static_cast<std::size_t>(lowest_)].empty()) ++lowest_;
    auto& bucket = buckets_[static_cast<std::size_t>(lowest_)];
    const Entry e = bucket.front();
    bucket.pop_front();
    --size_;
    return e;
  }

 private:
  std::array<std::deque<Entry>, 256> buckets_;
  int lowest_ = 255;
  std::size_t size_ = 0;
};

}  // namespace

Histogram histogram(const GrayImage& image) {
  Histogram hist{};
  for (const auto v : image.data()) ++hist[v];
  return hist;
}

SegmentationResult constant_threshold(const GrayImage& image, int t, Side side) {
  if (t < 0 || t > 255) throw Error(ErrorKind::InvalidParameter, "threshold must be in 0..255");
  BinaryImage mask(image.width(), image.height());
  const auto src = image.data();
  auto dst = mask.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = (side == Side::Above ? src[i] > t : src[i] < t) ? 1 : 0;
  }
  return {std::move(mask), "constant_threshold", t};
}

int otsu_level(const Histogram& hist) {
  const auto populated = std::count_if(hist.begin(), hist.end(), [](auto n) { return n > 0; });
  if (populated < 2) {
    throw Error(ErrorKind::DegenerateImage, "Otsu threshold needs at least two distinct gray levels");
  }
  std::uint64_t total = 0;
  std::uint64_t total_sum = 0;
  for (int i = 0; i < 256; ++i) {
    total += hist[static_cast<std::size_t>(i)];
    total_sum += hist[static_cast<std::size_t>(i)] * static_cast<std::uint64_t>(i);
  }

  const bool exact = total <= (std::uint64_t{1} << 26);
  int best_t = 0;
  Score best{};
  long double best_approx = -1.0L;
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  for (int t = 0; t <= 254; ++t) {
    n0 += hist[static_cast<std::size_t>(t)];
    s0 += hist[static_cast<std::size_t>(t)] * static_cast<std::uint64_t>(t);
    const std::uint64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;  // variance 0, never beats a split
    // X = s0 * n1 - s1 * n0 = s0 * N - S * n0
    const __int128 x = static_cast<__int128>(s0) * total - static_cast<__int128>(total_sum) * n0;
    const u128 ax = static_cast<u128>(x < 0 ? -x : x);
    if (exact) {
      const Score score{ax * ax, static_cast<u128>(n0) * n1};
      if (best.num == 0 || greater(score, best)) {
        best = score;
        best_t = t;
      }
    } else {
      const long double v = static_cast<long double>(ax) * static_cast<long double>(ax) /
                            (static_cast<long double>(n0) * static_cast<long double>(n1));
      if (v > best_approx) {
        best_approx = v;
        best_t = t;
      }
    }
  }
  return best_t;
}

SegmentationResult otsu_threshold(const GrayImage& image, Side side) {
  const int t = otsu_level(histogram(image));
  // {<= t} is the same set as the strict "below t + 1" rule.
  auto result = side == Side::Above ? constant_threshold(image, t, Side::Above)
                                    : constant_threshold(image, t + 1, Side::Below);
  result.method = "otsu_threshold";
  result.chosen_threshold = t;
  return result;
}

SegmentationResult adaptive_mean_threshold(const GrayImage& image, int block_size, int c, Side side) {
  check_block(block_size);
  // 32-bit sums are exact modulo 2^32 while 255 * block^2 < 2^32.
  BinaryImage mask = std::int64_t{block_size} * block_size * 255 < (std::int64_t{1} << 32)
                         ? adaptive_with<std::uint32_t>(image, block_size, c, side)
                         : adaptive_with<std::uint64_t>(image, block_size, c, side);
  return {std::move(mask), "adaptive_mean_threshold", std::nullopt};
}

BinaryImage erode(const BinaryImage& mask, int times) {
  BinaryImage out = mask;
  for (int i = 0; i < times; ++i) out = morph_step(out, true);
  return out;
}

BinaryImage dilate(const BinaryImage& mask, int times) {
  BinaryImage out = mask;
  for (int i = 0; i < times; ++i) out = morph_step(out, false);
  return out;
}

SegmentationResult guided_watershed(const GrayImage& image, int fg_erosions, int bg_dilations,
                                    Polarity polarity) {
  if (fg_erosions < 1 || bg_dilations < 1) {
    throw Error(ErrorKind::InvalidParameter, "fg_erosions and bg_dilations must be >= 1");
  }
  const int w = image.width();
  const int h = image.height();
  const auto otsu = otsu_threshold(image, polarity == Polarity::Dark ? Side::Below : Side::Above);
  const BinaryImage sure_fg = erode(otsu.mask, fg_erosions);
  if (sure_fg.count() == 0) {
    throw Error(ErrorKind::EmptyMarkers, "erosion removed every foreground seed; lower fg_erosions");
  }
  const BinaryImage grown = dilate(otsu.mask, bg_dilations);

  constexpr std::uint8_t kUnknown = 0;
  constexpr std::uint8_t kForeground = 1;
  constexpr std::uint8_t kBackground = 2;
  Plane<std::uint8_t> label(w, h, kUnknown);
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (sure_fg.data()[i]) {
      label.data()[i] = kForeground;
    } else if (!grown.data()[i]) {
      label.data()[i] = kBackground;
    }
  }

  auto priority = [&](int x, int y) -> std::uint8_t {
    const std::uint8_t v = image(x, y);
    return polarity == Polarity::Dark ? v : static_cast<std::uint8_t>(255 - v);
  };
  BucketQueue queue;
  auto push_neighbors = [&](int x, int y, std::uint8_t l) {
    for (const auto& d : kNeighbors4) {
      const int nx = x + d.x;
      const int ny = y + d.y;
      if (!label.contains(nx, ny) || label(nx, ny) != kUnknown) continue;
      queue.push(priority(nx, ny), {static_cast<std::uint32_t>(label.index(nx, ny)), l});
    }
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (label(x, y) != kUnknown) push_neighbors(x, y, label(x, y));
    }
  }
  while (!queue.empty()) {
    const auto e = queue.pop();
    auto& l = label.data()[e.index];
    if (l != kUnknown) continue;
    l = e.label;
    const int x = static_cast<int>(e.index % static_cast<std::uint32_t>(w));
    const int y = static_cast<int>(e.index / static_cast<std::uint32_t>(w));
    push_neighbors(x, y, e.label);
  }

  BinaryImage mask(w, h);
  for (std::size_t i = 0; i < mask.size(); ++i) mask.data()[i] = label.data()[i] == kForeground ? 1 : 0;
  return {std::move(mask), "guided_watershed", otsu.chosen_threshold};
}

namespace serial {

SegmentationResult adaptive_mean_threshold(const GrayImage& image, int block_size, int c, Side side) {
  check_block(block_size);
  const int w = image.width();
  const int h = image.height();
  const int r = block_size / 2;
  const std::int64_t area = std::int64_t{block_size} * block_size;
  BinaryImage mask(w, h);
  // col[x + r] = sum over the mirrored vertical window of column reflect(x).
  std::vector<std::int64_t> col(static_cast<std::size_t>(w + 2 * r), 0);
  for (int y = 0; y < h; ++y) {
    for (int i = 0; i < w + 2 * r; ++i) {
      const int sx = reflect_index(i - r, w);
      std::int64_t& s = col[static_cast<std::size_t>(i)];
      if (y == 0) {
        for (int k = -r; k <= r; ++k) s += image(sx, reflect_index(k, h));
      } else {
        s += image(sx, reflect_index(y + r, h)) - image(sx, reflect_index(y - r - 1, h));
      }
    }
    std::int64_t window = 0;
    for (int i = 0; i < block_size; ++i) window += col[static_cast<std::size_t>(i)];
    for (int x = 0; x < w; ++x) {
      if (x > 0) window += col[static_cast<std::size_t>(x + block_size - 1)] - col[static_cast<std::size_t>(x - 1)];
      mask(x, y) = local_foreground(image(x, y), window, area, c, side) ? 1 : 0;
    }
  }
  return {std::move(mask), "adaptive_mean_threshold", std::nullopt};
}

}  // namespace serial
}  // namespace netgrab
