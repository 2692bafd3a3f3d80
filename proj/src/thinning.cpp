#include "netgrab/thinning.hpp"

#include <array>
#include <vector>

namespace netgrab {
namespace {

// p[1..8] = N, NE, E, SE, S, SW, W, NW.
bool rule(const std::array<bool, 9>& p, int subiteration) {
  const int c = (!p[1] && (p[2] || p[3])) + (!p[3] && (p[4] || p[5])) +
                (!p[5] && (p[6] || p[7])) + (!p[7] && (p[8] || p[1]));
  const int n1 = (p[8] || p[1]) + (p[2] || p[3]) + (p[4] || p[5]) + (p[6] || p[7]);
  const int n2 = (p[1] || p[2]) + (p[3] || p[4]) + (p[5] || p[6]) + (p[7] || p[8]);
  const int n = n1 < n2 ? n1 : n2;
  const bool m = subiteration == 0 ? ((p[1] || p[2] || !p[4]) && p[3])
                                   : ((p[5] || p[6] || !p[8]) && p[7]);
  return c == 1 && n >= 2 && n <= 3 && !m;
}

std::array<bool, 9> unpack(std::uint8_t bits) {
  std::array<bool, 9> p{};
  for (int i = 0; i < 8; ++i) p[static_cast<std::size_t>(i + 1)] = (bits >> i) & 1;
  return p;
}

struct DeletionTable {
  std::array<std::array<std::uint8_t, 256>, 2> deletable{};

  DeletionTable() {
    for (int sub = 0; sub < 2; ++sub) {
      for (int bits = 0; bits < 256; ++bits) {
        deletable[static_cast<std::size_t>(sub)][static_cast<std::size_t>(bits)] =
            rule(unpack(static_cast<std::uint8_t>(bits)), sub) ? 1 : 0;
      }
    }
  }
};

const DeletionTable& table() {
  static const DeletionTable t;
  return t;
}

inline std::uint8_t gather(const std::uint8_t* above, const std::uint8_t* row, const std::uint8_t* below,
                           int x) {
  // Rows are padded by one pixel on each side, so x - 1 and x + 1 are valid.
  return static_cast<std::uint8_t>(above[x] | (above[x + 1] << 1) | (row[x + 1] << 2) |
                                   (below[x + 1] << 3) | (below[x] << 4) | (below[x - 1] << 5) |
                                   (row[x - 1] << 6) | (above[x - 1] << 7));
}

}  // namespace

std::uint8_t neighbor_bits(const BinaryImage& mask, int x, int y) noexcept {
  std::uint8_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    const auto& d = kNeighbors8[static_cast<std::size_t>(i)];
    if (mask.at_or(x + d.x, y + d.y, 0)) bits = static_cast<std::uint8_t>(bits | (1u << i));
  }
  return bits;
}

bool guo_hall_deletable(std::uint8_t neighbors, int subiteration) noexcept {
  return table().deletable[static_cast<std::size_t>(subiteration & 1)][neighbors] != 0;
}

Skeleton guo_hall_thin(const BinaryImage& mask) {
  const int w = mask.width();
  const int h = mask.height();
  const auto& lut = table().deletable;
  // Padded working buffer with a one-pixel background frame.
  const int pw = w + 2;
  const int ph = h + 2;
  std::vector<std::uint8_t> cur(static_cast<std::size_t>(pw) * static_cast<std::size_t>(ph), 0);
  for (int y = 0; y < h; ++y) {
    const auto src = mask.row(y);
    std::copy(src.begin(), src.end(), cur.begin() + (y + 1) * pw + 1);
  }
  std::vector<std::uint8_t> next = cur;

  int passes = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    ++passes;
    for (int sub = 0; sub < 2; ++sub) {
      long deleted = 0;
      const auto& del = lut[static_cast<std::size_t>(sub)];
#pragma omp parallel for schedule(static) reduction(+ : deleted)
      for (int y = 1; y <= h; ++y) {
        const std::uint8_t* above = cur.data() + (y - 1) * pw;
        const std::uint8_t* row = cur.data() + y * pw;
        const std::uint8_t* below = cur.data() + (y + 1) * pw;
        std::uint8_t* out = next.data() + y * pw;
        for (int x = 1; x <= w; ++x) {
          if (!row[x]) {
            out[x] = 0;
            continue;
          }
          const bool d = del[gather(above, row, below, x)] != 0;
          out[x] = d ? 0 : 1;
          deleted += d;
        }
      }
      cur.swap(next);
      if (deleted > 0) changed = true;
    }
  }

  Skeleton result{BinaryImage(w, h), passes};
  for (int y = 0; y < h; ++y) {
    std::copy_n(cur.begin() + (y + 1) * pw + 1, w, result.mask.row(y).begin());
  }
  return result;
}

namespace serial {

Skeleton guo_hall_thin(const BinaryImage& mask) {
  Skeleton result{mask, 0};
  BinaryImage& img = result.mask;
  std::vector<std::size_t> doomed;
  bool changed = true;
  while (changed) {
    changed = false;
    ++result.iterations_run;
    for (int sub = 0; sub < 2; ++sub) {
      doomed.clear();
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
          if (!img(x, y)) continue;
          std::array<bool, 9> p{};
          for (int i = 0; i < 8; ++i) {
            const auto& d = kNeighbors8[static_cast<std::size_t>(i)];
            p[static_cast<std::size_t>(i + 1)] = img.at_or(x + d.x, y + d.y, 0) != 0;
          }
          if (rule(p, sub)) doomed.push_back(img.index(x, y));
        }
      }
      for (const auto i : doomed) img.data()[i] = 0;
      if (!doomed.empty()) changed = true;
    }
  }
  return result;
}

}  // namespace serial
}  // namespace netgrab
