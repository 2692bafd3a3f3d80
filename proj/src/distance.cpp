#include "netgrab/distance.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace netgrab {
namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

bool has_background(const BinaryImage& image) {
  const auto px = image.data();
  return std::any_of(px.begin(), px.end(), [](auto v) { return v == 0; });
}

struct EnvelopeScratch {
  std::vector<int> vertex;
  std::vector<double> boundary;
  std::vector<std::int64_t> f;
  std::vector<std::int64_t> out;

  explicit EnvelopeScratch(int n)
      : vertex(static_cast<std::size_t>(n)),
        boundary(static_cast<std::size_t>(n) + 1),
        f(static_cast<std::size_t>(n)),
        out(static_cast<std::size_t>(n)) {}
};

// 1D squared distance transform of sampled function f (kInf = no sample).
// Writes the lower envelope of parabolas (q - i)^2 + f(i) into s.out.
void envelope_1d(EnvelopeScratch& s, int n) {
  int k = -1;
  for (int q = 0; q < n; ++q) {
    const std::int64_t fq = s.f[static_cast<std::size_t>(q)];
    if (fq >= kInf) continue;
    if (k < 0) {
      k = 0;
      s.vertex[0] = q;
      s.boundary[0] = -std::numeric_limits<double>::infinity();
      s.boundary[1] = std::numeric_limits<double>::infinity();
      continue;
    }
    double cut = 0.0;
    for (;;) {
      const int v = s.vertex[static_cast<std::size_t>(k)];
      const std::int64_t fv = s.f[static_cast<std::size_t>(v)];
      cut = static_cast<double>((fq + std::int64_t{q} * q) - (fv + std::int64_t{v} * v)) /
            static_cast<double>(2 * (q - v));
      if (cut <= s.boundary[static_cast<std::size_t>(k)]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    s.vertex[static_cast<std::size_t>(k)] = q;
    s.boundary[static_cast<std::size_t>(k)] = cut;
    s.boundary[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
  }
  if (k < 0) {
    std::fill(s.out.begin(), s.out.begin() + n, kInf);
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (s.boundary[static_cast<std::size_t>(k) + 1] < q) ++k;
    const int v = s.vertex[static_cast<std::size_t>(k)];
    const std::int64_t d = q - v;
    s.out[static_cast<std::size_t>(q)] = d * d + s.f[static_cast<std::size_t>(v)];
  }
}

}  // namespace

DistanceField distance_transform(const BinaryImage& image) {
  const int w = image.width();
  const int h = image.height();
  if (!has_background(image)) {
    return DistanceField(w, h, DistanceField::unbounded_sentinel(w, h));
  }
  std::vector<std::int64_t> columns(image.size());

#pragma omp parallel
  {
    EnvelopeScratch s(h);
#pragma omp for schedule(static)
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) {
        s.f[static_cast<std::size_t>(y)] = image(x, y) ? kInf : 0;
      }
      envelope_1d(s, h);
      for (int y = 0; y < h; ++y) columns[image.index(x, y)] = s.out[static_cast<std::size_t>(y)];
    }
  }

  DistanceField field(w, h);
#pragma omp parallel
  {
    EnvelopeScratch s(w);
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      std::copy_n(columns.begin() + static_cast<std::ptrdiff_t>(image.index(0, y)), w, s.f.begin());
      envelope_1d(s, w);
      auto row = field.row(y);
      for (int x = 0; x < w; ++x) row[static_cast<std::size_t>(x)] = static_cast<std::uint32_t>(s.out[static_cast<std::size_t>(x)]);
    }
  }
  return field;
}

namespace serial {

DistanceField distance_transform(const BinaryImage& image) {
  const int w = image.width();
  const int h = image.height();
  if (!has_background(image)) {
    return DistanceField(w, h, DistanceField::unbounded_sentinel(w, h));
  }
  const std::int64_t inf = w + h;

  // Phase 1: distance to nearest background pixel within each column.
  std::vector<std::int64_t> g(image.size());
  for (int x = 0; x < w; ++x) {
    g[image.index(x, 0)] = image(x, 0) ? inf : 0;
    for (int y = 1; y < h; ++y) {
      g[image.index(x, y)] = image(x, y) ? g[image.index(x, y - 1)] + 1 : 0;
    }
    for (int y = h - 2; y >= 0; --y) {
      const std::int64_t below = g[image.index(x, y + 1)];
      if (below < g[image.index(x, y)]) g[image.index(x, y)] = below + 1;
    }
  }

  // Phase 2: per-row lower envelope with integer separators.
  DistanceField field(w, h);
  std::vector<int> s(static_cast<std::size_t>(w));
  std::vector<int> t(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    auto gy = [&](int x) { return g[image.index(x, y)]; };
    auto f = [&](int x, int i) {
      const std::int64_t dx = x - i;
      return dx * dx + gy(i) * gy(i);
    };
    auto sep = [&](int i, int u) {
      const std::int64_t num = std::int64_t{u} * u - std::int64_t{i} * i + gy(u) * gy(u) - gy(i) * gy(i);
      const std::int64_t den = 2 * std::int64_t{u - i};
      return num >= 0 ? num / den : -((-num + den - 1) / den);
    };
    int q = 0;
    s[0] = 0;
    t[0] = 0;
    for (int u = 1; u < w; ++u) {
      while (q >= 0 && f(t[static_cast<std::size_t>(q)], s[static_cast<std::size_t>(q)]) >
                           f(t[static_cast<std::size_t>(q)], u)) {
        --q;
      }
      if (q < 0) {
        q = 0;
        s[0] = u;
      } else {
        const std::int64_t next = 1 + sep(s[static_cast<std::size_t>(q)], u);
        if (next < w) {
          ++q;
          s[static_cast<std::size_t>(q)] = u;
          t[static_cast<std::size_t>(q)] = static_cast<int>(next);
        }
      }
    }
    for (int u = w - 1; u >= 0; --u) {
      field(u, y) = static_cast<std::uint32_t>(f(u, s[static_cast<std::size_t>(q)]));
      if (u == t[static_cast<std::size_t>(q)]) --q;
    }
  }
  return field;
}

}  // namespace serial
}  // namespace netgrab
