#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace testsupport {

using netgrab::Edge;
using netgrab::Pixel;
using netgrab::Rgb;
using netgrab::Vertex;

PerlinNoise::PerlinNoise(std::uint64_t seed) : perm_(512) {
  std::vector<int> p(256);
  std::iota(p.begin(), p.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(p.begin(), p.end(), rng);
  for (int i = 0; i < 512; ++i) perm_[i] = p[i & 255];
}

double PerlinNoise::gradient(int ix, int iy, double dx, double dy) const {
  const int h = perm_[(perm_[ix & 255] + iy) & 511] & 7;
  static constexpr double gx[8] = {1, -1, 1, -1, 1.41421356, -1.41421356, 0, 0};
  static constexpr double gy[8] = {1, 1, -1, -1, 0, 0, 1.41421356, -1.41421356};
  return gx[h] * dx + gy[h] * dy;
}

double PerlinNoise::sample(double x, double y) const {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const auto fade = [](double t) { return t * t * t * (t * (t * 6 - 15) + 10); };
  const double u = fade(fx);
  const double v = fade(fy);
  const double n00 = gradient(x0, y0, fx, fy);
  const double n10 = gradient(x0 + 1, y0, fx - 1, fy);
  const double n01 = gradient(x0, y0 + 1, fx, fy - 1);
  const double n11 = gradient(x0 + 1, y0 + 1, fx - 1, fy - 1);
  const double a = n00 + u * (n10 - n00);
  const double b = n01 + u * (n11 - n01);
  return a + v * (b - a);
}

double PerlinNoise::fractal(double x, double y, int octaves) const {
  double sum = 0.0;
  double amp = 1.0;
  double norm = 0.0;
  for (int o = 0; o < octaves; ++o) {
    sum += amp * sample(x, y);
    norm += amp;
    amp *= 0.5;
    x *= 2.0;
    y *= 2.0;
  }
  return sum / norm;
}

BinaryImage perlin_blobs(int width, int height, std::uint64_t seed, double feature_size) {
  PerlinNoise noise(seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> level(-0.15, 0.15);
  const double cut = level(rng);
  BinaryImage out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out(x, y) = noise.fractal(x / feature_size + 0.5, y / feature_size + 0.5, 3) > cut ? 1 : 0;
    }
  }
  return out;
}

BinaryImage random_mask(int width, int height, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution on(density);
  BinaryImage out(width, height);
  for (auto& v : out.data()) v = on(rng) ? 1 : 0;
  return out;
}

GrayImage random_gray(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(0, 255);
  GrayImage out(width, height);
  for (auto& v : out.data()) v = static_cast<std::uint8_t>(level(rng));
  return out;
}

netgrab::Histogram random_histogram(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  netgrab::Histogram h{};
  // Mix of shapes: sparse spikes, bimodal bumps and dense noise.
  const int shape = static_cast<int>(rng() % 3);
  if (shape == 0) {
    const int spikes = 2 + static_cast<int>(rng() % 6);
    for (int i = 0; i < spikes; ++i) h[rng() % 256] += 1 + rng() % 5000;
  } else if (shape == 1) {
    std::normal_distribution<double> a(40 + rng() % 60, 5 + rng() % 20);
    std::normal_distribution<double> b(150 + rng() % 80, 5 + rng() % 25);
    const int n = 1000 + static_cast<int>(rng() % 50000);
    for (int i = 0; i < n; ++i) {
      const double v = (rng() % 3 == 0) ? a(rng) : b(rng);
      h[static_cast<std::size_t>(std::clamp(static_cast<int>(std::lround(v)), 0, 255))] += 1;
    }
  } else {
    for (auto& c : h) c = rng() % 200;
  }
  if (std::count_if(h.begin(), h.end(), [](auto c) { return c > 0; }) < 2) {
    h[0] += 1;
    h[255] += 1;
  }
  return h;
}

namespace {

template <typename Paint>
void cover_segment(int width, int height, double ax, double ay, double bx, double by, double radius, Paint paint) {
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - radius)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max(ax, bx) + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - radius)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max(ay, by) + radius)));
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  const double r2 = radius * radius + 1e-9;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      double t = len2 > 0 ? ((x - ax) * dx + (y - ay) * dy) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double ex = ax + t * dx - x;
      const double ey = ay + t * dy - y;
      if (ex * ex + ey * ey <= r2) paint(x, y);
    }
  }
}

}  // namespace

void draw_segment(RgbImage& image, double ax, double ay, double bx, double by, double radius, Rgb color) {
  cover_segment(image.width(), image.height(), ax, ay, bx, by, radius, [&](int x, int y) { image.set(x, y, color); });
}

void draw_segment(BinaryImage& image, double ax, double ay, double bx, double by, double radius) {
  cover_segment(image.width(), image.height(), ax, ay, bx, by, radius, [&](int x, int y) { image(x, y) = 1; });
}

RgbImage render_grid(const GridSpec& spec) {
  RgbImage img(spec.canvas, spec.canvas, Rgb{255, 255, 255});
  const double r = (spec.stroke_width - 1.0) / 2.0;  // 9 px wide: centre +- 4
  const auto coord = [&](int i) { return static_cast<double>(spec.origin + spec.spacing * i); };
  for (int i = 0; i < spec.nodes_per_side; ++i) {
    for (int j = 0; j + 1 < spec.nodes_per_side; ++j) {
      draw_segment(img, coord(j), coord(i), coord(j + 1), coord(i), r, Rgb{0, 0, 0});
      draw_segment(img, coord(i), coord(j), coord(i), coord(j + 1), r, Rgb{0, 0, 0});
    }
  }
  return img;
}

RgbImage render_network(int width, int height, std::uint64_t seed, int spacing) {
  std::mt19937_64 rng(seed);
  RgbImage img(width, height, Rgb{235, 235, 235});
  std::uniform_int_distribution<int> grain(-12, 12);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(std::clamp(225 + grain(rng), 0, 255));

  const int cols = std::max(2, width / spacing);
  const int rows = std::max(2, height / spacing);
  std::uniform_real_distribution<double> jitter(-0.3 * spacing, 0.3 * spacing);
  std::uniform_real_distribution<double> thickness(1.5, 5.0);
  std::bernoulli_distribution keep(0.85);
  std::vector<std::pair<double, double>> nodes;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double x = (c + 0.5) * width / cols + jitter(rng);
      const double y = (r + 0.5) * height / rows + jitter(rng);
      nodes.emplace_back(std::clamp(x, 8.0, width - 9.0), std::clamp(y, 8.0, height - 9.0));
    }
  }
  const Rgb ink{30, 30, 30};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto& a = nodes[r * cols + c];
      if (c + 1 < cols && keep(rng)) {
        const auto& b = nodes[r * cols + c + 1];
        draw_segment(img, a.first, a.second, b.first, b.second, thickness(rng), ink);
      }
      if (r + 1 < rows && keep(rng)) {
        const auto& b = nodes[(r + 1) * cols + c];
        draw_segment(img, a.first, a.second, b.first, b.second, thickness(rng), ink);
      }
    }
  }
  return img;
}

ExtractedGraph random_graph(int max_vertices, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ExtractedGraph g;
  g.width = 64;
  g.height = 64;
  const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_vertices));
  std::uniform_real_distribution<double> pos(0.0, 24.0);
  int id = static_cast<int>(rng() % 3);
  for (int i = 0; i < n; ++i) {
    Vertex v;
    v.id = id;
    id += 1 + static_cast<int>(rng() % 2);
    v.x = pos(rng);
    v.y = pos(rng);
    v.pixels = {Pixel{static_cast<int>(std::lround(v.x)), static_cast<int>(std::lround(v.y))}};
    g.vertices.push_back(std::move(v));
  }
  const int m = static_cast<int>(rng() % static_cast<std::uint64_t>(2 * n + 1));
  std::uniform_real_distribution<double> len(1.0, 40.0);
  std::uniform_real_distribution<double> wid(1.0, 8.0);
  for (int i = 0; i < m; ++i) {
    Edge e;
    e.id = i;
    const auto& a = g.vertices[rng() % g.vertices.size()];
    const auto& b = (rng() % 8 == 0) ? a : g.vertices[rng() % g.vertices.size()];
    e.u = std::min(a.id, b.id);
    e.v = std::max(a.id, b.id);
    const auto& first = a.id == e.u ? a : b;
    const auto& second = a.id == e.u ? b : a;
    e.u_attach = first.pixels.front();
    e.v_attach = second.pixels.front();
    e.length = len(rng);
    e.width = wid(rng);
    e.pixel_count = 1 + static_cast<int>(rng() % 30);
    g.edges.push_back(std::move(e));
  }
  return g;
}

}  // namespace testsupport
