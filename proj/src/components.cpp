#include "netgrab/components.hpp"

#include <numeric>
#include <vector>

namespace netgrab {
namespace {

class DisjointSet {
 public:
  std::int32_t make() {
    parent_.push_back(static_cast<std::int32_t>(parent_.size()));
    return parent_.back();
  }
  std::int32_t find(std::int32_t a) {
    while (parent_[static_cast<std::size_t>(a)] != a) {
      auto& p = parent_[static_cast<std::size_t>(a)];
      p = parent_[static_cast<std::size_t>(p)];
      a = p;
    }
    return a;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the smaller (earlier) provisional label as root.
    if (b < a) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
  }
  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<std::int32_t> parent_;
};

}  // namespace

LabelImage connected_components(const BinaryImage& image, Connectivity connectivity) {
  const int w = image.width();
  const int h = image.height();
  LabelImage labels(w, h);
  DisjointSet sets;
  sets.make();  // provisional label 0 = background

  const bool eight = connectivity == Connectivity::Eight;
  // Already-visited neighbours in raster order: W, NW, N, NE.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!image(x, y)) continue;
      std::int32_t current = 0;
      auto join = [&](int nx, int ny) {
        if (!labels.contains(nx, ny)) return;
        const std::int32_t l = labels(nx, ny);
        if (l == 0) return;
        if (current == 0) {
          current = l;
        } else if (l != current) {
          sets.unite(current, l);
        }
      };
      join(x - 1, y);
      join(x, y - 1);
      if (eight) {
        join(x - 1, y - 1);
        join(x + 1, y - 1);
      }
      labels(x, y) = current != 0 ? current : sets.make();
    }
  }

  // Final labels follow first encounter of each root in raster order.
  std::vector<std::int32_t> final_label(sets.size(), 0);
  std::int32_t next = 0;
  for (auto& l : labels.data()) {
    if (l == 0) continue;
    const std::int32_t root = sets.find(l);
    auto& f = final_label[static_cast<std::size_t>(root)];
    if (f == 0) f = ++next;
    l = f;
  }
  labels.component_count = next;
  return labels;
}

}  // namespace netgrab
