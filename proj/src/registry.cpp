#include "netgrab/registry.hpp"

#include <algorithm>

namespace netgrab {
namespace {

ParamSpec odd_kernel(std::string name, std::int64_t def, std::string help) {
  ParamSpec p;
  p.name = std::move(name);
  p.type = ParamType::Integer;
  p.default_value = def;
  p.min = 3;
  p.odd = true;
  p.help = std::move(help);
  return p;
}

ParamSpec choice(std::string name, std::string def, std::vector<std::string> choices, std::string help) {
  ParamSpec p;
  p.name = std::move(name);
  p.type = ParamType::String;
  p.default_value = std::move(def);
  p.choices = std::move(choices);
  p.help = std::move(help);
  return p;
}

ParamSpec integer(std::string name, std::int64_t def, std::optional<double> min, std::optional<double> max,
                  std::string help) {
  ParamSpec p;
  p.name = std::move(name);
  p.type = ParamType::Integer;
  p.default_value = def;
  p.min = min;
  p.max = max;
  p.help = std::move(help);
  return p;
}

ParamSpec real(std::string name, double def, std::optional<double> min, bool min_exclusive,
               std::optional<double> max, std::string help) {
  ParamSpec p;
  p.name = std::move(name);
  p.type = ParamType::Real;
  p.default_value = def;
  p.min = min;
  p.min_exclusive = min_exclusive;
  p.max = max;
  p.help = std::move(help);
  return p;
}

std::vector<AlgorithmSpec> build() {
  const auto side = [] {
    return choice("foreground", "below", {"above", "below"},
                  "which side of the threshold is network material");
  };
  return {
      {"gaussian_blur", Category::Preprocessing, "Separable Gaussian smoothing",
       {odd_kernel("kernel_size", 5, "odd kernel width")}, false},
      {"median_blur", Category::Preprocessing, "Windowed median (salt-and-pepper removal)",
       {odd_kernel("kernel_size", 3, "odd window width")}, false},
      {"invert", Category::Preprocessing, "Gray level inversion", {}, false},

      {"constant_threshold", Category::Segmentation, "Fixed global threshold",
       {integer("threshold", 128, 0, 255, "gray level; equal pixels are background"), side()}, false},
      {"otsu_threshold", Category::Segmentation, "Global threshold maximising between-class variance",
       {side()}, false},
      {"adaptive_mean_threshold", Category::Segmentation, "Local mean threshold over a square window",
       {odd_kernel("block_size", 41, "odd window width"),
        integer("c", 5, std::nullopt, std::nullopt, "offset subtracted from the local mean"), side()},
       false},
      {"guided_watershed", Category::Segmentation, "Watershed flood from Otsu-derived markers",
       {integer("fg_erosions", 2, 1, std::nullopt, "erosions producing sure-foreground seeds"),
        integer("bg_dilations", 2, 1, std::nullopt, "dilations bounding sure-background seeds"),
        choice("foreground", "dark", {"dark", "light"}, "intensity of the network material")},
       false},
      {"grabcut", Category::Segmentation, "Reserved; not implemented", {}, true},

      {"guo_hall", Category::Thinning, "Guo-Hall parallel thinning", {}, false},

      {"filter_small_components", Category::GraphFilter, "Drop small connected components",
       {choice("mode", "relative", {"absolute", "relative"}, "absolute vertex count or fraction of largest"),
        real("threshold", 0.05, 0.0, false, std::nullopt, "minimum component size")},
       false},
      {"keep_largest_component", Category::GraphFilter, "Keep only the largest component", {}, false},
      {"prune_dead_ends", Category::GraphFilter, "Reduce the graph to its 2-core", {}, false},
      {"merge_close_junctions", Category::GraphFilter, "Merge vertices closer than a radius",
       {real("radius", 4.0, 0.0, true, std::nullopt, "merge distance in pixels")}, false},
      {"smooth_filtered_ends", Category::GraphFilter, "Splice out degree-2 vertices", {}, false},
  };
}

}  // namespace

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::Preprocessing: return "preprocessing";
    case Category::Segmentation: return "segmentation";
    case Category::Thinning: return "thinning";
    case Category::GraphFilter: return "graph_filter";
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view s) noexcept {
  for (const auto c : {Category::Preprocessing, Category::Segmentation, Category::Thinning, Category::GraphFilter}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::string_view to_string(ParamType t) noexcept {
  switch (t) {
    case ParamType::Boolean: return "boolean";
    case ParamType::Integer: return "integer";
    case ParamType::Real: return "real";
    case ParamType::String: return "string";
  }
  return "?";
}

const std::vector<AlgorithmSpec>& algorithm_registry() {
  static const std::vector<AlgorithmSpec> registry = build();
  return registry;
}

const AlgorithmSpec* find_algorithm(std::string_view id) noexcept {
  const auto& reg = algorithm_registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const AlgorithmSpec& a) { return a.id == id; });
  return it == reg.end() ? nullptr : &*it;
}

}  // namespace netgrab
