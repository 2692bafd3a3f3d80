#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace netgrab {

enum class Category { Preprocessing, Segmentation, Thinning, GraphFilter };

std::string_view to_string(Category c) noexcept;
std::optional<Category> parse_category(std::string_view s) noexcept;

/// Stage parameters are flat scalars.
using ParamValue = std::variant<bool, std::int64_t, double, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

enum class ParamType { Boolean, Integer, Real, String };

std::string_view to_string(ParamType t) noexcept;

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::Integer;
  ParamValue default_value;
  std::optional<double> min;
  std::optional<double> max;
  bool min_exclusive = false;
  bool odd = false;
  std::vector<std::string> choices;
  std::string help;
};

struct AlgorithmSpec {
  std::string id;
  Category category = Category::Preprocessing;
  std::string summary;
  std::vector<ParamSpec> params;
  /// Identifier reserved for a stage that is not implemented.
  bool reserved = false;
};

/// Every stage identifier the pipeline format accepts, in display order.
const std::vector<AlgorithmSpec>& algorithm_registry();
const AlgorithmSpec* find_algorithm(std::string_view id) noexcept;

}  // namespace netgrab
