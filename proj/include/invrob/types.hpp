// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace invrob {

using Vec = std::vector<double>;
using ConstSpan = std::span<const double>;

/// Default half-width of the finite search window that replaces unbounded
/// uncertainty axes (in standardized units). Overridable via INVROB_MARGIN.
inline constexpr double kDefaultMargin = 12.0;

/// Uncertainty realization u in R^m.
struct Scenario {
  Vec values;

  Scenario() = default;
  explicit Scenario(Vec v) : values(std::move(v)) {}
  Scenario(std::initializer_list<double> v) : values(v) {}

  std::size_t dim() const { return values.size(); }
  ConstSpan span() const { return values; }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const Scenario&) const = default;
};

/// Decision x in R^n.
struct Decision {
  Vec values;

  Decision() = default;
  explicit Decision(Vec v) : values(std::move(v)) {}
  Decision(std::initializer_list<double> v) : values(v) {}

  std::size_t dim() const { return values.size(); }
  ConstSpan span() const { return values; }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const Decision&) const = default;
};

/// Axis-aligned box [lo, hi] in R^k.
struct Box {
  Vec lo;
  Vec hi;

  Box() = default;
  Box(Vec lower, Vec upper);
  /// [lo, hi]^dim
  static Box cube(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lo.size(); }
  double width(std::size_t i) const { return hi[i] - lo[i]; }
  bool contains(ConstSpan p) const;
  Vec clamp(ConstSpan p) const;
  bool bounded() const;
};

/// Declared shape of a function in the uncertain parameter; drives how
/// suprema over coverage sets are computed.
enum class Convexity { ConvexInU, MonotoneInU, General };

std::string_view to_string(Convexity c);
Convexity convexity_from_string(std::string_view s);

using Evaluator = std::function<double(ConstSpan x, ConstSpan u)>;

/// One objective or constraint component f(x, u).
struct ProblemFunction {
  Evaluator eval;
  Convexity convexity = Convexity::General;
  /// Expression text when the function came from (or can be written as) a
  /// problem-spec expression; empty otherwise.
  std::string source;
};

bool all_finite(ConstSpan v);

}  // namespace invrob
