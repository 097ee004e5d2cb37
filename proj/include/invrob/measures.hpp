// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "invrob/design.hpp"
#include "invrob/types.hpp"

namespace invrob {

/// Standard normal distribution function, accurate to ~1e-16 absolute.
double std_normal_cdf(double t);

enum class MeasureKind { Volume, GaussianProbability, MinDistToBad, MaxDistToBad };

std::string_view to_string(MeasureKind k);
MeasureKind measure_kind_from_string(std::string_view s);

/// The objective V(W) of the inverse problem.
struct MeasureSpec {
  MeasureKind kind = MeasureKind::Volume;
  Vec mean;   ///< gaussian: per-axis mean
  Vec sigma;  ///< gaussian: per-axis standard deviation (independent axes)
  std::vector<Vec> bad_points;
  std::optional<Box> bad_box;
  InnerMaxConfig inner;

  static MeasureSpec volume();
  static MeasureSpec gaussian(Vec mean, Vec sigma);
  static MeasureSpec min_dist(std::vector<Vec> points);
  static MeasureSpec min_dist(Box bad);
  static MeasureSpec max_dist(std::vector<Vec> points);
  static MeasureSpec max_dist(Box bad);

  void validate(std::size_t m) const;
  /// Whether enlarging W can only increase V.
  bool increasing() const { return kind != MeasureKind::MinDistToBad; }
};

/// V(W(d) ∩ box). Intervals and boxes are clipped to `box` first; balls and
/// scaled sets are measured as given (the solver keeps them inside the box).
///
/// Gaussian mass of balls and scaled sets (m >= 2) uses tensor quadrature:
/// ball     radial Gauss-Legendre panels x periodic trapezoid in angle
///          (3-D: Gauss-Legendre panels in the polar angle as well),
/// polytope collapsed-coordinate Gauss-Legendre panels per simplex.
/// The panel count grows with (set diameter / smallest sigma) up to a cap,
/// targeting 1e-6 relative error.
double measure(const MeasureSpec& spec, const DesignFamily& fam, const DesignPoint& d, const Box& box);

/// Euclidean distance from u to the spec's bad set.
double distance_to_bad(const MeasureSpec& spec, ConstSpan u);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(std::size_t n, Vec& nodes, Vec& weights);

}  // namespace invrob
