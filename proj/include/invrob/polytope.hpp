// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "invrob/types.hpp"

namespace invrob {

/// Convex hull of a finite point list in R^m, m <= 3.
///
/// The hull is stored as a halfspace list inside its own affine hull, so
/// lower-dimensional inputs (a segment in the plane, a single point) keep an
/// exact membership test. Halfspace normals have unit length, which makes
/// violation() a distance-like quantity.
class Polytope {
 public:
  Polytope() = default;
  explicit Polytope(std::vector<Vec> points);

  std::size_t ambient_dim() const { return m_; }
  std::size_t intrinsic_dim() const { return basis_.size(); }

  /// Extreme points of the hull, ambient coordinates.
  const std::vector<Vec>& vertices() const { return vertices_; }

  /// <= 0 iff p lies in scale * P. Combines the halfspace violation inside the
  /// affine hull with the distance to that affine hull.
  double violation(ConstSpan p, double scale = 1.0) const;

  bool contains(ConstSpan p, double scale = 1.0, double slack = 1e-12) const;

  /// m-dimensional volume; 0 for degenerate hulls.
  double volume() const { return volume_; }

  /// Triangulation into m-simplices (m+1 ambient points each); empty when
  /// degenerate.
  const std::vector<std::vector<Vec>>& simplices() const { return simplices_; }

  /// Largest s >= 0 such that anchor + s * P stays inside box; +inf when P is {0}.
  double max_scale_in_box(ConstSpan anchor, const Box& box) const;

 private:
  Vec local(ConstSpan p, double scale, double* residual) const;
  Vec ambient(ConstSpan q) const;

  std::size_t m_ = 0;
  double eps_ = 1e-12;
  Vec origin_;
  std::vector<Vec> basis_;
  std::vector<Vec> normals_;  // in basis coordinates
  Vec offsets_;
  std::vector<Vec> vertices_;
  double volume_ = 0.0;
  std::vector<std::vector<Vec>> simplices_;
};

}  // namespace invrob
