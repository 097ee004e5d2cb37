// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "invrob/polytope.hpp"
#include "invrob/types.hpp"

namespace invrob {

enum class FamilyKind { Interval, Box, Ball, ScaledSet };

std::string_view to_string(FamilyKind k);

/// Parameter vector d of a coverage-set family.
struct DesignPoint {
  Vec values;

  DesignPoint() = default;
  explicit DesignPoint(Vec v) : values(std::move(v)) {}
  DesignPoint(std::initializer_list<double> v) : values(v) {}

  std::size_t dim() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const DesignPoint&) const = default;
};

/// Finite-dimensional family d -> W(d) of coverage sets.
///
///   interval   d = (d1, d2)           W = [d1, d2]                    (m = 1)
///   box        d = (lo_1..lo_m, hi_1..hi_m)  W = prod [lo_i, hi_i]
///   ball       d = (rho)              W = {u : |u - c| <= rho}
///   scaled-set d = (alpha)            W = anchor + alpha * Z          (m <= 3)
///
/// Every family also has a fixed reference set Y and a map T(d, .) : Y -> W(d)
/// onto the coverage set. Exchange cuts are stored as reference points, so a
/// cut follows the set when d moves.
class DesignFamily {
 public:
  static DesignFamily interval();
  static DesignFamily box(std::size_t m);
  static DesignFamily ball(Vec center);
  static DesignFamily scaled_set(Vec anchor, std::vector<Vec> vertices);

  FamilyKind kind() const { return kind_; }
  std::size_t scenario_dim() const { return m_; }
  std::size_t design_dim() const;
  const Vec& center() const { return center_; }
  const Polytope& shape() const { return shape_; }

  bool is_feasible(const DesignPoint& d) const;
  void require_feasible(const DesignPoint& d) const;

  /// Signed membership function delta_d(u): <= 0 exactly on W(d).
  double membership_violation(const DesignPoint& d, ConstSpan u) const;
  bool contains(const DesignPoint& d, ConstSpan u) const;

  Vec from_reference(const DesignPoint& d, ConstSpan y) const;
  Vec to_reference(const DesignPoint& d, ConstSpan u) const;

  /// Per design coordinate: +1 if increasing it enlarges W(d), -1 if decreasing does.
  std::vector<int> growth_signs() const;

  /// Search region for d: every point keeps W(d) inside the uncertainty box
  /// and (for interval, box and ball) contains all nominal scenarios.
  Box search_box(const Box& uncertainty_box, const std::vector<Vec>& nominal, double scale_cap) const;

  /// Whether W(a) is a subset of W(b), decided structurally.
  bool nested(const DesignPoint& a, const DesignPoint& b) const;

  /// Extreme points of W(d) (polytopal families only).
  std::vector<Vec> vertices(const DesignPoint& d) const;

  Vec sample(const DesignPoint& d, std::mt19937_64& rng) const;

 private:
  FamilyKind kind_ = FamilyKind::Interval;
  std::size_t m_ = 1;
  Vec center_;
  Polytope shape_;
};

bool contains(const DesignFamily& fam, const DesignPoint& d, const Scenario& u);

struct InnerMaxConfig {
  std::size_t grid = 64;       ///< points per axis for general-flag functions
  double refine_tol = 1e-10;   ///< golden-section tolerance in u
};

struct InnerMaxResult {
  double value;
  Scenario witness;
};

using ScenarioFunction = std::function<double(ConstSpan u)>;

/// sup of phi over W(d) ∩ box with an attaining scenario.
///
/// Convex (and, on boxes, monotone) functions are evaluated on the vertices of
/// the set only, which is exact. Everything else goes through a uniform grid
/// followed by cyclic golden-section refinement around the best grid point.
/// Balls use a polar grid (boundary only for convex functions).
InnerMaxResult inner_max(const DesignFamily& fam, const DesignPoint& d, const ScenarioFunction& phi,
                         Convexity flag, const Box& box, const InnerMaxConfig& cfg = {});

struct ClipResult {
  DesignPoint d;
  bool truncated = false;
};

/// Design point for W(d) ∩ box. Intervals and boxes clip exactly; balls and
/// scaled sets come back unchanged with `truncated` set when the box cuts them.
ClipResult clip_to_box(const DesignFamily& fam, const DesignPoint& d, const Box& box);

}  // namespace invrob
