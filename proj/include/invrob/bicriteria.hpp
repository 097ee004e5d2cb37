// SPDX-License-Identifier: Apache-2.0
#pragma once

// Built-in bi-criteria instance "bicriteria-normal":
//
//   f1(x, u) = -x + u,  f2(x, u) = 2x - u,  g(x, u) = x (u - 1) + e^u - 1,
//   u ~ N(0, 1), nominal u = 0, Pareto point f* = (-2, 4) attained at x = 2,
//   coverage sets are intervals [d1, d2].
//
// With convex rows the worst cases sit at the interval ends, so the problem
// reduces to three variables:
//
//   max  Psi(d2) - Psi(d1)
//   s.t. -x + d2 <= -2 + eps1,   2x - d1 <= 4 + eps2,
//        x (d2 - 1) + e^d2 - 1 <= 0,   d1 <= 0 <= d2.
//
// At every optimum the second budget row is active, x = (d1 + eps2)/2 + 2,
// and d2 stays below 1. The helpers here give analytic reference points for
// that reduced problem.

#include <cstddef>
#include <vector>

#include "invrob/gsip.hpp"

namespace invrob::bicriteria {

inline constexpr const char* kName = "bicriteria-normal";

struct Instance {
  UncertainProblem prob;
  DesignFamily fam = DesignFamily::interval();
  MeasureSpec measure;
  Selectors sel;
  Vec f_star;
};

Instance make_instance(double margin = kDefaultMargin);

BudgetSpec budget(const Instance& inst, double eps1, double eps2);

/// (e^t - 1) / (1 - t) on [0, 1); strictly increasing from 0 to infinity.
double helper_m(double t);

/// Inverse of helper_m by bisection on [0, 1 - 1e-15].
double helper_m_inverse(double y);

struct ReducedPoint {
  double x = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Largest violation of the reduced constraints at p (<= 0 means feasible).
double reduced_violation(double eps1, double eps2, const ReducedPoint& p);

/// Explicit feasible point (eps2/4 + 2, -eps2/2, min(eps2/4 + eps1, m^-1(eps2/4 + 2))).
ReducedPoint feasible_point(double eps1, double eps2);

/// Compact box containing every feasible (x, d1, d2); the open bound d2 < 1
/// is represented by 1 - 1e-12.
Box analytic_bounds(double eps1, double eps2);

struct BruteForce {
  double V = 0.0;
  ReducedPoint at;
};

/// Dense scan of (d1, d2) over the bounds' d-box (d1 also clipped to the
/// -margin search window) with x taken from the active-row identity.
BruteForce brute_force_reduced(double eps1, double eps2, std::size_t grid_n, double margin = kDefaultMargin);

struct LimitReport {
  std::vector<double> eps2;
  std::vector<SolveResult> results;
  bool d2_increasing = true;
  bool d1_decreasing = true;
  bool x_increasing = true;
  bool V_increasing = true;
  double V_max = 0.0;
};

/// Solves along an increasing eps2 sequence with fixed eps1 and reports trends.
LimitReport limit_checks(const std::vector<double>& eps2_sequence, double eps1 = 0.0, const SolverConfig& cfg = {});

struct ParetoCheck {
  bool on_front = false;  ///< f* = t(-1, 2) for some t >= 0
  bool attained = false;  ///< x = 2 reaches f* and satisfies g(2, 0) <= 0
  double g_value = 0.0;
};

/// Nominal problem at u = 0: min (-x, 2x) s.t. x(-1) <= 0 has front {t(-1, 2) : t >= 0}.
ParetoCheck nominal_pareto_check(const Instance& inst);

}  // namespace invrob::bicriteria
