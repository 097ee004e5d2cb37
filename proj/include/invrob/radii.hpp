// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invrob/gsip.hpp"

namespace invrob {

struct RadiusResult {
  std::string kind;  ///< "stability" | "resilience" | "rrf"
  double radius = 0.0;
  Decision x;                         ///< fixed x-bar (stability) or certifying decision
  Scenario witness;                   ///< worst scenario at the returned radius
  std::optional<Decision> comparison; ///< stability: best competitor at the witness
  bool truncated = false;             ///< radius hit the finite search margin
  double bracket_lo = 0.0;            ///< stability: final bisection bracket
  double bracket_hi = 0.0;
  std::optional<SolveResult> solve;   ///< resilience / rrf: underlying solve
};

struct StabilityConfig {
  double radius_tol = 1e-6;  ///< bisection width
  double gap_tol = 1e-8;     ///< epsilon-optimality slack
  InnerMaxConfig inner;      ///< maximization over the ball
  std::size_t x_grid = 9;    ///< competitor search: grid points per axis
  std::size_t x_refine = 3;  ///< competitor search: compass restarts
};

/// Largest rho with f_u(xbar) <= f_u(x) + eps for all x in Xbar and all u in
/// the ball B_rho(u-bar). Xbar is the decision box intersected with the
/// problem's constraints evaluated at the nominal scenario; u-bar is the first
/// nominal scenario and objective 0 is used.
RadiusResult stability_radius(const UncertainProblem& prob, const Decision& xbar, double eps,
                              const StabilityConfig& cfg = {});

/// Largest ball around u-bar on which some x in Xbar keeps f_u(x) <= B.
/// Solved as an inverse problem over balls with volume measure and a fixed
/// budget level.
RadiusResult resilience_radius(const UncertainProblem& prob, double B, const SolverConfig& cfg = {});

/// Budget level standing in for an infinite budget.
inline constexpr double kInactiveBudget = 1e12;

/// Radius of robust feasibility of { x : a_j x <= b_j } under perturbations
/// (a_j, b_j) in (a-bar_j, b-bar_j) + alpha Z, Z given by vertices in R^{n+1}
/// and containing the origin.
///
/// Each row depends only on its own perturbation, so all rows can share one
/// perturbation coordinate z in R^{n+1}: requiring every row for every
/// z in alpha Z is the same as requiring row j for every (a_j, b_j) in its own
/// set. This keeps the scenario space at n + 1 dimensions (n <= 2).
RadiusResult radius_of_robust_feasibility(const std::vector<Vec>& A_bar, const Vec& b_bar,
                                          const std::vector<Vec>& Z, const Box& decision_box,
                                          const SolverConfig& cfg = {}, double margin = kDefaultMargin);

}  // namespace invrob
