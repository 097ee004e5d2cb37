// SPDX-License-Identifier: Apache-2.0
#include "invrob/radii.hpp"

#include <algorithm>
#include <cmath>

#include "invrob/local_search.hpp"

namespace invrob {
namespace {

constexpr double kPenaltyBase = 1e100;

struct Competitor {
  double value;
  Vec x;
};

class StabilityCheck {
 public:
  StabilityCheck(const UncertainProblem& prob, const Decision& xbar, double eps, const StabilityConfig& cfg)
      : prob_(prob), xbar_(xbar), eps_(eps), cfg_(cfg), ubar_(prob.nominal_scenarios.front().values) {}

  // min over x in Xbar of f_u(x); infeasible x ranked above every feasible one.
  Competitor best_competitor(ConstSpan u) const {
    const Objective f = [&](ConstSpan x) {
      double viol = 0.0;
      for (std::size_t j = 0; j < prob_.q(); ++j)
        viol = std::max(viol, evaluate_function(prob_.constraints[j], j, x, ubar_));
      if (viol > 0.0) return kPenaltyBase + viol;
      return evaluate_function(prob_.objectives[0], 0, x, u);
    };
    CompassConfig cc;
    cc.min_step = 1e-12;
    auto r = multistart_minimize(f, prob_.decision_box, cfg_.x_grid, cfg_.x_refine, cc);
    // x-bar itself is always a candidate.
    const double at_bar = f(xbar_.values);
    if (at_bar <= r.value) return {at_bar, xbar_.values};
    return {r.value, std::move(r.x)};
  }

  double gap(ConstSpan u) const {
    return evaluate_function(prob_.objectives[0], 0, xbar_.values, u) - best_competitor(u).value - eps_;
  }

  InnerMaxResult worst(double rho) const {
    const DesignFamily ball = DesignFamily::ball(ubar_);
    const ScenarioFunction phi = [&](ConstSpan u) { return gap(u); };
    return inner_max(ball, DesignPoint{rho}, phi, Convexity::General, prob_.uncertainty_box, cfg_.inner);
  }

 private:
  const UncertainProblem& prob_;
  const Decision& xbar_;
  double eps_;
  const StabilityConfig& cfg_;
  Vec ubar_;
};

}  // namespace

RadiusResult stability_radius(const UncertainProblem& prob, const Decision& xbar, double eps,
                              const StabilityConfig& cfg) {
  prob.validate();
  if (!(eps >= 0.0)) throw UsageError("stability radius needs eps >= 0");
  if (xbar.dim() != prob.n || !prob.decision_box.contains(xbar.values))
    throw UsageError("x-bar must lie in the decision box");
  const Scenario& ubar = prob.nominal_scenarios.front();
  for (std::size_t j = 0; j < prob.q(); ++j)
    if (evaluate_constraint(prob, j, xbar, ubar) > 0.0) throw UsageError("x-bar violates the constraints of Xbar");

  const StabilityCheck check(prob, xbar, eps, cfg);
  RadiusResult res;
  res.kind = "stability";
  res.x = xbar;

  const DesignFamily ball = DesignFamily::ball(ubar.values);
  const double rho_max = ball.search_box(prob.uncertainty_box, {ubar.values}, kDefaultMargin * 1e6).hi[0];

  auto at0 = check.worst(0.0);
  if (at0.value > cfg.gap_tol)
    throw InfeasibleError("x-bar is not eps-optimal at the nominal scenario (gap " + std::to_string(at0.value) + ")");

  double lo = 0.0, hi = rho_max;
  InnerMaxResult best = at0;
  auto top = check.worst(hi);
  if (top.value <= cfg.gap_tol) {
    lo = hi;
    best = top;
    res.truncated = true;
  }
  while (hi - lo > cfg.radius_tol) {
    const double mid = 0.5 * (lo + hi);
    auto w = check.worst(mid);
    if (w.value <= cfg.gap_tol) {
      lo = mid;
      best = std::move(w);
    } else {
      hi = mid;
    }
  }
  res.radius = lo;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.witness = best.witness;
  res.comparison = Decision(check.best_competitor(best.witness.values).x);
  return res;
}

RadiusResult resilience_radius(const UncertainProblem& prob, double B, const SolverConfig& cfg) {
  prob.validate();
  UncertainProblem single = prob;
  single.objectives.resize(1);
  const DesignFamily ball = DesignFamily::ball(prob.nominal_scenarios.front().values);
  const SolveResult r =
      solve(single, BudgetSpec::fixed_level({B}), Selectors{}, ball, MeasureSpec::volume(), cfg);
  RadiusResult res;
  res.kind = "resilience";
  res.radius = r.d_star[0];
  res.x = r.x_star;
  res.truncated = r.truncated;
  for (const auto& row : r.active_set)
    if (row.id == "budget[0]") res.witness = row.witness;
  res.solve = r;
  return res;
}

RadiusResult radius_of_robust_feasibility(const std::vector<Vec>& A_bar, const Vec& b_bar,
                                          const std::vector<Vec>& Z, const Box& decision_box,
                                          const SolverConfig& cfg, double margin) {
  const std::size_t p = A_bar.size();
  if (p == 0 || b_bar.size() != p) throw UsageError("RRF needs a nonempty system with matching b");
  const std::size_t n = A_bar.front().size();
  for (const auto& row : A_bar)
    if (row.size() != n || n == 0) throw UsageError("RRF matrix rows must share one positive length");
  if (decision_box.dim() != n) throw UsageError("RRF decision box dimension differs from the matrix");
  if (n + 1 > 3) throw UnsupportedError("RRF supports at most 2 decision variables (perturbations in R^{n+1}, n+1 <= 3)");
  for (const auto& z : Z)
    if (z.size() != n + 1) throw UsageError("perturbation vertices must have length n + 1");

  auto row_value = [&A_bar, &b_bar, n](std::size_t j, ConstSpan x, ConstSpan u) {
    double s = -(b_bar[j] + u[n]);
    for (std::size_t k = 0; k < n; ++k) s += (A_bar[j][k] + u[k]) * x[k];
    return s;
  };

  // Nominal system first: an infeasible one has radius sup(empty set).
  {
    const Vec zero(n + 1, 0.0);
    const Objective worst = [&](ConstSpan x) {
      double v = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < p; ++j) v = std::max(v, row_value(j, x, zero));
      return v;
    };
    CompassConfig cc;
    cc.min_step = 1e-12;
    const auto r = multistart_minimize(worst, decision_box, 9, 3, cc, 0.0);
    if (r.value > cfg.feasibility_tol)
      throw InfeasibleError("nominal linear system is infeasible in the decision box (best max row " +
                            std::to_string(r.value) + ")");
  }

  const DesignFamily fam = DesignFamily::scaled_set(Vec(n + 1, 0.0), Z);
  if (!fam.shape().contains(Vec(n + 1, 0.0)))
    throw UsageError("perturbation set Z must contain the origin so the nominal system stays covered");

  UncertainProblem prob;
  prob.name = "rrf";
  prob.n = n;
  prob.m = n + 1;
  prob.objectives = {{[](ConstSpan, ConstSpan) { return 0.0; }, Convexity::ConvexInU, "0"}};
  for (std::size_t j = 0; j < p; ++j)
    prob.constraints.push_back(
        {[row_value, j](ConstSpan x, ConstSpan u) { return row_value(j, x, u); }, Convexity::ConvexInU, ""});
  prob.uncertainty_box = Box::cube(n + 1, -margin, margin);
  prob.decision_box = decision_box;
  prob.nominal_scenarios = {Scenario(Vec(n + 1, 0.0))};

  SolverConfig c = cfg;
  c.scale_cap = std::min(c.scale_cap, margin);
  const SolveResult r = solve(prob, BudgetSpec::fixed_level({kInactiveBudget}), Selectors{}, fam,
                              MeasureSpec::volume(), c);
  for (const auto& row : r.active_set)
    if (row.id.find("budget") != std::string::npos && row.slack < 0.5 * kInactiveBudget)
      throw ContractError("RRF budget surrogate became active");

  RadiusResult res;
  res.kind = "rrf";
  res.radius = r.d_star[0];
  res.x = r.x_star;
  res.truncated = r.truncated;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& row : r.active_set)
    if (row.id.rfind("constraint", 0) == 0 && -row.slack > worst) {
      worst = -row.slack;
      res.witness = row.witness;
    }
  res.solve = r;
  return res;
}

}  // namespace invrob
