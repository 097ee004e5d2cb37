// SPDX-License-Identifier: Apache-2.0
#include "invrob/bicriteria.hpp"

#include <algorithm>
#include <cmath>

#include "invrob/errors.hpp"
#include "invrob/kernels.hpp"

namespace invrob::bicriteria {

Instance make_instance(double margin) {
  Instance inst;
  UncertainProblem& p = inst.prob;
  p.name = kName;
  p.n = 1;
  p.m = 1;
  p.objectives = {
      {[](ConstSpan x, ConstSpan u) { return -x[0] + u[0]; }, Convexity::ConvexInU, "-x[0] + u[0]"},
      {[](ConstSpan x, ConstSpan u) { return 2 * x[0] - u[0]; }, Convexity::ConvexInU, "2*x[0] - u[0]"},
  };
  p.constraints = {
      {[](ConstSpan x, ConstSpan u) { return x[0] * (u[0] - 1) + std::exp(u[0]) - 1; }, Convexity::ConvexInU,
       "x[0]*(u[0] - 1) + exp(u[0]) - 1"},
  };
  p.uncertainty_box = Box({-margin}, {margin});
  p.decision_box = Box({-10.0}, {30.0});
  p.nominal_scenarios = {Scenario{0.0}};
  inst.measure = MeasureSpec::gaussian({0.0}, {1.0});
  inst.f_star = {-2.0, 4.0};
  return inst;
}

BudgetSpec budget(const Instance& inst, double eps1, double eps2) {
  return BudgetSpec::additive(inst.f_star, {eps1, eps2});
}

double helper_m(double t) {
  if (!(t >= 0.0) || t >= 1.0) throw DomainError("helper_m is defined on [0, 1)");
  return std::expm1(t) / (1.0 - t);
}

double helper_m_inverse(double y) {
  if (!(y >= 0.0)) throw DomainError("helper_m_inverse needs y >= 0");
  if (y == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0 - 1e-15;
  if (helper_m(hi) <= y) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = helper_m(mid);
    if (std::abs(v - y) <= 1e-12 * y) return mid;
    (v < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double reduced_violation(double eps1, double eps2, const ReducedPoint& p) {
  return std::max({-p.x + p.d2 + 2.0 - eps1, 2.0 * p.x - p.d1 - 4.0 - eps2,
                   p.x * (p.d2 - 1.0) + std::expm1(p.d2), p.d1, -p.d2});
}

ReducedPoint feasible_point(double eps1, double eps2) {
  if (eps1 < 0.0 || eps2 < 0.0) throw DomainError("feasible_point needs eps >= 0");
  return {eps2 / 4.0 + 2.0, -eps2 / 2.0, std::min(eps2 / 4.0 + eps1, helper_m_inverse(eps2 / 4.0 + 2.0))};
}

Box analytic_bounds(double eps1, double eps2) {
  if (eps1 < 0.0 || eps2 < 0.0) throw DomainError("analytic_bounds needs eps >= 0");
  return Box({std::max(2.0 - eps1, 0.0), -4.0 - eps2, 0.0},
             {2.0 + eps2 / 2.0, 0.0, std::min(eps2 / 2.0 + eps1, 1.0 - 1e-12)});
}

BruteForce brute_force_reduced(double eps1, double eps2, std::size_t grid_n, double margin) {
  if (grid_n < 2) throw UsageError("brute_force_reduced needs grid_n >= 2");
  const Box b = analytic_bounds(eps1, eps2);
  const double d1_lo = std::max(b.lo[1], -margin);
  const double d2_hi = b.hi[2];
  auto node = [&](double lo, double hi, std::size_t k) {
    if (k + 1 == grid_n) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_n - 1);
  };

  // Per d2 column: value Psi(d2) and the two x-dependent rows a*x + b <= 0.
  Vec v(grid_n), a1(grid_n, -1.0), b1(grid_n), a3(grid_n), b3(grid_n), d2s(grid_n);
  for (std::size_t j = 0; j < grid_n; ++j) {
    const double d2 = node(0.0, d2_hi, j);
    d2s[j] = d2;
    v[j] = std_normal_cdf(d2);
    b1[j] = d2 + 2.0 - eps1;
    a3[j] = d2 - 1.0;
    b3[j] = std::expm1(d2);
  }
  const double* as[] = {a1.data(), a3.data()};
  const double* bs[] = {b1.data(), b3.data()};

  BruteForce best;
  best.V = -1.0;
  for (std::size_t i = 0; i < grid_n; ++i) {
    const double d1 = node(d1_lo, 0.0, i);
    const double x = (d1 + eps2) / 2.0 + 2.0;
    const std::ptrdiff_t j = kernels::feasible_argmax(v, as, bs, x, 0.0);
    if (j < 0) continue;
    const double V = v[static_cast<std::size_t>(j)] - std_normal_cdf(d1);
    if (V > best.V) best = {V, {x, d1, d2s[static_cast<std::size_t>(j)]}};
  }
  return best;
}

LimitReport limit_checks(const std::vector<double>& eps2_sequence, double eps1, const SolverConfig& cfg) {
  for (std::size_t i = 1; i < eps2_sequence.size(); ++i)
    if (!(eps2_sequence[i] > eps2_sequence[i - 1])) throw UsageError("limit_checks needs an increasing sequence");
  const Instance inst = make_instance();
  LimitReport rep;
  rep.eps2 = eps2_sequence;
  for (double e2 : eps2_sequence)
    rep.results.push_back(solve(inst.prob, budget(inst, eps1, e2), inst.sel, inst.fam, inst.measure, cfg));
  for (std::size_t i = 1; i < rep.results.size(); ++i) {
    const auto &a = rep.results[i - 1], &b = rep.results[i];
    rep.d2_increasing = rep.d2_increasing && b.d_star[1] > a.d_star[1];
    rep.d1_decreasing = rep.d1_decreasing && b.d_star[0] < a.d_star[0];
    rep.x_increasing = rep.x_increasing && b.x_star[0] > a.x_star[0];
    rep.V_increasing = rep.V_increasing && b.V_star > a.V_star;
  }
  for (const auto& r : rep.results) rep.V_max = std::max(rep.V_max, r.V_star);
  return rep;
}

ParetoCheck nominal_pareto_check(const Instance& inst) {
  ParetoCheck c;
  const Vec& f = inst.f_star;
  // (-x, 2x) over x >= 0 traces t(-1, 2); f* lies on it iff f2 = -2 f1 with f1 <= 0.
  c.on_front = f.size() == 2 && f[0] <= 0.0 && f[1] == -2.0 * f[0];
  const Decision x{2.0};
  const Scenario u{0.0};
  c.g_value = evaluate_constraint(inst.prob, 0, x, u);
  c.attained = evaluate_objective(inst.prob, 0, x, u) == f[0] && evaluate_objective(inst.prob, 1, x, u) == f[1] &&
               c.g_value <= 0.0;
  return c;
}

}  // namespace invrob::bicriteria
