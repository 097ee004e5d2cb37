// SPDX-License-Identifier: Apache-2.0
//
// Acceptance criteria, one line each:  AC<n> PASS|FAIL  <summary>  (<details>)
// Run a single criterion with --only N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "invrob/bicriteria.hpp"
#include "invrob/cli.hpp"
#include "invrob/gsip.hpp"
#include "invrob/measures.hpp"
#include "invrob/radii.hpp"
#include "invrob/spec_io.hpp"
#include "oracle_values.hpp"

using namespace invrob;

namespace {

const std::string kSpecs = std::string(INVROB_SOURCE_DIR) + "/specs/";

struct Outcome {
  bool pass = false;
  std::string details;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const bicriteria::Instance& example() {
  static const bicriteria::Instance inst = bicriteria::make_instance();
  return inst;
}

std::vector<Vec> example_grid() { return cli::expand_grid(cli::parse_grid("0:5:0.5,0:5:0.5")); }

std::vector<GridCell> run_grid(std::size_t jobs = 0) {
  const auto& inst = example();
  return solve_grid(inst.prob, bicriteria::budget(inst, 0.0, 0.0), inst.sel, inst.fam, inst.measure, SolverConfig{},
                    example_grid(), jobs);
}

// Cells are row-major: index = 11 * i1 + i2 with eps = (0.5 i1, 0.5 i2).
const SolveResult& cell(const std::vector<GridCell>& g, int i1, int i2) { return *g[11 * i1 + i2].result; }

std::string failed_cells(const std::vector<GridCell>& g) {
  std::string s;
  for (const auto& c : g)
    if (!c.result) s += fmt("(%g,%g) ", c.eps[0], c.eps[1]);
  return s;
}

Outcome ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream out, err;
  const char* argv[] = {"invrob", "example", "--eps", "0,0", "--format", "json"};
  const int code = cli::run(6, argv, out, err);
  const double t = seconds_since(t0);
  if (code != 0) return {false, "exit code " + std::to_string(code) + ": " + err.str()};
  const auto j = nlohmann::json::parse(out.str()).at(0).at("result");
  const double x = j["x_star"][0], d1 = j["d_star"][0], d2 = j["d_star"][1], V = j["V_star"];
  const double e = std::max({std::abs(x - 2.0), std::abs(d1), std::abs(d2), std::abs(V)});
  return {e <= 1e-6 && t < 1.0, fmt("x*=%.10f d*=(%.3g, %.3g) V*=%.3g max error %.2e, %.3f s", x, d1, d2, V, e, t)};
}

Outcome ac2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = run_grid();
  const double t = seconds_since(t0);
  const auto bad = failed_cells(g);
  if (!bad.empty()) return {false, "failed cells " + bad};
  double vmax = 0.0;
  for (const auto& c : g) vmax = std::max(vmax, c.result->V_star);
  return {vmax < 0.8414 && t < 60.0, fmt("121 cells, max V* = %.10f, sweep %.1f s", vmax, t)};
}

Outcome ac3() {
  const auto g = run_grid();
  const auto bad = failed_cells(g);
  if (!bad.empty()) return {false, "failed cells " + bad};
  double worst = 0.0;
  Vec at;
  for (const auto& c : g) {
    const auto& r = *c.result;
    const double res = std::abs(2.0 * r.x_star[0] - r.d_star[0] - (4.0 + c.eps[1]));
    if (res >= worst) {
      worst = res;
      at = c.eps;
    }
  }
  return {worst <= 1e-6, fmt("max |2x* - d1* - (4 + eps2)| = %.2e at (%g, %g)", worst, at[0], at[1])};
}

Outcome ac4() {
  const auto g = run_grid();
  const auto bad = failed_cells(g);
  if (!bad.empty()) return {false, "failed cells " + bad};
  double worst = 0.0;
  for (int i2 = 0; i2 <= 10; ++i2) worst = std::max(worst, std::abs(cell(g, 6, i2).V_star - cell(g, 10, i2).V_star));
  // Where the plateau starts empirically: first eps1 whose row matches eps1 = 5 everywhere.
  int start = 10;
  for (int i1 = 10; i1 >= 0; --i1) {
    bool same = true;
    for (int i2 = 0; i2 <= 10; ++i2) same = same && std::abs(cell(g, i1, i2).V_star - cell(g, 10, i2).V_star) <= 1e-6;
    if (!same) break;
    start = i1;
  }
  return {worst <= 1e-6, fmt("max |V*(3, e2) - V*(5, e2)| = %.2e; rows agree from eps1 = %g on", worst, 0.5 * start)};
}

Outcome ac5() {
  const auto g = run_grid();
  const auto bad = failed_cells(g);
  if (!bad.empty()) return {false, "failed cells " + bad};
  int pairs = 0, violations = 0;
  for (int i1 = 0; i1 <= 10; ++i1)
    for (int i2 = 0; i2 <= 10; ++i2) {
      const double v = cell(g, i1, i2).V_star;
      if (i1 < 10) {
        ++pairs;
        violations += cell(g, i1 + 1, i2).V_star < v - 1e-8;
      }
      if (i2 < 10) {
        ++pairs;
        violations += cell(g, i1, i2 + 1).V_star < v - 1e-8;
      }
    }
  double vmax = 0.0, base = 0.0;
  for (const auto& c : g) {
    vmax = std::max(vmax, c.result->V_star);
    base = std::max(base, std::abs(c.result->V_star - bicriteria::brute_force_reduced(c.eps[0], c.eps[1], 2000).V));
  }
  const double v00 = cell(g, 0, 0).V_star;
  const bool ok = pairs == 220 && violations == 0 && vmax >= 0.75 && vmax <= 0.8414 && std::abs(v00) <= 1e-6 &&
                  base <= 1e-3;
  return {ok, fmt("%d comparisons, %d decreases; V*(0,0) = %.2e; max V* = %.6f; max |V* - brute force| = %.2e", pairs,
                  violations, v00, vmax, base)};
}

Outcome ac6() {
  const auto& inst = example();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> E(0.0, 6.0);
  double worst = 0.0;
  for (int k = 0; k < 25; ++k) {
    const double e1 = E(rng), e2 = E(rng);
    const auto r = solve(inst.prob, bicriteria::budget(inst, e1, e2), inst.sel, inst.fam, inst.measure);
    worst = std::max(worst, std::abs(r.V_star - bicriteria::brute_force_reduced(e1, e2, 2000).V));
  }
  return {worst <= 1e-3, fmt("25 random eps in [0,6]^2, max |V* - brute force(2000)| = %.2e", worst)};
}

Outcome ac7() {
  const auto rep = bicriteria::limit_checks({0.0, 5.0, 10.0, 20.0});
  std::string trace;
  for (std::size_t k = 0; k < rep.results.size(); ++k) {
    const auto& r = rep.results[k];
    trace += fmt("e2=%g: x*=%.4f d1*=%.4f d2*=%.4f; ", rep.eps2[k], r.x_star[0], r.d_star[0], r.d_star[1]);
  }
  const double d2_last = rep.results.back().d_star[1];
  const bool ok = rep.d2_increasing && rep.d1_decreasing && rep.x_increasing && d2_last >= 0.9;
  return {ok, trace + fmt("trends %s/%s/%s, d2*(20) = %.6f vs required 0.9 (m^-1(x*(20)) = %.6f caps d2*)",
                          rep.d2_increasing ? "up" : "NOT up", rep.d1_decreasing ? "down" : "NOT down",
                          rep.x_increasing ? "up" : "NOT up", d2_last,
                          bicriteria::helper_m_inverse(rep.results.back().x_star[0]))};
}

Outcome ac8() {
  const double e1 = std::abs(std_normal_cdf(1.0) - oracle::kPsi1);
  const bool half = std_normal_cdf(0.0) == 0.5;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> T(-10.0, 10.0);
  double refl = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double t = T(rng);
    refl = std::max(refl, std::abs(std_normal_cdf(t) + std_normal_cdf(-t) - 1.0));
  }
  return {e1 <= 1e-9 && half && refl <= 1e-12,
          fmt("|Psi(1) - oracle| = %.2e, Psi(0) = %.17g, max reflection error %.2e", e1, std_normal_cdf(0.0), refl)};
}

// Dense-grid oracles for the radius instances. They share nothing with the
// solvers beyond evaluating the objective.

double stability_oracle(const UncertainProblem& p, double xbar, double eps) {
  const double hu = 2.5e-4, hx = 5e-3;
  const int nu = 8000;  // |u| up to 2
  const int nx = static_cast<int>(std::lround(p.decision_box.width(0) / hx));
  auto f = [&](double x, double u) { return p.objectives[0].eval(Vec{x}, Vec{u}); };
  double last_ok = 0.0;
  for (int k = 0; k <= nu; ++k) {
    for (double u : {k * hu, -k * hu}) {
      double best = INFINITY;
      for (int i = 0; i <= nx; ++i) best = std::min(best, f(p.decision_box.lo[0] + i * hx, u));
      if (f(xbar, u) - best > eps) return last_ok;
    }
    last_ok = k * hu;
  }
  return last_ok;
}

double resilience_oracle(const UncertainProblem& p, double B) {
  const double hu = 1e-4, hx = 1e-3;
  const int nx = static_cast<int>(std::lround(p.decision_box.width(0) / hx));
  auto f = [&](double x, double u) { return p.objectives[0].eval(Vec{x}, Vec{u}); };
  double best = -1.0;
  for (int i = 0; i <= nx; ++i) {
    const double x = p.decision_box.lo[0] + i * hx;
    double rho = -1.0;
    for (int k = 0; k * hu <= 12.0; ++k) {
      if (f(x, k * hu) > B || f(x, -k * hu) > B) break;
      rho = k * hu;
    }
    best = std::max(best, rho);
  }
  return best;
}

double rrf_oracle(double a, double b, const std::vector<Vec>& Z, const Box& xbox) {
  // Z grid: 5 x 5 over Z's bounding box, kept where inside the (box-shaped) Z.
  double zlo[2] = {INFINITY, INFINITY}, zhi[2] = {-INFINITY, -INFINITY};
  for (const auto& z : Z)
    for (int i = 0; i < 2; ++i) {
      zlo[i] = std::min(zlo[i], z[i]);
      zhi[i] = std::max(zhi[i], z[i]);
    }
  std::vector<std::pair<double, double>> zs;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j) zs.emplace_back(zlo[0] + i * (zhi[0] - zlo[0]) / 4, zlo[1] + j * (zhi[1] - zlo[1]) / 4);
  const double hx = 1e-3, ha = 1e-4;
  const int nx = static_cast<int>(std::lround(xbox.width(0) / hx));
  double best = -1.0;
  for (int i = 0; i <= nx; ++i) {
    const double x = xbox.lo[0] + i * hx;
    double alpha = -1.0;
    for (int k = 0; k * ha <= 12.0; ++k) {
      const double al = k * ha;
      bool ok = true;
      for (auto [za, zb] : zs) ok = ok && (a + al * za) * x <= b + al * zb;
      if (!ok) break;
      alpha = al;
    }
    best = std::max(best, alpha);
  }
  return best;
}

Outcome ac9() {
  const auto st = spec::load(kSpecs + "stability.json");
  const auto rs = spec::load(kSpecs + "resilience.json");
  const auto lp = spec::load(kSpecs + "toy_lp.json");

  const double s = stability_radius(st.prob, Decision(st.radius->xbar), st.radius->epsilon).radius;
  const double s_bf = stability_oracle(st.prob, st.radius->xbar[0], st.radius->epsilon);
  const double r = resilience_radius(rs.prob, rs.radius->level, rs.solver).radius;
  const double r_bf = resilience_oracle(rs.prob, rs.radius->level);
  const auto& R = *lp.radius;
  const double q = radius_of_robust_feasibility(R.A, R.b, R.Z, lp.prob.decision_box, lp.solver).radius;
  const double q_bf = rrf_oracle(R.A[0][0], R.b[0], R.Z, lp.prob.decision_box);
  std::vector<Vec> Z2 = R.Z;
  for (auto& z : Z2)
    for (auto& v : z) v *= 2.0;
  const double q2 = radius_of_robust_feasibility(R.A, R.b, Z2, lp.prob.decision_box, lp.solver).radius;

  // Matched pair: the resilience spec uses B = f_0(x-bar) + eps of the stability spec.
  const double B = evaluate_objective(st.prob, 0, Decision(st.radius->xbar), st.prob.nominal_scenarios[0]) +
                   st.radius->epsilon;
  const bool matched = B == rs.radius->level;

  const bool ok = std::abs(s - s_bf) <= 1e-3 && std::abs(r - r_bf) <= 1e-3 && std::abs(q - q_bf) <= 1e-3 &&
                  std::abs(q2 - 0.5 * q) <= 1e-6 && matched && r >= s - 1e-6;
  return {ok, fmt("stability %.8f (grid %.6f), resilience %.8f (grid %.6f), rrf %.8f (grid %.6f), rrf(2Z) %.8f, "
                  "resilience - stability = %.2e",
                  s, s_bf, r, r_bf, q, q_bf, q2, r - s)};
}

// Random convex-in-u instances on intervals:
//   f1 = -x + a1 u + b1 u^2,  f2 = 2x - a2 u + b2 u^2,  g = x (k2 u - 1) + e^(k u) - 1,
// f* = (-xb, 2xb), u ~ N(0, 1). All rows are affine in x.
struct HullInstance {
  double a1, b1, a2, b2, k, k2, xb, e1, e2;

  // Row r at scenario u as c x <= rhs.
  std::pair<double, double> row(int r, double u) const {
    switch (r) {
      case 0: return {-1.0, -xb + e1 - a1 * u - b1 * u * u};
      case 1: return {2.0, 2.0 * xb + e2 + a2 * u - b2 * u * u};
      default: return {k2 * u - 1.0, 1.0 - std::exp(k * u)};
    }
  }
  double value(int r, double x, double u) const {
    const auto [c, rhs] = row(r, u);
    return c * x - rhs;
  }
};

UncertainProblem hull_problem(const HullInstance& in) {
  UncertainProblem p;
  p.n = 1;
  p.m = 1;
  p.objectives = {
      {[=](ConstSpan x, ConstSpan u) { return -x[0] + in.a1 * u[0] + in.b1 * u[0] * u[0]; }, Convexity::ConvexInU, ""},
      {[=](ConstSpan x, ConstSpan u) { return 2 * x[0] - in.a2 * u[0] + in.b2 * u[0] * u[0]; }, Convexity::ConvexInU,
       ""},
  };
  p.constraints = {{[=](ConstSpan x, ConstSpan u) { return x[0] * (in.k2 * u[0] - 1) + std::exp(in.k * u[0]) - 1; },
                    Convexity::ConvexInU, ""}};
  p.uncertainty_box = Box({-12.0}, {12.0});
  p.decision_box = Box({-10.0}, {30.0});
  p.nominal_scenarios = {Scenario{0.0}};
  return p;
}

Outcome ac10() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> A(0.5, 1.5), Bq(0.0, 0.5), K(0.5, 1.5), X(1.0, 3.0), E(0.0, 3.0),
      U(-2.5, 2.5);
  std::uniform_int_distribution<int> size(1, 5);
  const double tol = 2e-8;
  double worst_gain = -INFINITY, worst_attain = 0.0, worst_hull = -INFINITY;
  std::size_t feasible_subsets = 0;
  for (int t = 0; t < 20; ++t) {
    const HullInstance in{A(rng), Bq(rng), A(rng), Bq(rng), K(rng), K(rng), X(rng), E(rng), E(rng)};
    const auto prob = hull_problem(in);
    const auto r = solve(prob, BudgetSpec::additive({-in.xb, 2.0 * in.xb}, Vec{in.e1, in.e2}), Selectors{},
                         DesignFamily::interval(), MeasureSpec::gaussian({0.0}, {1.0}));
    double best = -INFINITY;
    for (int s = 0; s < 500; ++s) {
      // Subset 0 holds the optimum's endpoints; the rest are random. All contain the nominal scenario.
      std::vector<double> S{0.0};
      if (s == 0) {
        S.push_back(r.d_star[0]);
        S.push_back(r.d_star[1]);
      } else {
        for (int k = size(rng); k > 0; --k) S.push_back(U(rng));
      }
      // Exact feasible x-interval of the finite problem.
      double lo = prob.decision_box.lo[0], hi = prob.decision_box.hi[0];
      bool empty = false;
      for (double u : S)
        for (int row = 0; row < 3; ++row) {
          const auto [c, rhs] = in.row(row, u);
          if (c > 0) hi = std::min(hi, (rhs + tol) / c);
          else if (c < 0) lo = std::max(lo, (rhs + tol) / c);
          else empty = empty || rhs + tol < 0;
        }
      if (empty || lo > hi) continue;
      ++feasible_subsets;
      const double ulo = *std::min_element(S.begin(), S.end()), uhi = *std::max_element(S.begin(), S.end());
      // Every x feasible on S stays feasible on the hull interval (dense check).
      for (double x : {lo, 0.5 * (lo + hi), hi})
        for (int k = 0; k <= 2000; ++k) {
          const double u = ulo + (uhi - ulo) * k / 2000.0;
          for (int row = 0; row < 3; ++row) worst_hull = std::max(worst_hull, in.value(row, x, u) - tol);
        }
      const double V = std_normal_cdf(uhi) - std_normal_cdf(ulo);
      best = std::max(best, V);
    }
    worst_gain = std::max(worst_gain, best - r.V_star);
    worst_attain = std::max(worst_attain, std::abs(best - r.V_star));
  }
  const bool ok = worst_gain <= 1e-6 && worst_attain <= 1e-6 && worst_hull <= 1e-12;
  return {ok, fmt("20 instances, %zu feasible subsets of 10000; max (best hull V - V*) = %.2e, "
                  "max |best - V*| = %.2e, max hull violation beyond S = %.2e",
                  feasible_subsets, worst_gain, worst_attain, worst_hull)};
}

Outcome ac11() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& inst = example();
  std::string notes;
  bool ok = true;

  // Selector closure and transitivity.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> L(-4.0, 0.0), G(0.0, 2.0), X(-5.0, 5.0);
  std::size_t closure_bad = 0, trans_bad = 0;
  for (const auto& sel : {ScenarioSelector::identity(), ScenarioSelector::nominal_only()})
    for (int t = 0; t < 50; ++t) {
      const Vec x{X(rng)};
      const DesignPoint d1{L(rng), G(rng)};
      const DesignPoint d2{d1[0] - G(rng), d1[1] + G(rng)};
      const auto s1 = select(sel, inst.fam, x, d1, inst.prob.nominal_scenarios);
      const auto s2 = select(sel, inst.fam, x, d2, inst.prob.nominal_scenarios);
      for (int k = 0; k < 100; ++k) {
        const auto u = sample_selection(s1, inst.fam, rng);
        closure_bad += !inst.fam.contains(d1, u.span());
        trans_bad += !selection_contains(s2, inst.fam, u);
      }
    }
  ok = ok && closure_bad == 0 && trans_bad == 0;
  notes += fmt("selector closure/transitivity failures %zu/%zu; ", closure_bad, trans_bad);

  // Determinism: two sweeps with different worker counts, compared cell by cell and as CSV bytes.
  const auto g1 = run_grid(1);
  const auto g2 = run_grid(0);
  bool same = failed_cells(g1).empty() && failed_cells(g2).empty();
  for (std::size_t i = 0; same && i < g1.size(); ++i) {
    const auto &a = *g1[i].result, &b = *g2[i].result;
    same = a.x_star == b.x_star && a.d_star == b.d_star && a.V_star == b.V_star && a.rounds == b.rounds;
  }
  const bool csv_same = same && cli::grid_csv(g1) == cli::grid_csv(g2);
  ok = ok && same && csv_same;
  notes += fmt("reruns bit-identical: %s, CSV identical: %s; ", same ? "yes" : "no", csv_same ? "yes" : "no");

  // Audit every cell on a grid four times the solver's.
  const SolverConfig cfg;
  double worst = 0.0;
  for (const auto& c : g1) {
    if (!c.result) continue;
    const auto b = bicriteria::budget(inst, c.eps[0], c.eps[1]);
    worst = std::max(worst, verify(*c.result, inst.prob, b, inst.sel, inst.fam, cfg, 4 * cfg.inner.grid).max_violation);
  }
  ok = ok && worst <= 2.0 * cfg.feasibility_tol;
  const double t = seconds_since(t0);
  notes += fmt("max audited violation %.2e (limit %.0e); %.1f s", worst, 2.0 * cfg.feasibility_tol, t);
  return {ok, notes};
}

struct Criterion {
  const char* summary;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {"zero-budget exactness", ac1},
      {"global upper bound over the 11x11 grid", ac2},
      {"active-constraint identity on every cell", ac3},
      {"eps1 plateau from 3", ac4},
      {"grid shape and brute-force baselines", ac5},
      {"oracle equivalence on random budgets", ac6},
      {"limit trends along eps2", ac7},
      {"normal distribution function", ac8},
      {"radii against dense grids", ac9},
      {"convex-hull optimality", ac10},
      {"property suites", ac11},
  };

  bool all_pass = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("AC%zu %s  %s  (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", all[i].summary, o.details.c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
