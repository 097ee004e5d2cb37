// SPDX-License-Identifier: Apache-2.0
#include "invrob/gsip.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <Eigen/Dense>

#include "invrob/local_search.hpp"

namespace invrob {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
  bool budget;
  std::size_t index;
  const ScenarioSelector* sel;
  Convexity flag;
  std::string id;
};

// A relaxation cut: row `row` enforced at reference point y of the family.
struct Cut {
  std::size_t row;
  Vec y;
};

struct Candidate {
  DesignPoint d;
  Vec x;
  double viol = kInf;
  double V = -kInf;
  bool feasible = false;
};

class Exchange {
 public:
  Exchange(const UncertainProblem& prob, const BudgetSpec& budget, const Selectors& sel, const DesignFamily& fam,
           const MeasureSpec& spec, const SolverConfig& cfg)
      : prob_(prob), budget_(budget), sel_(sel), fam_(fam), spec_(spec), cfg_(cfg) {
    for (std::size_t i = 0; i < prob.p(); ++i)
      if (sel.phi1.kind != SelectorKind::NominalOnly)
        rows_.push_back({true, i, &sel.phi1, row_convexity(prob, budget, true, i), "budget[" + std::to_string(i) + "]"});
    for (std::size_t j = 0; j < prob.q(); ++j)
      if (sel.phi2.kind != SelectorKind::NominalOnly)
        rows_.push_back({false, j, &sel.phi2, prob.constraints[j].convexity, "constraint[" + std::to_string(j) + "]"});
    nominal_ = prob.nominal_vectors();
    dbox_ = fam.search_box(prob.uncertainty_box, nominal_, cfg.scale_cap);
    growth_ = fam.growth_signs();
    width_.resize(dbox_.dim());
    for (std::size_t k = 0; k < dbox_.dim(); ++k) width_[k] = dbox_.width(k);
  }

  SolveResult run();

 private:
  DesignPoint selected(const ScenarioSelector& s, ConstSpan x, const DesignPoint& d) const {
    if (s.kind == SelectorKind::Custom) return select(s, fam_, x, d, prob_.nominal_scenarios).d;
    return d;
  }

  // Max violation of the relaxation at (x, d); also accumulates the squared
  // positive parts, which is the smooth objective of the x search, and
  // optionally every row value.
  double relaxed_violation(ConstSpan x, const DesignPoint& d, double* penalty, Vec* values = nullptr) const {
    double mv = -kInf, pen = 0.0;
    if (values != nullptr) values->clear();
    auto take = [&](double v) {
      mv = std::max(mv, v);
      if (v > 0.0) pen += v * v;
      if (values != nullptr) values->push_back(v);
    };
    for (const auto& u : nominal_) {
      for (std::size_t i = 0; i < prob_.p(); ++i) take(row_value(prob_, budget_, true, i, x, u));
      for (std::size_t j = 0; j < prob_.q(); ++j) take(row_value(prob_, budget_, false, j, x, u));
    }
    if (!pool_.empty()) {
      const bool custom1 = sel_.phi1.kind == SelectorKind::Custom, custom2 = sel_.phi2.kind == SelectorKind::Custom;
      const DesignPoint d1 = custom1 ? selected(sel_.phi1, x, d) : DesignPoint{};
      const DesignPoint d2 = custom2 ? selected(sel_.phi2, x, d) : DesignPoint{};
      for (const auto& c : pool_) {
        const Row& r = rows_[c.row];
        const DesignPoint& ds = r.budget ? (custom1 ? d1 : d) : (custom2 ? d2 : d);
        const Vec u = fam_.from_reference(ds, c.y);
        take(row_value(prob_, budget_, r.budget, r.index, x, u));
      }
    }
    if (penalty != nullptr) *penalty = pen;
    return mv;
  }

  bool contains_nominal(const DesignPoint& d) const {
    for (const auto& u : nominal_)
      if (!fam_.contains(d, u)) return false;
    return true;
  }

  // Eliminates x for a fixed d: minimizes the penalty until it is negligible.
  Candidate evaluate(const DesignPoint& d, const Vec* warm) const {
    Candidate c;
    c.d = d;
    if (!fam_.is_feasible(d) || !contains_nominal(d)) return c;
    const Objective pen = [&](ConstSpan x) {
      double p = 0.0;
      relaxed_violation(x, d, &p);
      return p;
    };
    CompassConfig cc;
    cc.min_step = 1e-13;
    cc.max_evals = 5000;
    cc.stall_sweeps = 8;
    // P below this bound keeps every row under a quarter of the tolerance.
    const double enough = 0.0625 * cfg_.feasibility_tol * cfg_.feasibility_tol;
    CompassResult r;
    if (warm != nullptr) {
      cc.initial_step = 1e-3;
      r = compass_minimize(pen, prob_.decision_box, *warm, cc, enough);
    }
    if (warm == nullptr || r.value > enough) {
      const auto pts = box_grid(prob_.decision_box, cfg_.multistart_grid, 729);
      std::size_t best = 0;
      double bv = kInf;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double v = pen(pts[i]);
        if (v < bv) {
          bv = v;
          best = i;
        }
      }
      if (warm == nullptr || bv < r.value) {
        cc.initial_step = 0.5 / static_cast<double>(std::max<std::size_t>(cfg_.multistart_grid, 2) - 1);
        auto r2 = compass_minimize(pen, prob_.decision_box, pts[best], cc, enough);
        if (warm == nullptr || r2.value < r.value) r = std::move(r2);
      }
    }
    c.x = std::move(r.x);
    c.viol = relaxed_violation(c.x, d, nullptr);
    if (c.viol > 0.5 * cfg_.feasibility_tol) c.viol = correct(c.x, d, c.viol);
    c.feasible = c.viol <= 0.5 * cfg_.feasibility_tol;
    if (c.feasible) c.V = measure(spec_, fam_, d, prob_.uncertainty_box);
    return c;
  }

  // Gauss-Newton steps on the nearly active rows: the least-norm move that
  // linearly drives each of them to -tol/2. The compass search only creeps
  // into thin feasible wedges, which this finishes in a few iterations.
  double correct(Vec& x, const DesignPoint& d, double viol) const {
    const std::size_t n = x.size();
    const double target = -0.5 * cfg_.feasibility_tol;
    Vec vals, shifted;
    for (int it = 0; it < 12 && viol > 0.5 * cfg_.feasibility_tol; ++it) {
      relaxed_violation(x, d, nullptr, &vals);
      const double band = std::max(1e-6, 2.0 * viol);
      std::vector<std::size_t> act;
      for (std::size_t i = 0; i < vals.size(); ++i)
        if (vals[i] > -band) act.push_back(i);
      Eigen::MatrixXd J(act.size(), n);
      Eigen::VectorXd rhs(act.size());
      for (std::size_t k = 0; k < n; ++k) {
        const double h = 1e-7 * std::max(1.0, std::abs(x[k]));
        const double sgn = x[k] + h <= prob_.decision_box.hi[k] ? 1.0 : -1.0;
        Vec xs = x;
        xs[k] += sgn * h;
        relaxed_violation(xs, d, nullptr, &shifted);
        for (std::size_t a = 0; a < act.size(); ++a) J(a, k) = sgn * (shifted[act[a]] - vals[act[a]]) / h;
      }
      for (std::size_t a = 0; a < act.size(); ++a) rhs(a) = target - vals[act[a]];
      const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(rhs);
      if (!step.allFinite()) break;
      bool improved = false;
      for (double t = 1.0; t > 1e-3; t *= 0.5) {
        Vec trial(n);
        for (std::size_t k = 0; k < n; ++k)
          trial[k] = std::clamp(x[k] + t * step(k), prob_.decision_box.lo[k], prob_.decision_box.hi[k]);
        const double v = relaxed_violation(trial, d, nullptr);
        if (v < viol) {
          x = std::move(trial);
          viol = v;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    return viol;
  }

  DesignPoint minimal_design() const {
    DesignPoint d(Vec(dbox_.dim()));
    for (std::size_t k = 0; k < dbox_.dim(); ++k) d[k] = growth_[k] > 0 ? dbox_.lo[k] : dbox_.hi[k];
    return d;
  }

  // Shrinks coordinate k2 of an infeasible grown design by the smallest amount
  // (to a bisection precision tied to sigma) that restores feasibility.
  std::optional<Candidate> repair_along(const Candidate& cur, const DesignPoint& grown, std::size_t k2,
                                        double sigma) const {
    const double dir = -static_cast<double>(growth_[k2]);
    const double bound = dir > 0 ? dbox_.hi[k2] : dbox_.lo[k2];
    const double tmax = std::abs(bound - grown[k2]);
    if (tmax == 0.0) return std::nullopt;
    auto at = [&](double t) {
      DesignPoint d = grown;
      d[k2] = t >= tmax ? bound : grown[k2] + dir * t;
      return d;
    };
    Candidate hi = evaluate(at(tmax), &cur.x);
    if (!hi.feasible) return std::nullopt;
    double t_lo = 0.0, t_hi = tmax;
    for (double t = std::min(sigma * width_[k2], tmax); t < t_hi; t *= 2.0) {
      Candidate c = evaluate(at(t), &cur.x);
      if (c.feasible) {
        t_hi = t;
        hi = std::move(c);
        break;
      }
      t_lo = t;
    }
    const double prec = 1e-6 * sigma * width_[k2];
    while (t_hi - t_lo > prec) {
      const double mid = 0.5 * (t_lo + t_hi);
      if (mid <= t_lo || mid >= t_hi) break;
      Candidate c = evaluate(at(mid), &cur.x);
      if (c.feasible) {
        t_hi = mid;
        hi = std::move(c);
      } else {
        t_lo = mid;
      }
    }
    return hi;
  }

  Candidate local_search(Candidate cur) const {
    const std::size_t l = dbox_.dim();
    for (double sigma = cfg_.step_initial; sigma >= cfg_.step_min; sigma *= cfg_.step_shrink) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::size_t k = 0; k < l; ++k) {
          if (width_[k] == 0.0) continue;
          for (int s : {growth_[k], -growth_[k]}) {
            DesignPoint d = cur.d;
            d[k] = std::clamp(d[k] + s * sigma * width_[k], dbox_.lo[k], dbox_.hi[k]);
            if (d[k] == cur.d[k]) continue;
            Candidate c = evaluate(d, &cur.x);
            const bool grow = s == growth_[k];
            if (c.feasible && (c.V > cur.V || (grow && c.V == cur.V))) {
              cur = std::move(c);
              improved = true;
              break;
            }
            if (c.feasible || !grow) continue;
            std::optional<Candidate> best;
            for (std::size_t k2 = 0; k2 < l; ++k2) {
              if (k2 == k || width_[k2] == 0.0) continue;
              auto r = repair_along(cur, d, k2, sigma);
              if (r && r->V > cur.V && (!best || r->V > best->V)) best = std::move(r);
            }
            if (best) {
              cur = std::move(*best);
              improved = true;
              break;
            }
          }
        }
      }
    }
    return cur;
  }

  Candidate solve_relaxed(const Vec* warm) const {
    std::vector<Candidate> starts;
    starts.push_back(evaluate(minimal_design(), warm));
    for (auto& p : box_grid(dbox_, cfg_.multistart_grid, 4096)) {
      Candidate c = evaluate(DesignPoint(std::move(p)), nullptr);
      if (!c.feasible && warm != nullptr) {
        Candidate w = evaluate(c.d, warm);
        if (w.viol < c.viol) c = std::move(w);
      }
      starts.push_back(std::move(c));
    }
    std::vector<std::size_t> order(starts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const Candidate &ca = starts[a], &cb = starts[b];
      if (ca.feasible != cb.feasible) return ca.feasible;
      if (ca.feasible) return ca.V > cb.V;
      return ca.viol < cb.viol;
    });
    if (!starts[order[0]].feasible) {
      const Candidate& c = starts[0];
      throw InfeasibleError("no design covering the nominal scenarios is feasible (smallest design violation " +
                            std::to_string(c.viol) + ")");
    }
    std::optional<Candidate> best;
    std::size_t refined = 0;
    for (std::size_t i : order) {
      if (!starts[i].feasible || refined == std::max<std::size_t>(cfg_.multistart_refine, 1)) break;
      ++refined;
      Candidate c = local_search(starts[i]);
      if (!best || c.V > best->V) best = std::move(c);
    }
    return *best;
  }

  struct RowCheck {
    double value;
    Scenario witness;
    DesignPoint ds;
  };

  RowCheck check_row(const Row& r, ConstSpan x, const DesignPoint& d) const {
    const Selection s = select(*r.sel, fam_, x, d, prob_.nominal_scenarios);
    const ScenarioFunction phi = [&](ConstSpan u) { return row_value(prob_, budget_, r.budget, r.index, x, u); };
    auto res = inner_max(fam_, s.d, phi, r.flag, prob_.uncertainty_box, cfg_.inner);
    return {res.value, std::move(res.witness), s.d};
  }

  SolveResult finish(const Candidate& c, const std::vector<RowCheck>& checks, std::size_t rounds,
                     std::vector<TraceEntry> trace) const {
    SolveResult res;
    res.x_star = Decision(c.x);
    res.d_star = c.d;
    res.V_star = measure(spec_, fam_, c.d, prob_.uncertainty_box);
    res.rounds = rounds;
    res.trace = std::move(trace);
    res.certified = true;
    double mv = -kInf;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (rows_[r].flag == Convexity::General) res.certified = false;
      mv = std::max(mv, checks[r].value);
      res.active_set.push_back({rows_[r].id, checks[r].witness, -checks[r].value, -checks[r].value <= 1e-6});
    }
    for (std::size_t k = 0; k < nominal_.size(); ++k) {
      auto add = [&](bool budget, std::size_t idx) {
        const double v = row_value(prob_, budget_, budget, idx, c.x, nominal_[k]);
        mv = std::max(mv, v);
        res.active_set.push_back({std::string("nominal:") + (budget ? "budget[" : "constraint[") +
                                      std::to_string(idx) + "]@" + std::to_string(k),
                                  Scenario(nominal_[k]), -v, -v <= 1e-6});
      };
      for (std::size_t i = 0; i < prob_.p(); ++i) add(true, i);
      for (std::size_t j = 0; j < prob_.q(); ++j) add(false, j);
    }
    res.max_violation = mv;
    for (std::size_t k = 0; k < dbox_.dim(); ++k) {
      if (width_[k] == 0.0) continue;
      const double edge = growth_[k] > 0 ? dbox_.hi[k] : dbox_.lo[k];
      if (std::abs(c.d[k] - edge) <= 1e-9 * std::max(1.0, width_[k])) res.truncated = true;
    }
    return res;
  }

  const UncertainProblem& prob_;
  const BudgetSpec& budget_;
  const Selectors& sel_;
  const DesignFamily& fam_;
  const MeasureSpec& spec_;
  const SolverConfig& cfg_;
  std::vector<Row> rows_;
  std::vector<Vec> nominal_;
  Box dbox_;
  std::vector<int> growth_;
  Vec width_;
  std::vector<Cut> pool_;
};

SolveResult Exchange::run() {
  std::vector<TraceEntry> trace;
  std::optional<Vec> warm;
  Candidate cand;
  std::vector<RowCheck> checks;
  double worst = kInf;
  for (std::size_t round = 1; round <= cfg_.exchange_max_rounds; ++round) {
    cand = solve_relaxed(warm ? &*warm : nullptr);
    checks.clear();
    worst = relaxed_violation(cand.x, cand.d, nullptr);
    for (const auto& r : rows_) {
      checks.push_back(check_row(r, cand.x, cand.d));
      worst = std::max(worst, checks.back().value);
    }
    trace.push_back({round, cand.d, Decision(cand.x), worst, cand.V, pool_.size()});
    if (worst <= cfg_.feasibility_tol) return finish(cand, checks, round, std::move(trace));

    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (checks[r].value <= cfg_.feasibility_tol) continue;
      Cut cut{r, fam_.to_reference(checks[r].ds, checks[r].witness.span())};
      const bool dup = std::any_of(pool_.begin(), pool_.end(),
                                   [&](const Cut& c) { return c.row == cut.row && c.y == cut.y; });
      if (!dup) pool_.push_back(std::move(cut));
    }
    while (pool_.size() > cfg_.scenario_pool_cap) {
      // Evict the cut with the most slack at the incumbent.
      std::size_t evict = 0;
      double most = -kInf;
      for (std::size_t i = 0; i < pool_.size(); ++i) {
        const Row& r = rows_[pool_[i].row];
        const DesignPoint ds = selected(*r.sel, cand.x, cand.d);
        const double slack =
            -row_value(prob_, budget_, r.budget, r.index, cand.x, fam_.from_reference(ds, pool_[i].y));
        if (slack > most) {
          most = slack;
          evict = i;
        }
      }
      pool_.erase(pool_.begin() + static_cast<std::ptrdiff_t>(evict));
    }
    warm = cand.x;
  }
  SolveResult inc = finish(cand, checks, cfg_.exchange_max_rounds, std::move(trace));
  throw NonconvergenceError("exchange loop did not converge in " + std::to_string(cfg_.exchange_max_rounds) +
                                " rounds (max violation " + std::to_string(worst) + ")",
                            std::move(inc));
}

}  // namespace

void SolverConfig::validate() const {
  if (!(feasibility_tol > 0.0)) throw UsageError("feasibility_tol must be positive");
  if (exchange_max_rounds == 0) throw UsageError("exchange_max_rounds must be positive");
  if (multistart_grid == 0 || multistart_refine == 0) throw UsageError("multistart settings must be positive");
  if (!(step_initial > 0.0 && step_initial <= 1.0)) throw UsageError("step_initial must lie in (0, 1]");
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) throw UsageError("step_shrink must lie in (0, 1)");
  if (!(step_min > 0.0 && step_min < step_initial)) throw UsageError("step_min must lie in (0, step_initial)");
  if (scenario_pool_cap == 0) throw UsageError("scenario_pool_cap must be positive");
  if (inner.grid < 2) throw UsageError("inner grid needs at least 2 points");
  if (!(scale_cap > 0.0)) throw UsageError("scale_cap must be positive");
}

SolveResult solve(const UncertainProblem& prob, const BudgetSpec& budget, const Selectors& sel,
                  const DesignFamily& fam, const MeasureSpec& spec, const SolverConfig& cfg) {
  cfg.validate();
  prob.validate();
  budget.validate(prob.p());
  spec.validate(prob.m);
  if (fam.scenario_dim() != prob.m) throw UsageError("design family dimension differs from the problem's");
  if (!prob.uncertainty_box.bounded()) throw UsageError("uncertainty box must be bounded (apply the search margin)");
  return Exchange(prob, budget, sel, fam, spec, cfg).run();
}

std::vector<GridCell> solve_grid(const UncertainProblem& prob, const BudgetSpec& budget_template, const Selectors& sel,
                                 const DesignFamily& fam, const MeasureSpec& spec, const SolverConfig& cfg,
                                 const std::vector<Vec>& eps_grid, std::size_t jobs) {
  if (eps_grid.empty()) throw UsageError("epsilon grid is empty");
  if (budget_template.mode != BudgetMode::Additive) throw UsageError("grid sweeps need an additive budget");
  std::vector<GridCell> cells(eps_grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      GridCell& cell = cells[i];
      cell.eps = eps_grid[i];
      try {
        const BudgetSpec b = BudgetSpec::additive(budget_template.nominal_value, eps_grid[i]);
        cell.result = solve(prob, b, sel, fam, spec, cfg);
      } catch (const NonconvergenceError& e) {
        cell.error = e.what();
        cell.error_code = 1;
      } catch (const InfeasibleError& e) {
        cell.error = e.what();
        cell.error_code = 2;
      } catch (const Error& e) {
        cell.error = e.what();
        cell.error_code = 1;
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, cells.size());
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  return cells;
}

ViolationAudit verify(const SolveResult& result, const UncertainProblem& prob, const BudgetSpec& budget,
                      const Selectors& sel, const DesignFamily& fam, const SolverConfig& cfg,
                      std::size_t audit_grid) {
  if (audit_grid < cfg.inner.grid) throw UsageError("audit grid must be at least the solver's inner grid");
  ViolationAudit audit;
  audit.grid = audit_grid;
  audit.max_violation = -kInf;
  const ConstSpan x = result.x_star.span();
  auto take = [&](double v, const std::string& row, const Scenario& w) {
    if (v > audit.max_violation) {
      audit.max_violation = v;
      audit.row = row;
      audit.witness = w;
    }
  };
  for (const auto& u : prob.nominal_scenarios) {
    const double mv = fam.membership_violation(result.d_star, u.span());
    if (mv > 0.0) take(mv, "containment", u);
  }
  InnerMaxConfig dense = cfg.inner;
  dense.grid = audit_grid;
  auto rows = [&](const ScenarioSelector& s, bool is_budget) {
    const std::size_t count = is_budget ? prob.p() : prob.q();
    const std::string base = is_budget ? "budget[" : "constraint[";
    if (count == 0) return;
    const Selection sel_set = select(s, fam, x, result.d_star, prob.nominal_scenarios);
    for (std::size_t r = 0; r < count; ++r) {
      const std::string id = base + std::to_string(r) + "]";
      if (sel_set.finite) {
        for (const auto& u : sel_set.points) take(row_value(prob, budget, is_budget, r, x, u.span()), id, u);
        continue;
      }
      const ScenarioFunction phi = [&](ConstSpan u) { return row_value(prob, budget, is_budget, r, x, u); };
      auto res = inner_max(fam, sel_set.d, phi, Convexity::General, prob.uncertainty_box, dense);
      take(res.value, id, res.witness);
      for (const auto& v : fam.kind() == FamilyKind::Ball ? std::vector<Vec>{} : fam.vertices(sel_set.d))
        if (prob.uncertainty_box.contains(v)) take(row_value(prob, budget, is_budget, r, x, v), id, Scenario(v));
    }
  };
  rows(sel.phi1, true);
  rows(sel.phi2, false);
  for (const auto& u : prob.nominal_scenarios) {
    for (std::size_t i = 0; i < prob.p(); ++i)
      take(row_value(prob, budget, true, i, x, u.span()), "nominal:budget[" + std::to_string(i) + "]", u);
    for (std::size_t j = 0; j < prob.q(); ++j)
      take(row_value(prob, budget, false, j, x, u.span()), "nominal:constraint[" + std::to_string(j) + "]", u);
  }
  return audit;
}

}  // namespace invrob
