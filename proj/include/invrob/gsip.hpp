// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "invrob/design.hpp"
#include "invrob/errors.hpp"
#include "invrob/measures.hpp"
#include "invrob/problem.hpp"
#include "invrob/types.hpp"

namespace invrob {

struct SolverConfig {
  double feasibility_tol = 1e-8;
  std::size_t exchange_max_rounds = 50;
  std::size_t multistart_grid = 9;    ///< points per design axis
  std::size_t multistart_refine = 3;  ///< best starts handed to the local search
  double step_initial = 0.25;         ///< fraction of each design axis
  double step_shrink = 0.5;
  double step_min = 1e-9;
  std::size_t scenario_pool_cap = 512;
  InnerMaxConfig inner;
  /// Upper bound on ball radii and polytope scales when the uncertainty box
  /// does not bound them (Z = {0}).
  double scale_cap = kDefaultMargin;

  void validate() const;
};

struct Selectors {
  ScenarioSelector phi1 = ScenarioSelector::identity();  ///< budget rows
  ScenarioSelector phi2 = ScenarioSelector::identity();  ///< feasibility rows
};

struct ActiveRow {
  std::string id;  ///< "budget[i]", "constraint[j]", "nominal:budget[i]@k", ...
  Scenario witness;
  double slack = 0.0;
  bool active = false;
};

struct TraceEntry {
  std::size_t round = 0;
  DesignPoint d;
  Decision x;
  double max_violation = 0.0;
  double V = 0.0;
  std::size_t pool_size = 0;
};

struct SolveResult {
  Decision x_star;
  DesignPoint d_star;
  double V_star = 0.0;
  std::vector<ActiveRow> active_set;
  std::size_t rounds = 0;
  std::vector<TraceEntry> trace;
  double max_violation = 0.0;
  /// Every semi-infinite row was maximized exactly (no "general" flags).
  bool certified = false;
  /// The optimum sits on the finite search margin of a growth direction.
  bool truncated = false;
};

/// Exchange loop ran out of rounds; carries the last incumbent.
class NonconvergenceError : public Error {
 public:
  NonconvergenceError(const std::string& what, SolveResult incumbent)
      : Error(what), incumbent_(std::move(incumbent)) {}
  const SolveResult& incumbent() const { return incumbent_; }

 private:
  SolveResult incumbent_;
};

/// Maximizes V(W(d)) over (x, d) subject to the budget rows over Phi1(x, W(d)),
/// the feasibility rows over Phi2(x, W(d)) and both row classes at every
/// nominal scenario.
///
/// Exchange loop: the relaxation enforces the rows only at a finite pool of
/// cuts. Cuts are stored as reference coordinates of the family, so a cut
/// taken at the right end of an interval stays at the right end as the
/// interval moves. Each round solves the relaxation by multistart local search
/// over d with x eliminated by an inner search, then adds the worst scenario
/// of every violated row.
SolveResult solve(const UncertainProblem& prob, const BudgetSpec& budget, const Selectors& sel,
                  const DesignFamily& fam, const MeasureSpec& spec, const SolverConfig& cfg = {});

struct GridCell {
  Vec eps;
  std::optional<SolveResult> result;
  std::string error;  ///< empty when `result` is set
  int error_code = 0; ///< CLI exit code class of the failure
};

/// Independent solves, one per epsilon vector (additive budget with the
/// template's f*). Output order follows the input; failures are recorded per
/// cell. `jobs` = 0 uses the available hardware parallelism.
std::vector<GridCell> solve_grid(const UncertainProblem& prob, const BudgetSpec& budget_template, const Selectors& sel,
                                 const DesignFamily& fam, const MeasureSpec& spec, const SolverConfig& cfg,
                                 const std::vector<Vec>& eps_grid, std::size_t jobs = 0);

struct ViolationAudit {
  double max_violation = 0.0;
  std::string row;
  Scenario witness;
  std::size_t grid = 0;
};

/// Recomputes every row at the result with a dense grid search that ignores
/// the convexity flags. Requires audit_grid >= cfg.inner.grid.
ViolationAudit verify(const SolveResult& result, const UncertainProblem& prob, const BudgetSpec& budget,
                      const Selectors& sel, const DesignFamily& fam, const SolverConfig& cfg,
                      std::size_t audit_grid);

}  // namespace invrob
