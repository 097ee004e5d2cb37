// SPDX-License-Identifier: Apache-2.0
#include "invrob/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "invrob/errors.hpp"

namespace invrob {
namespace {

std::string point_text(ConstSpan v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

void check_dims(const UncertainProblem& prob, const Decision& x, const Scenario& u) {
  if (x.dim() != prob.n)
    throw UsageError("decision has dimension " + std::to_string(x.dim()) + ", expected " + std::to_string(prob.n));
  if (u.dim() != prob.m)
    throw UsageError("scenario has dimension " + std::to_string(u.dim()) + ", expected " + std::to_string(prob.m));
}

}  // namespace

void UncertainProblem::validate() const {
  if (n == 0 || m == 0) throw UsageError("problem dimensions must be positive");
  if (objectives.empty()) throw UsageError("problem needs at least one objective");
  if (uncertainty_box.dim() != m) throw UsageError("uncertainty box dimension differs from m");
  if (decision_box.dim() != n) throw UsageError("decision box dimension differs from n");
  if (!decision_box.bounded()) throw UsageError("decision box must be bounded");
  if (nominal_scenarios.empty()) throw UsageError("nominal scenario set must be nonempty");
  for (const auto& fn : objectives)
    if (!fn.eval) throw UsageError("objective without evaluator");
  for (const auto& fn : constraints)
    if (!fn.eval) throw UsageError("constraint without evaluator");
  Vec mid(n);
  for (std::size_t k = 0; k < n; ++k) mid[k] = 0.5 * (decision_box.lo[k] + decision_box.hi[k]);
  for (const auto& u : nominal_scenarios) {
    if (u.dim() != m || !all_finite(u.values)) throw UsageError("nominal scenario " + point_text(u.values) + " is malformed");
    if (!uncertainty_box.contains(u.values))
      throw UsageError("nominal scenario " + point_text(u.values) + " lies outside the uncertainty box");
    for (std::size_t i = 0; i < objectives.size(); ++i) evaluate_function(objectives[i], i, mid, u.values);
    for (std::size_t j = 0; j < constraints.size(); ++j) evaluate_function(constraints[j], j, mid, u.values);
  }
}

std::vector<Vec> UncertainProblem::nominal_vectors() const {
  std::vector<Vec> out;
  out.reserve(nominal_scenarios.size());
  for (const auto& u : nominal_scenarios) out.push_back(u.values);
  return out;
}

double evaluate_function(const ProblemFunction& fn, std::size_t index, ConstSpan x, ConstSpan u) {
  const double v = fn.eval(x, u);
  if (!std::isfinite(v))
    throw EvaluationError("function " + std::to_string(index) + " is not finite at x=" + point_text(x) +
                              ", u=" + point_text(u),
                          index, Vec(x.begin(), x.end()), Vec(u.begin(), u.end()));
  return v;
}

double evaluate_objective(const UncertainProblem& prob, std::size_t i, const Decision& x, const Scenario& u) {
  if (i >= prob.p()) throw UsageError("objective index " + std::to_string(i) + " out of range");
  check_dims(prob, x, u);
  return evaluate_function(prob.objectives[i], i, x.span(), u.span());
}

double evaluate_constraint(const UncertainProblem& prob, std::size_t j, const Decision& x, const Scenario& u) {
  if (j >= prob.q()) throw UsageError("constraint index " + std::to_string(j) + " out of range");
  check_dims(prob, x, u);
  return evaluate_function(prob.constraints[j], j, x.span(), u.span());
}

BudgetSpec BudgetSpec::additive(Vec f_star, Vec eps) {
  BudgetSpec b;
  b.mode = BudgetMode::Additive;
  b.nominal_value = std::move(f_star);
  b.epsilon = std::move(eps);
  if (b.epsilon.size() != b.nominal_value.size()) throw UsageError("f* and epsilon have different lengths");
  for (double e : b.epsilon)
    if (!(e >= 0.0) || !std::isfinite(e)) throw ContractError("constant epsilon components must be finite and >= 0");
  return b;
}

BudgetSpec BudgetSpec::additive(Vec f_star, std::vector<Evaluator> eps) {
  BudgetSpec b;
  b.mode = BudgetMode::Additive;
  b.nominal_value = std::move(f_star);
  b.epsilon_fn = std::move(eps);
  if (b.epsilon_fn.size() != b.nominal_value.size()) throw UsageError("f* and epsilon have different lengths");
  return b;
}

BudgetSpec BudgetSpec::fixed_level(Vec level) {
  BudgetSpec b;
  b.mode = BudgetMode::FixedLevel;
  b.level = std::move(level);
  for (double v : b.level)
    if (!std::isfinite(v)) throw UsageError("fixed budget levels must be finite (use a large surrogate)");
  return b;
}

std::size_t BudgetSpec::size() const {
  return mode == BudgetMode::FixedLevel ? level.size() : nominal_value.size();
}

void BudgetSpec::validate(std::size_t p) const {
  if (size() != p)
    throw UsageError("budget has " + std::to_string(size()) + " components, problem has " + std::to_string(p) +
                     " objectives");
}

double budget_rhs(const BudgetSpec& budget, std::size_t i, ConstSpan x, ConstSpan u) {
  if (i >= budget.size()) throw UsageError("budget index " + std::to_string(i) + " out of range");
  if (budget.mode == BudgetMode::FixedLevel) return budget.level[i];
  if (budget.epsilon_fn.empty()) return budget.nominal_value[i] + budget.epsilon[i];
  const double e = budget.epsilon_fn[i](x, u);
  if (!(e >= 0.0))
    throw ContractError("budget function " + std::to_string(i) + " returned " + std::to_string(e) + " < 0 at x=" +
                        point_text(x) + ", u=" + point_text(u));
  if (!std::isfinite(e))
    throw EvaluationError("budget function " + std::to_string(i) + " is not finite", i, Vec(x.begin(), x.end()),
                          Vec(u.begin(), u.end()));
  return budget.nominal_value[i] + e;
}

double budget_rhs(const BudgetSpec& budget, std::size_t i, const Decision& x, const Scenario& u) {
  return budget_rhs(budget, i, x.span(), u.span());
}

std::string_view to_string(SelectorKind k) {
  switch (k) {
    case SelectorKind::NominalOnly: return "nominal-only";
    case SelectorKind::Identity: return "identity";
    case SelectorKind::Custom: return "custom";
  }
  return "identity";
}

SelectorKind selector_kind_from_string(std::string_view s) {
  if (s == "nominal-only") return SelectorKind::NominalOnly;
  if (s == "identity") return SelectorKind::Identity;
  if (s == "custom") return SelectorKind::Custom;
  throw SpecError("unknown selector '" + std::string(s) + "'");
}

Selection select(const ScenarioSelector& sel, const DesignFamily& fam, ConstSpan x, const DesignPoint& d,
                 const std::vector<Scenario>& nominal) {
  fam.require_feasible(d);
  Selection out;
  switch (sel.kind) {
    case SelectorKind::NominalOnly:
      out.finite = true;
      for (const auto& u : nominal)
        if (fam.contains(d, u.span())) out.points.push_back(u);
      return out;
    case SelectorKind::Identity:
      out.d = d;
      return out;
    case SelectorKind::Custom: {
      if (!sel.custom) throw UsageError("custom selector without a function");
      out.d = sel.custom(x, d);
      if (!fam.is_feasible(out.d)) throw ContractError("custom selector returned an infeasible design point");
      if (!fam.nested(out.d, d)) throw ContractError("custom selector returned a set that is not inside W(d)");
      return out;
    }
  }
  return out;
}

Scenario sample_selection(const Selection& s, const DesignFamily& fam, std::mt19937_64& rng) {
  if (s.finite) {
    if (s.points.empty()) throw DomainError("cannot sample an empty selection");
    std::uniform_int_distribution<std::size_t> pick(0, s.points.size() - 1);
    return s.points[pick(rng)];
  }
  return Scenario(fam.sample(s.d, rng));
}

bool selection_contains(const Selection& s, const DesignFamily& fam, const Scenario& u) {
  if (s.finite) return std::find(s.points.begin(), s.points.end(), u) != s.points.end();
  return fam.contains(s.d, u.span());
}

double row_value(const UncertainProblem& prob, const BudgetSpec& budget, bool is_budget, std::size_t index,
                 ConstSpan x, ConstSpan u) {
  if (is_budget) return evaluate_function(prob.objectives[index], index, x, u) - budget_rhs(budget, index, x, u);
  return evaluate_function(prob.constraints[index], index, x, u);
}

Convexity row_convexity(const UncertainProblem& prob, const BudgetSpec& budget, bool is_budget, std::size_t index) {
  if (!is_budget) return prob.constraints[index].convexity;
  return budget.constant() ? prob.objectives[index].convexity : Convexity::General;
}

double FeasibilityReport::max_violation() const {
  return std::max({budget_selected.max_violation, feasibility_selected.max_violation, budget_nominal.max_violation,
                   feasibility_nominal.max_violation});
}

FeasibilityReport check_point_feasible(const UncertainProblem& prob, const BudgetSpec& budget,
                                       const ScenarioSelector& phi1, const ScenarioSelector& phi2,
                                       const Decision& x, const DesignFamily& fam, const DesignPoint& d, double tol,
                                       const InnerMaxConfig& cfg) {
  if (!(tol > 0.0)) throw UsageError("feasibility tolerance must be positive");
  if (x.dim() != prob.n) throw UsageError("decision dimension mismatch");
  if (fam.scenario_dim() != prob.m) throw UsageError("design family dimension differs from the problem's");
  budget.validate(prob.p());
  fam.require_feasible(d);

  FeasibilityReport rep;
  auto take = [](ClassReport& c, double v, Scenario w, std::size_t row) {
    if (c.empty || v > c.max_violation) {
      c.max_violation = v;
      c.witness = std::move(w);
      c.row = row;
    }
    c.empty = false;
  };

  auto selected = [&](const ScenarioSelector& sel, bool is_budget, ClassReport& out) {
    const std::size_t rows = is_budget ? prob.p() : prob.q();
    if (rows == 0) return;
    const Selection s = select(sel, fam, x.span(), d, prob.nominal_scenarios);
    for (std::size_t r = 0; r < rows; ++r) {
      if (s.finite) {
        for (const auto& u : s.points) take(out, row_value(prob, budget, is_budget, r, x.span(), u.span()), u, r);
        continue;
      }
      const ScenarioFunction phi = [&](ConstSpan u) { return row_value(prob, budget, is_budget, r, x.span(), u); };
      auto res = inner_max(fam, s.d, phi, row_convexity(prob, budget, is_budget, r), prob.uncertainty_box, cfg);
      take(out, res.value, std::move(res.witness), r);
    }
  };
  selected(phi1, true, rep.budget_selected);
  selected(phi2, false, rep.feasibility_selected);

  for (const auto& u : prob.nominal_scenarios) {
    if (!fam.contains(d, u.span())) rep.nominal_contained = false;
    for (std::size_t i = 0; i < prob.p(); ++i)
      take(rep.budget_nominal, row_value(prob, budget, true, i, x.span(), u.span()), u, i);
    for (std::size_t j = 0; j < prob.q(); ++j)
      take(rep.feasibility_nominal, row_value(prob, budget, false, j, x.span(), u.span()), u, j);
  }
  rep.feasible = rep.nominal_contained && rep.max_violation() <= tol;
  return rep;
}

}  // namespace invrob
