// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "invrob/design.hpp"
#include "invrob/types.hpp"

namespace invrob {

/// Parametric problem min f_u(x) s.t. g_u(x) <= 0 with u ranging over an
/// uncertainty set bounded by `uncertainty_box`.
struct UncertainProblem {
  std::string name;
  std::size_t n = 0;  ///< decision dimension
  std::size_t m = 0;  ///< scenario dimension
  std::vector<ProblemFunction> objectives;
  std::vector<ProblemFunction> constraints;
  Box uncertainty_box;
  Box decision_box;
  std::vector<Scenario> nominal_scenarios;

  std::size_t p() const { return objectives.size(); }
  std::size_t q() const { return constraints.size(); }

  /// Structural checks plus finiteness of every function at the nominal
  /// scenarios and the decision-box center.
  void validate() const;

  std::vector<Vec> nominal_vectors() const;
};

double evaluate_objective(const UncertainProblem& prob, std::size_t i, const Decision& x, const Scenario& u);
double evaluate_constraint(const UncertainProblem& prob, std::size_t j, const Decision& x, const Scenario& u);

/// Unchecked-dimension fast path used inside the solvers; still rejects
/// non-finite results.
double evaluate_function(const ProblemFunction& fn, std::size_t index, ConstSpan x, ConstSpan u);

enum class BudgetMode { Additive, FixedLevel };

/// Right-hand side of the budget constraint f_u(x) <= rhs(x, u).
///
/// additive:    rhs_i = f*_i + eps_i, eps_i constant or a function of (x, u)
/// fixed-level: rhs_i = B_i, nominal_value ignored
struct BudgetSpec {
  BudgetMode mode = BudgetMode::Additive;
  Vec nominal_value;
  Vec epsilon;
  std::vector<Evaluator> epsilon_fn;  ///< overrides `epsilon` when nonempty
  std::vector<std::string> epsilon_source;
  Vec level;

  static BudgetSpec additive(Vec f_star, Vec eps);
  static BudgetSpec additive(Vec f_star, std::vector<Evaluator> eps);
  static BudgetSpec fixed_level(Vec b);

  bool constant() const { return mode == BudgetMode::FixedLevel || epsilon_fn.empty(); }
  std::size_t size() const;
  void validate(std::size_t p) const;
};

double budget_rhs(const BudgetSpec& budget, std::size_t i, ConstSpan x, ConstSpan u);
double budget_rhs(const BudgetSpec& budget, std::size_t i, const Decision& x, const Scenario& u);

enum class SelectorKind { NominalOnly, Identity, Custom };

std::string_view to_string(SelectorKind k);
SelectorKind selector_kind_from_string(std::string_view s);

/// Pure map (x, d) -> d' with W(d') ⊆ W(d).
using SubDesignFn = std::function<DesignPoint(ConstSpan x, const DesignPoint& d)>;

/// Scenario selection Phi(x, W).
struct ScenarioSelector {
  SelectorKind kind = SelectorKind::Identity;
  SubDesignFn custom;

  static ScenarioSelector nominal_only() { return {SelectorKind::NominalOnly, {}}; }
  static ScenarioSelector identity() { return {SelectorKind::Identity, {}}; }
  static ScenarioSelector make_custom(SubDesignFn fn) { return {SelectorKind::Custom, std::move(fn)}; }
};

/// Phi(x, W(d)) either as a finite scenario list or as another member of the
/// design family.
struct Selection {
  bool finite = false;
  std::vector<Scenario> points;
  DesignPoint d;
};

Selection select(const ScenarioSelector& sel, const DesignFamily& fam, ConstSpan x, const DesignPoint& d,
                 const std::vector<Scenario>& nominal);

/// Uniform-ish draw from a selection; for finite selections a random member.
Scenario sample_selection(const Selection& s, const DesignFamily& fam, std::mt19937_64& rng);

bool selection_contains(const Selection& s, const DesignFamily& fam, const Scenario& u);

/// Value of a budget row (f_i - rhs_i) or a feasibility row (g_j) at (x, u).
double row_value(const UncertainProblem& prob, const BudgetSpec& budget, bool is_budget, std::size_t index,
                 ConstSpan x, ConstSpan u);

Convexity row_convexity(const UncertainProblem& prob, const BudgetSpec& budget, bool is_budget, std::size_t index);

struct ClassReport {
  double max_violation = -std::numeric_limits<double>::infinity();
  Scenario witness;
  std::size_t row = 0;
  bool empty = true;  ///< no rows in this class
};

struct FeasibilityReport {
  ClassReport budget_selected;
  ClassReport feasibility_selected;
  ClassReport budget_nominal;
  ClassReport feasibility_nominal;
  bool nominal_contained = true;
  bool feasible = false;

  double max_violation() const;
};

FeasibilityReport check_point_feasible(const UncertainProblem& prob, const BudgetSpec& budget,
                                       const ScenarioSelector& phi1, const ScenarioSelector& phi2,
                                       const Decision& x, const DesignFamily& fam, const DesignPoint& d, double tol,
                                       const InnerMaxConfig& cfg = {});

}  // namespace invrob
