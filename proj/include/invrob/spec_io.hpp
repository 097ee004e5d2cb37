// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "invrob/gsip.hpp"
#include "invrob/radii.hpp"

namespace invrob::spec {

inline constexpr int kSchemaVersion = 1;

/// Parameters of a `radius` block.
struct RadiusSpec {
  std::string kind;  ///< stability | resilience | rrf
  Vec xbar;          ///< stability
  double epsilon = 0.0;
  double level = 0.0;  ///< resilience
  std::vector<Vec> A;  ///< rrf
  Vec b;
  std::vector<Vec> Z;
};

/// Everything a problem-spec file describes.
struct ProblemSpec {
  UncertainProblem prob;
  BudgetSpec budget;
  Selectors sel;
  DesignFamily fam = DesignFamily::interval();
  MeasureSpec measure;
  SolverConfig solver;
  std::optional<RadiusSpec> radius;
  /// Axes of the uncertainty box given as null in the file (filled from the margin).
  std::vector<bool> defaulted_axes;
};

/// Margin of the default uncertainty box: INVROB_MARGIN if set, else 12.
/// A malformed value is a SpecError.
double margin_from_env();

/// Builds a spec from parsed JSON. Problem fields may be omitted only when
/// the file holds an rrf radius block. Throws SpecError.
ProblemSpec from_json(const nlohmann::json& j, double margin = kDefaultMargin);

/// Reads and parses a file. IoError when unreadable, SpecError when malformed.
ProblemSpec load(const std::string& path, double margin = kDefaultMargin);

/// Built-in instances by name ("bicriteria-normal").
std::optional<ProblemSpec> builtin(std::string_view name, double margin = kDefaultMargin);
std::vector<std::string> builtin_names();

/// Loads `name_or_path` as a built-in name first, then as a file.
ProblemSpec resolve(const std::string& name_or_path, double margin = kDefaultMargin);

/// Spec file text for `s`. Every function needs its expression source;
/// budgets with callable epsilon need sources too. Throws UsageError otherwise.
nlohmann::json to_json(const ProblemSpec& s);

nlohmann::json to_json(const SolveResult& r);
nlohmann::json to_json(const RadiusResult& r);
nlohmann::json to_json(const ViolationAudit& a);

/// Writes `text` to `path` through a temporary file in the same directory and
/// a rename. Throws IoError naming the path.
void write_atomic(const std::string& path, const std::string& text);

}  // namespace invrob::spec
