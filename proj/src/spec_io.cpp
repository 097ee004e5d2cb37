// SPDX-License-Identifier: Apache-2.0
#include "invrob/spec_io.hpp"

#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "invrob/bicriteria.hpp"
#include "invrob/errors.hpp"
#include "invrob/expr.hpp"

namespace invrob::spec {
namespace {

using nlohmann::json;

std::string where(const std::string& path, const std::string& msg) { return path + ": " + msg; }

const json& require(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw SpecError(where(ctx, std::string("missing field '") + key + "'"));
  return *it;
}

double number(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw SpecError(where(ctx, "expected a number"));
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& ctx) {
  if (!j.is_number_unsigned()) throw SpecError(where(ctx, "expected a nonnegative integer"));
  return j.get<std::size_t>();
}

Vec vector(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw SpecError(where(ctx, "expected an array of numbers"));
  Vec v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], ctx + "[" + std::to_string(i) + "]"));
  return v;
}

std::vector<Vec> matrix(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw SpecError(where(ctx, "expected an array of arrays"));
  std::vector<Vec> m;
  for (std::size_t i = 0; i < j.size(); ++i) m.push_back(vector(j[i], ctx + "[" + std::to_string(i) + "]"));
  return m;
}

Box box_from(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw SpecError(where(ctx, "expected an array of [lo, hi] pairs"));
  Vec lo, hi;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vec pair = vector(j[i], ctx + "[" + std::to_string(i) + "]");
    if (pair.size() != 2) throw SpecError(where(ctx + "[" + std::to_string(i) + "]", "expected [lo, hi]"));
    lo.push_back(pair[0]);
    hi.push_back(pair[1]);
  }
  return Box(lo, hi);
}

json box_json(const Box& b) {
  json out = json::array();
  for (std::size_t i = 0; i < b.dim(); ++i) out.push_back({b.lo[i], b.hi[i]});
  return out;
}

json matrix_json(const std::vector<Vec>& m) {
  json out = json::array();
  for (const auto& r : m) out.push_back(r);
  return out;
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& ctx) {
  if (!j.is_object()) throw SpecError(where(ctx, "expected an object"));
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw SpecError(where(ctx, "unknown field '" + k + "'"));
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<Convexity> flags(const json& j, const char* key, std::size_t count_expected) {
  std::vector<Convexity> out(count_expected, Convexity::General);
  auto it = j.find("convexity_flags");
  if (it == j.end()) return out;
  only_keys(*it, {"objectives", "constraints"}, "convexity_flags");
  auto f = it->find(key);
  if (f == it->end()) return out;
  const std::string ctx = std::string("convexity_flags.") + key;
  if (!f->is_array() || f->size() != count_expected)
    throw SpecError(where(ctx, "needs one flag per function (" + std::to_string(count_expected) + ")"));
  for (std::size_t i = 0; i < count_expected; ++i) {
    if (!(*f)[i].is_string()) throw SpecError(where(ctx, "flags are strings"));
    out[i] = convexity_from_string((*f)[i].get<std::string>());
  }
  return out;
}

std::vector<ProblemFunction> functions(const json& j, const char* key, std::size_t n, std::size_t m,
                                       const std::vector<Convexity>& fl) {
  std::vector<ProblemFunction> out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  if (!it->is_array()) throw SpecError(where(key, "expected an array of expression strings"));
  for (std::size_t i = 0; i < it->size(); ++i) {
    if (!(*it)[i].is_string()) throw SpecError(where(std::string(key) + "[" + std::to_string(i) + "]", "expected a string"));
    out.push_back(expr::make_function((*it)[i].get<std::string>(), n, m, fl[i]));
  }
  return out;
}

MeasureSpec parse_measure(const json& j, std::size_t m) {
  only_keys(j, {"kind", "params"}, "measure");
  if (!j.contains("kind") || !j["kind"].is_string()) throw SpecError("measure: missing string field 'kind'");
  const MeasureKind kind = measure_kind_from_string(j["kind"].get<std::string>());
  const json params = j.value("params", json::object());
  switch (kind) {
    case MeasureKind::Volume:
      only_keys(params, {}, "measure.params");
      return MeasureSpec::volume();
    case MeasureKind::GaussianProbability: {
      only_keys(params, {"mean", "sigma"}, "measure.params");
      const Vec mean = params.contains("mean") ? vector(params["mean"], "measure.params.mean") : Vec(m, 0.0);
      const Vec sigma = params.contains("sigma") ? vector(params["sigma"], "measure.params.sigma") : Vec(m, 1.0);
      return MeasureSpec::gaussian(mean, sigma);
    }
    case MeasureKind::MinDistToBad:
    case MeasureKind::MaxDistToBad: {
      only_keys(params, {"points", "box"}, "measure.params");
      const bool min = kind == MeasureKind::MinDistToBad;
      if (params.contains("points") == params.contains("box"))
        throw SpecError("measure.params: give exactly one of 'points' or 'box'");
      if (params.contains("box")) {
        Box b = box_from(params["box"], "measure.params.box");
        return min ? MeasureSpec::min_dist(b) : MeasureSpec::max_dist(b);
      }
      auto pts = matrix(params["points"], "measure.params.points");
      return min ? MeasureSpec::min_dist(pts) : MeasureSpec::max_dist(pts);
    }
  }
  return MeasureSpec::volume();
}

json measure_json(const MeasureSpec& s) {
  json j{{"kind", std::string(to_string(s.kind))}};
  switch (s.kind) {
    case MeasureKind::Volume: break;
    case MeasureKind::GaussianProbability: j["params"] = {{"mean", s.mean}, {"sigma", s.sigma}}; break;
    case MeasureKind::MinDistToBad:
    case MeasureKind::MaxDistToBad:
      if (s.bad_box) j["params"] = {{"box", box_json(*s.bad_box)}};
      else j["params"] = {{"points", matrix_json(s.bad_points)}};
      break;
  }
  return j;
}

DesignFamily parse_design(const json& j, std::size_t m, const std::vector<Scenario>& nominal) {
  only_keys(j, {"kind", "params"}, "design");
  if (!j.contains("kind") || !j["kind"].is_string()) throw SpecError("design: missing string field 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  const json params = j.value("params", json::object());
  const Vec nominal0 = nominal.empty() ? Vec(m, 0.0) : nominal.front().values;
  if (kind == "interval1d") {
    only_keys(params, {}, "design.params");
    if (m != 1) throw SpecError("design: interval1d needs a one-dimensional scenario space");
    return DesignFamily::interval();
  }
  if (kind == "box") {
    only_keys(params, {}, "design.params");
    return DesignFamily::box(m);
  }
  if (kind == "ball") {
    only_keys(params, {"center"}, "design.params");
    const Vec c = params.contains("center") ? vector(params["center"], "design.params.center") : nominal0;
    if (c.size() != m) throw SpecError("design.params.center: wrong dimension");
    return DesignFamily::ball(c);
  }
  if (kind == "scaled-set") {
    only_keys(params, {"anchor", "vertices"}, "design.params");
    const Vec a = params.contains("anchor") ? vector(params["anchor"], "design.params.anchor") : nominal0;
    if (a.size() != m) throw SpecError("design.params.anchor: wrong dimension");
    return DesignFamily::scaled_set(a, matrix(require(params, "vertices", "design.params"), "design.params.vertices"));
  }
  throw SpecError("design: unknown kind '" + kind + "' (interval1d, box, ball, scaled-set)");
}

json design_json(const DesignFamily& f) {
  json j{{"kind", std::string(to_string(f.kind()))}};
  if (f.kind() == FamilyKind::Ball) j["params"] = {{"center", f.center()}};
  if (f.kind() == FamilyKind::ScaledSet) j["params"] = {{"anchor", f.center()}, {"vertices", matrix_json(f.shape().vertices())}};
  return j;
}

BudgetSpec parse_budget(const json& j, std::size_t n, std::size_t m) {
  only_keys(j, {"mode", "f_star", "epsilon", "level"}, "budget");
  const std::string mode = j.value("mode", std::string("additive"));
  if (mode == "fixed-level") {
    if (j.contains("f_star") || j.contains("epsilon")) throw SpecError("budget: fixed-level takes only 'level'");
    return BudgetSpec::fixed_level(vector(require(j, "level", "budget"), "budget.level"));
  }
  if (mode != "additive") throw SpecError("budget: unknown mode '" + mode + "' (additive, fixed-level)");
  if (j.contains("level")) throw SpecError("budget: additive mode takes 'f_star' and 'epsilon'");
  const Vec f_star = vector(require(j, "f_star", "budget"), "budget.f_star");
  const json& eps = require(j, "epsilon", "budget");
  if (!eps.is_array()) throw SpecError("budget.epsilon: expected an array");
  bool any_expr = false;
  for (const auto& e : eps) any_expr = any_expr || e.is_string();
  if (!any_expr) return BudgetSpec::additive(f_star, vector(eps, "budget.epsilon"));

  std::vector<Evaluator> fns;
  std::vector<std::string> sources;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    std::string src;
    if (eps[i].is_string()) {
      src = eps[i].get<std::string>();
    } else {
      const double v = number(eps[i], "budget.epsilon[" + std::to_string(i) + "]");
      if (!(v >= 0.0)) throw SpecError("budget.epsilon: constant components must be >= 0");
      src = format_number(v);
    }
    fns.push_back(expr::make_function(src, n, m, Convexity::General).eval);
    sources.push_back(src);
  }
  BudgetSpec b = BudgetSpec::additive(f_star, std::move(fns));
  b.epsilon_source = std::move(sources);
  return b;
}

json budget_json(const BudgetSpec& b) {
  if (b.mode == BudgetMode::FixedLevel) return {{"mode", "fixed-level"}, {"level", b.level}};
  json j{{"mode", "additive"}, {"f_star", b.nominal_value}};
  if (b.epsilon_fn.empty()) {
    j["epsilon"] = b.epsilon;
  } else {
    if (b.epsilon_source.size() != b.epsilon_fn.size())
      throw UsageError("spec dump: budget epsilon functions have no expression source");
    j["epsilon"] = b.epsilon_source;
  }
  return j;
}

ScenarioSelector parse_selector(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return ScenarioSelector::identity();
  if (!it->is_string()) throw SpecError(std::string("selector.") + key + ": expected a string");
  const SelectorKind k = selector_kind_from_string(it->get<std::string>());
  if (k == SelectorKind::Custom)
    throw SpecError(std::string("selector.") + key + ": custom selectors are only available through the library API");
  return k == SelectorKind::NominalOnly ? ScenarioSelector::nominal_only() : ScenarioSelector::identity();
}

SolverConfig parse_solver(const json& j) {
  only_keys(j,
            {"feasibility_tol", "exchange_max_rounds", "multistart_grid", "multistart_refine", "step_initial",
             "step_shrink", "step_min", "scenario_pool_cap", "inner_grid", "inner_refine_tol", "scale_cap"},
            "solver");
  SolverConfig c;
  auto num = [&](const char* k, double& dst) {
    if (j.contains(k)) dst = number(j[k], std::string("solver.") + k);
  };
  auto cnt = [&](const char* k, std::size_t& dst) {
    if (j.contains(k)) dst = count(j[k], std::string("solver.") + k);
  };
  num("feasibility_tol", c.feasibility_tol);
  cnt("exchange_max_rounds", c.exchange_max_rounds);
  cnt("multistart_grid", c.multistart_grid);
  cnt("multistart_refine", c.multistart_refine);
  num("step_initial", c.step_initial);
  num("step_shrink", c.step_shrink);
  num("step_min", c.step_min);
  cnt("scenario_pool_cap", c.scenario_pool_cap);
  cnt("inner_grid", c.inner.grid);
  num("inner_refine_tol", c.inner.refine_tol);
  num("scale_cap", c.scale_cap);
  c.validate();
  return c;
}

json solver_json(const SolverConfig& c) {
  return {{"feasibility_tol", c.feasibility_tol},     {"exchange_max_rounds", c.exchange_max_rounds},
          {"multistart_grid", c.multistart_grid},     {"multistart_refine", c.multistart_refine},
          {"step_initial", c.step_initial},           {"step_shrink", c.step_shrink},
          {"step_min", c.step_min},                   {"scenario_pool_cap", c.scenario_pool_cap},
          {"inner_grid", c.inner.grid},               {"inner_refine_tol", c.inner.refine_tol},
          {"scale_cap", c.scale_cap}};
}

RadiusSpec parse_radius(const json& j) {
  only_keys(j, {"kind", "xbar", "epsilon", "level", "A", "b", "Z"}, "radius");
  RadiusSpec r;
  const json& kind = require(j, "kind", "radius");
  if (!kind.is_string()) throw SpecError("radius.kind: expected a string");
  r.kind = kind.get<std::string>();
  if (r.kind == "stability") {
    r.xbar = vector(require(j, "xbar", "radius"), "radius.xbar");
    r.epsilon = number(require(j, "epsilon", "radius"), "radius.epsilon");
  } else if (r.kind == "resilience") {
    r.level = number(require(j, "level", "radius"), "radius.level");
  } else if (r.kind == "rrf") {
    r.A = matrix(require(j, "A", "radius"), "radius.A");
    r.b = vector(require(j, "b", "radius"), "radius.b");
    r.Z = matrix(require(j, "Z", "radius"), "radius.Z");
  } else {
    throw SpecError("radius.kind: unknown kind '" + r.kind + "' (stability, resilience, rrf)");
  }
  return r;
}

json radius_json(const RadiusSpec& r) {
  json j{{"kind", r.kind}};
  if (r.kind == "stability") {
    j["xbar"] = r.xbar;
    j["epsilon"] = r.epsilon;
  } else if (r.kind == "resilience") {
    j["level"] = r.level;
  } else {
    j["A"] = matrix_json(r.A);
    j["b"] = r.b;
    j["Z"] = matrix_json(r.Z);
  }
  return j;
}

ProblemSpec parse(const json& j, double margin) {
  only_keys(j,
            {"schema", "name", "description", "objectives", "constraints", "convexity_flags", "uncertainty_box",
             "decision_box", "nominal_scenarios", "budget", "selector", "design", "measure", "solver", "radius"},
            "spec");
  const json& schema = require(j, "schema", "spec");
  if (!schema.is_number_integer() || schema.get<int>() != kSchemaVersion)
    throw SpecError("spec: unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");

  ProblemSpec s;
  UncertainProblem& p = s.prob;
  p.name = j.value("name", std::string("spec"));
  if (j.contains("radius")) s.radius = parse_radius(j["radius"]);
  if (j.contains("solver")) s.solver = parse_solver(j["solver"]);
  p.decision_box = box_from(require(j, "decision_box", "spec"), "decision_box");
  p.n = p.decision_box.dim();

  const bool rrf_only = s.radius && s.radius->kind == "rrf" && !j.contains("objectives");
  if (rrf_only) return s;

  const json& nominal = require(j, "nominal_scenarios", "spec");
  for (const auto& u : matrix(nominal, "nominal_scenarios")) p.nominal_scenarios.push_back(Scenario(u));
  if (p.nominal_scenarios.empty()) throw SpecError("nominal_scenarios: at least one scenario is required");
  p.m = p.nominal_scenarios.front().dim();

  const json ubox = j.value("uncertainty_box", json());
  if (!ubox.is_null() && (!ubox.is_array() || ubox.size() != p.m))
    throw SpecError("uncertainty_box: needs one [lo, hi] pair or null per scenario coordinate");

  s.measure = j.contains("measure") ? parse_measure(j["measure"], p.m) : MeasureSpec::volume();
  s.measure.inner = s.solver.inner;

  Vec lo(p.m), hi(p.m);
  s.defaulted_axes.assign(p.m, false);
  for (std::size_t k = 0; k < p.m; ++k) {
    if (ubox.is_null() || ubox[k].is_null()) {
      s.defaulted_axes[k] = true;
      const bool gauss = s.measure.kind == MeasureKind::GaussianProbability;
      const double c = gauss ? s.measure.mean[k] : p.nominal_scenarios.front().values[k];
      const double w = gauss ? margin * s.measure.sigma[k] : margin;
      lo[k] = c - w;
      hi[k] = c + w;
    } else {
      const Vec pair = vector(ubox[k], "uncertainty_box[" + std::to_string(k) + "]");
      if (pair.size() != 2) throw SpecError("uncertainty_box[" + std::to_string(k) + "]: expected [lo, hi] or null");
      lo[k] = pair[0];
      hi[k] = pair[1];
    }
  }
  p.uncertainty_box = Box(lo, hi);

  const std::size_t nobj = j.contains("objectives") && j["objectives"].is_array() ? j["objectives"].size() : 0;
  const std::size_t ncon = j.contains("constraints") && j["constraints"].is_array() ? j["constraints"].size() : 0;
  p.objectives = functions(j, "objectives", p.n, p.m, flags(j, "objectives", nobj));
  p.constraints = functions(j, "constraints", p.n, p.m, flags(j, "constraints", ncon));
  if (p.objectives.empty()) throw SpecError("objectives: at least one objective is required");

  if (j.contains("budget")) s.budget = parse_budget(j["budget"], p.n, p.m);
  else s.budget = BudgetSpec::additive(Vec(p.p(), 0.0), Vec(p.p(), 0.0));
  s.budget.validate(p.p());

  if (j.contains("selector")) {
    only_keys(j["selector"], {"phi1", "phi2"}, "selector");
    s.sel.phi1 = parse_selector(j["selector"], "phi1");
    s.sel.phi2 = parse_selector(j["selector"], "phi2");
  }
  if (j.contains("design")) s.fam = parse_design(j["design"], p.m, p.nominal_scenarios);
  else s.fam = p.m == 1 ? DesignFamily::interval() : DesignFamily::box(p.m);
  s.measure.validate(p.m);
  p.validate();
  return s;
}

}  // namespace

double margin_from_env() {
  const char* v = std::getenv("INVROB_MARGIN");
  if (v == nullptr || *v == '\0') return kDefaultMargin;
  double m = 0.0;
  const char* end = v + std::strlen(v);
  const auto [ptr, ec] = std::from_chars(v, end, m);
  if (ec != std::errc() || ptr != end || !(m > 0.0) || !std::isfinite(m))
    throw SpecError(std::string("INVROB_MARGIN: expected a positive number, got '") + v + "'");
  return m;
}

ProblemSpec from_json(const json& j, double margin) {
  try {
    return parse(j, margin);
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    throw SpecError(e.what());
  } catch (const json::exception& e) {
    throw SpecError(e.what());
  }
}

ProblemSpec load(const std::string& path, double margin) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError(path + ": " + e.what());
  }
  try {
    return from_json(j, margin);
  } catch (const SpecError& e) {
    throw SpecError(path + ": " + e.what());
  }
}

std::vector<std::string> builtin_names() { return {bicriteria::kName}; }

std::optional<ProblemSpec> builtin(std::string_view name, double margin) {
  if (name != bicriteria::kName) return std::nullopt;
  const auto inst = bicriteria::make_instance(margin);
  ProblemSpec s;
  s.prob = inst.prob;
  s.budget = bicriteria::budget(inst, 0.0, 0.0);
  s.sel = inst.sel;
  s.fam = inst.fam;
  s.measure = inst.measure;
  s.defaulted_axes = {true};
  return s;
}

ProblemSpec resolve(const std::string& name_or_path, double margin) {
  if (auto b = builtin(name_or_path, margin)) return *b;
  return load(name_or_path, margin);
}

json to_json(const ProblemSpec& s) {
  const UncertainProblem& p = s.prob;
  json j{{"schema", kSchemaVersion}, {"name", p.name}, {"decision_box", box_json(p.decision_box)}};
  if (s.radius) j["radius"] = radius_json(*s.radius);
  j["solver"] = solver_json(s.solver);
  if (p.objectives.empty()) return j;

  auto sources = [](const std::vector<ProblemFunction>& fs, const char* what) {
    json out = json::array(), fl = json::array();
    for (const auto& f : fs) {
      if (f.source.empty()) throw UsageError(std::string("spec dump: a ") + what + " has no expression source");
      out.push_back(f.source);
      fl.push_back(std::string(to_string(f.convexity)));
    }
    return std::pair{out, fl};
  };
  auto [obj, obj_flags] = sources(p.objectives, "objective");
  auto [con, con_flags] = sources(p.constraints, "constraint");
  j["objectives"] = obj;
  j["constraints"] = con;
  j["convexity_flags"] = {{"objectives", obj_flags}, {"constraints", con_flags}};

  json ubox = json::array();
  for (std::size_t k = 0; k < p.m; ++k) {
    if (k < s.defaulted_axes.size() && s.defaulted_axes[k]) ubox.push_back(nullptr);
    else ubox.push_back({p.uncertainty_box.lo[k], p.uncertainty_box.hi[k]});
  }
  j["uncertainty_box"] = ubox;
  json nominal = json::array();
  for (const auto& u : p.nominal_scenarios) nominal.push_back(u.values);
  j["nominal_scenarios"] = nominal;
  j["budget"] = budget_json(s.budget);
  if (s.sel.phi1.kind == SelectorKind::Custom || s.sel.phi2.kind == SelectorKind::Custom)
    throw UsageError("spec dump: custom selectors cannot be written to a spec file");
  j["selector"] = {{"phi1", std::string(to_string(s.sel.phi1.kind))}, {"phi2", std::string(to_string(s.sel.phi2.kind))}};
  j["design"] = design_json(s.fam);
  j["measure"] = measure_json(s.measure);
  return j;
}

json to_json(const SolveResult& r) {
  json active = json::array();
  for (const auto& a : r.active_set)
    active.push_back({{"id", a.id}, {"witness", a.witness.values}, {"slack", a.slack}, {"active", a.active}});
  json trace = json::array();
  for (const auto& t : r.trace)
    trace.push_back({{"round", t.round},
                     {"d", t.d.values},
                     {"x", t.x.values},
                     {"max_violation", t.max_violation},
                     {"V", t.V},
                     {"pool_size", t.pool_size}});
  return {{"x_star", r.x_star.values},         {"d_star", r.d_star.values},   {"V_star", r.V_star},
          {"rounds", r.rounds},           {"max_violation", r.max_violation}, {"certified", r.certified},
          {"truncated", r.truncated},     {"active_set", active},        {"trace", trace}};
}

json to_json(const RadiusResult& r) {
  json j{{"kind", r.kind},           {"radius", r.radius},       {"x", r.x.values},
         {"witness", r.witness.values},   {"truncated", r.truncated}};
  if (r.comparison) j["comparison"] = r.comparison->values;
  if (r.kind == "stability") j["bracket"] = {r.bracket_lo, r.bracket_hi};
  if (r.solve) j["solve"] = {{"rounds", r.solve->rounds}, {"max_violation", r.solve->max_violation},
                             {"certified", r.solve->certified}};
  return j;
}

json to_json(const ViolationAudit& a) {
  return {{"max_violation", a.max_violation}, {"row", a.row}, {"witness", a.witness.values}, {"grid", a.grid}};
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path + ": cannot open temporary file " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError(path + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError(path + ": cannot move temporary file into place (" + ec.message() + ")");
  }
}

}  // namespace invrob::spec
