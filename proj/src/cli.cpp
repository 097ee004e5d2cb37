// SPDX-License-Identifier: Apache-2.0
#include "invrob/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "invrob/bicriteria.hpp"
#include "invrob/errors.hpp"
#include "invrob/radii.hpp"
#include "invrob/spec_io.hpp"

namespace invrob::cli {
namespace {

using nlohmann::json;

double parse_number(std::string_view s, std::string_view what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw SpecError(std::string(what) + ": '" + std::string(s) + "' is not a finite number");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

void append(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

// Solver knobs shared by the solving subcommands.
struct Overrides {
  std::optional<double> tol;
  std::optional<std::size_t> max_rounds;
  std::optional<std::size_t> multistart_grid;
  std::optional<std::size_t> multistart_refine;
  std::optional<std::size_t> inner_grid;

  void attach(CLI::App* app) {
    app->add_option("--tol", tol, "feasibility tolerance");
    app->add_option("--max-rounds", max_rounds, "exchange rounds before giving up");
    app->add_option("--multistart-grid", multistart_grid, "multistart points per design axis");
    app->add_option("--multistart-refine", multistart_refine, "multistart points refined by local search");
    app->add_option("--inner-grid", inner_grid, "grid points per axis of the inner maximization");
  }

  void apply(spec::ProblemSpec& s) const {
    if (tol) s.solver.feasibility_tol = *tol;
    if (max_rounds) s.solver.exchange_max_rounds = *max_rounds;
    if (multistart_grid) s.solver.multistart_grid = *multistart_grid;
    if (multistart_refine) s.solver.multistart_refine = *multistart_refine;
    if (inner_grid) s.solver.inner.grid = *inner_grid;
    s.measure.inner = s.solver.inner;
    try {
      s.solver.validate();
    } catch (const UsageError& e) {
      throw SpecError(e.what());
    }
  }
};

class Emitter {
 public:
  Emitter(std::ostream& out, std::string path) : out_(out), path_(std::move(path)) {}
  void write(const std::string& text) const {
    if (path_.empty()) out_ << text << std::flush;
    else spec::write_atomic(path_, text);
  }

 private:
  std::ostream& out_;
  std::string path_;
};

void set_epsilon(spec::ProblemSpec& s, const Vec& eps) {
  if (s.budget.mode != BudgetMode::Additive) throw SpecError("--eps needs an additive budget");
  if (eps.size() != s.prob.p())
    throw SpecError("--eps has " + std::to_string(eps.size()) + " components, the problem has " +
                    std::to_string(s.prob.p()) + " objectives");
  try {
    s.budget = BudgetSpec::additive(s.budget.nominal_value, eps);
  } catch (const Error& e) {
    throw SpecError(e.what());
  }
}

int run_grid(const spec::ProblemSpec& s, const std::vector<Vec>& eps, std::size_t jobs, const std::string& format,
             const Emitter& emit, std::ostream& err) {
  if (s.budget.mode != BudgetMode::Additive) throw SpecError("epsilon grids need an additive budget");
  for (const auto& e : eps)
    if (e.size() != s.prob.p())
      throw SpecError("grid has " + std::to_string(e.size()) + " axes, the problem has " +
                      std::to_string(s.prob.p()) + " objectives");
  const auto cells = solve_grid(s.prob, s.budget, s.sel, s.fam, s.measure, s.solver, eps, jobs);
  int code = kOk;
  for (const auto& c : cells) {
    if (c.result) continue;
    std::string at;
    for (double v : c.eps) at += (at.empty() ? "" : ",") + std::to_string(v);
    err << "invrob: cell eps=(" << at << ") failed: " << c.error << "\n";
    code = std::max(code, c.error_code);
  }
  if (format == "csv") {
    emit.write(grid_csv(cells, s.prob.n, s.fam.design_dim()));
  } else {
    json arr = json::array();
    for (const auto& c : cells) {
      json cell{{"eps", c.eps}};
      if (c.result) cell["result"] = spec::to_json(*c.result);
      else cell["error"] = c.error;
      arr.push_back(cell);
    }
    emit.write(arr.dump(2) + "\n");
  }
  return code;
}

}  // namespace

std::vector<double> GridAxis::values() const {
  std::vector<double> v;
  const double span = stop - start;
  const auto steps = static_cast<std::size_t>(std::floor(span / step + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) v.push_back(start + static_cast<double>(k) * step);
  return v;
}

std::vector<GridAxis> parse_grid(std::string_view text) {
  std::vector<GridAxis> axes;
  for (auto part : split(text, ',')) {
    const auto f = split(part, ':');
    GridAxis a;
    if (f.size() == 1) {
      a.start = a.stop = parse_number(f[0], "grid");
    } else if (f.size() == 3) {
      a.start = parse_number(f[0], "grid start");
      a.stop = parse_number(f[1], "grid stop");
      a.step = parse_number(f[2], "grid step");
      if (!(a.step > 0.0)) throw SpecError("grid: step must be > 0 in '" + std::string(part) + "'");
      if (a.stop < a.start) throw SpecError("grid: stop must be >= start in '" + std::string(part) + "'");
      if ((a.stop - a.start) / a.step > 1e6) throw SpecError("grid: axis '" + std::string(part) + "' is too long");
    } else {
      throw SpecError("grid: expected start:stop:step or a single value, got '" + std::string(part) + "'");
    }
    axes.push_back(a);
  }
  return axes;
}

std::vector<Vec> expand_grid(const std::vector<GridAxis>& axes) {
  std::vector<Vec> out{Vec{}};
  for (const auto& a : axes) {
    std::vector<Vec> next;
    for (const auto& prefix : out)
      for (double v : a.values()) {
        Vec e = prefix;
        e.push_back(v);
        next.push_back(std::move(e));
      }
    out = std::move(next);
  }
  return out;
}

Vec parse_vector(std::string_view text) {
  Vec v;
  for (auto part : split(text, ',')) v.push_back(parse_number(part, "vector"));
  return v;
}

std::string grid_csv(const std::vector<GridCell>& cells, std::size_t n, std::size_t design_dim) {
  if (cells.empty()) throw UsageError("grid_csv: no results");
  for (const auto& c : cells) {
    if (!c.result) continue;
    if (n == 0) n = c.result->x_star.dim();
    if (design_dim == 0) design_dim = c.result->d_star.dim();
  }
  if (n == 0) n = 1;
  if (design_dim == 0) design_dim = 2;

  std::string text;
  const std::size_t p = cells.front().eps.size();
  for (std::size_t i = 0; i < p; ++i) text += "eps" + std::to_string(i + 1) + ",";
  if (n == 1) text += "x_star,";
  else
    for (std::size_t i = 0; i < n; ++i) text += "x" + std::to_string(i + 1) + "_star,";
  for (std::size_t k = 0; k < design_dim; ++k) text += "d" + std::to_string(k + 1) + "_star,";
  text += "V_star,rounds,max_violation\n";

  for (const auto& c : cells) {
    std::string line;
    for (double e : c.eps) {
      append(line, e);
      line += ',';
    }
    const double nan = std::nan("");
    for (std::size_t i = 0; i < n; ++i) {
      append(line, c.result ? c.result->x_star[i] : nan);
      line += ',';
    }
    for (std::size_t k = 0; k < design_dim; ++k) {
      append(line, c.result ? c.result->d_star[k] : nan);
      line += ',';
    }
    append(line, c.result ? c.result->V_star : nan);
    line += ',' + std::to_string(c.result ? c.result->rounds : 0) + ',';
    append(line, c.result ? c.result->max_violation : nan);
    text += line + '\n';
  }
  return text;
}

void emit_grid_csv(const std::vector<GridCell>& cells, const std::string& path, std::size_t n,
                   std::size_t design_dim) {
  spec::write_atomic(path, grid_csv(cells, n, design_dim));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inverse robust optimization: largest scenario sets a decision can cover within a budget"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "invrob 1.0.0");

  std::string spec_arg, out_path, format, eps_arg, grid_arg, kind, result_path;
  std::size_t jobs = 0, audit_grid = 256;
  Overrides ov;

  auto* solve_cmd = app.add_subcommand("solve", "solve one problem spec and print the result as JSON");
  solve_cmd->add_option("--spec", spec_arg, "spec file or built-in name")->required();
  solve_cmd->add_option("--eps", eps_arg, "override the additive epsilon, e.g. 0.5,1");
  solve_cmd->add_option("--out", out_path, "write here instead of standard output");
  ov.attach(solve_cmd);

  auto* grid = app.add_subcommand("grid", "solve over an epsilon grid");
  grid->add_option("--spec", spec_arg, "spec file or built-in name")->required();
  grid->add_option("--grid", grid_arg, "axes start:stop:step, comma separated")->required();
  grid->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  grid->add_option("--out", out_path, "write here instead of standard output");
  grid->add_option("--jobs", jobs, "worker threads (0 = all cores)");
  ov.attach(grid);

  auto* example = app.add_subcommand("example", "the built-in bi-criteria example");
  auto* example_eps = example->add_option("--eps", eps_arg, "single cell, e.g. 0,0");
  example->add_option("--grid", grid_arg, "axes start:stop:step (default 0:5:0.5,0:5:0.5)")->excludes(example_eps);
  example->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  example->add_option("--out", out_path, "write here instead of standard output");
  example->add_option("--jobs", jobs, "worker threads (0 = all cores)");
  ov.attach(example);

  auto* radius = app.add_subcommand("radius", "stability, resilience or robust-feasibility radius");
  radius->add_option("--kind", kind, "stability | resilience | rrf")
      ->required()
      ->check(CLI::IsMember({"stability", "resilience", "rrf"}));
  radius->add_option("--spec", spec_arg, "spec file with a radius block")->required();
  radius->add_option("--out", out_path, "write here instead of standard output");
  ov.attach(radius);

  auto* verify_cmd = app.add_subcommand("verify", "audit a solve result with a dense scenario grid");
  verify_cmd->add_option("--spec", spec_arg, "spec file or built-in name")->required();
  verify_cmd->add_option("--result", result_path, "JSON written by `invrob solve`")->required();
  verify_cmd->add_option("--eps", eps_arg, "epsilon the result was solved with");
  verify_cmd->add_option("--audit-grid", audit_grid, "grid points per axis (>= inner grid)");
  verify_cmd->add_option("--out", out_path, "write here instead of standard output");
  ov.attach(verify_cmd);

  auto* spec_cmd = app.add_subcommand("spec", "spec file utilities");
  spec_cmd->require_subcommand(1);
  auto* dump = spec_cmd->add_subcommand("dump", "print a built-in instance as a spec file");
  dump->add_option("name", spec_arg, "built-in name")->required();
  dump->add_option("--out", out_path, "write here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kSpecError;
  }

  try {
    const double margin = spec::margin_from_env();
    const Emitter emit(out, out_path);

    if (*solve_cmd) {
      auto s = spec::resolve(spec_arg, margin);
      ov.apply(s);
      if (!eps_arg.empty()) set_epsilon(s, parse_vector(eps_arg));
      try {
        const auto r = solve(s.prob, s.budget, s.sel, s.fam, s.measure, s.solver);
        json j = spec::to_json(r);
        j["problem"] = s.prob.name;
        j["converged"] = true;
        emit.write(j.dump(2) + "\n");
        return kOk;
      } catch (const NonconvergenceError& e) {
        json j = spec::to_json(e.incumbent());
        j["problem"] = s.prob.name;
        j["converged"] = false;
        emit.write(j.dump(2) + "\n");
        err << "invrob: " << e.what() << "\n";
        return kNonconvergence;
      }
    }

    if (*grid || *example) {
      auto s = *example ? *spec::builtin(bicriteria::kName, margin) : spec::resolve(spec_arg, margin);
      ov.apply(s);
      std::vector<Vec> eps;
      if (*example && !eps_arg.empty()) eps = {parse_vector(eps_arg)};
      else eps = expand_grid(parse_grid(grid_arg.empty() ? "0:5:0.5,0:5:0.5" : grid_arg));
      return run_grid(s, eps, jobs, format.empty() ? "csv" : format, emit, err);
    }

    if (*radius) {
      auto s = spec::resolve(spec_arg, margin);
      ov.apply(s);
      if (!s.radius) throw SpecError(spec_arg + ": no radius block");
      if (s.radius->kind != kind)
        throw SpecError(spec_arg + ": radius block is of kind '" + s.radius->kind + "', not '" + kind + "'");
      RadiusResult r;
      if (kind == "stability") {
        StabilityConfig sc;
        sc.inner = s.solver.inner;
        r = stability_radius(s.prob, Decision(s.radius->xbar), s.radius->epsilon, sc);
      } else if (kind == "resilience") {
        r = resilience_radius(s.prob, s.radius->level, s.solver);
      } else {
        r = radius_of_robust_feasibility(s.radius->A, s.radius->b, s.radius->Z, s.prob.decision_box, s.solver,
                                         margin);
      }
      emit.write(spec::to_json(r).dump(2) + "\n");
      return kOk;
    }

    if (*verify_cmd) {
      auto s = spec::resolve(spec_arg, margin);
      ov.apply(s);
      if (!eps_arg.empty()) set_epsilon(s, parse_vector(eps_arg));
      std::ifstream in(result_path);
      if (!in) throw IoError(result_path + ": cannot open for reading");
      SolveResult r;
      try {
        const json j = json::parse(in);
        r.x_star = Decision(j.at("x_star").get<Vec>());
        r.d_star = DesignPoint(j.at("d_star").get<Vec>());
        r.V_star = j.at("V_star").get<double>();
      } catch (const json::exception& e) {
        throw SpecError(result_path + ": " + e.what());
      }
      if (r.x_star.dim() != s.prob.n || r.d_star.dim() != s.fam.design_dim())
        throw SpecError(result_path + ": dimensions do not match the spec");
      const auto audit = verify(r, s.prob, s.budget, s.sel, s.fam, s.solver, audit_grid);
      json j = spec::to_json(audit);
      const bool ok = audit.max_violation <= 2.0 * s.solver.feasibility_tol;
      j["passed"] = ok;
      emit.write(j.dump(2) + "\n");
      if (!ok) err << "invrob: audit violation " << audit.max_violation << " in " << audit.row << "\n";
      return ok ? kOk : kInfeasible;
    }

    if (*dump) {
      auto s = spec::builtin(spec_arg, margin);
      if (!s) throw SpecError("unknown built-in '" + spec_arg + "'");
      emit.write(spec::to_json(*s).dump(2) + "\n");
      return kOk;
    }
  } catch (const InfeasibleError& e) {
    err << "invrob: infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const NonconvergenceError& e) {
    err << "invrob: " << e.what() << "\n";
    return kNonconvergence;
  } catch (const IoError& e) {
    err << "invrob: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "invrob: " << e.what() << "\n";
    return kSpecError;
  }
  return kOk;
}

}  // namespace invrob::cli
