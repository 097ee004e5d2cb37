// SPDX-License-Identifier: Apache-2.0
#include "invrob/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "invrob/errors.hpp"

namespace invrob {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInvPhi = 0.6180339887498949;

std::string fmt_vec(ConstSpan v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

double checked(const ScenarioFunction& phi, ConstSpan u) {
  const double v = phi(u);
  if (std::isnan(v)) throw EvaluationError("inner maximization: function returned NaN at u=" + fmt_vec(u));
  return v;
}

struct Param {
  double lo;
  double hi;
  std::size_t count;
  bool periodic = false;

  double at(std::size_t k) const {
    if (count <= 1 || hi == lo) return lo;
    if (periodic) return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count);
    if (k + 1 == count) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  double spacing() const {
    if (count <= 1) return 0.0;
    return (hi - lo) / static_cast<double>(periodic ? count : count - 1);
  }
};

using ParamMap = std::function<std::optional<Vec>(const Vec& p)>;

struct Best {
  double value = kNegInf;
  Vec u;
  Vec p;
};

// Golden-section maximization of g on [a, b].
std::pair<double, double> golden_max(const std::function<double(double)>& g, double a, double b, double tol) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > tol) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - kInvPhi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + kInvPhi * (b - a);
      gd = g(d);
    }
  }
  return gc >= gd ? std::pair{c, gc} : std::pair{d, gd};
}

void grid_search(const std::vector<Param>& params, const ParamMap& map, const ScenarioFunction& phi, Best& best) {
  std::vector<std::size_t> idx(params.size(), 0);
  Vec p(params.size());
  while (true) {
    for (std::size_t k = 0; k < params.size(); ++k) p[k] = params[k].at(idx[k]);
    if (auto u = map(p)) {
      const double v = checked(phi, *u);
      if (v > best.value) best = {v, std::move(*u), p};
    }
    std::size_t k = 0;
    while (k < params.size() && ++idx[k] == std::max<std::size_t>(params[k].count, 1)) idx[k++] = 0;
    if (k == params.size()) break;
  }
}

void refine(const std::vector<Param>& params, const ParamMap& map, const ScenarioFunction& phi, double tol,
            Best& best) {
  if (best.p.empty()) return;
  const int passes = params.size() == 1 ? 1 : 3;
  for (int pass = 0; pass < passes; ++pass) {
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double h = params[k].spacing();
      if (h <= 0.0) continue;
      double a = best.p[k] - h, b = best.p[k] + h;
      if (!params[k].periodic) {
        a = std::max(a, params[k].lo);
        b = std::min(b, params[k].hi);
      }
      if (b - a <= tol) continue;
      Vec p = best.p;
      auto g = [&](double t) {
        p[k] = t;
        auto u = map(p);
        return u ? checked(phi, *u) : kNegInf;
      };
      const auto [t, v] = golden_max(g, a, b, tol);
      if (v > best.value) {
        p[k] = t;
        best = {v, *map(p), p};
      }
    }
  }
}

std::vector<Vec> box_vertices(const Vec& lo, const Vec& hi) {
  const std::size_t m = lo.size();
  std::vector<Vec> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    Vec v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = (mask >> i) & 1U ? hi[i] : lo[i];
    out.push_back(std::move(v));
  }
  return out;
}

std::size_t per_axis(std::size_t grid, std::size_t dims) {
  // Keep general-flag grids below ~2^18 evaluations.
  std::size_t g = std::max<std::size_t>(grid, 2);
  while (dims > 1 && std::pow(static_cast<double>(g), static_cast<double>(dims)) > 262144.0) g /= 2;
  return g;
}

}  // namespace

std::string_view to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::Interval: return "interval1d";
    case FamilyKind::Box: return "box";
    case FamilyKind::Ball: return "ball";
    case FamilyKind::ScaledSet: return "scaled-set";
  }
  return "interval1d";
}

DesignFamily DesignFamily::interval() {
  DesignFamily f;
  f.kind_ = FamilyKind::Interval;
  f.m_ = 1;
  return f;
}

DesignFamily DesignFamily::box(std::size_t m) {
  if (m == 0) throw UsageError("box family needs dimension >= 1");
  DesignFamily f;
  f.kind_ = FamilyKind::Box;
  f.m_ = m;
  return f;
}

DesignFamily DesignFamily::ball(Vec center) {
  if (center.empty() || !all_finite(center)) throw UsageError("ball family needs a finite center");
  if (center.size() > 3) throw UnsupportedError("ball family is limited to dimension <= 3");
  DesignFamily f;
  f.kind_ = FamilyKind::Ball;
  f.m_ = center.size();
  f.center_ = std::move(center);
  return f;
}

DesignFamily DesignFamily::scaled_set(Vec anchor, std::vector<Vec> vertices) {
  if (anchor.empty() || !all_finite(anchor)) throw UsageError("scaled-set family needs a finite anchor");
  if (anchor.size() > 3) throw UnsupportedError("scaled-set family is limited to dimension <= 3");
  DesignFamily f;
  f.kind_ = FamilyKind::ScaledSet;
  f.m_ = anchor.size();
  f.center_ = std::move(anchor);
  f.shape_ = Polytope(std::move(vertices));
  if (f.shape_.ambient_dim() != f.m_) throw UsageError("scaled-set vertices do not match the anchor dimension");
  return f;
}

std::size_t DesignFamily::design_dim() const {
  switch (kind_) {
    case FamilyKind::Interval: return 2;
    case FamilyKind::Box: return 2 * m_;
    case FamilyKind::Ball:
    case FamilyKind::ScaledSet: return 1;
  }
  return 0;
}

bool DesignFamily::is_feasible(const DesignPoint& d) const {
  if (d.dim() != design_dim() || !all_finite(d.values)) return false;
  switch (kind_) {
    case FamilyKind::Interval:
    case FamilyKind::Box:
      for (std::size_t i = 0; i < m_; ++i)
        if (d[i] > d[m_ + i]) return false;
      return true;
    case FamilyKind::Ball:
    case FamilyKind::ScaledSet: return d[0] >= 0.0;
  }
  return false;
}

void DesignFamily::require_feasible(const DesignPoint& d) const {
  if (!is_feasible(d))
    throw UsageError("infeasible " + std::string(to_string(kind_)) + " design point " + fmt_vec(d.values));
}

double DesignFamily::membership_violation(const DesignPoint& d, ConstSpan u) const {
  if (u.size() != m_) throw UsageError("membership: scenario dimension mismatch");
  switch (kind_) {
    case FamilyKind::Interval:
    case FamilyKind::Box: {
      double v = kNegInf;
      for (std::size_t i = 0; i < m_; ++i) v = std::max({v, d[i] - u[i], u[i] - d[m_ + i]});
      return v;
    }
    case FamilyKind::Ball: {
      double s = 0.0;
      for (std::size_t i = 0; i < m_; ++i) s += (u[i] - center_[i]) * (u[i] - center_[i]);
      return std::sqrt(s) - d[0];
    }
    case FamilyKind::ScaledSet: {
      Vec w(m_);
      for (std::size_t i = 0; i < m_; ++i) w[i] = u[i] - center_[i];
      return shape_.violation(w, d[0]);
    }
  }
  return 0.0;
}

bool DesignFamily::contains(const DesignPoint& d, ConstSpan u) const {
  require_feasible(d);
  switch (kind_) {
    case FamilyKind::Interval:
    case FamilyKind::Box: return membership_violation(d, u) <= 0.0;
    case FamilyKind::Ball: return membership_violation(d, u) <= 1e-12 * std::max(1.0, d[0]);
    case FamilyKind::ScaledSet: {
      Vec w(m_);
      for (std::size_t i = 0; i < m_; ++i) w[i] = u[i] - center_[i];
      return shape_.contains(w, d[0]);
    }
  }
  return false;
}

Vec DesignFamily::from_reference(const DesignPoint& d, ConstSpan y) const {
  Vec u(m_);
  switch (kind_) {
    case FamilyKind::Interval:
    case FamilyKind::Box:
      for (std::size_t i = 0; i < m_; ++i) {
        if (y[i] == 0.0) u[i] = d[i];
        else if (y[i] == 1.0) u[i] = d[m_ + i];
        else u[i] = (1.0 - y[i]) * d[i] + y[i] * d[m_ + i];
      }
      break;
    case FamilyKind::Ball:
    case FamilyKind::ScaledSet:
      for (std::size_t i = 0; i < m_; ++i) u[i] = center_[i] + d[0] * y[i];
      break;
  }
  return u;
}

Vec DesignFamily::to_reference(const DesignPoint& d, ConstSpan u) const {
  Vec y(m_, 0.0);
  switch (kind_) {
    case FamilyKind::Interval:
    case FamilyKind::Box:
      for (std::size_t i = 0; i < m_; ++i) {
        const double w = d[m_ + i] - d[i];
        y[i] = w > 0.0 ? std::clamp((u[i] - d[i]) / w, 0.0, 1.0) : 0.0;
      }
      break;
    case FamilyKind::Ball:
      if (d[0] > 0.0)
        for (std::size_t i = 0; i < m_; ++i) y[i] = (u[i] - center_[i]) / d[0];
      break;
    case FamilyKind::ScaledSet:
      if (d[0] > 0.0)
        for (std::size_t i = 0; i < m_; ++i) y[i] = (u[i] - center_[i]) / d[0];
      else
        y = shape_.vertices().front();
      break;
  }
  return y;
}

std::vector<int> DesignFamily::growth_signs() const {
  switch (kind_) {
    case FamilyKind::Interval:
    case FamilyKind::Box: {
      std::vector<int> s(2 * m_, 1);
      std::fill(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(m_), -1);
      return s;
    }
    case FamilyKind::Ball:
    case FamilyKind::ScaledSet: return {1};
  }
  return {};
}

Box DesignFamily::search_box(const Box& ubox, const std::vector<Vec>& nominal, double scale_cap) const {
  if (ubox.dim() != m_) throw UsageError("search box: uncertainty box dimension mismatch");
  if (!ubox.bounded()) throw UsageError("search box: uncertainty box must be bounded");
  switch (kind_) {
    case FamilyKind::Interval:
    case FamilyKind::Box: {
      Vec lo(2 * m_), hi(2 * m_);
      for (std::size_t i = 0; i < m_; ++i) {
        double nmin = ubox.hi[i], nmax = ubox.lo[i];
        for (const auto& u : nominal) {
          nmin = std::min(nmin, u[i]);
          nmax = std::max(nmax, u[i]);
        }
        if (nominal.empty()) nmin = nmax = 0.5 * (ubox.lo[i] + ubox.hi[i]);
        lo[i] = ubox.lo[i];
        hi[i] = nmin;
        lo[m_ + i] = nmax;
        hi[m_ + i] = ubox.hi[i];
      }
      return Box(lo, hi);
    }
    case FamilyKind::Ball: {
      double need = 0.0;
      for (const auto& u : nominal) {
        double s = 0.0;
        for (std::size_t i = 0; i < m_; ++i) s += (u[i] - center_[i]) * (u[i] - center_[i]);
        need = std::max(need, std::sqrt(s));
      }
      double room = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i)
        room = std::min({room, center_[i] - ubox.lo[i], ubox.hi[i] - center_[i]});
      room = std::min(room, scale_cap);
      return Box({need}, {std::max(need, room)});
    }
    case FamilyKind::ScaledSet: {
      const double room = std::min(scale_cap, shape_.max_scale_in_box(center_, ubox));
      return Box({0.0}, {room});
    }
  }
  return {};
}

bool DesignFamily::nested(const DesignPoint& a, const DesignPoint& b) const {
  switch (kind_) {
    case FamilyKind::Interval:
    case FamilyKind::Box:
      for (std::size_t i = 0; i < m_; ++i)
        if (a[i] < b[i] || a[m_ + i] > b[m_ + i]) return false;
      return true;
    case FamilyKind::Ball:
    case FamilyKind::ScaledSet: {
      if (a[0] <= b[0] && kind_ == FamilyKind::Ball) return true;
      // anchor + aZ ⊆ anchor + bZ for a <= b holds iff 0 ∈ Z (or a == b).
      return a[0] == b[0] || (a[0] <= b[0] && shape_.contains(Vec(m_, 0.0)));
    }
  }
  return false;
}

std::vector<Vec> DesignFamily::vertices(const DesignPoint& d) const {
  switch (kind_) {
    case FamilyKind::Interval:
    case FamilyKind::Box:
      return box_vertices(Vec(d.values.begin(), d.values.begin() + static_cast<std::ptrdiff_t>(m_)),
                          Vec(d.values.begin() + static_cast<std::ptrdiff_t>(m_), d.values.end()));
    case FamilyKind::ScaledSet: {
      std::vector<Vec> out;
      for (const auto& v : shape_.vertices()) out.push_back(from_reference(d, v));
      return out;
    }
    case FamilyKind::Ball: throw UsageError("ball family has no vertex list");
  }
  return {};
}

Vec DesignFamily::sample(const DesignPoint& d, std::mt19937_64& rng) const {
  require_feasible(d);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  switch (kind_) {
    case FamilyKind::Interval:
    case FamilyKind::Box: {
      Vec y(m_);
      for (auto& t : y) t = unif(rng);
      Vec u = from_reference(d, y);
      for (std::size_t i = 0; i < m_; ++i) u[i] = std::clamp(u[i], d[i], d[m_ + i]);
      return u;
    }
    case FamilyKind::Ball: {
      std::normal_distribution<double> gauss;
      Vec y(m_);
      double n = 0.0;
      do {
        n = 0.0;
        for (auto& t : y) {
          t = gauss(rng);
          n += t * t;
        }
      } while (n == 0.0);
      const double r = std::pow(unif(rng), 1.0 / static_cast<double>(m_)) / std::sqrt(n);
      for (auto& t : y) t *= r;
      return from_reference(d, y);
    }
    case FamilyKind::ScaledSet: {
      const auto& vs = shape_.vertices();
      std::exponential_distribution<double> expo(1.0);
      Vec w(vs.size());
      double s = 0.0;
      for (auto& t : w) s += (t = expo(rng));
      Vec y(m_, 0.0);
      for (std::size_t k = 0; k < vs.size(); ++k)
        for (std::size_t i = 0; i < m_; ++i) y[i] += w[k] / s * vs[k][i];
      return from_reference(d, y);
    }
  }
  return {};
}

bool contains(const DesignFamily& fam, const DesignPoint& d, const Scenario& u) {
  return fam.contains(d, u.span());
}

ClipResult clip_to_box(const DesignFamily& fam, const DesignPoint& d, const Box& box) {
  fam.require_feasible(d);
  if (box.dim() != fam.scenario_dim()) throw UsageError("clip_to_box: box dimension mismatch");
  ClipResult r{d, false};
  const std::size_t m = fam.scenario_dim();
  switch (fam.kind()) {
    case FamilyKind::Interval:
    case FamilyKind::Box:
      for (std::size_t i = 0; i < m; ++i) {
        if (d[i] < box.lo[i]) {
          r.d[i] = box.lo[i];
          r.truncated = true;
        }
        if (d[m + i] > box.hi[i]) {
          r.d[m + i] = box.hi[i];
          r.truncated = true;
        }
        if (r.d[i] > r.d[m + i]) throw DomainError("clip_to_box: W(d) does not meet the box");
      }
      break;
    case FamilyKind::Ball:
      for (std::size_t i = 0; i < m; ++i)
        if (fam.center()[i] - d[0] < box.lo[i] || fam.center()[i] + d[0] > box.hi[i]) r.truncated = true;
      break;
    case FamilyKind::ScaledSet:
      for (const auto& v : fam.vertices(d))
        if (!box.contains(v)) r.truncated = true;
      break;
  }
  return r;
}

InnerMaxResult inner_max(const DesignFamily& fam, const DesignPoint& d, const ScenarioFunction& phi, Convexity flag,
                         const Box& box, const InnerMaxConfig& cfg) {
  fam.require_feasible(d);
  const std::size_t m = fam.scenario_dim();
  if (box.dim() != m) throw UsageError("inner_max: box dimension mismatch");
  Best best;

  auto finish = [&]() -> InnerMaxResult {
    if (best.value == kNegInf && best.u.empty()) throw DomainError("inner_max: W(d) ∩ box is empty");
    return {best.value, Scenario(best.u)};
  };

  auto axis_set = [&](const Vec& lo, const Vec& hi) {
    for (std::size_t i = 0; i < m; ++i)
      if (lo[i] > hi[i]) throw DomainError("inner_max: W(d) ∩ box is empty");
    if (flag != Convexity::General) {
      for (auto& v : box_vertices(lo, hi)) {
        const double val = checked(phi, v);
        if (val > best.value || best.u.empty()) best = {val, std::move(v), {}};
      }
      return;
    }
    std::vector<Param> params;
    const std::size_t g = per_axis(cfg.grid, m);
    for (std::size_t i = 0; i < m; ++i) params.push_back({lo[i], hi[i], lo[i] == hi[i] ? 1 : g});
    ParamMap map = [](const Vec& p) -> std::optional<Vec> { return p; };
    grid_search(params, map, phi, best);
    refine(params, map, phi, cfg.refine_tol, best);
  };

  switch (fam.kind()) {
    case FamilyKind::Interval:
    case FamilyKind::Box: {
      const DesignPoint c = clip_to_box(fam, d, box).d;
      axis_set(Vec(c.values.begin(), c.values.begin() + static_cast<std::ptrdiff_t>(m)),
               Vec(c.values.begin() + static_cast<std::ptrdiff_t>(m), c.values.end()));
      return finish();
    }
    case FamilyKind::Ball: {
      const Vec& c = fam.center();
      const double rho = d[0];
      if (m == 1) {
        Vec lo{std::max(c[0] - rho, box.lo[0])}, hi{std::min(c[0] + rho, box.hi[0])};
        axis_set(lo, hi);
        return finish();
      }
      if (rho == 0.0) {
        if (!box.contains(c)) throw DomainError("inner_max: W(d) ∩ box is empty");
        best = {checked(phi, c), c, {}};
        return finish();
      }
      const bool truncated = clip_to_box(fam, d, box).truncated;
      const bool boundary_only = flag == Convexity::ConvexInU && !truncated;
      const std::size_t g = std::max<std::size_t>(cfg.grid, 8);
      std::vector<Param> params;
      params.push_back(boundary_only ? Param{rho, rho, 1} : Param{0.0, rho, g / 4 + 1});
      if (m == 2) {
        params.push_back({0.0, 2.0 * std::numbers::pi, g, true});
      } else {
        params.push_back({0.0, std::numbers::pi, g / 2 + 1});
        params.push_back({0.0, 2.0 * std::numbers::pi, g, true});
      }
      ParamMap map = [&](const Vec& p) -> std::optional<Vec> {
        Vec u(m);
        if (m == 2) {
          u[0] = c[0] + p[0] * std::cos(p[1]);
          u[1] = c[1] + p[0] * std::sin(p[1]);
        } else {
          u[0] = c[0] + p[0] * std::sin(p[1]) * std::cos(p[2]);
          u[1] = c[1] + p[0] * std::sin(p[1]) * std::sin(p[2]);
          u[2] = c[2] + p[0] * std::cos(p[1]);
        }
        if (!box.contains(u)) return std::nullopt;
        return u;
      };
      if (!boundary_only && box.contains(c)) best = {checked(phi, c), c, Vec{0.0, 0.0, 0.0}};
      if (!best.p.empty()) best.p.resize(params.size());
      grid_search(params, map, phi, best);
      refine(params, map, phi, cfg.refine_tol, best);
      return finish();
    }
    case FamilyKind::ScaledSet: {
      const auto verts = fam.vertices(d);
      const bool truncated = clip_to_box(fam, d, box).truncated;
      for (const auto& v : verts) {
        if (!box.contains(v)) continue;
        const double val = checked(phi, v);
        if (val > best.value || best.u.empty()) best = {val, v, {}};
      }
      if (flag == Convexity::ConvexInU && !truncated) return finish();
      Vec lo(m, std::numeric_limits<double>::infinity()), hi(m, -std::numeric_limits<double>::infinity());
      for (const auto& v : verts)
        for (std::size_t i = 0; i < m; ++i) {
          lo[i] = std::max(std::min(lo[i], v[i]), box.lo[i]);
          hi[i] = std::min(std::max(hi[i], v[i]), box.hi[i]);
        }
      std::vector<Param> params;
      const std::size_t g = per_axis(cfg.grid, m);
      for (std::size_t i = 0; i < m; ++i) params.push_back({lo[i], std::max(lo[i], hi[i]), lo[i] >= hi[i] ? 1 : g});
      ParamMap map = [&](const Vec& p) -> std::optional<Vec> {
        if (!fam.contains(d, p) || !box.contains(p)) return std::nullopt;
        return p;
      };
      if (!best.u.empty()) best.p = best.u;
      grid_search(params, map, phi, best);
      refine(params, map, phi, cfg.refine_tol, best);
      return finish();
    }
  }
  return finish();
}

}  // namespace invrob
