// SPDX-License-Identifier: Apache-2.0
#include "invrob/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "invrob/errors.hpp"
#include "invrob/kernels.hpp"

namespace invrob {
namespace {

// Accumulates quadrature nodes in structure-of-arrays form and hands them to
// the vector kernel in fixed-size batches.
class NodeSink {
 public:
  NodeSink(const Vec& mean, const Vec& sigma) : mu_(mean), dims_(mean.size()) {
    inv_.resize(dims_);
    for (std::size_t i = 0; i < dims_; ++i) inv_[i] = 1.0 / sigma[i];
    for (auto& c : coords_) c.reserve(kBatch);
    w_.reserve(kBatch);
  }

  void add(const double* p, double w) {
    for (std::size_t i = 0; i < dims_; ++i) coords_[i].push_back(p[i]);
    w_.push_back(w);
    if (w_.size() == kBatch) flush();
  }

  double total() {
    flush();
    return sum_;
  }

 private:
  static constexpr std::size_t kBatch = 4096;

  void flush() {
    if (w_.empty()) return;
    std::array<const double*, 3> ptr{};
    for (std::size_t i = 0; i < dims_; ++i) ptr[i] = coords_[i].data();
    sum_ += kernels::gaussian_weighted_sum(w_, std::span(ptr.data(), dims_), mu_, inv_);
    for (auto& c : coords_) c.clear();
    w_.clear();
  }

  const Vec& mu_;
  std::size_t dims_;
  Vec inv_;
  std::array<Vec, 3> coords_;
  Vec w_;
  double sum_ = 0.0;
};

struct Rule {
  Vec x;  // nodes on [0, 1]
  Vec w;
};

// Composite Gauss-Legendre rule on [0, 1]: `panels` equal panels of `order` nodes.
const Rule& composite_rule(std::size_t order, std::size_t panels) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::size_t>, Rule> cache;
  std::lock_guard lock(mu);
  auto [it, fresh] = cache.try_emplace({order, panels});
  if (fresh) {
    Vec gx, gw;
    gauss_legendre(order, gx, gw);
    const double h = 1.0 / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p)
      for (std::size_t k = 0; k < order; ++k) {
        it->second.x.push_back(h * (static_cast<double>(p) + 0.5 * (gx[k] + 1.0)));
        it->second.w.push_back(0.5 * h * gw[k]);
      }
  }
  return it->second;
}

std::size_t panels_for(double extent, double sigma_min, std::size_t cap) {
  const double want = std::ceil(2.0 * extent / sigma_min);
  return static_cast<std::size_t>(std::clamp(want, 1.0, static_cast<double>(cap)));
}

double normalization(const Vec& sigma) {
  double c = 1.0;
  for (double s : sigma) c /= s * std::sqrt(2.0 * std::numbers::pi);
  return c;
}

double interval_mass(double a, double b, double mu, double sigma) {
  if (b <= a) return 0.0;
  const double za = (a - mu) / sigma, zb = (b - mu) / sigma;
  // Difference of upper tails keeps precision when both ends sit far right.
  if (za > 0.0) return std::max(0.0, std_normal_cdf(-za) - std_normal_cdf(-zb));
  return std::max(0.0, std_normal_cdf(zb) - std_normal_cdf(za));
}

double ball_gaussian(const MeasureSpec& spec, const Vec& c, double rho) {
  const std::size_t m = c.size();
  if (rho <= 0.0) return 0.0;
  const double smin = *std::min_element(spec.sigma.begin(), spec.sigma.end());
  NodeSink sink(spec.mean, spec.sigma);
  double p[3];
  if (m == 2) {
    const Rule& rr = composite_rule(16, panels_for(rho, smin, 32));
    const std::size_t nt =
        static_cast<std::size_t>(std::clamp(std::ceil(16.0 * rho / smin), 128.0, 1024.0));
    const double dt = 2.0 * std::numbers::pi / static_cast<double>(nt);
    for (std::size_t a = 0; a < nt; ++a) {
      const double ct = std::cos(dt * static_cast<double>(a)), st = std::sin(dt * static_cast<double>(a));
      for (std::size_t k = 0; k < rr.x.size(); ++k) {
        const double r = rho * rr.x[k];
        p[0] = c[0] + r * ct;
        p[1] = c[1] + r * st;
        sink.add(p, rho * rr.w[k] * r * dt);
      }
    }
  } else {
    const std::size_t panels = panels_for(rho, smin, 8);
    const Rule& rr = composite_rule(8, panels);
    const Rule& rt = composite_rule(8, panels);
    const std::size_t nf =
        static_cast<std::size_t>(std::clamp(std::ceil(8.0 * rho / smin), 64.0, 128.0));
    const double df = 2.0 * std::numbers::pi / static_cast<double>(nf);
    for (std::size_t a = 0; a < nf; ++a) {
      const double cf = std::cos(df * static_cast<double>(a)), sf = std::sin(df * static_cast<double>(a));
      for (std::size_t t = 0; t < rt.x.size(); ++t) {
        const double th = std::numbers::pi * rt.x[t];
        const double sth = std::sin(th), cth = std::cos(th);
        const double wt = std::numbers::pi * rt.w[t] * sth * df;
        for (std::size_t k = 0; k < rr.x.size(); ++k) {
          const double r = rho * rr.x[k];
          p[0] = c[0] + r * sth * cf;
          p[1] = c[1] + r * sth * sf;
          p[2] = c[2] + r * cth;
          sink.add(p, wt * rho * rr.w[k] * r * r);
        }
      }
    }
  }
  return sink.total() * normalization(spec.sigma);
}

double diameter(const std::vector<Vec>& pts) {
  double d = 0.0;
  for (const auto& a : pts)
    for (const auto& b : pts) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      d = std::max(d, std::sqrt(s));
    }
  return d;
}

double simplex_gaussian(const MeasureSpec& spec, const std::vector<Vec>& v, NodeSink& sink) {
  const std::size_t m = v[0].size();
  const double smin = *std::min_element(spec.sigma.begin(), spec.sigma.end());
  const double diam = diameter(v);
  double p[3];
  if (m == 2) {
    const double e1[2] = {v[1][0] - v[0][0], v[1][1] - v[0][1]};
    const double e2[2] = {v[2][0] - v[1][0], v[2][1] - v[1][1]};
    const double jac = std::abs(e1[0] * e2[1] - e1[1] * e2[0]);
    const Rule& r = composite_rule(16, panels_for(diam, smin, 32));
    for (std::size_t a = 0; a < r.x.size(); ++a)
      for (std::size_t b = 0; b < r.x.size(); ++b) {
        const double s = r.x[a], t = r.x[b];
        p[0] = v[0][0] + s * (e1[0] + t * e2[0]);
        p[1] = v[0][1] + s * (e1[1] + t * e2[1]);
        sink.add(p, jac * s * r.w[a] * r.w[b]);
      }
    return 0.0;
  }
  double e[3][3];
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i) e[k][i] = v[k + 1][i] - v[k][i];
  const double jac = std::abs(e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
                              e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
                              e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]));
  const Rule& r = composite_rule(8, panels_for(diam, smin, 6));
  for (std::size_t a = 0; a < r.x.size(); ++a)
    for (std::size_t b = 0; b < r.x.size(); ++b)
      for (std::size_t c = 0; c < r.x.size(); ++c) {
        const double s = r.x[a], t = r.x[b], w = r.x[c];
        for (int i = 0; i < 3; ++i) p[i] = v[0][i] + s * (e[0][i] + t * (e[1][i] + w * e[2][i]));
        sink.add(p, jac * s * s * t * r.w[a] * r.w[b] * r.w[c]);
      }
  return 0.0;
}

Convexity distance_flag(const MeasureSpec& spec, bool maximize) {
  // Distance to a convex set is convex in u; -distance is not.
  const bool convex_set = spec.bad_box.has_value() || spec.bad_points.size() == 1;
  return maximize && convex_set ? Convexity::ConvexInU : Convexity::General;
}

}  // namespace

double std_normal_cdf(double t) {
  return std::clamp(0.5 * std::erfc(-t / std::numbers::sqrt2), 0.0, 1.0);
}

std::string_view to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::Volume: return "volume";
    case MeasureKind::GaussianProbability: return "gaussian-probability";
    case MeasureKind::MinDistToBad: return "min-dist-to-bad";
    case MeasureKind::MaxDistToBad: return "max-dist-to-bad";
  }
  return "volume";
}

MeasureKind measure_kind_from_string(std::string_view s) {
  if (s == "volume") return MeasureKind::Volume;
  if (s == "gaussian-probability") return MeasureKind::GaussianProbability;
  if (s == "min-dist-to-bad") return MeasureKind::MinDistToBad;
  if (s == "max-dist-to-bad") return MeasureKind::MaxDistToBad;
  throw SpecError("unknown measure kind '" + std::string(s) + "'");
}

MeasureSpec MeasureSpec::volume() { return {}; }

MeasureSpec MeasureSpec::gaussian(Vec mean, Vec sigma) {
  MeasureSpec s;
  s.kind = MeasureKind::GaussianProbability;
  s.mean = std::move(mean);
  s.sigma = std::move(sigma);
  return s;
}

MeasureSpec MeasureSpec::min_dist(std::vector<Vec> points) {
  MeasureSpec s;
  s.kind = MeasureKind::MinDistToBad;
  s.bad_points = std::move(points);
  return s;
}

MeasureSpec MeasureSpec::min_dist(Box bad) {
  MeasureSpec s;
  s.kind = MeasureKind::MinDistToBad;
  s.bad_box = std::move(bad);
  return s;
}

MeasureSpec MeasureSpec::max_dist(std::vector<Vec> points) {
  MeasureSpec s = min_dist(std::move(points));
  s.kind = MeasureKind::MaxDistToBad;
  return s;
}

MeasureSpec MeasureSpec::max_dist(Box bad) {
  MeasureSpec s = min_dist(std::move(bad));
  s.kind = MeasureKind::MaxDistToBad;
  return s;
}

void MeasureSpec::validate(std::size_t m) const {
  switch (kind) {
    case MeasureKind::Volume: return;
    case MeasureKind::GaussianProbability:
      if (mean.size() != m || sigma.size() != m) throw UsageError("gaussian measure needs mean and sigma of length m");
      for (double s : sigma)
        if (!(s > 0.0) || !std::isfinite(s)) throw UsageError("gaussian sigma components must be positive");
      if (!all_finite(mean)) throw UsageError("gaussian mean must be finite");
      return;
    case MeasureKind::MinDistToBad:
    case MeasureKind::MaxDistToBad:
      if (bad_box) {
        if (bad_box->dim() != m) throw UsageError("bad-set box dimension differs from m");
        return;
      }
      if (bad_points.empty()) throw UsageError("distance measures need a nonempty bad set");
      for (const auto& p : bad_points)
        if (p.size() != m || !all_finite(p)) throw UsageError("bad-set point has the wrong dimension");
      return;
  }
}

double distance_to_bad(const MeasureSpec& spec, ConstSpan u) {
  if (spec.bad_box) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double c = std::clamp(u[i], spec.bad_box->lo[i], spec.bad_box->hi[i]);
      s += (u[i] - c) * (u[i] - c);
    }
    return std::sqrt(s);
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : spec.bad_points) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - p[i]) * (u[i] - p[i]);
    best = std::min(best, s);
  }
  return std::sqrt(best);
}

double measure(const MeasureSpec& spec, const DesignFamily& fam, const DesignPoint& d, const Box& box) {
  fam.require_feasible(d);
  const std::size_t m = fam.scenario_dim();
  if (box.dim() != m) throw UsageError("measure: box dimension mismatch");

  if (spec.kind == MeasureKind::MinDistToBad || spec.kind == MeasureKind::MaxDistToBad) {
    const bool maximize = spec.kind == MeasureKind::MaxDistToBad;
    const double sign = maximize ? 1.0 : -1.0;
    const ScenarioFunction phi = [&](ConstSpan u) { return sign * distance_to_bad(spec, u); };
    return sign * inner_max(fam, d, phi, distance_flag(spec, maximize), box, spec.inner).value;
  }

  const bool gaussian = spec.kind == MeasureKind::GaussianProbability;
  switch (fam.kind()) {
    case FamilyKind::Interval:
    case FamilyKind::Box: {
      const DesignPoint c = clip_to_box(fam, d, box).d;
      double v = 1.0;
      for (std::size_t i = 0; i < m; ++i)
        v *= gaussian ? interval_mass(c[i], c[m + i], spec.mean[i], spec.sigma[i]) : c[m + i] - c[i];
      return v;
    }
    case FamilyKind::Ball: {
      const double rho = d[0];
      const Vec& c = fam.center();
      if (!gaussian) {
        if (m == 1) return 2.0 * rho;
        if (m == 2) return std::numbers::pi * rho * rho;
        return 4.0 / 3.0 * std::numbers::pi * rho * rho * rho;
      }
      if (m == 1) {
        const double a = std::max(c[0] - rho, box.lo[0]), b = std::min(c[0] + rho, box.hi[0]);
        return interval_mass(a, b, spec.mean[0], spec.sigma[0]);
      }
      return ball_gaussian(spec, c, rho);
    }
    case FamilyKind::ScaledSet: {
      const double alpha = d[0];
      const Polytope& z = fam.shape();
      if (!gaussian) {
        double v = z.volume();
        for (std::size_t i = 0; i < m; ++i) v *= alpha;
        return v;
      }
      if (alpha == 0.0 || z.intrinsic_dim() < m) return 0.0;
      if (m == 1) {
        double a = std::numeric_limits<double>::infinity(), b = -a;
        for (const auto& v : fam.vertices(d)) {
          a = std::min(a, v[0]);
          b = std::max(b, v[0]);
        }
        return interval_mass(std::max(a, box.lo[0]), std::min(b, box.hi[0]), spec.mean[0], spec.sigma[0]);
      }
      NodeSink sink(spec.mean, spec.sigma);
      for (const auto& simplex : z.simplices()) {
        std::vector<Vec> pts;
        for (const auto& v : simplex) pts.push_back(fam.from_reference(d, v));
        simplex_gaussian(spec, pts, sink);
      }
      return sink.total() * normalization(spec.sigma);
    }
  }
  return 0.0;
}

void gauss_legendre(std::size_t n, Vec& nodes, Vec& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                          static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace invrob
