// SPDX-License-Identifier: Apache-2.0
#include "invrob/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "invrob/errors.hpp"

namespace invrob {
namespace {

double dot(ConstSpan a, ConstSpan b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(ConstSpan a) { return std::sqrt(dot(a, a)); }

Vec sub(ConstSpan a, ConstSpan b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double cross2(const Vec& o, const Vec& a, const Vec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain; returns CCW hull without collinear points.
std::vector<Vec> hull2d(std::vector<Vec> pts, double eps) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], p) <= eps) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double det3(const Vec& a, const Vec& b, const Vec& c) { return dot(a, cross(b, c)); }

}  // namespace

Polytope::Polytope(std::vector<Vec> points) {
  if (points.empty()) throw UsageError("polytope needs at least one vertex");
  m_ = points.front().size();
  if (m_ == 0) throw UsageError("polytope vertices must have dimension >= 1");
  if (m_ > 3) throw UnsupportedError("scaled-set polytopes are limited to dimension <= 3");
  for (const auto& p : points) {
    if (p.size() != m_) throw UsageError("polytope vertices have mixed dimensions");
    if (!all_finite(p)) throw UsageError("polytope vertex is not finite");
  }

  double diam = 0.0;
  for (const auto& a : points)
    for (const auto& b : points) diam = std::max(diam, norm(sub(a, b)));
  eps_ = 1e-12 * std::max(1.0, diam);
  origin_ = points.front();

  for (const auto& p : points) {
    Vec w = sub(p, origin_);
    for (const auto& e : basis_) {
      const double c = dot(w, e);
      for (std::size_t i = 0; i < m_; ++i) w[i] -= c * e[i];
    }
    const double nw = norm(w);
    if (nw > 1e-9 * std::max(1.0, diam)) {
      for (auto& t : w) t /= nw;
      basis_.push_back(std::move(w));
      if (basis_.size() == m_) break;
    }
  }
  const std::size_t k = basis_.size();

  std::vector<Vec> q;
  q.reserve(points.size());
  for (const auto& p : points) {
    Vec w = sub(p, origin_);
    Vec c(k);
    for (std::size_t j = 0; j < k; ++j) c[j] = dot(w, basis_[j]);
    q.push_back(std::move(c));
  }

  if (k == 0) {
    vertices_ = {origin_};
  } else if (k == 1) {
    auto [lo, hi] = std::minmax_element(q.begin(), q.end(),
                                        [](const Vec& a, const Vec& b) { return a[0] < b[0]; });
    const double qlo = (*lo)[0], qhi = (*hi)[0];
    normals_ = {{1.0}, {-1.0}};
    offsets_ = {qhi, -qlo};
    vertices_ = {ambient(*lo), ambient(*hi)};
    if (m_ == 1) {
      volume_ = qhi - qlo;
      simplices_ = {{vertices_[0], vertices_[1]}};
    }
  } else if (k == 2) {
    const auto h = hull2d(q, eps_ * eps_);
    double area = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Vec& a = h[i];
      const Vec& b = h[(i + 1) % h.size()];
      Vec n{b[1] - a[1], -(b[0] - a[0])};
      const double nn = norm(n);
      n[0] /= nn;
      n[1] /= nn;
      offsets_.push_back(dot(n, a));
      normals_.push_back(std::move(n));
      area += a[0] * b[1] - b[0] * a[1];
      vertices_.push_back(ambient(a));
    }
    if (m_ == 2) {
      volume_ = 0.5 * std::abs(area);
      for (std::size_t i = 1; i + 1 < h.size(); ++i)
        simplices_.push_back({ambient(h[0]), ambient(h[i]), ambient(h[i + 1])});
    }
  } else {
    // k == 3: facets from every non-degenerate triple that supports the set.
    std::vector<Vec> uq = q;
    std::sort(uq.begin(), uq.end());
    uq.erase(std::unique(uq.begin(), uq.end()), uq.end());
    const std::size_t np = uq.size();
    for (std::size_t a = 0; a < np; ++a)
      for (std::size_t b = a + 1; b < np; ++b)
        for (std::size_t c = b + 1; c < np; ++c) {
          Vec n = cross(sub(uq[b], uq[a]), sub(uq[c], uq[a]));
          const double nn = norm(n);
          if (nn <= eps_ * std::max(1.0, diam)) continue;
          for (auto& t : n) t /= nn;
          double off = dot(n, uq[a]);
          bool below = true, above = true;
          for (const auto& p : uq) {
            const double s = dot(n, p) - off;
            if (s > eps_) below = false;
            if (s < -eps_) above = false;
          }
          if (!below && !above) continue;
          if (!below) {
            for (auto& t : n) t = -t;
            off = -off;
          }
          bool dup = false;
          for (std::size_t f = 0; f < normals_.size() && !dup; ++f)
            dup = norm(sub(normals_[f], n)) < 1e-9 && std::abs(offsets_[f] - off) < 1e-9 * std::max(1.0, diam);
          if (!dup) {
            normals_.push_back(n);
            offsets_.push_back(off);
          }
        }
    std::vector<Vec> hull_q;
    for (const auto& p : uq) {
      int on = 0;
      for (std::size_t f = 0; f < normals_.size(); ++f)
        if (std::abs(dot(normals_[f], p) - offsets_[f]) <= eps_) ++on;
      if (on >= 3) hull_q.push_back(p);
    }
    Vec center(3, 0.0);
    for (const auto& p : hull_q)
      for (std::size_t i = 0; i < 3; ++i) center[i] += p[i] / static_cast<double>(hull_q.size());
    double vol = 0.0;
    for (std::size_t f = 0; f < normals_.size(); ++f) {
      std::vector<Vec> face;
      for (const auto& p : hull_q)
        if (std::abs(dot(normals_[f], p) - offsets_[f]) <= eps_) face.push_back(p);
      Vec fc(3, 0.0);
      for (const auto& p : face)
        for (std::size_t i = 0; i < 3; ++i) fc[i] += p[i] / static_cast<double>(face.size());
      Vec e1 = sub(face[0], fc);
      const double n1 = norm(e1);
      for (auto& t : e1) t /= n1;
      const Vec e2 = cross(normals_[f], e1);
      std::sort(face.begin(), face.end(), [&](const Vec& a, const Vec& b) {
        const Vec da = sub(a, fc), db = sub(b, fc);
        return std::atan2(dot(da, e2), dot(da, e1)) < std::atan2(dot(db, e2), dot(db, e1));
      });
      for (std::size_t i = 1; i + 1 < face.size(); ++i) {
        const Vec a = sub(face[0], center), b = sub(face[i], center), c = sub(face[i + 1], center);
        vol += std::abs(det3(a, b, c)) / 6.0;
        simplices_.push_back({ambient(center), ambient(face[0]), ambient(face[i]), ambient(face[i + 1])});
      }
    }
    volume_ = vol;
    for (const auto& p : hull_q) vertices_.push_back(ambient(p));
  }
}

Vec Polytope::ambient(ConstSpan q) const {
  Vec p = origin_;
  for (std::size_t j = 0; j < basis_.size(); ++j)
    for (std::size_t i = 0; i < m_; ++i) p[i] += q[j] * basis_[j][i];
  return p;
}

Vec Polytope::local(ConstSpan p, double scale, double* residual) const {
  Vec w(m_);
  for (std::size_t i = 0; i < m_; ++i) w[i] = p[i] - scale * origin_[i];
  Vec q(basis_.size());
  for (std::size_t j = 0; j < basis_.size(); ++j) {
    q[j] = dot(w, basis_[j]);
  }
  Vec r = w;
  for (std::size_t j = 0; j < basis_.size(); ++j)
    for (std::size_t i = 0; i < m_; ++i) r[i] -= q[j] * basis_[j][i];
  *residual = norm(r);
  return q;
}

double Polytope::violation(ConstSpan p, double scale) const {
  if (p.size() != m_) throw UsageError("polytope membership: dimension mismatch");
  double residual = 0.0;
  const Vec q = local(p, scale, &residual);
  double v = residual;
  for (std::size_t f = 0; f < normals_.size(); ++f) v = std::max(v, dot(normals_[f], q) - scale * offsets_[f]);
  return v;
}

bool Polytope::contains(ConstSpan p, double scale, double slack) const {
  double mag = 0.0;
  for (double t : p) mag = std::max(mag, std::abs(t));
  return violation(p, scale) <= slack * std::max(1.0, mag);
}

double Polytope::max_scale_in_box(ConstSpan anchor, const Box& box) const {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& v : vertices_)
    for (std::size_t i = 0; i < m_; ++i) {
      if (v[i] > 0) s = std::min(s, (box.hi[i] - anchor[i]) / v[i]);
      if (v[i] < 0) s = std::min(s, (box.lo[i] - anchor[i]) / v[i]);
    }
  return std::max(0.0, s);
}

}  // namespace invrob
