// SPDX-License-Identifier: Apache-2.0
#include "invrob/local_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "invrob/errors.hpp"

namespace invrob {

CompassResult compass_minimize(const Objective& f, const Box& box, Vec x0, const CompassConfig& cfg, double stop_at) {
  const std::size_t n = box.dim();
  if (x0.size() != n) throw UsageError("compass search: start point has the wrong dimension");
  CompassResult res;
  res.x = box.clamp(x0);
  res.value = f(res.x);
  res.evals = 1;

  Vec step(n), floor(n);
  for (std::size_t k = 0; k < n; ++k) {
    step[k] = cfg.initial_step * box.width(k);
    floor[k] = cfg.min_step * box.width(k);
  }

  Vec trial(n);
  std::size_t stalled = 0;
  while (res.value > stop_at && res.evals < cfg.max_evals) {
    const Vec before = res.x;
    const double start_value = res.value;
    bool active = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (box.width(k) == 0.0 || step[k] < floor[k]) continue;
      active = true;
      bool moved = false;
      for (double dir : {1.0, -1.0}) {
        if (res.evals >= cfg.max_evals) break;
        const double t = std::clamp(res.x[k] + dir * step[k], box.lo[k], box.hi[k]);
        if (t == res.x[k]) continue;
        const double old = res.x[k];
        res.x[k] = t;
        const double v = f(res.x);
        ++res.evals;
        if (v < res.value) {
          res.value = v;
          moved = true;
          break;
        }
        res.x[k] = old;
      }
      if (moved && cfg.expand) step[k] = std::min(2.0 * step[k], box.width(k));
      if (!moved) step[k] *= cfg.shrink;
      if (res.value <= stop_at || res.evals >= cfg.max_evals) break;
    }
    if (!active) break;
    if (cfg.pattern && n >= 2 && res.x != before && res.value > stop_at) {
      for (double scale = 1.0; res.evals < cfg.max_evals; scale *= 2.0) {
        for (std::size_t k = 0; k < n; ++k)
          trial[k] = std::clamp(res.x[k] + scale * (res.x[k] - before[k]), box.lo[k], box.hi[k]);
        if (trial == res.x) break;
        const double v = f(trial);
        ++res.evals;
        if (!(v < res.value)) break;
        res.x = trial;
        res.value = v;
      }
    }
    if (cfg.stall_sweeps > 0) {
      stalled = res.value > start_value - cfg.stall_rtol * std::abs(start_value) ? stalled + 1 : 0;
      if (stalled >= cfg.stall_sweeps) break;
    }
  }
  return res;
}

std::vector<Vec> box_grid(const Box& box, std::size_t per_axis, std::size_t max_points) {
  const std::size_t n = box.dim();
  std::size_t g = std::max<std::size_t>(per_axis, 1);
  auto total = [&](std::size_t k) {
    double t = 1.0;
    for (std::size_t i = 0; i < n; ++i) t *= box.width(i) > 0.0 ? static_cast<double>(k) : 1.0;
    return t;
  };
  while (g > 1 && total(g) > static_cast<double>(max_points)) --g;

  std::vector<Vec> out;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    Vec p(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t cnt = box.width(i) > 0.0 ? g : 1;
      p[i] = cnt == 1 ? (g == 1 ? 0.5 * (box.lo[i] + box.hi[i]) : box.lo[i])
                      : box.lo[i] + box.width(i) * static_cast<double>(idx[i]) / static_cast<double>(cnt - 1);
      if (cnt > 1 && idx[i] + 1 == cnt) p[i] = box.hi[i];
    }
    out.push_back(std::move(p));
    std::size_t i = 0;
    while (i < n) {
      const std::size_t cnt = box.width(i) > 0.0 ? g : 1;
      if (++idx[i] < cnt) break;
      idx[i++] = 0;
    }
    if (i == n) break;
  }
  return out;
}

CompassResult multistart_minimize(const Objective& f, const Box& box, std::size_t grid, std::size_t refine,
                                  const CompassConfig& cfg, double stop_at, std::size_t max_points) {
  const auto pts = box_grid(box, grid, max_points);
  Vec vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });

  CompassResult best;
  best.evals = pts.size();
  for (std::size_t r = 0; r < std::min(refine, order.size()); ++r) {
    auto res = compass_minimize(f, box, pts[order[r]], cfg, stop_at);
    best.evals += res.evals;
    if (best.x.empty() || res.value < best.value) {
      const std::size_t evals = best.evals;
      best = std::move(res);
      best.evals = evals;
    }
    if (best.value <= stop_at) break;
  }
  return best;
}

}  // namespace invrob
