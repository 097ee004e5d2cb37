// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include "invrob/types.hpp"

namespace invrob {

using Objective = std::function<double(ConstSpan)>;

/// Compass (coordinate pattern) search with a step per coordinate. Steps are
/// fractions of the box width: a success doubles that coordinate's step, a
/// failure in both directions shrinks it. After every sweep that moved the
/// point, a Hooke-Jeeves pattern step along the sweep's net displacement is
/// tried (and doubled while it keeps improving), which keeps the search from
/// zig-zagging down diagonal valleys.
struct CompassConfig {
  double initial_step = 0.25;
  double shrink = 0.5;
  double min_step = 1e-9;
  bool expand = true;
  bool pattern = true;
  std::size_t max_evals = 200000;
  /// Stop after this many consecutive sweeps that each cut f by less than a
  /// relative `stall_rtol` (0 disables the test).
  std::size_t stall_sweeps = 0;
  double stall_rtol = 1e-6;
};

struct CompassResult {
  Vec x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t evals = 0;
};

/// Minimizes f over `box` starting at x0 (clamped into the box). Stops early
/// once f <= stop_at.
CompassResult compass_minimize(const Objective& f, const Box& box, Vec x0, const CompassConfig& cfg,
                               double stop_at = -std::numeric_limits<double>::infinity());

/// Grid of `grid` points per axis (total capped at `max_points`), then compass
/// search from the `refine` best grid points. Ties keep the earlier point.
CompassResult multistart_minimize(const Objective& f, const Box& box, std::size_t grid, std::size_t refine,
                                  const CompassConfig& cfg,
                                  double stop_at = -std::numeric_limits<double>::infinity(),
                                  std::size_t max_points = 4096);

/// Evenly spaced points per axis, reduced until the product fits `max_points`.
std::vector<Vec> box_grid(const Box& box, std::size_t per_axis, std::size_t max_points);

}  // namespace invrob
