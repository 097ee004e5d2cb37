// SPDX-License-Identifier: Apache-2.0
#include "invrob/types.hpp"

#include <algorithm>
#include <cmath>

#include "invrob/errors.hpp"

namespace invrob {

Box::Box(Vec lower, Vec upper) : lo(std::move(lower)), hi(std::move(upper)) {
  if (lo.size() != hi.size()) throw UsageError("box bounds have different dimensions");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i]) || lo[i] > hi[i])
      throw UsageError("box axis " + std::to_string(i) + " has lo > hi or NaN bounds");
  }
}

Box Box::cube(std::size_t dim, double lo, double hi) {
  return Box(Vec(dim, lo), Vec(dim, hi));
}

bool Box::contains(ConstSpan p) const {
  if (p.size() != lo.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  return true;
}

Vec Box::clamp(ConstSpan p) const {
  Vec out(p.begin(), p.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo[i], hi[i]);
  return out;
}

bool Box::bounded() const {
  return all_finite(lo) && all_finite(hi);
}

std::string_view to_string(Convexity c) {
  switch (c) {
    case Convexity::ConvexInU: return "convex-in-u";
    case Convexity::MonotoneInU: return "monotone-in-u";
    case Convexity::General: return "general";
  }
  return "general";
}

Convexity convexity_from_string(std::string_view s) {
  if (s == "convex-in-u") return Convexity::ConvexInU;
  if (s == "monotone-in-u") return Convexity::MonotoneInU;
  if (s == "general") return Convexity::General;
  throw SpecError("unknown convexity flag '" + std::string(s) + "'");
}

bool all_finite(ConstSpan v) {
  return std::all_of(v.begin(), v.end(), [](double t) { return std::isfinite(t); });
}

}  // namespace invrob
