// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "invrob/bicriteria.hpp"
#include "invrob/problem.hpp"

namespace testing {

inline const invrob::bicriteria::Instance& example() {
  static const invrob::bicriteria::Instance inst = invrob::bicriteria::make_instance();
  return inst;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace testing
