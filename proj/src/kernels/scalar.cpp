// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "invrob/kernels.hpp"

namespace invrob::kernels::scalar {

std::ptrdiff_t feasible_argmax(std::span<const double> v, std::span<const double* const> a,
                               std::span<const double* const> b, double s, double tol) {
  std::ptrdiff_t best = -1;
  double best_v = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < a.size() && ok; ++k) {
      const double prod = a[k][i] * s;
      ok = prod + b[k][i] <= tol;
    }
    if (ok && (best < 0 || v[i] > best_v)) {
      best = static_cast<std::ptrdiff_t>(i);
      best_v = v[i];
    }
  }
  return best;
}

double gaussian_weighted_sum(std::span<const double> w, std::span<const double* const> coords,
                             std::span<const double> mu, std::span<const double> inv_sigma) {
  double sum = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    double q = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const double z = (coords[i][k] - mu[i]) * inv_sigma[i];
      q += z * z;
    }
    sum += w[k] * std::exp(-0.5 * q);
  }
  return sum;
}

}  // namespace invrob::kernels::scalar
