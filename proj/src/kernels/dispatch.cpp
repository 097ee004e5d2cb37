// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "invrob/errors.hpp"
#include "invrob/kernels.hpp"

namespace invrob::kernels {

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() {
  static const Isa isa = [] {
    const char* env = std::getenv("INVROB_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return Isa::Scalar;
    return avx2_available() ? Isa::Avx2 : Isa::Scalar;
  }();
  return isa;
}

std::ptrdiff_t feasible_argmax(std::span<const double> v, std::span<const double* const> a,
                               std::span<const double* const> b, double s, double tol) {
  if (a.size() != b.size()) throw UsageError("feasible_argmax: coefficient lists differ in length");
  if (active_isa() == Isa::Avx2) return avx2::feasible_argmax(v, a, b, s, tol);
  return scalar::feasible_argmax(v, a, b, s, tol);
}

double gaussian_weighted_sum(std::span<const double> w, std::span<const double* const> coords,
                             std::span<const double> mu, std::span<const double> inv_sigma) {
  if (coords.size() > 3 || mu.size() != coords.size() || inv_sigma.size() != coords.size())
    throw UsageError("gaussian_weighted_sum: supports 1 to 3 coordinates with matching mu and sigma");
  if (active_isa() == Isa::Avx2) return avx2::gaussian_weighted_sum(w, coords, mu, inv_sigma);
  return scalar::gaussian_weighted_sum(w, coords, mu, inv_sigma);
}

}  // namespace invrob::kernels
