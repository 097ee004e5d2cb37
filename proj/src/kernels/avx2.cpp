// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "invrob/kernels.hpp"

namespace invrob::kernels::avx2 {
namespace {

// exp for x <= 0 with |rel err| ~ 2e-16 on [-708, 0]; returns 0 below -708.
// Cody-Waite reduction to |r| <= ln2/2, then a degree-12 Taylor polynomial.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93145751953125e-1), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.42860682030941723212e-6), r);

  static constexpr double c[] = {1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
                                 1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,     1.0 / 120.0,
                                 1.0 / 24.0,        1.0 / 6.0,        0.5,             1.0,
                                 1.0};
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 13; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

  // 2^k by building the exponent field directly.
  const __m128i ki = _mm256_cvtpd_epi32(k);
  __m256i e = _mm256_cvtepi32_epi64(ki);
  e = _mm256_slli_epi64(_mm256_add_epi64(e, _mm256_set1_epi64x(1023)), 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(e));
  return _mm256_andnot_pd(underflow, result);
}

}  // namespace

std::ptrdiff_t feasible_argmax(std::span<const double> v, std::span<const double* const> a,
                               std::span<const double* const> b, double s, double tol) {
  const std::size_t n = v.size();
  const std::size_t nv = n - n % 4;
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d vt = _mm256_set1_pd(tol);
  const __m256d neg_inf = _mm256_set1_pd(-INFINITY);

  // Per-lane best value and index. Strict ">" keeps the lowest index per lane.
  __m256d best_v = neg_inf;
  __m256i best_i = _mm256_set1_epi64x(-1);
  __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
  const __m256i four = _mm256_set1_epi64x(4);

  for (std::size_t i = 0; i < nv; i += 4) {
    __m256d ok = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (std::size_t k = 0; k < a.size(); ++k) {
      const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a[k] + i), vs);
      const __m256d lhs = _mm256_add_pd(prod, _mm256_loadu_pd(b[k] + i));
      ok = _mm256_and_pd(ok, _mm256_cmp_pd(lhs, vt, _CMP_LE_OQ));
    }
    const __m256d vals = _mm256_loadu_pd(v.data() + i);
    const __m256i unset = _mm256_cmpeq_epi64(best_i, _mm256_set1_epi64x(-1));
    const __m256d better = _mm256_or_pd(_mm256_cmp_pd(vals, best_v, _CMP_GT_OQ), _mm256_castsi256_pd(unset));
    const __m256d take = _mm256_and_pd(ok, better);
    best_v = _mm256_blendv_pd(best_v, vals, take);
    best_i = _mm256_castpd_si256(
        _mm256_blendv_pd(_mm256_castsi256_pd(best_i), _mm256_castsi256_pd(idx), take));
    idx = _mm256_add_epi64(idx, four);
  }

  alignas(32) double lane_v[4];
  alignas(32) std::int64_t lane_i[4];
  _mm256_store_pd(lane_v, best_v);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane_i), best_i);

  std::ptrdiff_t best = -1;
  double bv = 0.0;
  for (int l = 0; l < 4; ++l) {
    if (lane_i[l] < 0) continue;
    if (best < 0 || lane_v[l] > bv || (lane_v[l] == bv && lane_i[l] < best)) {
      best = static_cast<std::ptrdiff_t>(lane_i[l]);
      bv = lane_v[l];
    }
  }
  for (std::size_t i = nv; i < n; ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < a.size() && ok; ++k) {
      const double prod = a[k][i] * s;
      ok = prod + b[k][i] <= tol;
    }
    if (ok && (best < 0 || v[i] > bv)) {
      best = static_cast<std::ptrdiff_t>(i);
      bv = v[i];
    }
  }
  return best;
}

double gaussian_weighted_sum(std::span<const double> w, std::span<const double* const> coords,
                             std::span<const double> mu, std::span<const double> inv_sigma) {
  const std::size_t n = w.size();
  const std::size_t nv = n - n % 4;
  const std::size_t dims = coords.size();
  __m256d mu_v[3], is_v[3];
  for (std::size_t i = 0; i < dims; ++i) {
    mu_v[i] = _mm256_set1_pd(mu[i]);
    is_v[i] = _mm256_set1_pd(inv_sigma[i]);
  }
  const __m256d mhalf = _mm256_set1_pd(-0.5);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < nv; k += 4) {
    __m256d q = _mm256_setzero_pd();
    for (std::size_t i = 0; i < dims; ++i) {
      const __m256d z = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(coords[i] + k), mu_v[i]), is_v[i]);
      q = _mm256_fmadd_pd(z, z, q);
    }
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + k), exp_nonpositive(_mm256_mul_pd(mhalf, q)), acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (std::size_t k = nv; k < n; ++k) {
    double q = 0.0;
    for (std::size_t i = 0; i < dims; ++i) {
      const double z = (coords[i][k] - mu[i]) * inv_sigma[i];
      q += z * z;
    }
    sum += w[k] * std::exp(-0.5 * q);
  }
  return sum;
}

}  // namespace invrob::kernels::avx2
