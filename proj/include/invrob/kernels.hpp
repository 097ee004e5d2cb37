// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// The dispatching entry points pick AVX2 when the CPU has AVX2 and FMA and
// the environment does not force INVROB_SIMD=scalar.

#include <cstddef>
#include <span>
#include <string_view>

namespace invrob::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Whether this CPU can run the AVX2 variants.
bool avx2_available();

/// ISA used by the dispatching entry points (fixed at first call).
Isa active_isa();

/// Index of the largest v[i] among feasible rows, lowest index on ties, or -1.
/// Row i is feasible when a[k][i] * s + b[k][i] <= tol for every k.
/// Both variants evaluate a*s + b as a separately rounded multiply and add,
/// so they agree bit for bit.
std::ptrdiff_t feasible_argmax(std::span<const double> v, std::span<const double* const> a,
                               std::span<const double* const> b, double s, double tol);

/// sum_k w[k] * exp(-0.5 * sum_i ((coords[i][k] - mu[i]) * inv_sigma[i])^2)
/// for up to three coordinates. Variants agree to ~1e-13 relative.
double gaussian_weighted_sum(std::span<const double> w, std::span<const double* const> coords,
                             std::span<const double> mu, std::span<const double> inv_sigma);

namespace scalar {
std::ptrdiff_t feasible_argmax(std::span<const double> v, std::span<const double* const> a,
                               std::span<const double* const> b, double s, double tol);
double gaussian_weighted_sum(std::span<const double> w, std::span<const double* const> coords,
                             std::span<const double> mu, std::span<const double> inv_sigma);
}  // namespace scalar

namespace avx2 {
std::ptrdiff_t feasible_argmax(std::span<const double> v, std::span<const double* const> a,
                               std::span<const double* const> b, double s, double tol);
double gaussian_weighted_sum(std::span<const double> w, std::span<const double* const> coords,
                             std::span<const double> mu, std::span<const double> inv_sigma);
}  // namespace avx2

}  // namespace invrob::kernels
