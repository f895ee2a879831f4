// Copyright 2026 The homotomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HOMOTOMO_KERNELS_HPP
#define HOMOTOMO_KERNELS_HPP

// Data-parallel inner loops. Every kernel has a scalar reference in kernels::scalar and a
// vector variant in kernels::avx2; the free functions in kernels:: dispatch to the variant
// selected at runtime (CPU detection, overridable with HOMOTOMO_SIMD=scalar|avx2).

#include <cstddef>
#include <span>
#include <string_view>

namespace homotomo::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool cpu_supports(Isa isa);
/// Variant used by the dispatching entry points.
Isa active_isa();
/// Forces a variant; throws DomainError when the CPU lacks it.
void set_active_isa(Isa isa);

/// Largest |x| accepted by hermite_batch.
inline constexpr double kHermiteBatchXLimit = 30.0;

/// acc_re[p] += sum_t coef_re[t] * row_t[p] and likewise for acc_im, p < len,
/// with rows (value_i, deriv_i, value_{i+1}, deriv_{i+1}) of a cubic Hermite cell.
using CubicAccumulateFn = void (*)(const double *v0, const double *g0, const double *v1, const double *g1,
                                   const double *coef_re, const double *coef_im, std::size_t len, double *acc_re,
                                   double *acc_im);

/// out[k * xs.size() + i] = psi_k(xs[i]) for k = 0 .. kmax. Requires |xs[i]| <= kHermiteBatchXLimit.
using HermiteBatchFn = void (*)(const double *xs, std::size_t nx, int kmax, double *out);

/// Samples per block in the likelihood layout.
inline constexpr std::size_t kLikelihoodBlock = 16;

/// Fused likelihood and gradient pass for p_s = sum_c |sum_{j >= c} U_sj L_jc|^2.
///
/// U is block-major: u[(b * dim + j) * kLikelihoodBlock + s] for sample b * kLikelihoodBlock + s,
/// with ceil(n_valid / kLikelihoodBlock) blocks. L and G are dim x dim row-major; only the lower
/// triangle is read or written. Adds sum_s conj(U_sj) B_sc / p_s to G_jc for c <= j and returns
/// sum_s log p_s over the first n_valid samples (-inf if any p_s <= 0).
using LikelihoodPassFn = double (*)(const double *u_re, const double *u_im, std::size_t n_valid, int dim,
                                    const double *l_re, const double *l_im, double *g_re, double *g_im);

namespace scalar {
void cubic_accumulate(const double *v0, const double *g0, const double *v1, const double *g1, const double *coef_re,
                      const double *coef_im, std::size_t len, double *acc_re, double *acc_im);
void hermite_batch(const double *xs, std::size_t nx, int kmax, double *out);
double likelihood_pass(const double *u_re, const double *u_im, std::size_t n_valid, int dim, const double *l_re,
                       const double *l_im, double *g_re, double *g_im);
}  // namespace scalar

namespace avx2 {
void cubic_accumulate(const double *v0, const double *g0, const double *v1, const double *g1, const double *coef_re,
                      const double *coef_im, std::size_t len, double *acc_re, double *acc_im);
void hermite_batch(const double *xs, std::size_t nx, int kmax, double *out);
double likelihood_pass(const double *u_re, const double *u_im, std::size_t n_valid, int dim, const double *l_re,
                       const double *l_im, double *g_re, double *g_im);
}  // namespace avx2

void cubic_accumulate(const double *v0, const double *g0, const double *v1, const double *g1, const double *coef_re,
                      const double *coef_im, std::size_t len, double *acc_re, double *acc_im);

void hermite_batch(std::span<const double> xs, int kmax, std::span<double> out);

double likelihood_pass(const double *u_re, const double *u_im, std::size_t n_valid, int dim, const double *l_re,
                       const double *l_im, double *g_re, double *g_im);

}  // namespace homotomo::kernels

#endif
