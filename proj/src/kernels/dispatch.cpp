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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

#include "homotomo/errors.hpp"
#include "homotomo/kernels.hpp"

namespace homotomo::kernels {

namespace {

Isa detect() {
    if (const char *env = std::getenv("HOMOTOMO_SIMD")) {
        std::string want(env);
        if (want == "scalar") {
            return Isa::scalar;
        }
        if (want == "avx2" && cpu_supports(Isa::avx2)) {
            return Isa::avx2;
        }
    }
    return cpu_supports(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa> &current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool cpu_supports(Isa isa) {
    if (isa == Isa::scalar) {
        return true;
    }
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active_isa() {
    return current().load(std::memory_order_relaxed);
}

void set_active_isa(Isa isa) {
    if (!cpu_supports(isa)) {
        throw DomainError("CPU does not support " + std::string(isa_name(isa)));
    }
    current().store(isa, std::memory_order_relaxed);
}

void cubic_accumulate(const double *v0, const double *g0, const double *v1, const double *g1, const double *coef_re,
                      const double *coef_im, std::size_t len, double *acc_re, double *acc_im) {
    CubicAccumulateFn fn = active_isa() == Isa::avx2 ? &avx2::cubic_accumulate : &scalar::cubic_accumulate;
    fn(v0, g0, v1, g1, coef_re, coef_im, len, acc_re, acc_im);
}

void hermite_batch(std::span<const double> xs, int kmax, std::span<double> out) {
    if (kmax < 0 || out.size() != xs.size() * (static_cast<std::size_t>(kmax) + 1)) {
        throw DomainError("hermite_batch: output must hold (kmax + 1) * nx values");
    }
    for (double x : xs) {
        if (!(std::abs(x) <= kHermiteBatchXLimit)) {
            throw DomainError("hermite_batch: |x| exceeds batch limit");
        }
    }
    HermiteBatchFn fn = active_isa() == Isa::avx2 ? &avx2::hermite_batch : &scalar::hermite_batch;
    fn(xs.data(), xs.size(), kmax, out.data());
}

double likelihood_pass(const double *u_re, const double *u_im, std::size_t n_valid, int dim, const double *l_re,
                       const double *l_im, double *g_re, double *g_im) {
    LikelihoodPassFn fn = active_isa() == Isa::avx2 ? &avx2::likelihood_pass : &scalar::likelihood_pass;
    return fn(u_re, u_im, n_valid, dim, l_re, l_im, g_re, g_im);
}

}  // namespace homotomo::kernels
