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

// Compiled with -mavx2 -mfma; only reached through dispatch after a CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>
#include <numbers>

#include "homotomo/kernels.hpp"

namespace homotomo::kernels::avx2 {

void cubic_accumulate(const double *v0, const double *g0, const double *v1, const double *g1, const double *coef_re,
                      const double *coef_im, std::size_t len, double *acc_re, double *acc_im) {
    const __m256d r0 = _mm256_set1_pd(coef_re[0]);
    const __m256d r1 = _mm256_set1_pd(coef_re[1]);
    const __m256d r2 = _mm256_set1_pd(coef_re[2]);
    const __m256d r3 = _mm256_set1_pd(coef_re[3]);
    const __m256d i0 = _mm256_set1_pd(coef_im[0]);
    const __m256d i1 = _mm256_set1_pd(coef_im[1]);
    const __m256d i2 = _mm256_set1_pd(coef_im[2]);
    const __m256d i3 = _mm256_set1_pd(coef_im[3]);
    std::size_t p = 0;
    for (; p + 4 <= len; p += 4) {
        __m256d a = _mm256_loadu_pd(v0 + p);
        __m256d b = _mm256_loadu_pd(g0 + p);
        __m256d c = _mm256_loadu_pd(v1 + p);
        __m256d d = _mm256_loadu_pd(g1 + p);
        __m256d re = _mm256_mul_pd(r0, a);
        re = _mm256_fmadd_pd(r1, b, re);
        re = _mm256_fmadd_pd(r2, c, re);
        re = _mm256_fmadd_pd(r3, d, re);
        __m256d im = _mm256_mul_pd(i0, a);
        im = _mm256_fmadd_pd(i1, b, im);
        im = _mm256_fmadd_pd(i2, c, im);
        im = _mm256_fmadd_pd(i3, d, im);
        _mm256_storeu_pd(acc_re + p, _mm256_add_pd(_mm256_loadu_pd(acc_re + p), re));
        _mm256_storeu_pd(acc_im + p, _mm256_add_pd(_mm256_loadu_pd(acc_im + p), im));
    }
    for (; p < len; ++p) {
        acc_re[p] += coef_re[0] * v0[p] + coef_re[1] * g0[p] + coef_re[2] * v1[p] + coef_re[3] * g1[p];
        acc_im[p] += coef_im[0] * v0[p] + coef_im[1] * g0[p] + coef_im[2] * v1[p] + coef_im[3] * g1[p];
    }
}

void hermite_batch(const double *xs, std::size_t nx, int kmax, double *out) {
    const double c0 = std::pow(std::numbers::pi, -0.25);
    for (std::size_t i = 0; i < nx; ++i) {
        out[i] = c0 * std::exp(-0.5 * xs[i] * xs[i]);
    }
    if (kmax >= 1) {
        for (std::size_t i = 0; i < nx; ++i) {
            out[nx + i] = std::numbers::sqrt2 * xs[i] * out[i];
        }
    }
    for (int k = 1; k < kmax; ++k) {
        const __m256d a = _mm256_set1_pd(std::sqrt(2.0 / (k + 1.0)));
        const __m256d b = _mm256_set1_pd(std::sqrt(k / (k + 1.0)));
        const double *prev = out + static_cast<std::size_t>(k - 1) * nx;
        const double *cur = out + static_cast<std::size_t>(k) * nx;
        double *next = out + static_cast<std::size_t>(k + 1) * nx;
        std::size_t i = 0;
        for (; i + 4 <= nx; i += 4) {
            __m256d x = _mm256_loadu_pd(xs + i);
            __m256d t = _mm256_mul_pd(_mm256_mul_pd(a, x), _mm256_loadu_pd(cur + i));
            _mm256_storeu_pd(next + i, _mm256_fnmadd_pd(b, _mm256_loadu_pd(prev + i), t));
        }
        const double as = std::sqrt(2.0 / (k + 1.0));
        const double bs = std::sqrt(k / (k + 1.0));
        for (; i < nx; ++i) {
            next[i] = as * xs[i] * cur[i] - bs * prev[i];
        }
    }
}

double likelihood_pass(const double *u_re, const double *u_im, std::size_t n_valid, int dim, const double *l_re,
                       const double *l_im, double *g_re, double *g_im) {
    constexpr std::size_t S = kLikelihoodBlock;
    static_assert(S == 16);
    const std::size_t n = static_cast<std::size_t>(dim);
    std::vector<double> b_re(n * S), b_im(n * S);
    // Four-lane partial sums of G, reduced once at the end.
    std::vector<double> lanes_re(n * n * 4, 0.0), lanes_im(n * n * 4, 0.0);
    double total = 0.0;
    for (std::size_t start = 0; start < n_valid; start += S) {
        const double *ur = u_re + start * n;
        const double *ui = u_im + start * n;
        const std::size_t valid = std::min(S, n_valid - start);
        for (std::size_t c = 0; c < n; ++c) {
            __m256d ar0 = _mm256_setzero_pd(), ar1 = ar0, ar2 = ar0, ar3 = ar0;
            __m256d ai0 = ar0, ai1 = ar0, ai2 = ar0, ai3 = ar0;
            for (std::size_t j = c; j < n; ++j) {
                const __m256d lr = _mm256_set1_pd(l_re[j * n + c]);
                const __m256d li = _mm256_set1_pd(l_im[j * n + c]);
                const double *r = ur + j * S;
                const double *i = ui + j * S;
                __m256d r0 = _mm256_loadu_pd(r), r1 = _mm256_loadu_pd(r + 4);
                __m256d r2 = _mm256_loadu_pd(r + 8), r3 = _mm256_loadu_pd(r + 12);
                __m256d i0 = _mm256_loadu_pd(i), i1 = _mm256_loadu_pd(i + 4);
                __m256d i2 = _mm256_loadu_pd(i + 8), i3 = _mm256_loadu_pd(i + 12);
                ar0 = _mm256_fnmadd_pd(i0, li, _mm256_fmadd_pd(r0, lr, ar0));
                ar1 = _mm256_fnmadd_pd(i1, li, _mm256_fmadd_pd(r1, lr, ar1));
                ar2 = _mm256_fnmadd_pd(i2, li, _mm256_fmadd_pd(r2, lr, ar2));
                ar3 = _mm256_fnmadd_pd(i3, li, _mm256_fmadd_pd(r3, lr, ar3));
                ai0 = _mm256_fmadd_pd(i0, lr, _mm256_fmadd_pd(r0, li, ai0));
                ai1 = _mm256_fmadd_pd(i1, lr, _mm256_fmadd_pd(r1, li, ai1));
                ai2 = _mm256_fmadd_pd(i2, lr, _mm256_fmadd_pd(r2, li, ai2));
                ai3 = _mm256_fmadd_pd(i3, lr, _mm256_fmadd_pd(r3, li, ai3));
            }
            double *br = b_re.data() + c * S;
            double *bi = b_im.data() + c * S;
            _mm256_storeu_pd(br, ar0);
            _mm256_storeu_pd(br + 4, ar1);
            _mm256_storeu_pd(br + 8, ar2);
            _mm256_storeu_pd(br + 12, ar3);
            _mm256_storeu_pd(bi, ai0);
            _mm256_storeu_pd(bi + 4, ai1);
            _mm256_storeu_pd(bi + 8, ai2);
            _mm256_storeu_pd(bi + 12, ai3);
        }
        alignas(32) double w[S];
        {
            __m256d p[4] = {_mm256_setzero_pd(), _mm256_setzero_pd(), _mm256_setzero_pd(), _mm256_setzero_pd()};
            for (std::size_t c = 0; c < n; ++c) {
                for (int q = 0; q < 4; ++q) {
                    __m256d r = _mm256_loadu_pd(b_re.data() + c * S + 4 * q);
                    __m256d i = _mm256_loadu_pd(b_im.data() + c * S + 4 * q);
                    p[q] = _mm256_fmadd_pd(i, i, _mm256_fmadd_pd(r, r, p[q]));
                }
            }
            for (int q = 0; q < 4; ++q) {
                _mm256_store_pd(w + 4 * q, p[q]);
            }
        }
        for (std::size_t s = 0; s < S; ++s) {
            if (s < valid) {
                if (!(w[s] > 0.0)) {
                    return -std::numeric_limits<double>::infinity();
                }
                total += std::log(w[s]);
                w[s] = 1.0 / w[s];
            } else {
                w[s] = 0.0;
            }
        }
        const __m256d w0 = _mm256_load_pd(w), w1 = _mm256_load_pd(w + 4);
        const __m256d w2 = _mm256_load_pd(w + 8), w3 = _mm256_load_pd(w + 12);
        for (std::size_t c = 0; c < n; ++c) {
            double *br = b_re.data() + c * S;
            double *bi = b_im.data() + c * S;
            _mm256_storeu_pd(br, _mm256_mul_pd(_mm256_loadu_pd(br), w0));
            _mm256_storeu_pd(br + 4, _mm256_mul_pd(_mm256_loadu_pd(br + 4), w1));
            _mm256_storeu_pd(br + 8, _mm256_mul_pd(_mm256_loadu_pd(br + 8), w2));
            _mm256_storeu_pd(br + 12, _mm256_mul_pd(_mm256_loadu_pd(br + 12), w3));
            _mm256_storeu_pd(bi, _mm256_mul_pd(_mm256_loadu_pd(bi), w0));
            _mm256_storeu_pd(bi + 4, _mm256_mul_pd(_mm256_loadu_pd(bi + 4), w1));
            _mm256_storeu_pd(bi + 8, _mm256_mul_pd(_mm256_loadu_pd(bi + 8), w2));
            _mm256_storeu_pd(bi + 12, _mm256_mul_pd(_mm256_loadu_pd(bi + 12), w3));
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double *r = ur + j * S;
            const double *i = ui + j * S;
            const __m256d r0 = _mm256_loadu_pd(r), r1 = _mm256_loadu_pd(r + 4);
            const __m256d r2 = _mm256_loadu_pd(r + 8), r3 = _mm256_loadu_pd(r + 12);
            const __m256d i0 = _mm256_loadu_pd(i), i1 = _mm256_loadu_pd(i + 4);
            const __m256d i2 = _mm256_loadu_pd(i + 8), i3 = _mm256_loadu_pd(i + 12);
            for (std::size_t c = 0; c <= j; ++c) {
                const double *wr = b_re.data() + c * S;
                const double *wi = b_im.data() + c * S;
                __m256d x0 = _mm256_loadu_pd(wr), x1 = _mm256_loadu_pd(wr + 4);
                __m256d x2 = _mm256_loadu_pd(wr + 8), x3 = _mm256_loadu_pd(wr + 12);
                __m256d y0 = _mm256_loadu_pd(wi), y1 = _mm256_loadu_pd(wi + 4);
                __m256d y2 = _mm256_loadu_pd(wi + 8), y3 = _mm256_loadu_pd(wi + 12);
                // conj(u) * w: re = ur wr + ui wi, im = ur wi - ui wr.
                __m256d gr_a = _mm256_fmadd_pd(i0, y0, _mm256_mul_pd(r0, x0));
                __m256d gr_b = _mm256_fmadd_pd(i1, y1, _mm256_mul_pd(r1, x1));
                gr_a = _mm256_fmadd_pd(i2, y2, _mm256_fmadd_pd(r2, x2, gr_a));
                gr_b = _mm256_fmadd_pd(i3, y3, _mm256_fmadd_pd(r3, x3, gr_b));
                __m256d gi_a = _mm256_fnmadd_pd(i0, x0, _mm256_mul_pd(r0, y0));
                __m256d gi_b = _mm256_fnmadd_pd(i1, x1, _mm256_mul_pd(r1, y1));
                gi_a = _mm256_fnmadd_pd(i2, x2, _mm256_fmadd_pd(r2, y2, gi_a));
                gi_b = _mm256_fnmadd_pd(i3, x3, _mm256_fmadd_pd(r3, y3, gi_b));
                double *lr = lanes_re.data() + (j * n + c) * 4;
                double *li = lanes_im.data() + (j * n + c) * 4;
                _mm256_storeu_pd(lr, _mm256_add_pd(_mm256_loadu_pd(lr), _mm256_add_pd(gr_a, gr_b)));
                _mm256_storeu_pd(li, _mm256_add_pd(_mm256_loadu_pd(li), _mm256_add_pd(gi_a, gi_b)));
            }
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t c = 0; c <= j; ++c) {
            const double *lr = lanes_re.data() + (j * n + c) * 4;
            const double *li = lanes_im.data() + (j * n + c) * 4;
            g_re[j * n + c] += (lr[0] + lr[1]) + (lr[2] + lr[3]);
            g_im[j * n + c] += (li[0] + li[1]) + (li[2] + li[3]);
        }
    }
    return total;
}

}  // namespace homotomo::kernels::avx2
