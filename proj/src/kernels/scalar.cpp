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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>
#include <numbers>

#include "homotomo/kernels.hpp"

namespace homotomo::kernels::scalar {

void cubic_accumulate(const double *v0, const double *g0, const double *v1, const double *g1, const double *coef_re,
                      const double *coef_im, std::size_t len, double *acc_re, double *acc_im) {
    for (std::size_t p = 0; p < len; ++p) {
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
        const double a = std::sqrt(2.0 / (k + 1.0));
        const double b = std::sqrt(k / (k + 1.0));
        const double *prev = out + static_cast<std::size_t>(k - 1) * nx;
        const double *cur = out + static_cast<std::size_t>(k) * nx;
        double *next = out + static_cast<std::size_t>(k + 1) * nx;
        for (std::size_t i = 0; i < nx; ++i) {
            next[i] = a * xs[i] * cur[i] - b * prev[i];
        }
    }
}

double likelihood_pass(const double *u_re, const double *u_im, std::size_t n_valid, int dim, const double *l_re,
                       const double *l_im, double *g_re, double *g_im) {
    constexpr std::size_t S = kLikelihoodBlock;
    const std::size_t n = static_cast<std::size_t>(dim);
    std::vector<double> b_re(n * S), b_im(n * S);
    double total = 0.0;
    for (std::size_t start = 0; start < n_valid; start += S) {
        const double *ur = u_re + start * n;
        const double *ui = u_im + start * n;
        const std::size_t valid = std::min(S, n_valid - start);
        for (std::size_t c = 0; c < n; ++c) {
            double ar[S] = {}, ai[S] = {};
            for (std::size_t j = c; j < n; ++j) {
                const double lr = l_re[j * n + c];
                const double li = l_im[j * n + c];
                for (std::size_t s = 0; s < S; ++s) {
                    ar[s] += ur[j * S + s] * lr - ui[j * S + s] * li;
                    ai[s] += ur[j * S + s] * li + ui[j * S + s] * lr;
                }
            }
            for (std::size_t s = 0; s < S; ++s) {
                b_re[c * S + s] = ar[s];
                b_im[c * S + s] = ai[s];
            }
        }
        double w[S];
        for (std::size_t s = 0; s < S; ++s) {
            double p = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                p += b_re[c * S + s] * b_re[c * S + s] + b_im[c * S + s] * b_im[c * S + s];
            }
            if (s < valid) {
                if (!(p > 0.0)) {
                    return -std::numeric_limits<double>::infinity();
                }
                total += std::log(p);
                w[s] = 1.0 / p;
            } else {
                w[s] = 0.0;
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t c = 0; c <= j; ++c) {
                double gr = 0.0, gi = 0.0;
                for (std::size_t s = 0; s < S; ++s) {
                    const double wr = b_re[c * S + s] * w[s];
                    const double wi = b_im[c * S + s] * w[s];
                    gr += ur[j * S + s] * wr + ui[j * S + s] * wi;
                    gi += ur[j * S + s] * wi - ui[j * S + s] * wr;
                }
                g_re[j * n + c] += gr;
                g_im[j * n + c] += gi;
            }
        }
    }
    return total;
}

}  // namespace homotomo::kernels::scalar
