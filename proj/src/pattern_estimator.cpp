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
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>

#include "homotomo/errors.hpp"
#include "homotomo/estimators.hpp"
#include "homotomo/kernels.hpp"

namespace homotomo {
namespace {

std::mutex &table_mutex() {
    static std::mutex m;
    return m;
}

std::map<int, std::unique_ptr<PatternFunctionTable>> &table_slots() {
    static std::map<int, std::unique_ptr<PatternFunctionTable>> slots;
    return slots;
}

std::optional<std::filesystem::path> &cache_override() {
    static std::optional<std::filesystem::path> path;
    return path;
}

std::optional<std::filesystem::path> cache_path() {
    if (cache_override()) {
        return cache_override();
    }
    if (const char *env = std::getenv("HOMOTOMO_PATTERN_CACHE"); env != nullptr && *env != '\0') {
        return std::filesystem::path(env);
    }
    return std::nullopt;
}

struct CellWeights {
    std::size_t cell;
    double w[4];
};

CellWeights cell_weights(double a, double h, std::size_t half_nodes) {
    CellWeights c{};
    c.cell = std::min(static_cast<std::size_t>(a / h), half_nodes - 2);
    double u = a / h - static_cast<double>(c.cell);
    double u2 = u * u;
    double u3 = u2 * u;
    c.w[0] = 2.0 * u3 - 3.0 * u2 + 1.0;
    c.w[1] = (u3 - 2.0 * u2 + u) * h;
    c.w[2] = -2.0 * u3 + 3.0 * u2;
    c.w[3] = (u3 - u2) * h;
    return c;
}

void validate_dataset(const Dataset &ds) {
    if (ds.samples.empty()) {
        throw DomainError("empty dataset");
    }
}

}  // namespace

void set_pattern_cache_path(const std::filesystem::path &dir) {
    std::lock_guard<std::mutex> lock(table_mutex());
    cache_override() = dir;
}

int canonical_table_index(int max_index) {
    int m = kMinSharedTableIndex;
    while (m < max_index) {
        m = 2 * m + 1;
    }
    return m;
}

const PatternFunctionTable &shared_pattern_table(int max_index) {
    if (max_index < 0) {
        throw DomainError("pattern table index must be non-negative");
    }
    const int m = canonical_table_index(max_index);
    std::lock_guard<std::mutex> lock(table_mutex());
    auto &slot = table_slots()[m];
    if (!slot) {
        auto dir = cache_path();
        if (dir) {
            std::filesystem::create_directories(*dir);
            auto file = *dir / ("pattern-" + std::to_string(m) + ".bin");
            slot = std::make_unique<PatternFunctionTable>(load_or_build_pattern_table(m, file));
        } else {
            slot = std::make_unique<PatternFunctionTable>(PatternFunctionTable::build(m));
        }
    }
    return *slot;
}

HermitianMatrix pattern_matrix(const Dataset &ds, int N, const PatternFunctionTable &table) {
    validate_dataset(ds);
    if (N < 1) {
        throw DomainError("truncation N must be at least 1");
    }
    if (!table.has_values() || table.max_index() < N - 1) {
        throw DomainError("pattern table does not cover indices below N = " + std::to_string(N));
    }
    const std::size_t nd = static_cast<std::size_t>(N);
    const std::size_t half = table.half_nodes();
    const std::size_t cells = half - 1;
    const double h = table.step();
    const double x_max = table.grid_spec().x_max;

    // coef[(cell * N + d) * 4 + t]
    std::vector<double> coef_re(cells * nd * 4, 0.0);
    std::vector<double> coef_im(cells * nd * 4, 0.0);
    std::vector<char> used(cells, 0);
    std::vector<const Sample *> outside;
    for (const Sample &s : ds.samples) {
        double a = std::abs(s.x);
        if (!(a < x_max)) {
            outside.push_back(&s);
            continue;
        }
        CellWeights cw = cell_weights(a, h, half);
        used[cw.cell] = 1;
        const Complex step = std::polar(1.0, -s.phi);
        Complex rot(1.0, 0.0);
        double *cr = coef_re.data() + cw.cell * nd * 4;
        double *ci = coef_im.data() + cw.cell * nd * 4;
        const bool negative = s.x < 0.0;
        for (std::size_t d = 0; d < nd; ++d) {
            Complex c = (negative && (d & 1u)) ? -rot : rot;
            for (int t = 0; t < 4; ++t) {
                cr[d * 4 + t] += cw.w[t] * c.real();
                ci[d * 4 + t] += cw.w[t] * c.imag();
            }
            rot *= step;
        }
    }

    std::vector<std::size_t> local_offset(nd + 1, 0);
    for (std::size_t d = 0; d < nd; ++d) {
        local_offset[d + 1] = local_offset[d] + (nd - d);
    }
    std::vector<double> acc_re(local_offset[nd], 0.0);
    std::vector<double> acc_im(local_offset[nd], 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
        if (!used[i]) {
            continue;
        }
        const double *v0 = table.value_row(i).data();
        const double *g0 = table.derivative_row(i).data();
        const double *v1 = table.value_row(i + 1).data();
        const double *g1 = table.derivative_row(i + 1).data();
        for (std::size_t d = 0; d < nd; ++d) {
            std::size_t off = table.diagonal_offset(static_cast<int>(d));
            const double *cr = coef_re.data() + (i * nd + d) * 4;
            const double *ci = coef_im.data() + (i * nd + d) * 4;
            kernels::cubic_accumulate(v0 + off, g0 + off, v1 + off, g1 + off, cr, ci, nd - d,
                                      acc_re.data() + local_offset[d], acc_im.data() + local_offset[d]);
        }
    }

    const int max_index = table.max_index();
    for (const Sample *s : outside) {
        for (std::size_t d = 0; d < nd; ++d) {
            Complex phase = std::polar(1.0, -static_cast<double>(d) * s->phi);
            for (std::size_t k = 0; k + d < nd; ++k) {
                double f = pattern_function(static_cast<int>(k), static_cast<int>(k + d), s->x, max_index);
                acc_re[local_offset[d] + k] += f * phase.real();
                acc_im[local_offset[d] + k] += f * phase.imag();
            }
        }
    }

    const double inv_n = 1.0 / static_cast<double>(ds.samples.size());
    ComplexMatrix lower = ComplexMatrix::Zero(N, N);
    for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t k = 0; k + d < nd; ++k) {
            Complex upper(acc_re[local_offset[d] + k] * inv_n, acc_im[local_offset[d] + k] * inv_n);
            lower(static_cast<Eigen::Index>(k + d), static_cast<Eigen::Index>(k)) = std::conj(upper);
        }
    }
    for (int k = 0; k < N; ++k) {
        lower(k, k) = Complex(lower(k, k).real(), 0.0);
    }
    return HermitianMatrix::from_lower(lower);
}

EstimateReport pattern_estimate(const Dataset &ds, int N, const PatternFunctionTable *table) {
    validate_dataset(ds);
    if (ds.meta.eta != 1.0) {
        throw DomainError("dataset was recorded with efficiency eta = " + std::to_string(ds.meta.eta) +
                          "; use the efficiency-corrected estimator");
    }
    const PatternFunctionTable &t = table != nullptr ? *table : shared_pattern_table(std::max(N - 1, 0));
    EstimateReport report;
    report.method = Method::pattern;
    report.sieve.N = N;
    report.sieve.n = ds.samples.size();
    report.n_samples = ds.samples.size();
    report.estimate = pattern_matrix(ds, N, t);
    report.residuals = constraint_residuals(report.estimate);
    report.physical = report.residuals.min_eigenvalue >= -DensityMatrix::kPsdTolerance &&
                      std::abs(report.residuals.trace_error) <= DensityMatrix::kTraceTolerance;
    return report;
}

double hoeffding_bound(std::size_t n, int N, double a, const PatternFunctionTable *table) {
    if (N < 1 || !(a > 0.0)) {
        throw DomainError("hoeffding bound needs N >= 1 and a > 0");
    }
    const PatternFunctionTable &t = table != nullptr ? *table : shared_pattern_table(N - 1);
    if (t.max_index() < N - 1) {
        throw DomainError("pattern table does not cover indices below N = " + std::to_string(N));
    }
    double s = 0.0;
    for (int j = 0; j < N; ++j) {
        for (int k = 0; k <= j; ++k) {
            double sup = t.sup_norm(k, j);
            s += (k == j ? 1.0 : 2.0) * sup * sup;
        }
    }
    double nn = static_cast<double>(N);
    return nn * nn * std::exp(-static_cast<double>(n) * a * a / s);
}

}  // namespace homotomo
