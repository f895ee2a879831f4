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

#include "homotomo/pattern_table.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include "homotomo/errors.hpp"
#include "homotomo/hermite.hpp"

namespace homotomo {

namespace {

constexpr std::array<char, 4> kCacheMagic{'H', 'T', 'P', 'F'};
constexpr std::uint32_t kCacheVersion = 1;
constexpr int kTableIndexLimit = 256;

void check_pair(int k, int j, int max_index) {
    if (k < 0 || j < k || j > max_index) {
        throw DomainError("pattern pair (" + std::to_string(k) + ", " + std::to_string(j) +
                          ") requires 0 <= k <= j <= " + std::to_string(max_index));
    }
}

/// Largest |p| on [0, 1] for the cubic Hermite interpolant through (f0, d0), (f1, d1),
/// with derivatives already multiplied by the interval width.
double cubic_interval_max(double f0, double d0, double f1, double d1) {
    double c1 = d0;
    double c2 = -3.0 * f0 - 2.0 * d0 + 3.0 * f1 - d1;
    double c3 = 2.0 * f0 + d0 - 2.0 * f1 + d1;
    auto eval = [&](double u) { return std::abs(f0 + u * (c1 + u * (c2 + u * c3))); };
    double best = std::max(std::abs(f0), std::abs(f1));
    // Roots of c1 + 2 c2 u + 3 c3 u^2.
    double a = 3.0 * c3;
    double b = 2.0 * c2;
    auto consider = [&](double u) {
        if (u > 0.0 && u < 1.0) {
            best = std::max(best, eval(u));
        }
    };
    if (std::abs(a) < 1e-300) {
        if (std::abs(b) > 1e-300) {
            consider(-c1 / b);
        }
        return best;
    }
    double disc = b * b - 4.0 * a * c1;
    if (disc < 0.0) {
        return best;
    }
    double sq = std::sqrt(disc);
    double q = -0.5 * (b + std::copysign(sq, b));
    if (q != 0.0) {
        consider(q / a);
        consider(c1 / q);
    } else {
        consider(0.0);
    }
    return best;
}

struct HermiteCubic {
    double w0, w1, w2, w3;  // value_i, deriv_i, value_{i+1}, deriv_{i+1}
    double dw0, dw1, dw2, dw3;  // d/dx of the same basis
};

HermiteCubic hermite_cubic_weights(double u, double h) {
    double u2 = u * u;
    double u3 = u2 * u;
    HermiteCubic c{};
    c.w0 = 2.0 * u3 - 3.0 * u2 + 1.0;
    c.w1 = (u3 - 2.0 * u2 + u) * h;
    c.w2 = -2.0 * u3 + 3.0 * u2;
    c.w3 = (u3 - u2) * h;
    c.dw0 = (6.0 * u2 - 6.0 * u) / h;
    c.dw1 = 3.0 * u2 - 4.0 * u + 1.0;
    c.dw2 = (-6.0 * u2 + 6.0 * u) / h;
    c.dw3 = 3.0 * u2 - 2.0 * u;
    return c;
}

// Little-endian byte sink / source for the cache file.
class ByteWriter {
   public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            bytes_.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
        }
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            bytes_.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
        }
    }
    void f64(double v) {
        u64(std::bit_cast<std::uint64_t>(v));
    }
    void raw(const char *p, std::size_t n) {
        bytes_.insert(bytes_.end(), p, p + n);
    }
    const std::vector<unsigned char> &bytes() const {
        return bytes_;
    }

   private:
    std::vector<unsigned char> bytes_;
};

class ByteReader {
   public:
    explicit ByteReader(std::span<const unsigned char> bytes) : bytes_(bytes) {
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        }
        pos_ += 8;
        return v;
    }
    double f64() {
        return std::bit_cast<double>(u64());
    }
    void raw(char *out, std::size_t n) {
        need(n);
        std::memcpy(out, bytes_.data() + pos_, n);
        pos_ += n;
    }
    std::size_t position() const {
        return pos_;
    }

   private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) {
            throw DataError("pattern cache truncated");
        }
    }
    std::span<const unsigned char> bytes_;
    std::size_t pos_ = 0;
};

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

namespace {

struct PatternPoint {
    double value;
    double derivative;
};

PatternPoint exact_pattern(int k, int j, double x, int max_index) {
    check_pair(k, j, max_index);
    if (!std::isfinite(x) || std::abs(x) > kIrregularXLimit) {
        throw DomainError("pattern_function: |x| must be finite and <= " + std::to_string(kIrregularXLimit));
    }
    double a = std::abs(x);
    std::vector<double> psi(static_cast<std::size_t>(k) + 1);
    hermite_functions(a, psi);
    double psi_k = psi.back();
    double dpsi_k = (k > 0 ? std::sqrt(2.0 * k) * psi[static_cast<std::size_t>(k) - 1] : 0.0) - a * psi_k;
    IrregularNode phi = irregular_at_origin(j);
    if (a > 0.0) {
        integrate_irregular(j, 0.0, phi, std::span<const double>(&a, 1), std::span<IrregularNode>(&phi, 1));
    }
    double f = std::ldexp(dpsi_k * phi.value + psi_k * phi.derivative, phi.exponent);
    double df = std::ldexp((2.0 * a * a - 2.0 * (k + j + 1)) * psi_k * phi.value + 2.0 * dpsi_k * phi.derivative,
                           phi.exponent);
    if (x < 0.0) {
        if ((j - k) % 2 != 0) {
            f = -f;
        } else {
            df = -df;
        }
    }
    return {f, df};
}

}  // namespace

double pattern_function(int k, int j, double x, int max_index) {
    return exact_pattern(k, j, x, max_index).value;
}

double pattern_function_derivative(int k, int j, double x, int max_index) {
    return exact_pattern(k, j, x, max_index).derivative;
}

double PatternGridSpec::minimal_x_max(int max_index) {
    return std::sqrt(2.0 * max_index + 1.0) + 5.0;
}

PatternGridSpec PatternGridSpec::for_max_index(int max_index) {
    PatternGridSpec spec;
    spec.x_max = minimal_x_max(max_index);
    return spec;
}

PatternFunctionTable PatternFunctionTable::build(int max_index, bool store_values) {
    return build(max_index, PatternGridSpec::for_max_index(max_index), store_values);
}

PatternFunctionTable PatternFunctionTable::build(int max_index, const PatternGridSpec &grid, bool store_values) {
    if (max_index < 0 || max_index > kTableIndexLimit) {
        throw DomainError("pattern table max index must lie in [0, " + std::to_string(kTableIndexLimit) + "]");
    }
    if (grid.x_max < PatternGridSpec::minimal_x_max(max_index) - 1e-12) {
        throw DomainError("pattern grid half-width " + std::to_string(grid.x_max) + " below required " +
                          std::to_string(PatternGridSpec::minimal_x_max(max_index)));
    }
    if (grid.uniform_cells < 2 || grid.uniform_cells % 2 != 0 || grid.refine_factor < 1) {
        throw DomainError("pattern grid needs an even cell count and refine factor >= 1");
    }

    PatternFunctionTable table;
    table.max_index_ = max_index;
    table.grid_ = grid;
    const int n_idx = max_index + 1;
    table.diag_offset_.resize(static_cast<std::size_t>(n_idx) + 1);
    table.diag_offset_[0] = 0;
    for (int d = 0; d < n_idx; ++d) {
        table.diag_offset_[d + 1] = table.diag_offset_[d] + static_cast<std::size_t>(n_idx - d);
    }
    const std::size_t pairs = table.diag_offset_.back();
    const int half_cells = grid.uniform_cells / 2;
    table.step_ = 2.0 * grid.x_max / grid.uniform_cells;
    table.half_nodes_ = static_cast<std::size_t>(half_cells) + 1;

    // Refined scan nodes on [0, x_max]; uniform nodes are a subset, tracked in uniform_pos.
    std::vector<std::pair<double, double>> zones;
    for (int k = 0; k < n_idx; ++k) {
        double turn = std::sqrt(2.0 * k + 1.0);
        double width = grid.transition_halfwidth * std::pow(std::max(k, 1), -1.0 / 6.0);
        zones.emplace_back(turn - width, turn + width);
    }
    std::vector<double> nodes;
    std::vector<std::size_t> uniform_pos;
    for (int i = 0; i <= half_cells; ++i) {
        double x0 = i * table.step_;
        uniform_pos.push_back(nodes.size());
        nodes.push_back(x0);
        if (i == half_cells) {
            break;
        }
        double x1 = (i + 1) * table.step_;
        bool refine = std::any_of(zones.begin(), zones.end(), [&](const auto &z) { return x1 > z.first && x0 < z.second; });
        if (refine) {
            for (int r = 1; r < grid.refine_factor; ++r) {
                nodes.push_back(x0 + (x1 - x0) * r / grid.refine_factor);
            }
        }
    }
    const std::size_t n_nodes = nodes.size();

    // psi_k and psi_k' on the scan nodes; psi row-major by k.
    std::vector<double> psi(static_cast<std::size_t>(n_idx) * n_nodes);
    std::vector<double> dpsi(psi.size());
    std::vector<double> column(static_cast<std::size_t>(n_idx));
    for (std::size_t p = 0; p < n_nodes; ++p) {
        double x = nodes[p];
        hermite_functions(x, column);
        for (int k = 0; k < n_idx; ++k) {
            double lower = k > 0 ? std::sqrt(2.0 * k) * column[static_cast<std::size_t>(k) - 1] : 0.0;
            psi[static_cast<std::size_t>(k) * n_nodes + p] = column[static_cast<std::size_t>(k)];
            dpsi[static_cast<std::size_t>(k) * n_nodes + p] = lower - x * column[static_cast<std::size_t>(k)];
        }
    }
    std::vector<double> phi(psi.size());
    std::vector<double> dphi(psi.size());
    std::vector<IrregularNode> solution(n_nodes);
    for (int j = 0; j < n_idx; ++j) {
        integrate_irregular(j, 0.0, irregular_at_origin(j), nodes, solution);
        for (std::size_t p = 0; p < n_nodes; ++p) {
            phi[static_cast<std::size_t>(j) * n_nodes + p] = std::ldexp(solution[p].value, solution[p].exponent);
            dphi[static_cast<std::size_t>(j) * n_nodes + p] = std::ldexp(solution[p].derivative, solution[p].exponent);
        }
    }

    table.sup_norms_.assign(pairs, 0.0);
    if (store_values) {
        table.values_.assign(table.half_nodes_ * pairs, 0.0);
        table.derivatives_.assign(table.half_nodes_ * pairs, 0.0);
    }
    std::vector<double> f(n_nodes);
    std::vector<double> df(n_nodes);
    for (int d = 0; d < n_idx; ++d) {
        for (int k = 0; k + d < n_idx; ++k) {
            int j = k + d;
            const double *ps = &psi[static_cast<std::size_t>(k) * n_nodes];
            const double *dps = &dpsi[static_cast<std::size_t>(k) * n_nodes];
            const double *ph = &phi[static_cast<std::size_t>(j) * n_nodes];
            const double *dph = &dphi[static_cast<std::size_t>(j) * n_nodes];
            const double energy_sum = 2.0 * (k + j + 1);
            for (std::size_t p = 0; p < n_nodes; ++p) {
                double x = nodes[p];
                f[p] = dps[p] * ph[p] + ps[p] * dph[p];
                // (psi phi)'' = psi'' phi + 2 psi' phi' + psi phi'', with u'' = (x^2 - 2 w) u.
                df[p] = (2.0 * x * x - energy_sum) * ps[p] * ph[p] + 2.0 * dps[p] * dph[p];
            }
            double sup = 0.0;
            for (std::size_t p = 0; p + 1 < n_nodes; ++p) {
                double h = nodes[p + 1] - nodes[p];
                sup = std::max(sup, cubic_interval_max(f[p], h * df[p], f[p + 1], h * df[p + 1]));
            }
            std::size_t pair = table.diag_offset_[d] + static_cast<std::size_t>(k);
            table.sup_norms_[pair] = sup;
            if (store_values) {
                for (std::size_t i = 0; i < table.half_nodes_; ++i) {
                    table.values_[i * pairs + pair] = f[uniform_pos[i]];
                    table.derivatives_[i * pairs + pair] = df[uniform_pos[i]];
                }
            }
        }
    }
    return table;
}

std::size_t PatternFunctionTable::diagonal_offset(int d) const {
    if (d < 0 || d > max_index_) {
        throw DomainError("pattern diagonal out of range");
    }
    return diag_offset_[static_cast<std::size_t>(d)];
}

std::size_t PatternFunctionTable::pair_index(int k, int j) const {
    check_pair(k, j, max_index_);
    return diag_offset_[static_cast<std::size_t>(j - k)] + static_cast<std::size_t>(k);
}

double PatternFunctionTable::sup_norm(int k, int j) const {
    return sup_norms_[pair_index(k, j)];
}

double PatternFunctionTable::value(int k, int j, double x) const {
    std::size_t pair = pair_index(k, j);
    double a = std::abs(x);
    if (!has_values() || !(a < grid_.x_max)) {
        return pattern_function(k, j, x, max_index_);
    }
    std::size_t i = std::min(static_cast<std::size_t>(a / step_), half_nodes_ - 2);
    double u = a / step_ - static_cast<double>(i);
    HermiteCubic c = hermite_cubic_weights(u, step_);
    std::size_t pairs = pair_count();
    double v = c.w0 * values_[i * pairs + pair] + c.w1 * derivatives_[i * pairs + pair] +
               c.w2 * values_[(i + 1) * pairs + pair] + c.w3 * derivatives_[(i + 1) * pairs + pair];
    return (x < 0.0 && (j - k) % 2 != 0) ? -v : v;
}

double PatternFunctionTable::derivative(int k, int j, double x) const {
    pair_index(k, j);
    return pattern_function_derivative(k, j, x, max_index_);
}

std::vector<double> PatternFunctionTable::grid() const {
    std::vector<double> out(static_cast<std::size_t>(grid_.uniform_cells) + 1);
    const int half = grid_.uniform_cells / 2;
    for (int i = 0; i <= grid_.uniform_cells; ++i) {
        out[static_cast<std::size_t>(i)] = (i - half) * step_;
    }
    return out;
}

double PatternFunctionTable::node_value(int k, int j, std::size_t i) const {
    std::size_t pair = pair_index(k, j);
    if (!has_values()) {
        throw DomainError("pattern table was built without values");
    }
    const std::size_t half = static_cast<std::size_t>(grid_.uniform_cells / 2);
    if (i > 2 * half) {
        throw DomainError("pattern grid node out of range");
    }
    std::size_t h = i >= half ? i - half : half - i;
    double v = values_[h * pair_count() + pair];
    return (i < half && (j - k) % 2 != 0) ? -v : v;
}

std::span<const double> PatternFunctionTable::value_row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * pair_count(), pair_count());
}

std::span<const double> PatternFunctionTable::derivative_row(std::size_t i) const {
    return std::span<const double>(derivatives_).subspan(i * pair_count(), pair_count());
}

double PatternFunctionTable::triangle_sum(int n) const {
    if (n < 0 || n > max_index_) {
        throw DomainError("triangle sum index out of range");
    }
    double total = 0.0;
    for (int d = 0; d <= n; ++d) {
        for (int k = 0; k + d <= n; ++k) {
            double s = sup_norms_[diag_offset_[static_cast<std::size_t>(d)] + static_cast<std::size_t>(k)];
            total += s * s;
        }
    }
    return total;
}

void PatternFunctionTable::save(const std::filesystem::path &path) const {
    ByteWriter w;
    w.raw(kCacheMagic.data(), kCacheMagic.size());
    w.u32(kCacheVersion);
    w.u32(static_cast<std::uint32_t>(max_index_));
    w.u32(static_cast<std::uint32_t>(grid_.uniform_cells));
    w.u32(static_cast<std::uint32_t>(grid_.refine_factor));
    w.f64(grid_.x_max);
    w.f64(grid_.transition_halfwidth);
    w.u32(has_values() ? 1u : 0u);
    w.u32(0u);
    w.u64(pair_count());
    w.u64(half_nodes_);
    for (double v : sup_norms_) {
        w.f64(v);
    }
    for (double v : values_) {
        w.f64(v);
    }
    for (double v : derivatives_) {
        w.f64(v);
    }
    std::uint64_t checksum = fnv1a64(w.bytes());
    w.u64(checksum);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write pattern cache " + path.string());
    }
    out.write(reinterpret_cast<const char *>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) {
        throw DataError("failed writing pattern cache " + path.string());
    }
}

PatternFunctionTable PatternFunctionTable::load(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open pattern cache " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 8) {
        throw DataError("pattern cache truncated");
    }
    std::span<const unsigned char> all(bytes);
    ByteReader trailer(all.subspan(bytes.size() - 8));
    if (trailer.u64() != fnv1a64(all.first(bytes.size() - 8))) {
        throw DataError("pattern cache checksum mismatch");
    }
    ByteReader r(all.first(bytes.size() - 8));
    std::array<char, 4> magic{};
    r.raw(magic.data(), magic.size());
    if (magic != kCacheMagic) {
        throw DataError("pattern cache has wrong magic");
    }
    if (r.u32() != kCacheVersion) {
        throw DataError("pattern cache version unsupported");
    }
    PatternFunctionTable table;
    table.max_index_ = static_cast<int>(r.u32());
    table.grid_.uniform_cells = static_cast<int>(r.u32());
    table.grid_.refine_factor = static_cast<int>(r.u32());
    table.grid_.x_max = r.f64();
    table.grid_.transition_halfwidth = r.f64();
    bool has_values = r.u32() != 0;
    r.u32();
    std::uint64_t pairs = r.u64();
    table.half_nodes_ = r.u64();
    const int n_idx = table.max_index_ + 1;
    if (table.max_index_ > kTableIndexLimit || table.grid_.uniform_cells < 2 ||
        pairs != static_cast<std::uint64_t>(n_idx) * (n_idx + 1) / 2 ||
        table.half_nodes_ != static_cast<std::size_t>(table.grid_.uniform_cells / 2) + 1) {
        throw DataError("pattern cache header inconsistent");
    }
    table.step_ = 2.0 * table.grid_.x_max / table.grid_.uniform_cells;
    table.diag_offset_.resize(static_cast<std::size_t>(n_idx) + 1);
    table.diag_offset_[0] = 0;
    for (int d = 0; d < n_idx; ++d) {
        table.diag_offset_[d + 1] = table.diag_offset_[d] + static_cast<std::size_t>(n_idx - d);
    }
    std::size_t payload = has_values ? table.half_nodes_ * pairs : 0;
    if (bytes.size() - 8 - r.position() != 8 * (pairs + 2 * payload)) {
        throw DataError("pattern cache payload size mismatch");
    }
    table.sup_norms_.resize(pairs);
    for (double &v : table.sup_norms_) {
        v = r.f64();
    }
    table.values_.resize(payload);
    for (double &v : table.values_) {
        v = r.f64();
    }
    table.derivatives_.resize(payload);
    for (double &v : table.derivatives_) {
        v = r.f64();
    }
    return table;
}

double pattern_sup_norm(int k, int j) {
    check_pair(k, j, kTableIndexLimit);
    return PatternFunctionTable::build(j, false).sup_norm(k, j);
}

double pattern_norm_triangle_sum(int n) {
    return PatternFunctionTable::build(n, false).triangle_sum(n);
}

PatternFunctionTable load_or_build_pattern_table(int max_index, const std::filesystem::path &cache_path) {
    if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
        try {
            PatternFunctionTable cached = PatternFunctionTable::load(cache_path);
            if (cached.max_index() >= max_index && cached.has_values() &&
                cached.grid_spec() == PatternGridSpec::for_max_index(cached.max_index())) {
                return cached;
            }
        } catch (const DataError &e) {
            std::cerr << "warning: ignoring pattern cache " << cache_path << ": " << e.what() << "\n";
        }
    }
    PatternFunctionTable table = PatternFunctionTable::build(max_index);
    if (!cache_path.empty()) {
        table.save(cache_path);
    }
    return table;
}

}  // namespace homotomo
