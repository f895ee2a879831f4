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

#ifndef HOMOTOMO_PATTERN_TABLE_HPP
#define HOMOTOMO_PATTERN_TABLE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace homotomo {

/// x-part of the pattern function, f_{k,j}(x) = d/dx (psi_k(x) phi_j(x)), for k <= j.
///
/// The estimator weight for matrix element rho_{k,j} is f_{k,j}(x) exp(-i (j-k) phi).
/// Evaluated directly from the Hermite recurrence and an ODE solve for phi_j; slow but exact.
/// Throws DomainError for k > j or indices above max_index.
double pattern_function(int k, int j, double x, int max_index = 256);

/// d/dx f_{k,j}(x) from the oscillator equation, exact route as above.
double pattern_function_derivative(int k, int j, double x, int max_index = 256);

/// Sampling layout of a pattern table.
struct PatternGridSpec {
    /// Grid covers [-x_max, x_max].
    double x_max = 0.0;
    /// Uniform cells across the full interval; values are tabulated on these nodes.
    int uniform_cells = 4096;
    /// Each uniform cell near a turning point sqrt(2k+1) is split into this many for sup norms.
    int refine_factor = 8;
    /// Half-width of the refined zone around each turning point, in units of k^(-1/6).
    double transition_halfwidth = 2.0;

    /// Smallest admissible half-width for a table holding indices up to max_index.
    static double minimal_x_max(int max_index);
    /// Default layout for a table holding indices up to max_index.
    static PatternGridSpec for_max_index(int max_index);

    bool operator==(const PatternGridSpec &) const = default;
};

/// Tabulated pattern functions f_{k,j}, 0 <= k <= j <= max_index, with their sup norms.
///
/// Values and first derivatives are stored on the non-negative half of the uniform grid
/// (f_{k,j} has parity (-1)^(j-k)) and interpolated with cubic Hermite polynomials. Pairs are
/// laid out by diagonal d = j - k and then k, so a given d occupies a contiguous block and the
/// pairs with j < N form a prefix of every block.
///
/// Immutable after construction; concurrent reads are safe.
class PatternFunctionTable {
   public:
    /// Builds the table. When store_values is false only sup norms are kept.
    static PatternFunctionTable build(int max_index, const PatternGridSpec &grid, bool store_values = true);
    static PatternFunctionTable build(int max_index, bool store_values = true);

    int max_index() const {
        return max_index_;
    }
    const PatternGridSpec &grid_spec() const {
        return grid_;
    }
    bool has_values() const {
        return !values_.empty();
    }

    /// Number of stored (k, j) pairs.
    std::size_t pair_count() const {
        return sup_norms_.size();
    }
    /// Offset of diagonal d inside the pair layout.
    std::size_t diagonal_offset(int d) const;
    std::size_t pair_index(int k, int j) const;

    /// ||f_{k,j}||_inf from the refined scan.
    double sup_norm(int k, int j) const;

    /// Interpolated f_{k,j}(x); exact evaluation outside the grid.
    double value(int k, int j, double x) const;
    /// d/dx f_{k,j}(x), evaluated exactly.
    double derivative(int k, int j, double x) const;

    /// Uniform nodes of the full grid, ascending from -x_max to x_max.
    std::vector<double> grid() const;
    /// f_{k,j} at full-grid node i (0 <= i <= uniform_cells).
    double node_value(int k, int j, std::size_t i) const;

    /// Number of half-grid nodes (uniform_cells / 2 + 1).
    std::size_t half_nodes() const {
        return half_nodes_;
    }
    /// Spacing of the uniform grid.
    double step() const {
        return step_;
    }
    /// Values at half-grid node i, all pairs contiguous.
    std::span<const double> value_row(std::size_t i) const;
    /// Derivatives at half-grid node i, all pairs contiguous.
    std::span<const double> derivative_row(std::size_t i) const;

    /// Sum of ||f_{k,j}||_inf^2 over 0 <= k <= j <= n.
    double triangle_sum(int n) const;

    /// Binary cache: header, little-endian float64 payload, FNV-1a checksum trailer.
    void save(const std::filesystem::path &path) const;
    /// Throws DataError on a bad magic, version, size, or checksum.
    static PatternFunctionTable load(const std::filesystem::path &path);

   private:
    PatternFunctionTable() = default;

    int max_index_ = 0;
    PatternGridSpec grid_;
    double step_ = 0.0;
    std::size_t half_nodes_ = 0;
    std::vector<std::size_t> diag_offset_;
    std::vector<double> sup_norms_;
    std::vector<double> values_;       // half_nodes_ x pair_count
    std::vector<double> derivatives_;  // half_nodes_ x pair_count
};

/// ||f_{k,j}||_inf using a sup-norm-only table sized for index j.
double pattern_sup_norm(int k, int j);

/// Sum over 0 <= k <= j <= n of ||f_{k,j}||_inf^2.
double pattern_norm_triangle_sum(int n);

/// Loads a cached table when it covers max_index with the default grid for its own size,
/// otherwise builds one and (if path is non-empty) writes it back.
PatternFunctionTable load_or_build_pattern_table(int max_index, const std::filesystem::path &cache_path);

}  // namespace homotomo

#endif
