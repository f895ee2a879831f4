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

#ifndef HOMOTOMO_WIGNER_HPP
#define HOMOTOMO_WIGNER_HPP

#include <filesystem>
#include <vector>

#include "homotomo/density_matrix.hpp"

namespace homotomo {

/// Square grid q, p in [-half_width, half_width) with `points` nodes per axis.
struct WignerGridSpec {
    /// 0 selects the minimal span sqrt(2 D) + 4.
    double half_width = 0.0;
    int points = 256;

    static double minimal_half_width(int dim);
};

struct WignerGrid {
    std::vector<double> q_axis;
    std::vector<double> p_axis;
    /// values(a, c) = W(q_axis[a], p_axis[c]).
    Eigen::MatrixXd values;

    double dq() const;
    double dp() const;
    /// sum W dq dp.
    double total_mass() const;
};

/// Characteristic function Tr(rho exp(-i u Q - i v P)).
Complex characteristic_function(const HermitianMatrix &rho, double u, double v);

/// W(q, p) from the characteristic function by a discrete Fourier inversion. Throws
/// DomainError naming the required span when the grid is too small, NumericalError when the
/// imaginary residue exceeds 1e-9.
WignerGrid wigner_function(const HermitianMatrix &rho, const WignerGridSpec &spec = {});

struct RadonValue {
    double value = 0.0;
    /// Estimate of the line integral lost outside the grid.
    double unaccounted_mass = 0.0;
    bool warning = false;
};

inline constexpr double kRadonMassWarning = 1e-3;

/// Integral of W along {(x cos phi + t sin phi, x sin phi - t cos phi)} with bilinear
/// interpolation. Throws DomainError when the line misses the grid.
RadonValue radon_transform(const WignerGrid &w, double x, double phi);

/// CSV with header `q,p,W`, one row per node, q-major.
void write_wigner_csv(const WignerGrid &w, const std::filesystem::path &path);

}  // namespace homotomo

#endif
