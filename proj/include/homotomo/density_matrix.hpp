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

#ifndef HOMOTOMO_DENSITY_MATRIX_HPP
#define HOMOTOMO_DENSITY_MATRIX_HPP

#include <complex>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace homotomo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Dense Hermitian matrix in the Fock basis. Hermiticity is structural: only the lower
/// triangle of the input is read and mirrored, and the diagonal is made real.
class HermitianMatrix {
   public:
    HermitianMatrix() = default;
    /// dim x dim zero matrix.
    explicit HermitianMatrix(int dim);

    /// Lower triangle of m mirrored; the upper triangle is ignored.
    static HermitianMatrix from_lower(const ComplexMatrix &m);
    /// Requires max |m - m^dagger| <= tol; throws DomainError otherwise.
    static HermitianMatrix from_matrix(const ComplexMatrix &m, double tol = 1e-10);

    int dim() const {
        return static_cast<int>(m_.rows());
    }
    Complex operator()(int row, int col) const {
        return m_(row, col);
    }
    const ComplexMatrix &matrix() const {
        return m_;
    }
    double trace() const;
    /// Ascending eigenvalues.
    Eigen::VectorXd eigenvalues() const;
    double min_eigenvalue() const;
    /// Leading dim x dim block, zero-padded when dim exceeds the current size.
    HermitianMatrix resized(int dim) const;

   private:
    ComplexMatrix m_;
};

/// Physical state: Hermitian, smallest eigenvalue >= -psd_tol, |trace - 1| <= trace_tol.
class DensityMatrix {
   public:
    static constexpr double kPsdTolerance = 1e-10;
    static constexpr double kTraceTolerance = 1e-10;

    /// Validates the physical invariants; throws DomainError on violation.
    static DensityMatrix from_hermitian(const HermitianMatrix &m, double psd_tol = kPsdTolerance,
                                        double trace_tol = kTraceTolerance);
    /// |0><0| in dimension dim.
    static DensityMatrix vacuum(int dim);
    /// Normalized projector onto the given amplitude vector.
    static DensityMatrix pure(const Eigen::VectorXcd &amplitudes);

    int dim() const {
        return h_.dim();
    }
    Complex operator()(int row, int col) const {
        return h_(row, col);
    }
    const ComplexMatrix &matrix() const {
        return h_.matrix();
    }
    const HermitianMatrix &hermitian() const {
        return h_;
    }
    operator const HermitianMatrix &() const {
        return h_;
    }

   private:
    explicit DensityMatrix(HermitianMatrix h) : h_(std::move(h)) {
    }
    HermitianMatrix h_;
};

/// {"dim": D, "entries": [[re, im], ...]} with entries in row-major order.
nlohmann::json to_json(const HermitianMatrix &m);
/// Parses the format above; throws DataError on malformed input or a non-Hermitian matrix.
HermitianMatrix hermitian_from_json(const nlohmann::json &j);
/// As hermitian_from_json plus the physical-state checks.
DensityMatrix density_from_json(const nlohmann::json &j);

}  // namespace homotomo

#endif
