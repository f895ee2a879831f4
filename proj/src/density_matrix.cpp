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

#include "homotomo/density_matrix.hpp"

#include <cmath>
#include <string>

#include "homotomo/errors.hpp"

namespace homotomo {

HermitianMatrix::HermitianMatrix(int dim) {
    if (dim < 0) {
        throw DomainError("matrix dimension must be non-negative");
    }
    m_ = ComplexMatrix::Zero(dim, dim);
}

HermitianMatrix HermitianMatrix::from_lower(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        throw DomainError("Hermitian matrix must be square");
    }
    HermitianMatrix h(static_cast<int>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        h.m_(r, r) = Complex(m(r, r).real(), 0.0);
        for (Eigen::Index c = 0; c < r; ++c) {
            h.m_(r, c) = m(r, c);
            h.m_(c, r) = std::conj(m(r, c));
        }
    }
    return h;
}

HermitianMatrix HermitianMatrix::from_matrix(const ComplexMatrix &m, double tol) {
    if (m.rows() != m.cols()) {
        throw DomainError("Hermitian matrix must be square");
    }
    double asym = m.rows() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tol) {
        throw DomainError("matrix is not Hermitian (max asymmetry " + std::to_string(asym) + ")");
    }
    return from_lower(m);
}

double HermitianMatrix::trace() const {
    return m_.diagonal().real().sum();
}

Eigen::VectorXd HermitianMatrix::eigenvalues() const {
    if (m_.rows() == 0) {
        return {};
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

double HermitianMatrix::min_eigenvalue() const {
    Eigen::VectorXd ev = eigenvalues();
    return ev.size() == 0 ? 0.0 : ev.minCoeff();
}

HermitianMatrix HermitianMatrix::resized(int dim) const {
    HermitianMatrix out(dim);
    int keep = std::min(dim, this->dim());
    out.m_.topLeftCorner(keep, keep) = m_.topLeftCorner(keep, keep);
    return out;
}

DensityMatrix DensityMatrix::from_hermitian(const HermitianMatrix &m, double psd_tol, double trace_tol) {
    if (m.dim() < 1) {
        throw DomainError("density matrix needs dimension >= 1");
    }
    double tr = m.trace();
    if (std::abs(tr - 1.0) > trace_tol) {
        throw DomainError("density matrix trace " + std::to_string(tr) + " differs from 1");
    }
    double lo = m.min_eigenvalue();
    if (lo < -psd_tol) {
        throw DomainError("density matrix has negative eigenvalue " + std::to_string(lo));
    }
    return DensityMatrix(m);
}

DensityMatrix DensityMatrix::vacuum(int dim) {
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(0, 0) = 1.0;
    return from_hermitian(HermitianMatrix::from_lower(m));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd &amplitudes) {
    double norm = amplitudes.norm();
    if (!(norm > 0.0)) {
        throw DomainError("pure state needs a non-zero amplitude vector");
    }
    Eigen::VectorXcd v = amplitudes / norm;
    return from_hermitian(HermitianMatrix::from_lower(v * v.adjoint()));
}

nlohmann::json to_json(const HermitianMatrix &m) {
    nlohmann::json entries = nlohmann::json::array();
    for (int r = 0; r < m.dim(); ++r) {
        for (int c = 0; c < m.dim(); ++c) {
            entries.push_back({m(r, c).real(), m(r, c).imag()});
        }
    }
    return {{"dim", m.dim()}, {"entries", entries}};
}

HermitianMatrix hermitian_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("entries") || !j["dim"].is_number_integer() ||
        !j["entries"].is_array()) {
        throw DataError("state JSON needs integer 'dim' and array 'entries'");
    }
    long dim = j["dim"].get<long>();
    if (dim < 1 || static_cast<std::size_t>(dim * dim) != j["entries"].size()) {
        throw DataError("state JSON 'entries' must hold dim*dim [re, im] pairs");
    }
    ComplexMatrix m(dim, dim);
    std::size_t idx = 0;
    for (long r = 0; r < dim; ++r) {
        for (long c = 0; c < dim; ++c) {
            const auto &e = j["entries"][idx++];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw DataError("state JSON entry " + std::to_string(idx - 1) + " is not [re, im]");
            }
            m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    try {
        return HermitianMatrix::from_matrix(m, 1e-10);
    } catch (const DomainError &e) {
        throw DataError(std::string("state JSON: ") + e.what());
    }
}

DensityMatrix density_from_json(const nlohmann::json &j) {
    HermitianMatrix h = hermitian_from_json(j);
    try {
        return DensityMatrix::from_hermitian(h);
    } catch (const DomainError &e) {
        throw DataError(std::string("state JSON: ") + e.what());
    }
}

}  // namespace homotomo
