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

#ifndef HOMOTOMO_STATES_HPP
#define HOMOTOMO_STATES_HPP

#include <span>
#include <string>
#include <string_view>

#include "homotomo/density_matrix.hpp"

namespace homotomo {

/// Canonical single-mode test states.
///
/// CLI grammar `kind[:param[,param]]`:
///   vacuum | fock:m | coherent:re[,im] | thermal:mean_photons | squeezed:r | cat:re[,im]
/// `cat` is the even cat state |alpha> + |-alpha> (normalized); `squeezed` is the squeezed
/// vacuum S(r)|0> with real squeezing parameter r.
struct StateSpec {
    enum class Kind { fock, coherent, thermal, squeezed_vacuum, cat };

    Kind kind = Kind::fock;
    int fock_number = 0;
    Complex alpha{0.0, 0.0};
    double mean_photons = 0.0;
    double squeezing = 0.0;
    /// Fock truncation; 0 selects the smallest dimension with tail mass <= kAutoTailMass.
    int dim = 0;

    static constexpr double kAutoTailMass = 1e-12;
    static constexpr int kAutoDimLimit = 256;

    /// Throws DomainError on an unknown kind or malformed parameters.
    static StateSpec parse(std::string_view text);
    /// Canonical text form accepted by parse (dimension not included).
    std::string to_string() const;
};

/// Largest tail mass make_state accepts before refusing the truncation.
inline constexpr double kMaxTailMass = 1e-3;

struct PreparedState {
    DensityMatrix rho;
    /// 1 - sum_{j < D} rho_jj of the untruncated state.
    double tail_mass;
};

/// Probability mass of the untruncated state on Fock levels >= dim.
double tail_mass(const StateSpec &spec, int dim);

/// Smallest dimension whose tail mass is <= tail.
int minimal_dimension(const StateSpec &spec, double tail);

/// Truncated, renormalized Fock-basis density matrix. Throws TruncationError (carrying the
/// minimal adequate dimension) when the tail mass exceeds kMaxTailMass.
PreparedState make_state(const StateSpec &spec);

/// p(x, phi) = sum_{j,k} m_jk psi_k(x) psi_j(x) exp(-i (j-k) phi) for a Hermitian m.
///
/// The matrix is eigendecomposed once, so each evaluation costs O(rank * D). For non-PSD
/// inputs the result may be negative; no clamping is applied here.
class QuadratureDensity {
   public:
    explicit QuadratureDensity(const HermitianMatrix &m);

    int dim() const {
        return dim_;
    }
    /// Retained eigenvalues and the matching eigenvectors (columns).
    const Eigen::VectorXd &weights() const {
        return weights_;
    }
    const Eigen::MatrixXcd &vectors() const {
        return vectors_;
    }
    double operator()(double x, double phi) const;
    /// out[a * phis.size() + b] = p(xs[a], phis[b]).
    void evaluate_grid(std::span<const double> xs, std::span<const double> phis, std::span<double> out) const;

   private:
    int dim_ = 0;
    Eigen::VectorXd weights_;   // eigenvalues kept
    Eigen::MatrixXcd vectors_;  // D x rank
};

/// Quadrature density of a physical state, clamped at zero.
double quadrature_density(const DensityMatrix &rho, double x, double phi);

}  // namespace homotomo

#endif
