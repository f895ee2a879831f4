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

#ifndef HOMOTOMO_HERMITE_HPP
#define HOMOTOMO_HERMITE_HPP

#include <span>

namespace homotomo {

/// Largest Fock index accepted by the point evaluators unless a caller configures otherwise.
inline constexpr int kDefaultMaxIndex = 256;

/// Harmonic oscillator eigenvalue of level k (units with hbar = m = omega = 1).
constexpr double oscillator_energy(int k) {
    return k + 0.5;
}

/// Normalized Hermite function psi_k(x) = H_k(x) exp(-x^2/2) / (sqrt(pi) 2^k k!)^(1/2).
///
/// Evaluated with the three-term recurrence on the normalized functions. Intermediate values
/// are rescaled so that neither the polynomial part nor the Gaussian factor overflows, which
/// keeps relative accuracy in the classically forbidden region.
double hermite_function(int k, double x, int max_index = kDefaultMaxIndex);

/// Fills out[k] = psi_k(x) for k = 0 .. out.size() - 1.
void hermite_functions(double x, std::span<double> out);

/// Fills out[k] = psi_k(x) exp(x^2/2) for k = 0 .. out.size() - 1.
///
/// The scaled functions are polynomials and satisfy h_k' = sqrt(2k) h_{k-1}. No overflow
/// protection; intended for |x| <~ 30 and indices a few hundred at most.
void scaled_hermite_functions(double x, std::span<double> out);

/// Second (non-normalizable) oscillator solution phi_k and its derivative.
struct IrregularValue {
    double value;
    double derivative;
    /// Set when |value| or |derivative| hit kIrregularCap; the reported number is then the cap.
    bool saturated;
};

/// Magnitude at which irregular solutions are clamped instead of overflowing.
inline constexpr double kIrregularCap = 1e300;
/// Largest |x| accepted by irregular_wavefunction.
inline constexpr double kIrregularXLimit = 40.0;

/// phi_k(x): the oscillator solution at energy k + 1/2 with parity opposite to psi_k,
/// normalized by the Wronskian psi_k phi_k' - psi_k' phi_k = 2. With this normalization
/// the functions (psi_k phi_j)' are bi-orthogonal to products psi_m psi_n.
IrregularValue irregular_wavefunction(int k, double x, int max_index = kDefaultMaxIndex);

/// phi_k and phi_k' at a node, stored as mantissas with a shared binary exponent:
/// phi = value * 2^exponent, phi' = derivative * 2^exponent.
struct IrregularNode {
    double value;
    double derivative;
    int exponent;
};

/// phi_k at x = 0, fixed by parity and the Wronskian.
IrregularNode irregular_at_origin(int k);

/// Integrates phi_k'' = (x^2 - 2k - 1) phi_k from (x0, start) through the nodes xs, which must
/// be sorted ascending and not below x0, and writes the solution at each node.
void integrate_irregular(int k, double x0, IrregularNode start, std::span<const double> xs,
                         std::span<IrregularNode> out);

}  // namespace homotomo

#endif
