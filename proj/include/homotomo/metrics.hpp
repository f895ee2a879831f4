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

#ifndef HOMOTOMO_METRICS_HPP
#define HOMOTOMO_METRICS_HPP

#include <functional>

#include "homotomo/density_matrix.hpp"

namespace homotomo {

/// ||a - b||_1, the smaller matrix zero-padded.
double trace_distance(const HermitianMatrix &a, const HermitianMatrix &b);
/// ||a - b||_2 (Frobenius), the smaller matrix zero-padded.
double hs_distance(const HermitianMatrix &a, const HermitianMatrix &b);

/// Densities on R x [0, pi] with respect to dx dphi / pi.
using PhaseSpaceDensity = std::function<double(double x, double phi)>;

struct DensityPair {
    PhaseSpaceDensity p;
    PhaseSpaceDensity q;
};

/// Tensor rule on [-x_max, x_max] x [0, pi]: composite Gauss-Legendre panels in x, split at the
/// located kinks of the integrand, and Gauss-Legendre in phi.
struct QuadratureSpec {
    double x_max = 0.0;
    /// Number of x panels; 0 selects ceil(2 x_max / kDefaultPanelWidth).
    int panels = 0;
    int panel_points = 16;
    int phi_points = 128;

    static constexpr double kDefaultPanelWidth = 0.25;

    /// Default rule for states up to dimension dim: x_max = sqrt(2 dim) + 6.
    static QuadratureSpec for_dimension(int dim);
};

inline constexpr double kNormalizationTolerance = 1e-6;

/// L1 distance of the two densities, range [0, 2]. Throws DomainError when either density
/// integrates to 1 only beyond kNormalizationTolerance.
double total_variation(const DensityPair &pair, const QuadratureSpec &spec);
/// (integral (sqrt p - sqrt q)^2)^(1/2), range [0, sqrt 2].
double hellinger(const DensityPair &pair, const QuadratureSpec &spec);
/// integral p log(p / q); diagnostic only.
double kl_divergence(const DensityPair &pair, const QuadratureSpec &spec);

/// Change in the value when the panel count and the phi point count are doubled.
struct RefinedDistance {
    double value = 0.0;
    double refinement_change = 0.0;
};
RefinedDistance total_variation_refined(const DensityPair &pair, const QuadratureSpec &spec);
RefinedDistance hellinger_refined(const DensityPair &pair, const QuadratureSpec &spec);

/// Distances between the quadrature densities of two Hermitian matrices. Negative density values
/// (non-physical inputs) are clamped at zero. spec.x_max = 0 selects for_dimension.
double total_variation(const HermitianMatrix &a, const HermitianMatrix &b, QuadratureSpec spec = {});
double hellinger(const HermitianMatrix &a, const HermitianMatrix &b, QuadratureSpec spec = {});

}  // namespace homotomo

#endif
