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
#include <memory>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "homotomo/errors.hpp"
#include "homotomo/metrics.hpp"
#include "homotomo/states.hpp"

using namespace homotomo;

namespace {

DensityMatrix state(const char *text) {
    return make_state(StateSpec::parse(text)).rho;
}

DensityMatrix random_density(int dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> dist;
    ComplexMatrix g(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            g(r, c) = Complex(dist(rng), dist(rng));
        }
    }
    ComplexMatrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix::from_hermitian(HermitianMatrix::from_matrix(0.5 * (m + m.adjoint())));
}

/// (1 - t^2)^4 on [-1, 1] scaled to the interval [c - 2, c + 2] with unit mass.
double bump(double x, double c) {
    double t = (x - c) / 2.0;
    if (std::abs(t) >= 1.0) {
        return 0.0;
    }
    return std::pow(1.0 - t * t, 4) / (2.0 * 256.0 / 315.0);
}

DensityPair state_pair(const DensityMatrix &a, const DensityMatrix &b) {
    auto pa = std::make_shared<QuadratureDensity>(a);
    auto pb = std::make_shared<QuadratureDensity>(b);
    return {[pa](double x, double phi) { return std::max((*pa)(x, phi), 0.0); },
            [pb](double x, double phi) { return std::max((*pb)(x, phi), 0.0); }};
}

}  // namespace

TEST(matrix_distances, examples) {
    DensityMatrix v = DensityMatrix::vacuum(1);
    DensityMatrix f = state("fock:1");
    EXPECT_NEAR(trace_distance(v, f), 2.0, 1e-14);
    EXPECT_NEAR(hs_distance(v, f), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(trace_distance(f, v), 2.0, 1e-14);
    EXPECT_EQ(trace_distance(v, DensityMatrix::vacuum(7)), 0.0);
    EXPECT_EQ(hs_distance(f, f), 0.0);
}

TEST(matrix_distances, metric_properties) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        DensityMatrix a = random_density(1 + trial % 6, rng);
        DensityMatrix b = random_density(1 + (trial + 2) % 6, rng);
        DensityMatrix c = random_density(1 + (trial + 4) % 6, rng);
        EXPECT_NEAR(trace_distance(a, b), trace_distance(b, a), 1e-12);
        EXPECT_LE(trace_distance(a, c), trace_distance(a, b) + trace_distance(b, c) + 1e-12);
        EXPECT_LE(hs_distance(a, c), hs_distance(a, b) + hs_distance(b, c) + 1e-12);
        EXPECT_LE(trace_distance(a, b), 2.0 + 1e-12);
        EXPECT_LE(hs_distance(a, b), trace_distance(a, b) + 1e-12);
    }
}

TEST(density_distances, vacuum_versus_single_photon) {
    DensityMatrix v = state("vacuum");
    DensityMatrix f = state("fock:1");
    const double a = 1.0 / std::sqrt(2.0);
    const double tv = 4.0 * a * std::exp(-a * a) / std::sqrt(std::numbers::pi);
    EXPECT_NEAR(total_variation(v, f), tv, 1e-8);
    EXPECT_NEAR(total_variation(state_pair(v, f), QuadratureSpec::for_dimension(2)), tv, 1e-8);
    // p_1 = 2 x^2 p_0, so the affinity int sqrt(p_0 p_1) is sqrt(2 / pi).
    const double h = std::sqrt(2.0 - 2.0 * std::sqrt(2.0 / std::numbers::pi));
    EXPECT_NEAR(hellinger(v, f), h, 1e-6);
    EXPECT_EQ(total_variation(v, v), 0.0);
}

TEST(density_distances, disjoint_supports) {
    DensityPair pair{[](double x, double) { return bump(x, -3.0); }, [](double x, double) { return bump(x, 3.0); }};
    QuadratureSpec spec;
    spec.x_max = 5.0;
    EXPECT_NEAR(total_variation(pair, spec), 2.0, 1e-8);
    EXPECT_NEAR(hellinger(pair, spec), std::sqrt(2.0), 1e-8);
    DensityPair same{pair.p, pair.p};
    EXPECT_NEAR(total_variation(same, spec), 0.0, 1e-15);
    EXPECT_NEAR(kl_divergence(same, spec), 0.0, 1e-15);
    EXPECT_TRUE(std::isinf(kl_divergence(pair, spec)));
}

TEST(density_distances, unnormalized_input_rejected) {
    DensityPair pair{[](double x, double) { return 1.5 * bump(x, 0.0); }, [](double x, double) { return bump(x, 0.0); }};
    QuadratureSpec spec;
    spec.x_max = 3.0;
    EXPECT_THROW(total_variation(pair, spec), DomainError);
    EXPECT_THROW(hellinger(pair, spec), DomainError);
    DensityPair negative{[](double x, double) { return bump(x, 0.0) - 0.01; }, [](double x, double) { return bump(x, 0.0); }};
    EXPECT_THROW(total_variation(negative, spec), DomainError);
    QuadratureSpec bad;
    EXPECT_THROW(total_variation(pair, bad), DomainError);
}

TEST(density_distances, refinement_is_stable) {
    DensityMatrix a = state("coherent:1");
    DensityMatrix b = state("squeezed:0.5");
    QuadratureSpec spec = QuadratureSpec::for_dimension(std::max(a.dim(), b.dim()));
    spec.panel_points = 8;
    spec.phi_points = 48;
    RefinedDistance tv = total_variation_refined(state_pair(a, b), spec);
    RefinedDistance h = hellinger_refined(state_pair(a, b), spec);
    EXPECT_LT(tv.refinement_change, 1e-6);
    EXPECT_LT(h.refinement_change, 1e-6);
    EXPECT_NEAR(tv.value, total_variation(a, b), 1e-6);
    EXPECT_NEAR(h.value, hellinger(a, b), 1e-6);
}

TEST(contraction, random_pairs) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        DensityMatrix a = random_density(1 + trial % 6, rng);
        DensityMatrix b = random_density(1 + (trial / 6) % 6, rng);
        double t1 = trace_distance(a, b);
        double tv = total_variation(a, b);
        double h = hellinger(a, b);
        EXPECT_LE(tv, t1 + 1e-6) << trial;
        EXPECT_LE(h, std::sqrt(t1) + 1e-6) << trial;
        EXPECT_LE(h * h, tv + 1e-6) << trial;
        EXPECT_LE(tv, 2.0 * h + 1e-6) << trial;
        EXPECT_NEAR(h, hellinger(b, a), 1e-12);
    }
}

TEST(contraction, hellinger_triangle_inequality) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        DensityMatrix a = random_density(1 + trial % 5, rng);
        DensityMatrix b = random_density(1 + (trial + 1) % 5, rng);
        DensityMatrix c = random_density(1 + (trial + 3) % 5, rng);
        QuadratureSpec spec = QuadratureSpec::for_dimension(5);
        EXPECT_LE(hellinger(a, c, spec), hellinger(a, b, spec) + hellinger(b, c, spec) + 1e-10);
        EXPECT_LE(total_variation(a, c, spec), total_variation(a, b, spec) + total_variation(b, c, spec) + 1e-10);
    }
}
