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

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "homotomo/errors.hpp"
#include "homotomo/states.hpp"
#include "homotomo/wigner.hpp"

using namespace homotomo;

namespace {

template <typename F>
double integrate(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

DensityMatrix state(const char *text, int dim = 0) {
    StateSpec s = StateSpec::parse(text);
    s.dim = dim;
    return make_state(s).rho;
}

const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

}  // namespace

TEST(state_spec, parse_and_print) {
    EXPECT_EQ(StateSpec::parse("vacuum").to_string(), "vacuum");
    EXPECT_EQ(StateSpec::parse("fock:3").fock_number, 3);
    StateSpec c = StateSpec::parse("coherent:1.5,-0.5");
    EXPECT_EQ(c.kind, StateSpec::Kind::coherent);
    EXPECT_EQ(c.alpha, Complex(1.5, -0.5));
    EXPECT_EQ(StateSpec::parse(c.to_string()).alpha, c.alpha);
    EXPECT_EQ(StateSpec::parse("thermal:0.25").mean_photons, 0.25);
    EXPECT_EQ(StateSpec::parse("squeezed:0.3").squeezing, 0.3);
    EXPECT_EQ(StateSpec::parse("cat:2").kind, StateSpec::Kind::cat);
    for (const char *bad : {"", "fock", "fock:-1", "fock:1.5", "coherent:", "coherent:a", "thermal:-1", "unknown:1",
                            "vacuum:1", "coherent:1,2,3", "squeezed:nan"}) {
        EXPECT_THROW(StateSpec::parse(bad), DomainError) << bad;
    }
}

TEST(make_state, canonical_examples) {
    DensityMatrix v = state("vacuum", 4);
    EXPECT_EQ(v.dim(), 4);
    EXPECT_EQ(v(0, 0), Complex(1.0));
    EXPECT_EQ(v.matrix().cwiseAbs().sum(), 1.0);

    DensityMatrix c = state("coherent:1", 20);
    for (int j = 0; j < 6; ++j) {
        for (int k = 0; k < 6; ++k) {
            double want = std::exp(-1.0) / std::sqrt(std::tgamma(j + 1.0) * std::tgamma(k + 1.0));
            EXPECT_NEAR(std::abs(c(j, k) - want), 0.0, 1e-12);
        }
    }
    EXPECT_NEAR(c(0, 0).real(), 0.367879441171442, 1e-12);

    DensityMatrix t = state("thermal:0", 7);
    EXPECT_EQ(t.dim(), 7);
    EXPECT_NEAR(t(0, 0).real(), 1.0, 1e-15);
}

TEST(make_state, physical_outputs) {
    for (const char *text : {"vacuum", "fock:5", "coherent:1.2,0.7", "thermal:0.8", "squeezed:0.5", "squeezed:-0.4",
                             "cat:1.5", "cat:0.8,0.8"}) {
        PreparedState p = make_state(StateSpec::parse(text));
        EXPECT_LE(p.tail_mass, StateSpec::kAutoTailMass) << text;
        EXPECT_NEAR(p.rho.hermitian().trace(), 1.0, 1e-12) << text;
        EXPECT_GE(p.rho.hermitian().min_eigenvalue(), -1e-12) << text;
        EXPECT_LT((p.rho.matrix() - p.rho.matrix().adjoint()).cwiseAbs().maxCoeff(), 1e-15) << text;
    }
}

TEST(make_state, cat_has_only_even_levels) {
    DensityMatrix c = state("cat:1.3", 24);
    for (int j = 1; j < 24; j += 2) {
        EXPECT_EQ(std::abs(c(j, j)), 0.0);
    }
    EXPECT_GT(c(2, 2).real(), 0.0);
}

TEST(make_state, refuses_short_truncation) {
    StateSpec s = StateSpec::parse("coherent:3");
    s.dim = 8;
    try {
        make_state(s);
        FAIL() << "expected TruncationError";
    } catch (const TruncationError &e) {
        EXPECT_NE(std::string(e.what()).find("truncation too small"), std::string::npos);
        EXPECT_EQ(e.minimal_dim(), minimal_dimension(s, kMaxTailMass));
        EXPECT_LE(tail_mass(s, e.minimal_dim()), kMaxTailMass);
        EXPECT_GT(tail_mass(s, e.minimal_dim() - 1), kMaxTailMass);
    }
    StateSpec f = StateSpec::parse("fock:4");
    f.dim = 4;
    EXPECT_THROW(make_state(f), TruncationError);
}

TEST(make_state, reported_tail_mass) {
    StateSpec s = StateSpec::parse("thermal:1");
    s.dim = 12;
    PreparedState p = make_state(s);
    EXPECT_NEAR(p.tail_mass, std::pow(0.5, 12), 1e-15);
    StateSpec c = StateSpec::parse("coherent:1");
    double direct = 1.0;
    for (int n = 0; n < 5; ++n) {
        direct -= std::exp(-1.0) / std::tgamma(n + 1.0);
    }
    EXPECT_NEAR(tail_mass(c, 5), direct, 1e-14);
}

TEST(quadrature_density, closed_form_values) {
    for (double phi : {0.0, 0.9, 2.5}) {
        EXPECT_NEAR(quadrature_density(state("vacuum", 3), 0.0, phi), kInvSqrtPi, 1e-15);
        EXPECT_NEAR(quadrature_density(state("fock:1", 2), 0.0, phi), 0.0, 1e-15);
    }
    EXPECT_NEAR(quadrature_density(state("coherent:1", 40), std::sqrt(2.0), 0.0), kInvSqrtPi, 1e-12);
}

TEST(quadrature_density, coherent_is_gaussian) {
    Complex alpha(0.7, -0.4);
    DensityMatrix rho = state("coherent:0.7,-0.4", 40);
    for (double phi : {0.0, 0.5, 1.6, 3.0}) {
        double mean = std::sqrt(2.0) * (alpha * std::polar(1.0, -phi)).real();
        for (double x = -3.0; x <= 3.0; x += 0.5) {
            double want = kInvSqrtPi * std::exp(-(x - mean) * (x - mean));
            EXPECT_NEAR(quadrature_density(rho, x, phi), want, 1e-12);
        }
    }
}

TEST(quadrature_density, gaussian_variances) {
    auto moment2 = [](const DensityMatrix &rho, double phi) {
        QuadratureDensity p(rho.hermitian());
        return integrate([&](double x) { return x * x * p(x, phi); }, -25.0, 25.0);
    };
    double r = 0.4;
    DensityMatrix sq = state("squeezed:0.4");
    EXPECT_NEAR(moment2(sq, 0.0), 0.5 * std::exp(-2 * r), 1e-9);
    EXPECT_NEAR(moment2(sq, std::numbers::pi / 2), 0.5 * std::exp(2 * r), 1e-9);
    EXPECT_NEAR(moment2(state("thermal:0.6"), 1.1), 0.5 * (2 * 0.6 + 1), 1e-9);
    EXPECT_NEAR(moment2(state("fock:3"), 0.2), 3.5, 1e-9);
}

TEST(quadrature_density, normalized) {
    for (const char *text : {"vacuum", "fock:1", "fock:7", "coherent:1", "coherent:-1.5,2", "thermal:1.5",
                             "squeezed:0.6", "cat:2", "cat:1,1"}) {
        QuadratureDensity p(state(text).hermitian());
        for (double phi : {0.0, std::numbers::pi / 4, std::numbers::pi / 2}) {
            double mass = integrate([&](double x) { return p(x, phi); }, -30.0, 30.0);
            EXPECT_NEAR(mass, 1.0, 1e-8) << text << " phi=" << phi;
        }
    }
}

TEST(quadrature_density, grid_matches_pointwise) {
    DensityMatrix rho = state("cat:1.2,0.3");
    QuadratureDensity p(rho.hermitian());
    std::vector<double> xs{-35.0, -4.0, -1.2, 0.0, 0.5, 2.2, 6.0, 31.0};
    std::vector<double> phis{0.0, 0.7, 3.1};
    std::vector<double> out(xs.size() * phis.size());
    p.evaluate_grid(xs, phis, out);
    for (size_t a = 0; a < xs.size(); ++a) {
        for (size_t b = 0; b < phis.size(); ++b) {
            EXPECT_NEAR(out[a * phis.size() + b], p(xs[a], phis[b]), 1e-14);
        }
    }
}

TEST(wigner, vacuum_and_fock_origin) {
    WignerGrid v = wigner_function(state("vacuum", 1).hermitian());
    int mid = static_cast<int>(v.q_axis.size() / 2);
    EXPECT_EQ(v.q_axis[mid], 0.0);
    EXPECT_NEAR(v.values(mid, mid), 1.0 / std::numbers::pi, 1e-9);
    WignerGrid f = wigner_function(state("fock:1", 2).hermitian());
    EXPECT_NEAR(f.values(mid, mid), -1.0 / std::numbers::pi, 1e-9);
    EXPECT_NEAR(v.total_mass(), 1.0, 2e-2);
    EXPECT_NEAR(f.total_mass(), 1.0, 2e-2);
}

TEST(wigner, characteristic_function_of_vacuum) {
    DensityMatrix v = state("vacuum", 5);
    for (double u : {-2.0, 0.0, 0.7}) {
        for (double w : {-1.0, 0.3, 2.5}) {
            Complex c = characteristic_function(v.hermitian(), u, w);
            EXPECT_NEAR(c.real(), std::exp(-(u * u + w * w) / 4), 1e-14);
            EXPECT_NEAR(c.imag(), 0.0, 1e-14);
        }
    }
}

TEST(wigner, coherent_displacement_sign) {
    // W of |alpha> is a Gaussian centred at (sqrt2 Re alpha, sqrt2 Im alpha).
    WignerGrid w = wigner_function(state("coherent:1,0.5").hermitian());
    Eigen::Index ia, ic;
    w.values.maxCoeff(&ia, &ic);
    EXPECT_NEAR(w.q_axis[ia], std::sqrt(2.0), 2 * w.dq());
    EXPECT_NEAR(w.p_axis[ic], 0.5 * std::sqrt(2.0), 2 * w.dp());
}

TEST(wigner, rejects_small_grid) {
    WignerGridSpec spec;
    spec.half_width = 3.0;
    try {
        wigner_function(state("fock:3").hermitian(), spec);
        FAIL();
    } catch (const DomainError &e) {
        EXPECT_NE(std::string(e.what()).find("required"), std::string::npos);
    }
}

TEST(wigner, marginal_property) {
    for (const char *text : {"fock:2", "coherent:0.5,0.5", "cat:1.2"}) {
        DensityMatrix rho = state(text);
        WignerGrid w = wigner_function(rho.hermitian());
        for (size_t a = 0; a < w.q_axis.size(); a += 16) {
            double marginal = w.values.row(static_cast<Eigen::Index>(a)).sum() * w.dp();
            EXPECT_NEAR(marginal, quadrature_density(rho, w.q_axis[a], 0.0), 5e-3) << text;
        }
    }
}

TEST(radon, cross_checks_quadrature_density) {
    WignerGrid v = wigner_function(state("vacuum", 1).hermitian());
    RadonValue r0 = radon_transform(v, 0.0, 0.0);
    EXPECT_NEAR(r0.value, quadrature_density(state("vacuum", 1), 0.0, 0.0), 1e-3);
    EXPECT_FALSE(r0.warning);
    EXPECT_NEAR(radon_transform(v, 0.0, std::numbers::pi / 2).value, r0.value, 1e-6);
    WignerGrid f = wigner_function(state("fock:1", 2).hermitian());
    for (double phi : {0.0, 1.0, 2.0}) {
        EXPECT_NEAR(radon_transform(f, 0.0, phi).value, 0.0, 2e-3);
    }
}

TEST(radon, probe_grid_consistency) {
    for (const char *text : {"vacuum", "fock:1", "fock:4", "coherent:1", "squeezed:0.3", "cat:1", "thermal:0.3"}) {
        StateSpec s = StateSpec::parse(text);
        s.dim = std::min(10, minimal_dimension(s, 1e-8));
        if (s.kind == StateSpec::Kind::thermal) {
            s.dim = 10;
        }
        DensityMatrix rho = make_state(s).rho;
        WignerGrid w = wigner_function(rho.hermitian());
        double worst = 0;
        for (int i = 0; i < 9; ++i) {
            double x = -3.0 + 0.75 * i;
            for (int b = 0; b < 5; ++b) {
                double phi = b * std::numbers::pi / 5;
                double diff = std::abs(radon_transform(w, x, phi).value - quadrature_density(rho, x, phi));
                worst = std::max(worst, diff);
            }
        }
        EXPECT_LT(worst, 5e-3) << text;
    }
}

TEST(radon, warns_when_the_line_leaves_mass_behind) {
    DensityMatrix rho = state("coherent:2.2");
    WignerGridSpec spec;
    spec.half_width = WignerGridSpec::minimal_half_width(rho.dim());
    WignerGrid w = wigner_function(rho.hermitian(), spec);
    // Cropping the grid leaves the Gaussian bump cut at the edge.
    WignerGrid cropped;
    int m = static_cast<int>(w.q_axis.size());
    int lo = m / 2 - 10, n = 40;
    cropped.q_axis.assign(w.q_axis.begin() + lo, w.q_axis.begin() + lo + n);
    cropped.p_axis = cropped.q_axis;
    cropped.values = w.values.block(lo, lo, n, n);
    RadonValue r = radon_transform(cropped, cropped.q_axis[n / 2], std::numbers::pi / 2);
    EXPECT_TRUE(r.warning);
    EXPECT_GT(r.unaccounted_mass, kRadonMassWarning);
    EXPECT_THROW(radon_transform(cropped, 100.0, 0.0), DomainError);
}
