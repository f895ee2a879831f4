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
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <gtest/gtest.h>

#include "homotomo/errors.hpp"
#include "homotomo/measurement.hpp"
#include "homotomo/rng.hpp"
#include "homotomo/states.hpp"

using namespace homotomo;

namespace {

DensityMatrix state(const char *text) {
    return make_state(StateSpec::parse(text)).rho;
}

struct Moments {
    double mean, var, var_se;
};

Moments moments(const Dataset &ds) {
    double n = static_cast<double>(ds.size());
    double m = 0;
    for (const auto &s : ds.samples) {
        m += s.x;
    }
    m /= n;
    double m2 = 0, m4 = 0;
    for (const auto &s : ds.samples) {
        double d = (s.x - m) * (s.x - m);
        m2 += d;
        m4 += d * d;
    }
    m2 /= n;
    m4 /= n;
    return {m, m2, std::sqrt((m4 - m2 * m2) / n)};
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "homotomo_measurement_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

double ks_statistic(std::vector<double> xs, const QuadratureDensity &p, double phi) {
    std::sort(xs.begin(), xs.end());
    double lo = -40.0;
    double cdf = 0.0;
    double worst = 0.0;
    const double n = static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        cdf += boost::math::quadrature::gauss<double, 20>::integrate([&](double x) { return p(x, phi); }, lo, xs[i]);
        lo = xs[i];
        worst = std::max({worst, std::abs((i + 1) / n - cdf), std::abs(i / n - cdf)});
    }
    return worst;
}

}  // namespace

TEST(rng, splitmix_reference_stream) {
    // Reference outputs of SplitMix64 seeded with 0.
    SplitMix64 r(0);
    EXPECT_EQ(r.next(), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(r.next(), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(r.next(), 0x06C45D188009454FULL);
}

TEST(rng, normal_moments) {
    SplitMix64 r(derive_key(5, 1));
    const int n = 200000;
    double m = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
        double g = r.normal();
        m += g;
        m2 += g * g;
    }
    EXPECT_NEAR(m / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(m2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
    EXPECT_NE(derive_key(1, 1), derive_key(1, 2));
    EXPECT_NE(derive_key(1, 1), derive_key(2, 1));
}

TEST(sample_homodyne, empty) {
    Dataset ds = sample_homodyne(state("vacuum"), 0, 1);
    EXPECT_EQ(ds.size(), 0u);
}

TEST(sample_homodyne, vacuum_moments) {
    Dataset ds = sample_homodyne(state("vacuum"), 100000, 11);
    Moments m = moments(ds);
    EXPECT_NEAR(m.mean, 0.0, 3.0 * std::sqrt(0.5 / ds.size()));
    EXPECT_NEAR(m.var, 0.5, 3.0 * 0.5 * std::sqrt(2.0 / ds.size()));
    for (const auto &s : ds.samples) {
        ASSERT_GE(s.phi, 0.0);
        ASSERT_LE(s.phi, std::numbers::pi);
    }
}

TEST(sample_homodyne, fock1_variance) {
    Dataset ds = sample_homodyne(state("fock:1"), 100000, 12);
    Moments m = moments(ds);
    // E x^2 = 3/2, E x^4 = 15/4, so var(x^2) = 3/2.
    EXPECT_NEAR(m.var, 1.5, 3.0 * std::sqrt(1.5 / ds.size()));
}

TEST(sample_homodyne, conditional_ks) {
    const double crit = 1.6276;  // Kolmogorov quantile at level 0.01
    std::uint64_t seed = 101;
    for (const char *text : {"vacuum", "fock:1", "coherent:1"}) {
        DensityMatrix rho = state(text);
        QuadratureDensity p(rho.hermitian());
        for (double phi : {0.0, 1.0}) {
            Dataset ds = sample_quadrature(rho, phi, 20000, seed++);
            std::vector<double> xs;
            for (const auto &s : ds.samples) {
                xs.push_back(s.x);
                ASSERT_EQ(s.phi, phi);
            }
            double d = ks_statistic(xs, p, phi);
            double n = static_cast<double>(xs.size());
            EXPECT_LT(d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)), crit) << text << " phi=" << phi;
        }
    }
}

TEST(sample_homodyne, deterministic) {
    DensityMatrix rho = state("cat:1.1");
    Dataset a = sample_homodyne(rho, 3000, 77);
    Dataset b = sample_homodyne(rho, 3000, 77);
    EXPECT_EQ(a.samples, b.samples);
    Dataset c = sample_homodyne(rho, 3000, 78);
    EXPECT_NE(a.samples, c.samples);
    Dataset w1 = sample_homodyne(rho, 3001, 77, 3);
    Dataset w2 = sample_homodyne(rho, 3001, 77, 3);
    EXPECT_EQ(w1.samples, w2.samples);
    EXPECT_EQ(w1.meta.workers, 3);
    // The first chunk of a sharded run shares the single-worker stream.
    EXPECT_EQ(w1.samples[0], a.samples[0]);
}

TEST(sample_homodyne, envelope_is_adequate) {
    for (const char *text : {"vacuum", "fock:9", "coherent:2,1", "squeezed:0.8", "thermal:2", "cat:2.5"}) {
        EnvelopeDiagnostics env = rejection_envelope(state(text).hermitian());
        EXPECT_GE(env.acceptance, kMinAcceptance) << text;
        EXPECT_LE(env.acceptance, 1.0 / kEnvelopeSafety + 1e-12) << text;
    }
}

TEST(sample_homodyne, envelope_failure_is_reported) {
    // Strong squeezing concentrates the density far below the envelope scale.
    StateSpec s = StateSpec::parse("squeezed:-2.2");
    s.dim = minimal_dimension(s, kMaxTailMass);
    PreparedState p = make_state(s);
    ASSERT_LT(rejection_envelope(p.rho.hermitian()).acceptance, kMinAcceptance);
    try {
        sample_homodyne(p.rho, 10, 1);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError &e) {
        EXPECT_NE(std::string(e.what()).find("envelope"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("acceptance"), std::string::npos);
    }
}

TEST(apply_efficiency, near_unit_limit) {
    Dataset ds = sample_homodyne(state("coherent:1"), 1000, 3);
    Dataset noisy = apply_efficiency(ds, 1.0 - 1e-12, 4);
    for (size_t i = 0; i < ds.size(); ++i) {
        EXPECT_NEAR(noisy.samples[i].x, ds.samples[i].x, 1e-5);
        EXPECT_EQ(noisy.samples[i].phi, ds.samples[i].phi);
    }
    EXPECT_EQ(noisy.meta.eta, 1.0 - 1e-12);
}

TEST(apply_efficiency, vacuum_fixed_point_and_fock_variance) {
    Dataset vac = sample_homodyne(state("vacuum"), 100000, 21);
    for (double eta : {0.6, 0.8}) {
        Moments m = moments(apply_efficiency(vac, eta, 22));
        EXPECT_NEAR(m.var, 0.5, 3.0 * m.var_se) << eta;
    }
    Dataset f = sample_homodyne(state("fock:1"), 100000, 23);
    Moments m = moments(apply_efficiency(f, 0.8, 24));
    EXPECT_NEAR(m.var, 1.3, 3.0 * m.var_se);
}

TEST(apply_efficiency, validates) {
    Dataset ds = sample_homodyne(state("vacuum"), 10, 3);
    EXPECT_THROW(apply_efficiency(ds, 0.0, 1), DomainError);
    EXPECT_THROW(apply_efficiency(ds, 1.0, 1), DomainError);
    EXPECT_THROW(apply_efficiency(ds, 1.5, 1), DomainError);
    Dataset once = apply_efficiency(ds, 0.9, 1);
    EXPECT_THROW(apply_efficiency(once, 0.9, 1), DomainError);
}

TEST(dataset_io, round_trip_is_byte_identical) {
    Dataset ds = apply_efficiency(sample_homodyne(state("coherent:0.5,0.5"), 1000, 8), 0.7, 9);
    ds.meta.source = "coherent:0.5,0.5";
    ds.meta.source_dim = 12;
    auto path = temp_dir() / "round_trip.csv";
    write_dataset(ds, path);
    Dataset back = read_dataset(path);
    EXPECT_EQ(back.samples, ds.samples);
    EXPECT_EQ(back.meta, ds.meta);
    auto path2 = temp_dir() / "round_trip2.csv";
    write_dataset(back, path2);
    EXPECT_EQ(slurp(path), slurp(path2));
    EXPECT_TRUE(slurp(path).starts_with("# {"));
}

TEST(dataset_io, missing_header_defaults_with_warning) {
    std::vector<std::string> warnings;
    Dataset ds = read_dataset(HOMOTOMO_FIXTURE_DIR "/no_header.csv", &warnings);
    EXPECT_EQ(ds.size(), 3u);
    EXPECT_EQ(ds.meta.eta, 1.0);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("missing metadata"), std::string::npos);
    EXPECT_EQ(ds.samples[1], (Sample{-1.5, 3.0}));
}

TEST(dataset_io, rejects_out_of_range_phase) {
    try {
        read_dataset(HOMOTOMO_FIXTURE_DIR "/bad_phi.csv");
        FAIL();
    } catch (const DataError &e) {
        EXPECT_EQ(e.line(), 4);
    }
}

TEST(dataset_io, malformed_row_reports_line) {
    try {
        read_dataset(HOMOTOMO_FIXTURE_DIR "/malformed_row.csv");
        FAIL();
    } catch (const DataError &e) {
        EXPECT_EQ(e.line(), 4);
        EXPECT_NE(std::string(e.what()).find("malformed"), std::string::npos);
    }
    EXPECT_THROW(read_dataset(temp_dir() / "does_not_exist.csv"), DataError);
}

TEST(dataset_io, row_count_must_match_header) {
    auto path = temp_dir() / "short.csv";
    Dataset ds = sample_homodyne(state("vacuum"), 5, 1);
    std::string text = serialize_dataset(ds);
    text.resize(text.rfind('\n', text.size() - 2) + 1);
    std::ofstream(path, std::ios::binary) << text;
    EXPECT_THROW(read_dataset(path), DataError);
}
