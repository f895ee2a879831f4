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

// Acceptance checks. Prints one line per criterion and exits non-zero if any fails.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "homotomo/errors.hpp"
#include "homotomo/estimators.hpp"
#include "homotomo/hermite.hpp"
#include "homotomo/measurement.hpp"
#include "homotomo/metrics.hpp"
#include "homotomo/pattern_table.hpp"
#include "homotomo/states.hpp"
#include "homotomo/wigner.hpp"

using namespace homotomo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

bool strictly_decreasing(const std::vector<double> &v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) {
            return false;
        }
    }
    return true;
}

std::string join(const std::vector<double> &v) {
    std::string s;
    for (double x : v) {
        s += (s.empty() ? "" : " > ") + fmt("%.4g", x);
    }
    return s;
}

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

Outcome biorthogonality() {
    auto t0 = std::chrono::steady_clock::now();
    const int top = 8;
    PatternFunctionTable table = PatternFunctionTable::build(top);
    const double xm = table.grid_spec().x_max;
    const int panels = table.grid_spec().uniform_cells;
    const double h = 2.0 * xm / panels;
    double worst = 0.0;
    int count = 0;
    for (int k = 0; k <= top; ++k) {
        for (int j = k; j <= top; ++j) {
            for (int m = 0; m + (j - k) <= top; ++m) {
                const int n = m + (j - k);
                auto f = [&](double x) { return table.value(k, j, x) * hermite_function(m, x) * hermite_function(n, x); };
                double v = 0.0;
                for (int i = 0; i < panels; ++i) {
                    v += boost::math::quadrature::gauss<double, 8>::integrate(f, -xm + i * h, -xm + (i + 1) * h);
                }
                worst = std::max(worst, std::abs(v - (m == k ? 1.0 : 0.0)));
                ++count;
            }
        }
    }
    double t = seconds_since(t0);
    return {worst < 1e-6 && t < 60.0, std::to_string(count) + " quadruples, max |error| = " + fmt("%.2e", worst) +
                                          " (< 1e-6), " + fmt("%.1f", t) + " s (< 60 s)"};
}

Outcome triangle_scaling() {
    auto t0 = std::chrono::steady_clock::now();
    PatternFunctionTable table = PatternFunctionTable::build(64, false);
    std::vector<double> lx, ly;
    for (int n : {8, 16, 32, 64}) {
        lx.push_back(std::log(n));
        ly.push_back(std::log(table.triangle_sum(n)));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / lx.size();
        my += ly[i] / ly.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    double slope = sxy / sxx;
    double t = seconds_since(t0);
    return {slope >= 2.0 && slope <= 2.7 && t < 300.0,
            "log-log slope over N = 8..64 is " + fmt("%.4f", slope) + " (in [2.0, 2.7]), " + fmt("%.1f", t) +
                " s (< 300 s)"};
}

Outcome unbiasedness() {
    DensityMatrix rho = state("coherent:1");
    const int N = 5, seeds = 200;
    const std::size_t n = 2000;
    const PatternFunctionTable &table = shared_pattern_table(N - 1);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(N, N);
    Eigen::MatrixXd sq_re = Eigen::MatrixXd::Zero(N, N), sq_im = Eigen::MatrixXd::Zero(N, N);
    for (int s = 1; s <= seeds; ++s) {
        HermitianMatrix est = pattern_matrix(sample_homodyne(rho, n, static_cast<std::uint64_t>(s)), N, table);
        sum += est.matrix();
        sq_re += est.matrix().real().cwiseAbs2();
        sq_im += est.matrix().imag().cwiseAbs2();
    }
    double worst = 0.0;
    int checked = 0, failed = 0;
    for (int k = 0; k < N; ++k) {
        for (int j = 0; j < N; ++j) {
            Complex mean = sum(k, j) / static_cast<double>(seeds);
            double parts[2][3] = {{mean.real(), sq_re(k, j), rho(k, j).real()}, {mean.imag(), sq_im(k, j), rho(k, j).imag()}};
            for (auto &p : parts) {
                double var = (p[1] - seeds * p[0] * p[0]) / (seeds - 1);
                double se = std::sqrt(std::max(var, 0.0) / seeds);
                if (se == 0.0) {
                    continue;
                }
                double z = std::abs(p[0] - p[2]) / se;
                worst = std::max(worst, z);
                ++checked;
                failed += z >= 3.0;
            }
        }
    }
    return {failed == 0, std::to_string(checked) + " real components over 200 seeds x n=2000, max |bias|/SE = " +
                             fmt("%.3f", worst) + " (< 3)"};
}

struct TrendData {
    // distance[truth][n index] over seeds
    std::map<std::string, std::vector<std::vector<double>>> pattern_hs, mle_hellinger;
    int invalid_mle = 0;
    int mle_fits = 0;
    int unconverged = 0;
    double pattern_seconds = 0.0, mle_seconds = 0.0;
};

const std::vector<std::size_t> kTrendNs = {1000, 10000, 100000};
const int kTrendSeeds = 20;
const char *const kTrendTruths[] = {"vacuum", "coherent:1"};

TrendData run_trend() {
    TrendData d;
    for (const char *truth_text : kTrendTruths) {
        DensityMatrix truth = state(truth_text);
        auto &ph = d.pattern_hs[truth_text];
        auto &mh = d.mle_hellinger[truth_text];
        for (std::size_t n : kTrendNs) {
            ph.emplace_back();
            mh.emplace_back();
            const int Np = choose_truncation(n, TruncationRule::pattern_rate).N;
            const int Nm = choose_truncation(n, TruncationRule::mle_rate).N;
            for (int s = 1; s <= kTrendSeeds; ++s) {
                Dataset ds = sample_homodyne(truth, n, static_cast<std::uint64_t>(s));
                auto t0 = std::chrono::steady_clock::now();
                HermitianMatrix est = pattern_estimate(ds, Np).estimate;
                ph.back().push_back(hs_distance(est, truth.hermitian().resized(Np)));
                d.pattern_seconds += seconds_since(t0);

                t0 = std::chrono::steady_clock::now();
                MleOptions o;
                o.restarts = 1;
                EstimateReport r = sieved_mle(ds, Nm, o);
                ++d.mle_fits;
                d.unconverged += !r.mle->converged;
                if (r.residuals.min_eigenvalue < -1e-10 || std::abs(r.residuals.trace_error) > 1e-10) {
                    ++d.invalid_mle;
                }
                mh.back().push_back(hellinger(r.estimate, truth.hermitian()));
                d.mle_seconds += seconds_since(t0);
            }
        }
    }
    return d;
}

Outcome pattern_trend(const TrendData &d) {
    bool ok = d.pattern_seconds < 600.0;
    std::string detail;
    for (const char *truth : kTrendTruths) {
        std::vector<double> med;
        for (const auto &v : d.pattern_hs.at(truth)) {
            med.push_back(median(v));
        }
        ok = ok && strictly_decreasing(med);
        detail += std::string(truth) + " median HS " + join(med) + "; ";
    }
    return {ok, detail + "N = 10, 22, 47; " + fmt("%.1f", d.pattern_seconds) + " s (< 600 s)"};
}

Outcome mle_trend(const TrendData &d) {
    bool ok = d.invalid_mle == 0;
    std::string detail;
    double vacuum_last = 0.0;
    for (const char *truth : kTrendTruths) {
        std::vector<double> med;
        for (const auto &v : d.mle_hellinger.at(truth)) {
            med.push_back(median(v));
        }
        ok = ok && strictly_decreasing(med);
        if (std::string(truth) == "vacuum") {
            vacuum_last = med.back();
        }
        detail += std::string(truth) + " median Hellinger " + join(med) + "; ";
    }
    ok = ok && vacuum_last <= 0.05;
    return {ok, detail + "vacuum at n=1e5 " + fmt("%.4f", vacuum_last) + " (<= 0.05); " +
                    std::to_string(d.mle_fits - d.invalid_mle) + "/" + std::to_string(d.mle_fits) +
                    " fits pass PSD and trace checks; " + std::to_string(d.unconverged) +
                    " unconverged; one restart from the projected pattern estimate; " + fmt("%.0f", d.mle_seconds) +
                    " s"};
}

Outcome contraction() {
    std::mt19937_64 rng(20260101);
    std::uniform_int_distribution<int> dim(1, 6);
    double worst_tv = -1e9, worst_h = -1e9, worst_order = -1e9;
    for (int i = 0; i < 50; ++i) {
        DensityMatrix a = random_density(dim(rng), rng);
        DensityMatrix b = random_density(dim(rng), rng);
        double t1 = trace_distance(a, b);
        double tv = total_variation(a, b);
        double h = hellinger(a, b);
        worst_tv = std::max(worst_tv, tv - t1);
        worst_h = std::max(worst_h, h - std::sqrt(t1));
        worst_order = std::max({worst_order, 0.5 * tv - h, h - std::sqrt(tv)});
    }
    bool ok = worst_tv <= 1e-6 && worst_h <= 1e-6 && worst_order <= 1e-6;
    return {ok, "50 pairs with D <= 6: max(tv - trace) = " + fmt("%.3g", worst_tv) + ", max(h - sqrt(trace)) = " +
                    fmt("%.3g", worst_h) + ", max ordering violation = " + fmt("%.3g", worst_order) +
                    " (all <= 1e-6)"};
}

Outcome efficiency() {
    StateSpec spec = StateSpec::parse("coherent:1");
    spec.dim = 20;
    DensityMatrix rho = make_state(spec).rho;
    HermitianMatrix fwd = bernoulli_transform(rho, 0.8, BernoulliDirection::forward).matrix;
    double round_trip = (bernoulli_transform(fwd, 0.8, BernoulliDirection::inverse).matrix.matrix() - rho.matrix()).norm();

    Dataset ds = apply_efficiency(sample_homodyne(state("fock:1"), 100000, 7001), 0.8, 7002);
    EstimateReport r = estimate_with_efficiency(ds, 6, Method::mle);
    double rho11 = r.estimate(1, 1).real();

    bool refused = false;
    try {
        bernoulli_transform(rho, 0.45, BernoulliDirection::inverse);
    } catch (const DomainError &) {
        refused = true;
    }
    bool ok = round_trip < 1e-6 && rho11 >= 0.9 && refused;
    return {ok, "round trip ||.||_2 = " + fmt("%.2e", round_trip) + " (< 1e-6); fock(1) at eta=0.8, n=1e5: rho_11 = " +
                    fmt("%.4f", rho11) + " (>= 0.9); eta=0.45 inverse " + (refused ? "refused" : "NOT refused")};
}

Outcome wigner_checks() {
    auto origin = [](const DensityMatrix &rho) {
        WignerGrid w = wigner_function(rho.hermitian());
        std::size_t iq = std::find(w.q_axis.begin(), w.q_axis.end(), 0.0) - w.q_axis.begin();
        std::size_t ip = std::find(w.p_axis.begin(), w.p_axis.end(), 0.0) - w.p_axis.begin();
        return w.values(static_cast<Eigen::Index>(iq), static_cast<Eigen::Index>(ip));
    };
    double w0 = origin(state("vacuum"));
    double w1 = origin(state("fock:1"));
    double worst = 0.0;
    for (const char *text : {"vacuum", "fock:1", "fock:4", "coherent:1", "squeezed:0.3", "cat:1", "thermal:0.3"}) {
        StateSpec s = StateSpec::parse(text);
        s.dim = s.kind == StateSpec::Kind::thermal ? 10 : std::min(10, minimal_dimension(s, 1e-8));
        DensityMatrix rho = make_state(s).rho;
        WignerGrid w = wigner_function(rho.hermitian());
        for (int i = 0; i < 9; ++i) {
            for (int b = 0; b < 5; ++b) {
                double x = -3.0 + 0.75 * i, phi = b * std::numbers::pi / 5;
                worst = std::max(worst, std::abs(radon_transform(w, x, phi).value - quadrature_density(rho, x, phi)));
            }
        }
    }
    const double inv_pi = 1.0 / std::numbers::pi;
    bool ok = std::abs(w0 - inv_pi) <= 1e-4 && std::abs(w1 + inv_pi) <= 1e-4 && worst < 5e-3;
    return {ok, "W_vac(0,0) - 1/pi = " + fmt("%.2e", w0 - inv_pi) + ", W_fock1(0,0) + 1/pi = " +
                    fmt("%.2e", w1 + inv_pi) + " (|.| <= 1e-4); Radon probe max error " + fmt("%.2e", worst) +
                    " (< 5e-3)"};
}

Outcome vacuum_fixed_point() {
    std::string detail;
    bool ok = true;
    std::uint64_t seed = 9100;
    for (double eta : {0.6, 0.8}) {
        Dataset ds = apply_efficiency(sample_homodyne(state("vacuum"), 100000, seed), eta, seed + 1);
        seed += 2;
        double n = static_cast<double>(ds.size());
        double m1 = 0, m2 = 0;
        for (const Sample &s : ds.samples) {
            m1 += s.x;
        }
        m1 /= n;
        std::vector<double> d2;
        d2.reserve(ds.size());
        for (const Sample &s : ds.samples) {
            d2.push_back((s.x - m1) * (s.x - m1));
            m2 += d2.back();
        }
        double var = m2 / (n - 1);
        double v4 = 0;
        for (double v : d2) {
            v4 += (v - var) * (v - var);
        }
        double se = std::sqrt(v4 / (n - 1) / n);
        double z = std::abs(var - 0.5) / se;
        ok = ok && z < 3.0;
        detail += "eta=" + fmt("%.1f", eta) + ": var " + fmt("%.5f", var) + ", |var - 1/2|/SE = " + fmt("%.2f", z) + "; ";
    }
    return {ok, detail + "n = 1e5 each (< 3)"};
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> run_fixture_commands(const fs::path &dir, const std::vector<std::string> &cmds,
                                                        bool &all_ok) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        std::string line = "cd '" + dir.string() + "' && '" + std::string(HOMOTOMO_CLI_PATH) + "' " + cmds[i] +
                           " > stdout_" + std::to_string(i) + ".txt 2> stderr_" + std::to_string(i) + ".txt";
        if (std::system(line.c_str()) != 0) {
            all_ok = false;
        }
    }
    std::map<std::string, std::string> files;
    for (const auto &e : fs::directory_iterator(dir)) {
        files[e.path().filename().string()] = slurp(e.path());
    }
    return files;
}

Outcome determinism() {
    std::ifstream f(std::string(HOMOTOMO_FIXTURE_DIR) + "/commands.txt");
    std::vector<std::string> cmds;
    for (std::string line; std::getline(f, line);) {
        if (!line.empty() && line[0] != '#') {
            cmds.push_back(line);
        }
    }
    fs::path dir = fs::temp_directory_path() / "homotomo_acceptance_fixtures";
    bool ran = true;
    auto first = run_fixture_commands(dir, cmds, ran);
    auto second = run_fixture_commands(dir, cmds, ran);
    fs::remove_all(dir);
    int differing = 0;
    for (const auto &[name, bytes] : first) {
        auto it = second.find(name);
        differing += it == second.end() || it->second != bytes;
    }
    differing += static_cast<int>(second.size() > first.size());
    bool ok = ran && !cmds.empty() && differing == 0 && first.size() == second.size();
    return {ok, std::to_string(cmds.size()) + " fixture commands, " + std::to_string(first.size()) +
                    " artifacts compared, " + std::to_string(differing) + " differ" +
                    (ran ? "" : ", some commands failed")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char *name;
        std::function<Outcome()> check;
    };
    TrendData trend;
    bool trend_ready = false;
    auto get_trend = [&]() -> const TrendData & {
        if (!trend_ready) {
            trend = run_trend();
            trend_ready = true;
        }
        return trend;
    };
    std::vector<Criterion> criteria = {
        {1, "pattern-function bi-orthogonality", biorthogonality},
        {2, "triangle-sum scaling", triangle_scaling},
        {3, "pattern estimator unbiasedness", unbiasedness},
        {4, "pattern estimator convergence trend", [&] { return pattern_trend(get_trend()); }},
        {5, "sieved MLE Hellinger consistency", [&] { return mle_trend(get_trend()); }},
        {6, "contraction inequalities", contraction},
        {7, "efficiency round trip", efficiency},
        {8, "Wigner checks", wigner_checks},
        {9, "vacuum loss-channel fixed point", vacuum_fixed_point},
        {10, "determinism of fixture commands", determinism},
    };
    int passed = 0;
    for (const auto &c : criteria) {
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        passed += o.pass;
        std::printf("[%s] criterion %d, %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/%zu criteria passed\n", passed, criteria.size());
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
