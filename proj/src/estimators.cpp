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
#include <numeric>

#include "homotomo/errors.hpp"
#include "homotomo/estimators.hpp"
#include "homotomo/metrics.hpp"

namespace homotomo {
namespace {

std::uint64_t ceil_cube_root(std::uint64_t n) {
    auto c = static_cast<std::uint64_t>(std::floor(std::cbrt(static_cast<double>(n))));
    while (c > 0 && c * c * c >= n) {
        --c;
    }
    while (c * c * c < n) {
        ++c;
    }
    return c;
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

bool is_physical(const ConstraintResiduals &r) {
    return r.min_eigenvalue >= -DensityMatrix::kPsdTolerance &&
           std::abs(r.trace_error) <= DensityMatrix::kTraceTolerance;
}

}  // namespace

std::string_view rule_name(TruncationRule rule) {
    switch (rule) {
        case TruncationRule::fixed:
            return "fixed";
        case TruncationRule::pattern_rate:
            return "pattern_rate";
        case TruncationRule::mle_rate:
            return "mle_rate";
    }
    return "fixed";
}

TruncationRule parse_truncation_rule(std::string_view text) {
    for (auto r : {TruncationRule::fixed, TruncationRule::pattern_rate, TruncationRule::mle_rate}) {
        if (text == rule_name(r)) {
            return r;
        }
    }
    throw DomainError("unknown truncation rule '" + std::string(text) + "'");
}

std::string_view method_name(Method method) {
    return method == Method::pattern ? "pattern" : "mle";
}

Method parse_method(std::string_view text) {
    if (text == "pattern") {
        return Method::pattern;
    }
    if (text == "mle") {
        return Method::mle;
    }
    throw DomainError("unknown method '" + std::string(text) + "'");
}

double truncation_cap(std::size_t n, TruncationRule rule) {
    double nn = static_cast<double>(n);
    if (rule == TruncationRule::pattern_rate) {
        return std::pow(nn, 3.0 / 7.0);
    }
    return std::sqrt(nn / std::log(std::max(nn, 3.0)));
}

SieveConfig choose_truncation(std::size_t n, TruncationRule rule, int fixed_dim) {
    if (n < 1) {
        throw DomainError("choose_truncation needs n >= 1");
    }
    SieveConfig cfg;
    cfg.rule = rule;
    cfg.n = n;
    if (rule == TruncationRule::fixed) {
        if (fixed_dim < 1) {
            throw DomainError("fixed truncation needs N >= 1");
        }
        cfg.N = fixed_dim;
        std::string violated;
        for (auto r : {TruncationRule::pattern_rate, TruncationRule::mle_rate}) {
            double cap = truncation_cap(n, r);
            if (static_cast<double>(fixed_dim) > cap) {
                if (!violated.empty()) {
                    violated += "; ";
                }
                violated += std::string(rule_name(r)) + " cap " + std::to_string(cap);
            }
        }
        if (!violated.empty()) {
            cfg.warning = "N = " + std::to_string(fixed_dim) + " exceeds the rate cap for n = " +
                          std::to_string(n) + " (" + violated + ")";
        }
        return cfg;
    }
    auto rate = static_cast<double>(ceil_cube_root(n));
    double cap = std::floor(truncation_cap(n, rule) * (1.0 + 1e-12));
    cfg.N = static_cast<int>(std::max(1.0, std::min(rate, cap)));
    return cfg;
}

ConstraintResiduals constraint_residuals(const HermitianMatrix &m) {
    return {m.min_eigenvalue(), m.trace() - 1.0};
}

DensityMatrix project_to_physical(const HermitianMatrix &m) {
    if (m.dim() < 1) {
        throw DomainError("cannot project an empty matrix");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.matrix());
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition failed during projection");
    }
    Eigen::VectorXd lambda = es.eigenvalues();
    std::vector<double> u(lambda.data(), lambda.data() + lambda.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumulative += u[j];
        double t = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) {
            theta = t;
        }
    }
    Eigen::VectorXd projected = (lambda.array() - theta).max(0.0).matrix();
    projected /= projected.sum();
    ComplexMatrix out = es.eigenvectors() * projected.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    ComplexMatrix sym = 0.5 * (out + out.adjoint());
    return DensityMatrix::from_hermitian(HermitianMatrix::from_matrix(sym), 1e-12, 1e-12);
}

BernoulliResult bernoulli_transform(const HermitianMatrix &rho, double eta, BernoulliDirection direction,
                                    bool allow_unsafe) {
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw DomainError("efficiency eta must lie in (0, 1]");
    }
    if (direction == BernoulliDirection::inverse && eta <= 0.5 && !allow_unsafe) {
        throw DomainError("inverse Bernoulli transform refused for eta = " + std::to_string(eta) +
                          " <= 1/2: the inverse power series diverges there (obstruction to consistent "
                          "estimation); pass the unsafe flag to experiment");
    }
    const double e = direction == BernoulliDirection::forward ? eta : 1.0 / eta;
    const double loss = 1.0 - e;
    const int D = rho.dim();
    ComplexMatrix out = ComplexMatrix::Zero(D, D);
    double tail = 0.0;
    for (int j = 0; j < D; ++j) {
        for (int k = 0; k <= j; ++k) {
            Complex sum(0.0, 0.0);
            double last = 0.0;
            for (int p = 0; j + p < D; ++p) {
                double log_mag = 0.5 * (log_binomial(j + p, j) + log_binomial(k + p, k)) +
                                 0.5 * (j + k) * std::log(e);
                double coef;
                if (p == 0) {
                    coef = std::exp(log_mag);
                } else if (loss == 0.0) {
                    coef = 0.0;
                } else {
                    coef = std::exp(log_mag + p * std::log(std::abs(loss)));
                    if (loss < 0.0 && (p & 1)) {
                        coef = -coef;
                    }
                }
                Complex term = coef * rho(j + p, k + p);
                sum += term;
                last = std::abs(term);
            }
            out(j, k) = sum;
            tail = std::max(tail, last);
        }
    }
    for (int j = 0; j < D; ++j) {
        out(j, j) = Complex(out(j, j).real(), 0.0);
    }
    return {HermitianMatrix::from_lower(out), tail};
}

EstimateReport estimate_with_efficiency(const Dataset &ds, int N, Method method, const MleOptions &opts,
                                        bool allow_unsafe) {
    const double eta = ds.meta.eta;
    if (!(eta > 0.0 && eta < 1.0)) {
        throw DomainError("efficiency correction needs dataset eta in (1/2, 1); got eta = " + std::to_string(eta));
    }
    if (eta <= 0.5 && !allow_unsafe) {
        throw DomainError("efficiency correction refused for eta = " + std::to_string(eta) +
                          " <= 1/2: the inverse Bernoulli series diverges there (obstruction to consistent "
                          "estimation)");
    }
    Dataset measured = ds;
    measured.meta.eta = 1.0;
    EstimateReport report = method == Method::pattern ? pattern_estimate(measured, N) : sieved_mle(measured, N, opts);
    BernoulliResult inverse =
        bernoulli_transform(report.estimate, eta, BernoulliDirection::inverse, allow_unsafe);
    EfficiencyCorrection corr;
    corr.eta = eta;
    corr.measured_estimate = report.estimate;
    corr.tail_estimate = inverse.tail_estimate;
    corr.measured_log_likelihood = report.log_likelihood;
    report.efficiency = corr;
    report.log_likelihood.reset();
    report.estimate = inverse.matrix;
    report.residuals = constraint_residuals(report.estimate);
    report.physical = is_physical(report.residuals);
    if (!report.physical) {
        report.warnings.push_back("inverse Bernoulli transform left the physical set (min eigenvalue " +
                                  std::to_string(report.residuals.min_eigenvalue) + ")");
    }
    return report;
}

void attach_truth(EstimateReport &report, const DensityMatrix &truth) {
    TruthDistances d;
    d.trace = trace_distance(report.estimate, truth);
    d.hs = hs_distance(report.estimate, truth);
    if (report.physical) {
        d.hellinger = hellinger(report.estimate, truth.hermitian());
    } else {
        d.hellinger = hellinger(project_to_physical(report.estimate).hermitian(), truth.hermitian());
        d.hellinger_on_projection = true;
    }
    report.distances_to_truth = d;
}

nlohmann::json to_json(const EstimateReport &report) {
    nlohmann::json sieve = {{"N", report.sieve.N}, {"rule", rule_name(report.sieve.rule)}, {"n", report.sieve.n}};
    if (report.sieve.warning) {
        sieve["warning"] = *report.sieve.warning;
    }
    nlohmann::json j = {
        {"method", method_name(report.method)},
        {"sieve", sieve},
        {"n_samples", report.n_samples},
        {"estimate", to_json(report.estimate)},
        {"physical", report.physical},
        {"log_likelihood", report.log_likelihood ? nlohmann::json(*report.log_likelihood) : nlohmann::json()},
        {"constraint_residuals",
         {{"min_eigenvalue", report.residuals.min_eigenvalue}, {"trace_error", report.residuals.trace_error}}},
        {"warnings", report.warnings},
    };
    if (report.distances_to_truth) {
        const auto &d = *report.distances_to_truth;
        j["distances_to_truth"] = {{"trace", d.trace},
                                   {"hs", d.hs},
                                   {"hellinger", d.hellinger},
                                   {"hellinger_on_projection", d.hellinger_on_projection}};
    }
    if (report.mle) {
        const auto &m = *report.mle;
        j["mle"] = {{"converged", m.converged},
                    {"iterations", m.iterations},
                    {"gradient_norm", m.gradient_norm},
                    {"restarts", m.restarts},
                    {"best_restart", m.best_restart},
                    {"restart_log_likelihoods", m.restart_log_likelihoods}};
    }
    if (report.efficiency) {
        const auto &e = *report.efficiency;
        j["efficiency"] = {
            {"eta", e.eta},
            {"measured_estimate", to_json(e.measured_estimate)},
            {"tail_estimate", e.tail_estimate},
            {"measured_log_likelihood",
             e.measured_log_likelihood ? nlohmann::json(*e.measured_log_likelihood) : nlohmann::json()}};
    }
    return j;
}

}  // namespace homotomo
