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

#include <ceres/ceres.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "homotomo/errors.hpp"
#include "homotomo/estimators.hpp"
#include "homotomo/hermite.hpp"
#include "homotomo/kernels.hpp"
#include "homotomo/rng.hpp"
#include "homotomo/states.hpp"

namespace homotomo {
namespace {

constexpr std::size_t kBlock = kernels::kLikelihoodBlock;

/// U_sj = psi_j(x_s) exp(-i j phi_s) in the block-major likelihood layout.
struct DesignMatrix {
    int dim = 0;
    std::size_t n = 0;
    std::vector<double> re;
    std::vector<double> im;
};

DesignMatrix build_design(const Dataset &ds, int N) {
    DesignMatrix u;
    u.dim = N;
    u.n = ds.samples.size();
    const std::size_t blocks = (u.n + kBlock - 1) / kBlock;
    const std::size_t nd = static_cast<std::size_t>(N);
    u.re.assign(blocks * nd * kBlock, 0.0);
    u.im.assign(blocks * nd * kBlock, 0.0);
    std::vector<double> xs(kBlock);
    std::vector<double> psi(kBlock * nd);
    std::vector<double> single(nd);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t count = std::min(kBlock, u.n - b * kBlock);
        bool in_range = true;
        for (std::size_t s = 0; s < kBlock; ++s) {
            xs[s] = s < count ? ds.samples[b * kBlock + s].x : 0.0;
            in_range = in_range && std::abs(xs[s]) <= kernels::kHermiteBatchXLimit;
        }
        if (in_range) {
            kernels::hermite_batch(xs, N - 1, psi);
        } else {
            for (std::size_t s = 0; s < kBlock; ++s) {
                hermite_functions(xs[s], single);
                for (std::size_t j = 0; j < nd; ++j) {
                    psi[j * kBlock + s] = single[j];
                }
            }
        }
        for (std::size_t s = 0; s < count; ++s) {
            const Complex step = std::polar(1.0, -ds.samples[b * kBlock + s].phi);
            Complex phase(1.0, 0.0);
            for (std::size_t j = 0; j < nd; ++j) {
                const std::size_t idx = (b * nd + j) * kBlock + s;
                u.re[idx] = psi[j * kBlock + s] * phase.real();
                u.im[idx] = psi[j * kBlock + s] * phase.imag();
                phase *= step;
            }
        }
    }
    return u;
}

/// Mean negative log-likelihood of tau = L L^dagger / ||L||_F^2. Parameters are the lower
/// triangle of L, row by row, as (re, im) pairs.
class NegativeLogLikelihood final : public ceres::FirstOrderFunction {
   public:
    explicit NegativeLogLikelihood(const DesignMatrix &u)
        : u_(u),
          l_re_(static_cast<std::size_t>(u.dim * u.dim)),
          l_im_(l_re_.size()),
          g_re_(l_re_.size()),
          g_im_(l_re_.size()) {
    }

    int NumParameters() const override {
        return u_.dim * (u_.dim + 1);
    }

    bool Evaluate(const double *theta, double *cost, double *gradient) const override {
        const int N = u_.dim;
        double t = 0.0;
        std::size_t p = 0;
        for (int j = 0; j < N; ++j) {
            for (int c = 0; c <= j; ++c, p += 2) {
                l_re_[j * N + c] = theta[p];
                l_im_[j * N + c] = theta[p + 1];
                t += theta[p] * theta[p] + theta[p + 1] * theta[p + 1];
            }
        }
        if (!(t > 0.0)) {
            return false;
        }
        std::fill(g_re_.begin(), g_re_.end(), 0.0);
        std::fill(g_im_.begin(), g_im_.end(), 0.0);
        double ll = kernels::likelihood_pass(u_.re.data(), u_.im.data(), u_.n, N, l_re_.data(), l_im_.data(),
                                             g_re_.data(), g_im_.data());
        if (!std::isfinite(ll)) {
            return false;
        }
        const double inv_n = 1.0 / static_cast<double>(u_.n);
        last_sum_log_p_ = ll - static_cast<double>(u_.n) * std::log(t);
        *cost = -ll * inv_n + std::log(t);
        if (gradient != nullptr) {
            p = 0;
            for (int j = 0; j < N; ++j) {
                for (int c = 0; c <= j; ++c, p += 2) {
                    const std::size_t idx = static_cast<std::size_t>(j * N + c);
                    gradient[p] = 2.0 * (-g_re_[idx] * inv_n + l_re_[idx] / t);
                    gradient[p + 1] = 2.0 * (-g_im_[idx] * inv_n + l_im_[idx] / t);
                }
            }
        }
        return true;
    }

    /// Sum of log p_tau at the last evaluated point.
    double last_sum_log_p() const {
        return last_sum_log_p_;
    }

   private:
    const DesignMatrix &u_;
    mutable std::vector<double> l_re_, l_im_, g_re_, g_im_;
    mutable double last_sum_log_p_ = 0.0;
};

double norm2(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

double max_abs(const std::vector<double> &v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

/// Stops once the scale-free gradient ||L||_F * max|grad| falls below tol.
class ScaleFreeGradientStop final : public ceres::IterationCallback {
   public:
    ScaleFreeGradientStop(const std::vector<double> &theta, double tol) : theta_(theta), tol_(tol) {
    }
    ceres::CallbackReturnType operator()(const ceres::IterationSummary &s) override {
        if (s.gradient_max_norm * norm2(theta_) < tol_) {
            return ceres::SOLVER_TERMINATE_SUCCESSFULLY;
        }
        return ceres::SOLVER_CONTINUE;
    }

   private:
    const std::vector<double> &theta_;
    double tol_;
};

std::vector<double> pack_lower(const ComplexMatrix &L) {
    const int N = static_cast<int>(L.rows());
    std::vector<double> theta;
    theta.reserve(static_cast<std::size_t>(N * (N + 1)));
    for (int j = 0; j < N; ++j) {
        for (int c = 0; c <= j; ++c) {
            theta.push_back(L(j, c).real());
            theta.push_back(L(j, c).imag());
        }
    }
    double s = norm2(theta);
    for (double &x : theta) {
        x /= s;
    }
    return theta;
}

HermitianMatrix unpack_state(const std::vector<double> &theta, int N) {
    ComplexMatrix L = ComplexMatrix::Zero(N, N);
    std::size_t p = 0;
    for (int j = 0; j < N; ++j) {
        for (int c = 0; c <= j; ++c, p += 2) {
            L(j, c) = Complex(theta[p], theta[p + 1]);
        }
    }
    ComplexMatrix tau = L * L.adjoint();
    tau /= tau.trace().real();
    return HermitianMatrix::from_matrix(0.5 * (tau + tau.adjoint()), 1e-8);
}

ComplexMatrix start_point(int kind, const Dataset &ds, int N, std::uint64_t seed, int restart) {
    if (kind == 1) {
        return ComplexMatrix::Identity(N, N);
    }
    if (kind == 0) {
        DensityMatrix projected = project_to_physical(pattern_matrix(ds, N, shared_pattern_table(N - 1)));
        ComplexMatrix mixed =
            0.9 * projected.matrix() + (0.1 / N) * ComplexMatrix::Identity(N, N);
        Eigen::LLT<ComplexMatrix> llt(mixed);
        if (llt.info() == Eigen::Success) {
            return llt.matrixL();
        }
        return ComplexMatrix::Identity(N, N);
    }
    SplitMix64 rng(derive_key(seed, 0x4D4C45ULL + static_cast<std::uint64_t>(restart)));
    ComplexMatrix L = ComplexMatrix::Zero(N, N);
    for (int j = 0; j < N; ++j) {
        for (int c = 0; c <= j; ++c) {
            L(j, c) = Complex(rng.normal(), rng.normal());
        }
    }
    return L;
}

}  // namespace

double log_likelihood(const Dataset &ds, const HermitianMatrix &tau) {
    QuadratureDensity q(tau);
    double s = 0.0;
    for (const Sample &smp : ds.samples) {
        double p = q(smp.x, smp.phi);
        if (!(p > 0.0)) {
            return -std::numeric_limits<double>::infinity();
        }
        s += std::log(p);
    }
    return s;
}

EstimateReport sieved_mle(const Dataset &ds, int N, const MleOptions &opts) {
    if (ds.samples.empty()) {
        throw DomainError("empty dataset");
    }
    if (N < 1) {
        throw DomainError("truncation N must be at least 1");
    }
    if (opts.restarts < 1 || opts.max_iters < 1 || !(opts.tol > 0.0)) {
        throw DomainError("MLE options need restarts >= 1, max_iters >= 1 and tol > 0");
    }
    EstimateReport report;
    report.method = Method::mle;
    report.sieve.N = N;
    report.sieve.n = ds.samples.size();
    report.n_samples = ds.samples.size();
    MleDiagnostics diag;

    if (N == 1) {
        ComplexMatrix one = ComplexMatrix::Ones(1, 1);
        report.estimate = HermitianMatrix::from_matrix(one);
        report.log_likelihood = log_likelihood(ds, report.estimate);
        diag.converged = true;
        diag.restarts = 1;
        diag.restart_log_likelihoods = {*report.log_likelihood};
        report.mle = diag;
        report.residuals = constraint_residuals(report.estimate);
        report.physical = true;
        return report;
    }

    const DesignMatrix u = build_design(ds, N);
    auto *objective = new NegativeLogLikelihood(u);
    ceres::GradientProblem problem(objective);

    double best_ll = -std::numeric_limits<double>::infinity();
    std::vector<double> best_theta;
    for (int r = 0; r < opts.restarts; ++r) {
        std::vector<double> theta = pack_lower(start_point(std::min(r, 2), ds, N, opts.seed, r));
        ScaleFreeGradientStop stop(theta, opts.tol);
        ceres::GradientProblemSolver::Options o;
        o.line_search_direction_type = ceres::LBFGS;
        o.max_num_iterations = opts.max_iters;
        o.gradient_tolerance = 1e-300;
        o.function_tolerance = 1e-16;
        o.parameter_tolerance = 1e-16;
        o.logging_type = ceres::SILENT;
        o.minimizer_progress_to_stdout = false;
        o.update_state_every_iteration = true;
        o.callbacks.push_back(&stop);
        ceres::GradientProblemSolver::Summary summary;
        ceres::Solve(o, problem, theta.data(), &summary);

        std::vector<double> grad(theta.size());
        double cost = 0.0;
        if (!objective->Evaluate(theta.data(), &cost, grad.data())) {
            diag.restart_log_likelihoods.push_back(-std::numeric_limits<double>::infinity());
            continue;
        }
        double ll = objective->last_sum_log_p();
        double gnorm = max_abs(grad) * norm2(theta);
        diag.restart_log_likelihoods.push_back(ll);
        diag.iterations += static_cast<int>(summary.iterations.size()) - 1;
        if (ll > best_ll) {
            best_ll = ll;
            best_theta = theta;
            diag.best_restart = r;
            diag.gradient_norm = gnorm;
            diag.converged = gnorm < opts.tol;
        }
    }
    diag.restarts = opts.restarts;
    if (best_theta.empty()) {
        throw NumericalError("likelihood vanished at every restart");
    }
    report.estimate = unpack_state(best_theta, N);
    report.log_likelihood = best_ll;
    report.residuals = constraint_residuals(report.estimate);
    report.physical = true;
    if (!diag.converged) {
        report.warnings.push_back("MLE did not reach gradient tolerance " + std::to_string(opts.tol) +
                                  " (best gradient norm " + std::to_string(diag.gradient_norm) + ")");
    }
    report.mle = diag;
    return report;
}

}  // namespace homotomo
