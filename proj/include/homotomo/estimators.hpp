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

#ifndef HOMOTOMO_ESTIMATORS_HPP
#define HOMOTOMO_ESTIMATORS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homotomo/density_matrix.hpp"
#include "homotomo/measurement.hpp"
#include "homotomo/pattern_table.hpp"

namespace homotomo {

enum class TruncationRule { fixed, pattern_rate, mle_rate };

std::string_view rule_name(TruncationRule rule);
/// Accepts "fixed", "pattern_rate", "mle_rate"; throws DomainError otherwise.
TruncationRule parse_truncation_rule(std::string_view text);

/// Sieve dimension N: the estimate is an N x N matrix on Fock levels 0 .. N-1.
struct SieveConfig {
    int N = 1;
    TruncationRule rule = TruncationRule::fixed;
    std::size_t n = 0;
    /// Set when a fixed N exceeds a rate cap.
    std::optional<std::string> warning;
};

/// Rate cap on N: n^(3/7) for pattern_rate, (n / ln max(n, 3))^(1/2) for mle_rate and fixed.
double truncation_cap(std::size_t n, TruncationRule rule);

/// Rate rules give N = ceil(n^(1/3)), lowered to floor(cap) where the cap binds and never
/// below 1. The fixed rule takes `fixed_dim` and records a warning for each rate cap it exceeds.
SieveConfig choose_truncation(std::size_t n, TruncationRule rule, int fixed_dim = 0);

enum class Method { pattern, mle };

std::string_view method_name(Method method);
Method parse_method(std::string_view text);

struct ConstraintResiduals {
    double min_eigenvalue = 0.0;
    /// Tr - 1.
    double trace_error = 0.0;
};

ConstraintResiduals constraint_residuals(const HermitianMatrix &m);

struct TruthDistances {
    double trace = 0.0;
    double hs = 0.0;
    double hellinger = 0.0;
    /// Hellinger was evaluated on the physical projection of a non-physical estimate.
    bool hellinger_on_projection = false;
};

struct MleDiagnostics {
    bool converged = false;
    int iterations = 0;
    /// Max-norm of the gradient of the mean negative log-likelihood at the returned iterate.
    double gradient_norm = 0.0;
    int restarts = 0;
    int best_restart = 0;
    std::vector<double> restart_log_likelihoods;
};

struct EfficiencyCorrection {
    double eta = 1.0;
    /// Estimate of the Bernoulli-transformed state seen by the lossy detector.
    HermitianMatrix measured_estimate;
    double tail_estimate = 0.0;
    std::optional<double> measured_log_likelihood;
};

struct EstimateReport {
    Method method = Method::pattern;
    SieveConfig sieve;
    HermitianMatrix estimate;
    /// True when the estimate satisfies the density-matrix invariants.
    bool physical = false;
    std::size_t n_samples = 0;
    std::optional<double> log_likelihood;
    ConstraintResiduals residuals;
    std::optional<TruthDistances> distances_to_truth;
    std::optional<MleDiagnostics> mle;
    std::optional<EfficiencyCorrection> efficiency;
    std::vector<std::string> warnings;
};

nlohmann::json to_json(const EstimateReport &report);

inline constexpr int kMinSharedTableIndex = 15;

/// Smallest index of the form 2^k - 1, at least kMinSharedTableIndex, that covers max_index.
int canonical_table_index(int max_index);

/// Process-wide pattern table with max index canonical_table_index(max_index), so estimates do not
/// depend on which tables were requested earlier. Built on first use, or loaded from the cache
/// directory given by set_pattern_cache_path or the HOMOTOMO_PATTERN_CACHE variable.
const PatternFunctionTable &shared_pattern_table(int max_index);
void set_pattern_cache_path(const std::filesystem::path &dir);

/// rho_kj = mean of f_kj(X) exp(-i (j - k) Phi) for k <= j < N, lower triangle by conjugation.
HermitianMatrix pattern_matrix(const Dataset &ds, int N, const PatternFunctionTable &table);

/// Pattern-function estimate. Requires a non-empty ideal-detection dataset. Uses the shared
/// table when none is given.
EstimateReport pattern_estimate(const Dataset &ds, int N, const PatternFunctionTable *table = nullptr);

/// N^2 exp(-n a^2 / sum_{k,j<N} ||f_kj||_inf^2).
double hoeffding_bound(std::size_t n, int N, double a, const PatternFunctionTable *table = nullptr);

/// Nearest density matrix in Frobenius norm: eigenvalues projected onto the simplex.
DensityMatrix project_to_physical(const HermitianMatrix &m);

struct MleOptions {
    int max_iters = 2000;
    double tol = 1e-6;
    int restarts = 3;
    /// Seed of the random-start stream.
    std::uint64_t seed = 0;
};

/// Sum over samples of log p_tau(x, phi).
double log_likelihood(const Dataset &ds, const HermitianMatrix &tau);

/// Maximizes the likelihood over N x N density matrices tau = L L^dagger / Tr(L L^dagger), L
/// lower triangular, by L-BFGS. Restart r starts from the projected pattern estimate (r = 0),
/// the maximally mixed state (r = 1) or a random L (r >= 2). The best restart is returned;
/// `mle->converged` is false when it did not reach the gradient tolerance.
EstimateReport sieved_mle(const Dataset &ds, int N, const MleOptions &opts = {});

enum class BernoulliDirection { forward, inverse };

struct BernoulliResult {
    HermitianMatrix matrix;
    /// Largest magnitude among the series terms with the highest retained index.
    double tail_estimate = 0.0;
};

/// Photon-loss map out_jk = sum_p sqrt(C(j+p, j) C(k+p, k)) eta^((j+k)/2) (1-eta)^p rho_{j+p,k+p},
/// truncated at the input dimension; inverse substitutes eta -> 1/eta. The inverse series
/// diverges for eta <= 1/2 and is refused there unless allow_unsafe is set.
BernoulliResult bernoulli_transform(const HermitianMatrix &rho, double eta, BernoulliDirection direction,
                                    bool allow_unsafe = false);

/// Estimates the Bernoulli-transformed state from lossy data with the chosen method, then applies
/// the inverse transform. Samples are used as recorded: X' is an ideal quadrature sample of the
/// transformed state. Requires 1/2 < meta.eta < 1 unless allow_unsafe.
EstimateReport estimate_with_efficiency(const Dataset &ds, int N, Method method, const MleOptions &opts = {},
                                        bool allow_unsafe = false);

/// Fills distances_to_truth: trace and Hilbert-Schmidt distances with zero padding, Hellinger
/// distance of the quadrature densities.
void attach_truth(EstimateReport &report, const DensityMatrix &truth);

}  // namespace homotomo

#endif
