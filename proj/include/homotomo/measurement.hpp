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

#ifndef HOMOTOMO_MEASUREMENT_HPP
#define HOMOTOMO_MEASUREMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "homotomo/density_matrix.hpp"

namespace homotomo {

/// One homodyne outcome: quadrature x at phase phi in [0, pi].
struct Sample {
    double x = 0.0;
    double phi = 0.0;

    bool operator==(const Sample &) const = default;
};

struct DatasetMeta {
    std::uint64_t seed = 0;
    /// State spec text of the simulated source, when known.
    std::optional<std::string> source;
    /// Fock dimension of the simulated source, 0 when unknown.
    int source_dim = 0;
    /// Detection efficiency; 1 means ideal detection.
    double eta = 1.0;
    /// Seed of the efficiency noise, when applied.
    std::optional<std::uint64_t> noise_seed;
    int workers = 1;

    bool operator==(const DatasetMeta &) const = default;
};

struct Dataset {
    std::vector<Sample> samples;
    DatasetMeta meta;

    std::size_t size() const {
        return samples.size();
    }
};

/// Rejection envelope used by sample_homodyne.
struct EnvelopeDiagnostics {
    double variance = 0.0;
    /// Bound c on p / g over the scan grid, including the safety factor.
    double bound = 0.0;
    double acceptance = 0.0;
};

inline constexpr double kMinAcceptance = 0.01;
inline constexpr double kEnvelopeSafety = 1.1;

/// Envelope N(0, D/2 + 1) scaled to dominate p_rho on a 64 x 801 scan of phi x x.
EnvelopeDiagnostics rejection_envelope(const HermitianMatrix &rho);

/// Draws phi ~ U[0, pi] and x | phi ~ p_rho(., phi) by rejection sampling.
///
/// Samples are generated in `workers` contiguous chunks, chunk c drawing from the SplitMix64
/// stream derive_key(seed, c + 1), so the output is a function of (rho, n, seed, workers).
/// Throws NumericalError with the envelope diagnostics when acceptance is below 1%.
Dataset sample_homodyne(const DensityMatrix &rho, std::size_t n, std::uint64_t seed, int workers = 1);

/// As sample_homodyne with every phase fixed to phi (single worker).
Dataset sample_quadrature(const DensityMatrix &rho, double phi, std::size_t n, std::uint64_t seed);

/// Replaces x by sqrt(eta) x + sqrt((1 - eta) / 2) g with g standard normal. Requires
/// 0 < eta < 1 and an ideal-detection input (meta.eta == 1).
Dataset apply_efficiency(const Dataset &ds, double eta, std::uint64_t seed);

/// CSV with a leading `# {json}` metadata line, a `x,phi` column line and %.17g rows.
void write_dataset(const Dataset &ds, const std::filesystem::path &path);
std::string serialize_dataset(const Dataset &ds);

/// Inverse of write_dataset. A missing metadata line yields default metadata (eta = 1) and a
/// warning. Throws DataError with the 1-based line number on malformed or out-of-range rows.
Dataset read_dataset(const std::filesystem::path &path, std::vector<std::string> *warnings = nullptr);

nlohmann::json meta_to_json(const DatasetMeta &meta, std::size_t n);

}  // namespace homotomo

#endif
