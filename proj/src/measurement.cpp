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

#include "homotomo/measurement.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string_view>
#include <thread>

#include "homotomo/errors.hpp"
#include "homotomo/hermite.hpp"
#include "homotomo/kernels.hpp"
#include "homotomo/rng.hpp"
#include "homotomo/states.hpp"

namespace homotomo {

namespace {

constexpr std::string_view kFormat = "homotomo-dataset/1";

/// p_rho(x, phi) with reusable buffers.
class DensityEvaluator {
   public:
    explicit DensityEvaluator(const QuadratureDensity &p)
        : dim_(p.dim()), weights_(p.weights()), vectors_(p.vectors()), psi_(static_cast<std::size_t>(p.dim())) {
    }

    double operator()(double x, double phi) {
        if (std::abs(x) <= kernels::kHermiteBatchXLimit) {
            kernels::scalar::hermite_batch(&x, 1, dim_ - 1, psi_.data());
        } else {
            hermite_functions(x, psi_);
        }
        const Complex step = std::polar(1.0, -phi);
        double p = 0.0;
        for (Eigen::Index r = 0; r < weights_.size(); ++r) {
            Complex acc = 0.0;
            Complex rot = 1.0;
            for (int j = 0; j < dim_; ++j) {
                acc += vectors_(j, r) * (psi_[static_cast<std::size_t>(j)] * rot);
                rot *= step;
            }
            p += weights_(r) * std::norm(acc);
        }
        return p;
    }

   private:
    int dim_;
    const Eigen::VectorXd &weights_;
    const Eigen::MatrixXcd &vectors_;
    std::vector<double> psi_;
};

double envelope_pdf(double x, double variance) {
    return std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

void sample_chunk(const QuadratureDensity &density, const EnvelopeDiagnostics &env, std::uint64_t key,
                  std::optional<double> fixed_phi, std::span<Sample> out) {
    DensityEvaluator p(density);
    SplitMix64 rng(key);
    const double sigma = std::sqrt(env.variance);
    for (Sample &s : out) {
        s.phi = fixed_phi ? *fixed_phi : std::numbers::pi * rng.uniform();
        while (true) {
            double x = sigma * rng.normal();
            double u = rng.uniform();
            if (u * env.bound * envelope_pdf(x, env.variance) <= p(x, s.phi)) {
                s.x = x;
                break;
            }
        }
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool parse_double(std::string_view s, double &out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

DatasetMeta meta_from_json(const nlohmann::json &j, std::size_t &declared_n, int line) {
    DatasetMeta meta;
    try {
        if (!j.is_object()) {
            throw DataError("metadata is not a JSON object", line);
        }
        if (j.contains("format") && j.at("format").get<std::string>() != kFormat) {
            throw DataError("unsupported dataset format " + j.at("format").get<std::string>(), line);
        }
        meta.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("source") && !j.at("source").is_null()) {
            meta.source = j.at("source").get<std::string>();
        }
        meta.source_dim = j.value("source_dim", 0);
        meta.eta = j.value("eta", 1.0);
        if (j.contains("noise_seed") && !j.at("noise_seed").is_null()) {
            meta.noise_seed = j.at("noise_seed").get<std::uint64_t>();
        }
        meta.workers = j.value("workers", 1);
        declared_n = j.value("n", std::size_t{0});
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("bad metadata: ") + e.what(), line);
    }
    if (!(meta.eta > 0.0 && meta.eta <= 1.0)) {
        throw DataError("metadata eta must lie in (0, 1]", line);
    }
    return meta;
}

}  // namespace

EnvelopeDiagnostics rejection_envelope(const HermitianMatrix &rho) {
    QuadratureDensity density(rho);
    const int dim = rho.dim();
    EnvelopeDiagnostics env;
    env.variance = 0.5 * dim + 1.0;
    const double reach = std::sqrt(2.0 * dim) + 6.0;
    std::vector<double> xs(801);
    for (std::size_t a = 0; a < xs.size(); ++a) {
        xs[a] = -reach + 2.0 * reach * static_cast<double>(a) / static_cast<double>(xs.size() - 1);
    }
    std::vector<double> phis(64);
    for (std::size_t b = 0; b < phis.size(); ++b) {
        phis[b] = std::numbers::pi * static_cast<double>(b) / static_cast<double>(phis.size());
    }
    std::vector<double> grid(xs.size() * phis.size());
    density.evaluate_grid(xs, phis, grid);
    double ratio = 0.0;
    for (std::size_t a = 0; a < xs.size(); ++a) {
        double g = envelope_pdf(xs[a], env.variance);
        for (std::size_t b = 0; b < phis.size(); ++b) {
            ratio = std::max(ratio, grid[a * phis.size() + b] / g);
        }
    }
    env.bound = kEnvelopeSafety * ratio;
    env.acceptance = env.bound > 0.0 ? 1.0 / env.bound : 0.0;
    return env;
}

namespace {

Dataset sample_impl(const DensityMatrix &rho, std::size_t n, std::uint64_t seed, int workers,
                    std::optional<double> fixed_phi) {
    if (workers < 1) {
        throw DomainError("sample_homodyne: workers must be >= 1");
    }
    Dataset ds;
    ds.meta.seed = seed;
    ds.meta.workers = workers;
    if (n == 0) {
        return ds;
    }
    EnvelopeDiagnostics env = rejection_envelope(rho.hermitian());
    if (!(env.acceptance >= kMinAcceptance)) {
        throw NumericalError("rejection envelope failure: acceptance " + std::to_string(env.acceptance) +
                             " (bound " + std::to_string(env.bound) + ", envelope variance " +
                             std::to_string(env.variance) + ", dim " + std::to_string(rho.dim()) + ")");
    }
    QuadratureDensity density(rho.hermitian());
    ds.samples.resize(n);
    std::span<Sample> all(ds.samples);
    auto chunk = [&](int c) {
        std::size_t lo = n * static_cast<std::size_t>(c) / static_cast<std::size_t>(workers);
        std::size_t hi = n * static_cast<std::size_t>(c + 1) / static_cast<std::size_t>(workers);
        sample_chunk(density, env, derive_key(seed, static_cast<std::uint64_t>(c) + 1), fixed_phi,
                     all.subspan(lo, hi - lo));
    };
    if (workers == 1) {
        chunk(0);
    } else {
        std::vector<std::thread> pool;
        for (int c = 0; c < workers; ++c) {
            pool.emplace_back(chunk, c);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    return ds;
}

}  // namespace

Dataset sample_homodyne(const DensityMatrix &rho, std::size_t n, std::uint64_t seed, int workers) {
    return sample_impl(rho, n, seed, workers, std::nullopt);
}

Dataset sample_quadrature(const DensityMatrix &rho, double phi, std::size_t n, std::uint64_t seed) {
    if (!(phi >= 0.0 && phi <= std::numbers::pi)) {
        throw DomainError("sample_quadrature: phi must lie in [0, pi]");
    }
    return sample_impl(rho, n, seed, 1, phi);
}

Dataset apply_efficiency(const Dataset &ds, double eta, std::uint64_t seed) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw DomainError("apply_efficiency: eta must lie in (0, 1)");
    }
    if (ds.meta.eta != 1.0) {
        throw DomainError("apply_efficiency: dataset already carries efficiency " + format_double(ds.meta.eta));
    }
    Dataset out = ds;
    out.meta.eta = eta;
    out.meta.noise_seed = seed;
    SplitMix64 rng(derive_key(seed, 0));
    const double a = std::sqrt(eta);
    const double b = std::sqrt(0.5 * (1.0 - eta));
    for (Sample &s : out.samples) {
        s.x = a * s.x + b * rng.normal();
    }
    return out;
}

nlohmann::json meta_to_json(const DatasetMeta &meta, std::size_t n) {
    nlohmann::json j;
    j["format"] = kFormat;
    j["n"] = n;
    j["seed"] = meta.seed;
    j["source"] = meta.source ? nlohmann::json(*meta.source) : nlohmann::json(nullptr);
    j["source_dim"] = meta.source_dim;
    j["eta"] = meta.eta;
    j["noise_seed"] = meta.noise_seed ? nlohmann::json(*meta.noise_seed) : nlohmann::json(nullptr);
    j["workers"] = meta.workers;
    return j;
}

std::string serialize_dataset(const Dataset &ds) {
    std::string out = "# " + meta_to_json(ds.meta, ds.size()).dump() + "\nx,phi\n";
    out.reserve(out.size() + ds.size() * 48);
    char buf[96];
    for (const Sample &s : ds.samples) {
        int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.x, s.phi);
        out.append(buf, static_cast<std::size_t>(len));
    }
    return out;
}

void write_dataset(const Dataset &ds, const std::filesystem::path &path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    os << serialize_dataset(ds);
    if (!os) {
        throw DataError("failed writing " + path.string());
    }
}

Dataset read_dataset(const std::filesystem::path &path, std::vector<std::string> *warnings) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw DataError("cannot open dataset " + path.string());
    }
    Dataset ds;
    std::size_t declared_n = 0;
    bool have_meta = false;
    std::string line;
    int line_no = 0;
    bool header_done = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!header_done && line_no == 1 && line.starts_with('#')) {
            std::string_view body = std::string_view(line).substr(1);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(body);
            } catch (const nlohmann::json::exception &e) {
                throw DataError(std::string("metadata header is not valid JSON: ") + e.what(), line_no);
            }
            ds.meta = meta_from_json(j, declared_n, line_no);
            have_meta = true;
            continue;
        }
        if (!header_done) {
            header_done = true;
            if (!have_meta && warnings) {
                warnings->push_back(path.string() + ": missing metadata header; assuming eta = 1");
            }
            if (line == "x,phi") {
                continue;
            }
        }
        if (line.empty()) {
            continue;
        }
        std::size_t comma = line.find(',');
        Sample s;
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos ||
            !parse_double(std::string_view(line).substr(0, comma), s.x) ||
            !parse_double(std::string_view(line).substr(comma + 1), s.phi)) {
            throw DataError("malformed row '" + line + "'", line_no);
        }
        if (!std::isfinite(s.x) || !std::isfinite(s.phi)) {
            throw DataError("non-finite value", line_no);
        }
        if (s.phi < 0.0 || s.phi > std::numbers::pi) {
            throw DataError("phi " + format_double(s.phi) + " outside [0, pi]", line_no);
        }
        ds.samples.push_back(s);
    }
    if (!header_done && !have_meta && warnings) {
        warnings->push_back(path.string() + ": missing metadata header; assuming eta = 1");
    }
    if (have_meta && declared_n != ds.size()) {
        throw DataError("metadata declares n = " + std::to_string(declared_n) + " but file holds " +
                        std::to_string(ds.size()) + " rows");
    }
    return ds;
}

}  // namespace homotomo
