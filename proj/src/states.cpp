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

#include "homotomo/states.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "homotomo/errors.hpp"
#include "homotomo/hermite.hpp"
#include "homotomo/kernels.hpp"

namespace homotomo {

namespace {

double parse_number(std::string_view s, std::string_view what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw DomainError("state spec: cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

Complex parse_complex(const std::vector<std::string_view> &params, std::string_view kind) {
    if (params.empty() || params.size() > 2) {
        throw DomainError("state spec: " + std::string(kind) + " takes re[,im]");
    }
    double re = parse_number(params[0], "real part");
    double im = params.size() == 2 ? parse_number(params[1], "imaginary part") : 0.0;
    return {re, im};
}

bool is_vacuum_like(const StateSpec &s) {
    switch (s.kind) {
        case StateSpec::Kind::fock:
            return s.fock_number == 0;
        case StateSpec::Kind::coherent:
        case StateSpec::Kind::cat:
            return std::abs(s.alpha) == 0.0;
        case StateSpec::Kind::thermal:
            return s.mean_photons == 0.0;
        case StateSpec::Kind::squeezed_vacuum:
            return s.squeezing == 0.0;
    }
    return false;
}

/// log of the untruncated Fock probability P(n); -inf when zero.
double log_fock_probability(const StateSpec &s, int n) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    if (is_vacuum_like(s)) {
        return n == 0 ? 0.0 : kNegInf;
    }
    switch (s.kind) {
        case StateSpec::Kind::fock:
            return n == s.fock_number ? 0.0 : kNegInf;
        case StateSpec::Kind::coherent: {
            double a2 = std::norm(s.alpha);
            return -a2 + n * std::log(a2) - std::lgamma(n + 1.0);
        }
        case StateSpec::Kind::cat: {
            if (n % 2 != 0) {
                return kNegInf;
            }
            double a2 = std::norm(s.alpha);
            return std::log(2.0) - a2 + n * std::log(a2) - std::lgamma(n + 1.0) - std::log1p(std::exp(-2.0 * a2));
        }
        case StateSpec::Kind::thermal: {
            double nb = s.mean_photons;
            return n * std::log(nb) - (n + 1.0) * std::log1p(nb);
        }
        case StateSpec::Kind::squeezed_vacuum: {
            if (n % 2 != 0) {
                return kNegInf;
            }
            int m = n / 2;
            double r = std::abs(s.squeezing);
            return 2.0 * m * std::log(std::tanh(r)) + std::lgamma(2.0 * m + 1.0) - 2.0 * m * std::log(2.0) -
                   2.0 * std::lgamma(m + 1.0) - std::log(std::cosh(r));
        }
    }
    return kNegInf;
}

double mean_photon_number(const StateSpec &s) {
    switch (s.kind) {
        case StateSpec::Kind::fock:
            return s.fock_number;
        case StateSpec::Kind::coherent:
        case StateSpec::Kind::cat:
            return std::norm(s.alpha);
        case StateSpec::Kind::thermal:
            return s.mean_photons;
        case StateSpec::Kind::squeezed_vacuum:
            return std::pow(std::sinh(s.squeezing), 2);
    }
    return 0.0;
}

/// Amplitudes of a pure state on levels [0, dim).
Eigen::VectorXcd pure_amplitudes(const StateSpec &s, int dim) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dim);
    if (is_vacuum_like(s)) {
        c(0) = 1.0;
        return c;
    }
    switch (s.kind) {
        case StateSpec::Kind::fock:
            c(s.fock_number) = 1.0;
            break;
        case StateSpec::Kind::coherent:
        case StateSpec::Kind::cat: {
            double mag = std::abs(s.alpha);
            double arg = std::arg(s.alpha);
            for (int n = 0; n < dim; ++n) {
                if (s.kind == StateSpec::Kind::cat && n % 2 != 0) {
                    continue;
                }
                double log_mag = -0.5 * mag * mag + n * std::log(mag) - 0.5 * std::lgamma(n + 1.0);
                c(n) = std::polar(std::exp(log_mag), n * arg);
            }
            break;
        }
        case StateSpec::Kind::squeezed_vacuum: {
            double r = s.squeezing;
            double t = std::tanh(std::abs(r));
            for (int n = 0; n < dim; n += 2) {
                int m = n / 2;
                double log_mag = m * std::log(t) + 0.5 * std::lgamma(2.0 * m + 1.0) - m * std::log(2.0) -
                                 std::lgamma(m + 1.0) - 0.5 * std::log(std::cosh(r));
                // (-tanh r)^m
                double sign = (m % 2 != 0 && r > 0.0) ? -1.0 : 1.0;
                c(n) = sign * std::exp(log_mag);
            }
            break;
        }
        case StateSpec::Kind::thermal:
            throw DomainError("thermal state is not pure");
    }
    return c;
}

}  // namespace

StateSpec StateSpec::parse(std::string_view text) {
    std::string_view kind = text;
    std::vector<std::string_view> params;
    if (auto colon = text.find(':'); colon != std::string_view::npos) {
        kind = text.substr(0, colon);
        params = split(text.substr(colon + 1), ',');
    }
    StateSpec s;
    if (kind == "vacuum") {
        if (!params.empty()) {
            throw DomainError("state spec: vacuum takes no parameters");
        }
        s.kind = Kind::fock;
    } else if (kind == "fock") {
        if (params.size() != 1) {
            throw DomainError("state spec: fock takes one photon number");
        }
        int m = 0;
        auto res = std::from_chars(params[0].data(), params[0].data() + params[0].size(), m);
        if (res.ec != std::errc() || res.ptr != params[0].data() + params[0].size() || m < 0) {
            throw DomainError("state spec: fock photon number must be a non-negative integer");
        }
        s.kind = Kind::fock;
        s.fock_number = m;
    } else if (kind == "coherent") {
        s.kind = Kind::coherent;
        s.alpha = parse_complex(params, kind);
    } else if (kind == "cat") {
        s.kind = Kind::cat;
        s.alpha = parse_complex(params, kind);
    } else if (kind == "thermal") {
        if (params.size() != 1) {
            throw DomainError("state spec: thermal takes one mean photon number");
        }
        s.kind = Kind::thermal;
        s.mean_photons = parse_number(params[0], "mean photon number");
        if (s.mean_photons < 0.0) {
            throw DomainError("state spec: thermal mean photon number must be >= 0");
        }
    } else if (kind == "squeezed" || kind == "squeezed_vacuum") {
        if (params.size() != 1) {
            throw DomainError("state spec: squeezed takes one squeezing parameter");
        }
        s.kind = Kind::squeezed_vacuum;
        s.squeezing = parse_number(params[0], "squeezing parameter");
    } else {
        throw DomainError("state spec: unknown kind '" + std::string(kind) + "'");
    }
    return s;
}

std::string StateSpec::to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case Kind::fock:
            if (fock_number == 0) {
                os << "vacuum";
            } else {
                os << "fock:" << fock_number;
            }
            break;
        case Kind::coherent:
        case Kind::cat:
            os << (kind == Kind::coherent ? "coherent:" : "cat:") << alpha.real();
            if (alpha.imag() != 0.0) {
                os << "," << alpha.imag();
            }
            break;
        case Kind::thermal:
            os << "thermal:" << mean_photons;
            break;
        case Kind::squeezed_vacuum:
            os << "squeezed:" << squeezing;
            break;
    }
    return os.str();
}

double tail_mass(const StateSpec &spec, int dim) {
    if (dim < 0) {
        throw DomainError("tail_mass: negative dimension");
    }
    if (spec.kind == StateSpec::Kind::thermal && !is_vacuum_like(spec)) {
        double ratio = spec.mean_photons / (1.0 + spec.mean_photons);
        return std::pow(ratio, dim);
    }
    // Direct summation of the tail avoids cancellation in 1 - sum_{n<D} P(n).
    double mean = mean_photon_number(spec);
    double total = 0.0;
    int horizon = dim + static_cast<int>(8.0 * mean) + 400;
    for (int n = dim; n < horizon; ++n) {
        double lp = log_fock_probability(spec, n);
        if (std::isfinite(lp)) {
            total += std::exp(lp);
        }
    }
    return std::min(total, 1.0);
}

int minimal_dimension(const StateSpec &spec, double tail) {
    int lo = spec.kind == StateSpec::Kind::fock ? spec.fock_number + 1 : 1;
    for (int d = lo; d <= 4096; ++d) {
        if (tail_mass(spec, d) <= tail) {
            return d;
        }
    }
    throw DomainError("state needs more than 4096 Fock levels");
}

PreparedState make_state(const StateSpec &spec) {
    int dim = spec.dim;
    if (dim <= 0) {
        dim = std::min(minimal_dimension(spec, StateSpec::kAutoTailMass), StateSpec::kAutoDimLimit);
    }
    double tail = tail_mass(spec, dim);
    if (tail > kMaxTailMass || (spec.kind == StateSpec::Kind::fock && spec.fock_number >= dim)) {
        int need = minimal_dimension(spec, kMaxTailMass);
        throw TruncationError("truncation too small: " + spec.to_string() + " at dim " + std::to_string(dim) +
                                  " loses mass " + std::to_string(tail) + "; use dim >= " + std::to_string(need),
                              need);
    }
    if (spec.kind == StateSpec::Kind::thermal) {
        ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
        double total = 0.0;
        for (int n = 0; n < dim; ++n) {
            double lp = log_fock_probability(spec, n);
            double p = std::isfinite(lp) ? std::exp(lp) : 0.0;
            m(n, n) = p;
            total += p;
        }
        m /= total;
        return {DensityMatrix::from_hermitian(HermitianMatrix::from_lower(m)), tail};
    }
    return {DensityMatrix::pure(pure_amplitudes(spec, dim)), tail};
}

QuadratureDensity::QuadratureDensity(const HermitianMatrix &m) : dim_(m.dim()) {
    if (dim_ < 1) {
        throw DomainError("quadrature density needs a non-empty matrix");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix());
    const Eigen::VectorXd &ev = solver.eigenvalues();
    double scale = ev.cwiseAbs().maxCoeff();
    std::vector<int> keep;
    for (int r = 0; r < ev.size(); ++r) {
        if (std::abs(ev(r)) > 1e-15 * scale) {
            keep.push_back(r);
        }
    }
    weights_.resize(static_cast<Eigen::Index>(keep.size()));
    vectors_.resize(dim_, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        weights_(static_cast<Eigen::Index>(i)) = ev(keep[i]);
        vectors_.col(static_cast<Eigen::Index>(i)) = solver.eigenvectors().col(keep[i]);
    }
}

double QuadratureDensity::operator()(double x, double phi) const {
    std::vector<double> psi(static_cast<std::size_t>(dim_));
    if (std::abs(x) <= kernels::kHermiteBatchXLimit) {
        kernels::scalar::hermite_batch(&x, 1, dim_ - 1, psi.data());
    } else {
        hermite_functions(x, psi);
    }
    // a_j = psi_j e^{-i j phi}; p = sum_r w_r |sum_j v_jr a_j|^2.
    Eigen::VectorXcd a(dim_);
    const Complex step = std::polar(1.0, -phi);
    Complex rot = 1.0;
    for (int j = 0; j < dim_; ++j) {
        a(j) = psi[static_cast<std::size_t>(j)] * rot;
        rot *= step;
    }
    double p = 0.0;
    for (Eigen::Index r = 0; r < weights_.size(); ++r) {
        p += weights_(r) * std::norm(vectors_.col(r).cwiseProduct(a).sum());
    }
    return p;
}

void QuadratureDensity::evaluate_grid(std::span<const double> xs, std::span<const double> phis,
                                      std::span<double> out) const {
    if (out.size() != xs.size() * phis.size()) {
        throw DomainError("evaluate_grid: output size mismatch");
    }
    const Eigen::Index nx = static_cast<Eigen::Index>(xs.size());
    // psi as nx x D.
    Eigen::MatrixXd psi(nx, dim_);
    std::vector<double> inside;
    std::vector<Eigen::Index> inside_idx;
    for (Eigen::Index a = 0; a < nx; ++a) {
        double x = xs[static_cast<std::size_t>(a)];
        if (std::abs(x) <= kernels::kHermiteBatchXLimit) {
            inside.push_back(x);
            inside_idx.push_back(a);
        } else {
            std::vector<double> col(static_cast<std::size_t>(dim_));
            hermite_functions(x, col);
            for (int j = 0; j < dim_; ++j) {
                psi(a, j) = col[static_cast<std::size_t>(j)];
            }
        }
    }
    if (!inside.empty()) {
        std::vector<double> batch(inside.size() * static_cast<std::size_t>(dim_));
        kernels::hermite_batch(inside, dim_ - 1, batch);
        for (int j = 0; j < dim_; ++j) {
            for (std::size_t i = 0; i < inside.size(); ++i) {
                psi(inside_idx[i], j) = batch[static_cast<std::size_t>(j) * inside.size() + i];
            }
        }
    }
    const Eigen::Index rank = weights_.size();
    Eigen::VectorXd sqrt_w = weights_.cwiseAbs().cwiseSqrt();
    for (std::size_t b = 0; b < phis.size(); ++b) {
        Eigen::MatrixXcd w(dim_, rank);
        for (int j = 0; j < dim_; ++j) {
            Complex phase = std::polar(1.0, -j * phis[b]);
            for (Eigen::Index r = 0; r < rank; ++r) {
                w(j, r) = vectors_(j, r) * phase * sqrt_w(r);
            }
        }
        Eigen::MatrixXd re = psi * w.real();
        Eigen::MatrixXd im = psi * w.imag();
        for (Eigen::Index a = 0; a < nx; ++a) {
            double p = 0.0;
            for (Eigen::Index r = 0; r < rank; ++r) {
                double mag2 = re(a, r) * re(a, r) + im(a, r) * im(a, r);
                p += weights_(r) < 0.0 ? -mag2 : mag2;
            }
            out[static_cast<std::size_t>(a) * phis.size() + b] = p;
        }
    }
}

double quadrature_density(const DensityMatrix &rho, double x, double phi) {
    QuadratureDensity p(rho.hermitian());
    return std::max(p(x, phi), 0.0);
}

}  // namespace homotomo
