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

#include "homotomo/wigner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>

#include "homotomo/errors.hpp"

namespace homotomo {

double WignerGridSpec::minimal_half_width(int dim) {
    return std::sqrt(2.0 * dim) + 4.0;
}

double WignerGrid::dq() const {
    return q_axis.size() > 1 ? q_axis[1] - q_axis[0] : 0.0;
}

double WignerGrid::dp() const {
    return p_axis.size() > 1 ? p_axis[1] - p_axis[0] : 0.0;
}

double WignerGrid::total_mass() const {
    return values.sum() * dq() * dp();
}

Complex characteristic_function(const HermitianMatrix &rho, double u, double v) {
    const int dim = rho.dim();
    // exp(-i u Q - i v P) = D(alpha), alpha = (v - i u) / sqrt 2.
    const Complex alpha = Complex(v, -u) / std::numbers::sqrt2;
    const Complex alpha_bar = std::conj(alpha);
    std::vector<Complex> row(static_cast<std::size_t>(dim));
    std::vector<Complex> next(static_cast<std::size_t>(dim));
    row[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) {
        row[static_cast<std::size_t>(n)] = row[static_cast<std::size_t>(n - 1)] * (-alpha_bar) / std::sqrt(double(n));
    }
    Complex total = 0.0;
    for (int m = 0; m < dim; ++m) {
        for (int n = 0; n < dim; ++n) {
            total += rho(n, m) * row[static_cast<std::size_t>(n)];
        }
        if (m + 1 == dim) {
            break;
        }
        // <m+1|D|n> = (sqrt(n) <m|D|n-1> + alpha <m|D|n>) / sqrt(m+1).
        const double inv = 1.0 / std::sqrt(m + 1.0);
        for (int n = 0; n < dim; ++n) {
            Complex acc = alpha * row[static_cast<std::size_t>(n)];
            if (n > 0) {
                acc += std::sqrt(double(n)) * row[static_cast<std::size_t>(n - 1)];
            }
            next[static_cast<std::size_t>(n)] = acc * inv;
        }
        row.swap(next);
    }
    return total;
}

WignerGrid wigner_function(const HermitianMatrix &rho, const WignerGridSpec &spec) {
    const int dim = rho.dim();
    const double need = WignerGridSpec::minimal_half_width(dim);
    const double half = spec.half_width > 0.0 ? spec.half_width : need;
    if (half < need) {
        throw DomainError("wigner grid too small: half width " + std::to_string(half) + " < required " +
                          std::to_string(need) + " for dim " + std::to_string(dim));
    }
    if (spec.points < 8 || spec.points % 2 != 0) {
        throw DomainError("wigner grid needs an even number of points >= 8");
    }
    const int m = spec.points;
    const double dq = 2.0 * half / m;
    const double du = std::numbers::pi / half;

    WignerGrid grid;
    grid.q_axis.resize(static_cast<std::size_t>(m));
    std::vector<double> u_axis(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        grid.q_axis[static_cast<std::size_t>(a)] = (a - m / 2) * dq;
        u_axis[static_cast<std::size_t>(a)] = (a - m / 2) * du;
    }
    grid.p_axis = grid.q_axis;

    Eigen::MatrixXcd chi(m, m);
    for (int b = 0; b < m; ++b) {
        for (int d = 0; d < m; ++d) {
            chi(b, d) = characteristic_function(rho, u_axis[static_cast<std::size_t>(b)],
                                                u_axis[static_cast<std::size_t>(d)]);
        }
    }
    // W(q_a, p_c) = du dv / (4 pi^2) sum_{b,d} chi(u_b, v_d) exp(i (u_b q_a + v_d p_c)).
    Eigen::MatrixXcd kernel(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            kernel(a, b) = std::polar(1.0, u_axis[static_cast<std::size_t>(b)] * grid.q_axis[static_cast<std::size_t>(a)]);
        }
    }
    Eigen::MatrixXcd w = kernel * chi * kernel.transpose();
    w *= du * du / (4.0 * std::numbers::pi * std::numbers::pi);
    const double residue = w.imag().cwiseAbs().maxCoeff();
    if (residue > 1e-9) {
        throw NumericalError("wigner function has imaginary residue " + std::to_string(residue));
    }
    grid.values = w.real();
    return grid;
}

RadonValue radon_transform(const WignerGrid &w, double x, double phi) {
    const int m = static_cast<int>(w.q_axis.size());
    if (m < 2 || w.p_axis.size() != w.q_axis.size()) {
        throw DomainError("radon_transform: malformed grid");
    }
    const double q0 = w.q_axis.front();
    const double p0 = w.p_axis.front();
    const double dq = w.dq();
    const double dp = w.dp();
    const double q_hi = w.q_axis.back();
    const double p_hi = w.p_axis.back();
    const double c = std::cos(phi);
    const double s = std::sin(phi);

    auto inside = [&](double q, double p) { return q >= q0 && q <= q_hi && p >= p0 && p <= p_hi; };
    auto sample = [&](double q, double p) {
        double fq = (q - q0) / dq;
        double fp = (p - p0) / dp;
        int a = std::min(static_cast<int>(fq), m - 2);
        int b = std::min(static_cast<int>(fp), m - 2);
        double tq = fq - a;
        double tp = fp - b;
        return (1 - tq) * (1 - tp) * w.values(a, b) + tq * (1 - tp) * w.values(a + 1, b) +
               (1 - tq) * tp * w.values(a, b + 1) + tq * tp * w.values(a + 1, b + 1);
    };

    const double reach = std::hypot(std::max(-q0, q_hi), std::max(-p0, p_hi));
    const double h = 0.5 * std::min(dq, dp);
    const int steps = static_cast<int>(std::ceil(2.0 * reach / h));
    RadonValue out;
    double sum = 0.0;
    double entry = 0.0;
    double exit = 0.0;
    bool seen = false;
    bool prev_inside = false;
    double prev_value = 0.0;
    for (int i = 0; i <= steps; ++i) {
        double t = -reach + i * h;
        double q = x * c + t * s;
        double p = x * s - t * c;
        if (inside(q, p)) {
            double v = sample(q, p);
            if (!seen) {
                entry = std::abs(v);
                seen = true;
            } else if (prev_inside) {
                sum += 0.5 * (prev_value + v) * h;
            }
            prev_value = v;
            prev_inside = true;
            exit = std::abs(v);
        } else {
            prev_inside = false;
        }
    }
    if (!seen) {
        throw DomainError("radon_transform: line does not intersect the grid");
    }
    out.value = sum;
    out.unaccounted_mass = entry + exit;
    out.warning = out.unaccounted_mass > kRadonMassWarning;
    return out;
}

void write_wigner_csv(const WignerGrid &w, const std::filesystem::path &path) {
    std::ofstream os(path);
    if (!os) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    os << "q,p,W\n";
    char buf[96];
    for (std::size_t a = 0; a < w.q_axis.size(); ++a) {
        for (std::size_t c = 0; c < w.p_axis.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", w.q_axis[a], w.p_axis[c],
                          w.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)));
            os << buf;
        }
    }
    if (!os) {
        throw DataError("failed writing " + path.string());
    }
}

}  // namespace homotomo
