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

#include <boost/math/special_functions/legendre.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "homotomo/errors.hpp"
#include "homotomo/metrics.hpp"
#include "homotomo/states.hpp"

namespace homotomo {
namespace {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int points) {
    Rule r;
    std::vector<double> pos = boost::math::legendre_p_zeros<double>(points);
    auto weight = [&](double x) {
        double d = boost::math::legendre_p_prime<double>(points, x);
        return 2.0 / ((1.0 - x * x) * d * d);
    };
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
        if (*it != 0.0) {
            r.nodes.push_back(-*it);
            r.weights.push_back(weight(*it));
        }
    }
    for (double x : pos) {
        r.nodes.push_back(x);
        r.weights.push_back(weight(x));
    }
    return r;
}

const Rule &cached_rule(int points) {
    static thread_local std::vector<std::unique_ptr<Rule>> cache;
    if (cache.size() <= static_cast<std::size_t>(points)) {
        cache.resize(static_cast<std::size_t>(points) + 1);
    }
    auto &slot = cache[static_cast<std::size_t>(points)];
    if (!slot) {
        slot = std::make_unique<Rule>(gauss_legendre(points));
    }
    return *slot;
}

enum class Kind { total_variation, hellinger, kl };

QuadratureSpec resolved(QuadratureSpec spec) {
    if (!(spec.x_max > 0.0) || spec.panel_points < 2 || spec.phi_points < 1 || spec.panels < 0) {
        throw DomainError("quadrature needs x_max > 0, panel_points >= 2, phi_points >= 1 and panels >= 0");
    }
    if (spec.panels == 0) {
        spec.panels = static_cast<int>(std::ceil(2.0 * spec.x_max / QuadratureSpec::kDefaultPanelWidth));
    }
    return spec;
}

double integrand(Kind kind, double p, double q) {
    switch (kind) {
        case Kind::total_variation:
            return std::abs(p - q);
        case Kind::hellinger: {
            double d = std::sqrt(p) - std::sqrt(q);
            return d * d;
        }
        case Kind::kl:
            if (p <= 0.0) {
                return 0.0;
            }
            return q > 0.0 ? p * std::log(p / q) : std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

/// Pointwise densities plus a batched evaluator on tensor grids (out[a * phis + b]).
struct Evaluator {
    PhaseSpaceDensity p;
    PhaseSpaceDensity q;
    std::function<void(const std::vector<double> &, const std::vector<double> &, std::vector<double> &,
                       std::vector<double> &)>
        grid;
};

struct Integrals {
    double value = 0.0;
    double mass_p = 0.0;
    double mass_q = 0.0;
    bool negative = false;
};

/// Locations in (a, b) where the integrand may fail to be smooth at fixed phi.
void find_kinks(Kind kind, const Evaluator &ev, double phi, const std::vector<double> &xs,
                const std::vector<double> &pv, const std::vector<double> &qv, std::vector<double> &kinks) {
    auto dens = [&](int which, double x) { return which == 0 ? ev.p(x, phi) : ev.q(x, phi); };
    const std::size_t n = xs.size();
    if (kind == Kind::total_variation) {
        auto d = [&](double x) { return ev.p(x, phi) - ev.q(x, phi); };
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double a = pv[i] - qv[i], b = pv[i + 1] - qv[i + 1];
            if (a * b < 0.0) {
                std::uintmax_t iters = 80;
                auto r = boost::math::tools::toms748_solve(d, xs[i], xs[i + 1], a, b,
                                                           boost::math::tools::eps_tolerance<double>(50), iters);
                kinks.push_back(0.5 * (r.first + r.second));
            }
        }
        return;
    }
    for (int which = 0; which < 2; ++which) {
        const std::vector<double> &v = which == 0 ? pv : qv;
        double top = *std::max_element(v.begin(), v.end());
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (v[i] <= v[i - 1] && v[i] <= v[i + 1] && v[i] < 1e-3 * top && v[i] > 0.0) {
                auto f = [&](double x) { return dens(which, x); };
                auto m = boost::math::tools::brent_find_minima(f, xs[i - 1], xs[i + 1], 40);
                if (m.second < 1e-10 * top) {
                    kinks.push_back(m.first);
                }
            }
        }
    }
}

Integrals integrate(Kind kind, const Evaluator &ev, const QuadratureSpec &raw) {
    QuadratureSpec spec = resolved(raw);
    const Rule &rx = cached_rule(spec.panel_points);
    const Rule &rp = cached_rule(spec.phi_points);
    const double width = 2.0 * spec.x_max / spec.panels;
    const std::size_t m = rx.nodes.size();
    std::vector<double> xs, wx;
    xs.reserve(m * static_cast<std::size_t>(spec.panels));
    for (int k = 0; k < spec.panels; ++k) {
        double lo = -spec.x_max + k * width;
        for (std::size_t t = 0; t < m; ++t) {
            xs.push_back(lo + 0.5 * width * (rx.nodes[t] + 1.0));
            wx.push_back(0.5 * width * rx.weights[t]);
        }
    }
    std::vector<double> phis(rp.nodes.size()), wphi(rp.nodes.size());
    for (std::size_t b = 0; b < phis.size(); ++b) {
        phis[b] = 0.5 * std::numbers::pi * (rp.nodes[b] + 1.0);
        wphi[b] = 0.5 * rp.weights[b];  // includes the 1/pi of the reference measure
    }
    std::vector<double> pg(xs.size() * phis.size()), qg(pg.size());
    ev.grid(xs, phis, pg, qg);

    Integrals out;
    std::vector<double> pv(xs.size()), qv(xs.size()), kinks;
    for (std::size_t b = 0; b < phis.size(); ++b) {
        for (std::size_t a = 0; a < xs.size(); ++a) {
            pv[a] = pg[a * phis.size() + b];
            qv[a] = qg[a * phis.size() + b];
            if (!(pv[a] >= 0.0) || !(qv[a] >= 0.0)) {
                out.negative = true;
            }
        }
        if (out.negative) {
            return out;
        }
        double line = 0.0, line_p = 0.0, line_q = 0.0;
        for (std::size_t a = 0; a < xs.size(); ++a) {
            line += wx[a] * integrand(kind, pv[a], qv[a]);
            line_p += wx[a] * pv[a];
            line_q += wx[a] * qv[a];
        }
        kinks.clear();
        if (kind != Kind::kl) {
            find_kinks(kind, ev, phis[b], xs, pv, qv, kinks);
        }
        std::sort(kinks.begin(), kinks.end());
        for (std::size_t i = 0; i < kinks.size();) {
            int panel = std::clamp(static_cast<int>((kinks[i] + spec.x_max) / width), 0, spec.panels - 1);
            double lo = -spec.x_max + panel * width, hi = lo + width;
            std::vector<double> cuts = {lo};
            while (i < kinks.size() && kinks[i] < hi) {
                if (kinks[i] > cuts.back()) {
                    cuts.push_back(kinks[i]);
                }
                ++i;
            }
            cuts.push_back(hi);
            const std::size_t base = static_cast<std::size_t>(panel) * m;
            for (std::size_t t = 0; t < m; ++t) {
                line -= wx[base + t] * integrand(kind, pv[base + t], qv[base + t]);
            }
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                double h = cuts[c + 1] - cuts[c];
                for (std::size_t t = 0; t < m; ++t) {
                    double x = cuts[c] + 0.5 * h * (rx.nodes[t] + 1.0);
                    double p = std::max(ev.p(x, phis[b]), 0.0), q = std::max(ev.q(x, phis[b]), 0.0);
                    line += 0.5 * h * rx.weights[t] * integrand(kind, p, q);
                }
            }
        }
        out.value += wphi[b] * line;
        out.mass_p += wphi[b] * line_p;
        out.mass_q += wphi[b] * line_q;
    }
    return out;
}

Evaluator from_pair(const DensityPair &pair) {
    Evaluator ev{pair.p, pair.q, {}};
    ev.grid = [&pair](const std::vector<double> &xs, const std::vector<double> &phis, std::vector<double> &p,
                      std::vector<double> &q) {
        for (std::size_t a = 0; a < xs.size(); ++a) {
            for (std::size_t b = 0; b < phis.size(); ++b) {
                p[a * phis.size() + b] = pair.p(xs[a], phis[b]);
                q[a * phis.size() + b] = pair.q(xs[a], phis[b]);
            }
        }
    };
    return ev;
}

double checked(Kind kind, const DensityPair &pair, const QuadratureSpec &spec) {
    Integrals r = integrate(kind, from_pair(pair), spec);
    if (r.negative) {
        throw DomainError("densities must be non-negative and finite");
    }
    if (std::abs(r.mass_p - 1.0) > kNormalizationTolerance || std::abs(r.mass_q - 1.0) > kNormalizationTolerance) {
        throw DomainError("densities are not normalized on the quadrature domain (masses " +
                          std::to_string(r.mass_p) + ", " + std::to_string(r.mass_q) + ")");
    }
    return r.value;
}

QuadratureSpec doubled(const QuadratureSpec &spec) {
    QuadratureSpec d = resolved(spec);
    d.panels *= 2;
    d.phi_points *= 2;
    return d;
}

double state_distance(Kind kind, const HermitianMatrix &a, const HermitianMatrix &b, QuadratureSpec spec) {
    if (spec.x_max == 0.0) {
        spec.x_max = QuadratureSpec::for_dimension(std::max(a.dim(), b.dim())).x_max;
    }
    auto qa = std::make_shared<QuadratureDensity>(a);
    auto qb = std::make_shared<QuadratureDensity>(b);
    Evaluator ev;
    ev.p = [qa](double x, double phi) { return std::max((*qa)(x, phi), 0.0); };
    ev.q = [qb](double x, double phi) { return std::max((*qb)(x, phi), 0.0); };
    ev.grid = [qa, qb](const std::vector<double> &xs, const std::vector<double> &phis, std::vector<double> &p,
                       std::vector<double> &q) {
        qa->evaluate_grid(xs, phis, p);
        qb->evaluate_grid(xs, phis, q);
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = std::max(p[i], 0.0);
            q[i] = std::max(q[i], 0.0);
        }
    };
    return integrate(kind, ev, spec).value;
}

ComplexMatrix padded_difference(const HermitianMatrix &a, const HermitianMatrix &b) {
    int dim = std::max(a.dim(), b.dim());
    return a.resized(dim).matrix() - b.resized(dim).matrix();
}

}  // namespace

QuadratureSpec QuadratureSpec::for_dimension(int dim) {
    QuadratureSpec s;
    s.x_max = std::sqrt(2.0 * std::max(dim, 1)) + 6.0;
    return s;
}

double trace_distance(const HermitianMatrix &a, const HermitianMatrix &b) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(padded_difference(a, b), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double hs_distance(const HermitianMatrix &a, const HermitianMatrix &b) {
    return padded_difference(a, b).norm();
}

double total_variation(const DensityPair &pair, const QuadratureSpec &spec) {
    return checked(Kind::total_variation, pair, spec);
}

double hellinger(const DensityPair &pair, const QuadratureSpec &spec) {
    return std::sqrt(std::max(checked(Kind::hellinger, pair, spec), 0.0));
}

double kl_divergence(const DensityPair &pair, const QuadratureSpec &spec) {
    return checked(Kind::kl, pair, spec);
}

RefinedDistance total_variation_refined(const DensityPair &pair, const QuadratureSpec &spec) {
    double v = total_variation(pair, spec);
    return {v, std::abs(total_variation(pair, doubled(spec)) - v)};
}

RefinedDistance hellinger_refined(const DensityPair &pair, const QuadratureSpec &spec) {
    double v = hellinger(pair, spec);
    return {v, std::abs(hellinger(pair, doubled(spec)) - v)};
}

double total_variation(const HermitianMatrix &a, const HermitianMatrix &b, QuadratureSpec spec) {
    return state_distance(Kind::total_variation, a, b, spec);
}

double hellinger(const HermitianMatrix &a, const HermitianMatrix &b, QuadratureSpec spec) {
    return std::sqrt(std::max(state_distance(Kind::hellinger, a, b, spec), 0.0));
}

}  // namespace homotomo
