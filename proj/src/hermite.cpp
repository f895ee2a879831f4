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

#include "homotomo/hermite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "homotomo/errors.hpp"

namespace homotomo {

namespace {

constexpr double kOdeAbsTol = 1e-300;
constexpr double kOdeRelTol = 1e-13;
constexpr int kRescaleBits = 600;

using OdeState = std::array<double, 2>;

struct IrregularOde {
    double energy2;  // 2k + 1
    void operator()(const OdeState &s, OdeState &ds, double x) const {
        ds[0] = s[1];
        ds[1] = (x * x - energy2) * s[0];
    }
};

void check_index(int k, int max_index) {
    if (k < 0 || k > max_index) {
        throw DomainError("Fock index " + std::to_string(k) + " outside [0, " + std::to_string(max_index) + "]");
    }
}

}  // namespace

void hermite_functions(double x, std::span<double> out) {
    if (!std::isfinite(x)) {
        throw DomainError("hermite_functions: non-finite abscissa");
    }
    if (out.empty()) {
        return;
    }
    // Recurrence on h_k = psi_k exp(x^2/2) with a running power-of-two exponent so that
    // h never overflows; the Gaussian factor is folded back per index.
    const double half_x2 = 0.5 * x * x;
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25);
    int exponent = 0;
    auto emit = [&](std::size_t k) {
        double log_factor = exponent * std::numbers::ln2 - half_x2;
        out[k] = cur * std::exp(log_factor);
    };
    emit(0);
    for (std::size_t k = 0; k + 1 < out.size(); ++k) {
        double kd = static_cast<double>(k);
        double next = std::sqrt(2.0 / (kd + 1.0)) * x * cur - std::sqrt(kd / (kd + 1.0)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > 0x1p500) {
            cur = std::ldexp(cur, -500);
            prev = std::ldexp(prev, -500);
            exponent += 500;
        }
        emit(k + 1);
    }
}

double hermite_function(int k, double x, int max_index) {
    check_index(k, max_index);
    std::vector<double> values(static_cast<std::size_t>(k) + 1);
    hermite_functions(x, values);
    return values.back();
}

void scaled_hermite_functions(double x, std::span<double> out) {
    if (out.empty()) {
        return;
    }
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25);
    out[0] = cur;
    for (std::size_t k = 0; k + 1 < out.size(); ++k) {
        double kd = static_cast<double>(k);
        double next = std::sqrt(2.0 / (kd + 1.0)) * x * cur - std::sqrt(kd / (kd + 1.0)) * prev;
        prev = cur;
        cur = next;
        out[k + 1] = cur;
    }
}

IrregularNode irregular_at_origin(int k) {
    std::vector<double> h(static_cast<std::size_t>(k) + 1);
    scaled_hermite_functions(0.0, h);
    if (k % 2 == 0) {
        // psi_k even: phi_k odd with phi_k'(0) = 2 / psi_k(0).
        return {0.0, 2.0 / h[static_cast<std::size_t>(k)], 0};
    }
    // psi_k odd: phi_k even with phi_k(0) = -2 / psi_k'(0), psi_k'(0) = sqrt(2k) psi_{k-1}(0).
    double dpsi = std::sqrt(2.0 * k) * h[static_cast<std::size_t>(k) - 1];
    return {-2.0 / dpsi, 0.0, 0};
}

void integrate_irregular(int k, double x0, IrregularNode start, std::span<const double> xs,
                         std::span<IrregularNode> out) {
    namespace odeint = boost::numeric::odeint;
    if (xs.size() != out.size()) {
        throw DomainError("integrate_irregular: size mismatch");
    }
    // Pure relative error control: phi spans hundreds of orders of magnitude over the grid.
    auto stepper = odeint::make_controlled(kOdeAbsTol, kOdeRelTol, odeint::runge_kutta_fehlberg78<OdeState>());
    IrregularOde ode{2.0 * k + 1.0};
    OdeState state{start.value, start.derivative};
    int exponent = start.exponent;
    double x = x0;
    double dt = 1e-2;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < x) {
            throw DomainError("integrate_irregular: nodes must be ascending from x0");
        }
        while (xs[i] > x) {
            // Growth over a unit interval stays far below the rescale threshold for |x| <= 40.
            double target = std::min(xs[i], x + 1.0);
            double step = std::min(dt, target - x);
            odeint::integrate_adaptive(stepper, ode, state, x, target, step, [&](const OdeState &, double) {});
            x = target;
            if (std::max(std::abs(state[0]), std::abs(state[1])) > std::ldexp(1.0, kRescaleBits)) {
                state[0] = std::ldexp(state[0], -kRescaleBits);
                state[1] = std::ldexp(state[1], -kRescaleBits);
                exponent += kRescaleBits;
            }
        }
        out[i] = {state[0], state[1], exponent};
    }
}

IrregularValue irregular_wavefunction(int k, double x, int max_index) {
    check_index(k, max_index);
    if (!std::isfinite(x) || std::abs(x) > kIrregularXLimit) {
        throw DomainError("irregular_wavefunction: |x| must be finite and <= " + std::to_string(kIrregularXLimit));
    }
    double ax = std::abs(x);
    IrregularNode node = irregular_at_origin(k);
    if (ax > 0.0) {
        integrate_irregular(k, 0.0, node, std::span<const double>(&ax, 1), std::span<IrregularNode>(&node, 1));
    }
    bool saturated = false;
    auto unscale = [&](double mantissa) {
        if (mantissa == 0.0) {
            return 0.0;
        }
        double log2_mag = std::log2(std::abs(mantissa)) + node.exponent;
        if (log2_mag >= std::log2(kIrregularCap)) {
            saturated = true;
            return std::copysign(kIrregularCap, mantissa);
        }
        return std::ldexp(mantissa, node.exponent);
    };
    double value = unscale(node.value);
    double derivative = unscale(node.derivative);
    if (x < 0.0) {
        // phi_k has parity (-1)^(k+1), its derivative (-1)^k.
        if (k % 2 == 0) {
            value = -value;
        } else {
            derivative = -derivative;
        }
    }
    return {value, derivative, saturated};
}

}  // namespace homotomo
