// Copyright 2026 The gatebudget Authors
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

#include "gatebudget/verification.h"

#include <cmath>

#include <fmt/format.h>

#include "gatebudget/errors.h"

namespace gatebudget {

namespace {

std::vector<double> log_grid(const VerifyOptions &o) {
    if (o.points < 2 || !(o.x_min > 0) || !(o.x_max > o.x_min)) {
        throw InputError("verification grid needs at least 2 points over a positive increasing range");
    }
    std::vector<double> xs;
    for (int i = 0; i < o.points; i++) {
        xs.push_back(o.x_min * std::pow(o.x_max / o.x_min, static_cast<double>(i) / (o.points - 1)));
    }
    return xs;
}

struct LinearFit {
    Eigen::VectorXd coef;
    double residual = 0;
};

LinearFit fit_through_origin(const Eigen::MatrixXd &design, const Eigen::VectorXd &y) {
    // Columns are rescaled to unit norm so the normal problem stays well conditioned.
    Eigen::VectorXd scale = design.colwise().norm().transpose();
    Eigen::MatrixXd a = design * scale.cwiseInverse().asDiagonal();
    Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
    LinearFit out;
    out.coef = c.cwiseQuotient(scale);
    out.residual = (a * c - y).norm() / y.norm();
    return out;
}

CoefficientCheck finish(
    std::string label, double target, double extracted, double residual, const VerifyOptions &o, double tol) {
    CoefficientCheck c;
    c.label = std::move(label);
    c.target = target * (1 + o.target_perturbation);
    c.extracted = extracted;
    c.relative_error = std::abs(extracted - c.target) / std::abs(c.target);
    c.tolerance = tol;
    c.fit_residual = residual;
    c.passed = c.relative_error <= tol && residual <= o.residual_threshold;
    if (residual > o.residual_threshold) {
        c.detail = fmt::format("fit residual {:.3g} above threshold {:.3g}", residual, o.residual_threshold);
    } else if (!c.passed) {
        c.detail = fmt::format("relative error {:.3g} above tolerance {:.3g}", c.relative_error, tol);
    }
    return c;
}

}  // namespace

double analytic_coefficient(GateKind kind, ChannelKind channel, int subsystem) {
    if (subsystem != 0 && subsystem != 1) {
        throw InputError("subsystem must be 0 or 1");
    }
    if (kind == GateKind::iswap) {
        return 0.4;
    }
    // Weight on the qubit that visits |2>, then on its partner.
    const int hi = kind == GateKind::cz20 ? 0 : 1;
    const bool on_hi = subsystem == hi;
    switch (channel) {
        case ChannelKind::relaxation:
            return on_hi ? 0.5 : 0.3;
        case ChannelKind::dephasing:
        case ChannelKind::dephasing_1f:
            return on_hi ? 61.0 / 80 : 29.0 / 80;
    }
    throw InputError("unknown channel");
}

double simulated_infidelity(
    GateKind kind, std::span<const NoiseChannel> channels, double g, int rk4_steps, TimeDependentMode mode) {
    const std::vector<int> dims = gate_dims(kind);
    const ComplexMatrix h = gate_hamiltonian(kind, g);
    const double t = gate_time_us(kind, g);
    bool time_dependent = false;
    for (const auto &c : channels) {
        time_dependent |= c.kind == ChannelKind::dephasing_1f;
    }
    Superoperator s;
    if (time_dependent) {
        TimeDependentLiouvillian td = build_time_dependent_liouvillian(h, dims, channels);
        s = propagate_time_dependent([&](double x) { return td.at(x); }, dims, t, rk4_steps, mode);
    } else {
        s = propagate(build_liouvillian(h, dims, channels), t);
    }
    if (is_cz(kind)) {
        s = project_computational(s);
    }
    return 1 - average_gate_fidelity(s, ideal_gate_unitary(kind));
}

std::string channel_label(GateKind kind, ChannelKind channel, int subsystem) {
    const char *name = channel == ChannelKind::relaxation ? "relaxation"
                       : channel == ChannelKind::dephasing ? "dephasing"
                                                           : "1/f dephasing";
    return fmt::format("{} {} q{}", gate_kind_name(kind), name, subsystem + 1);
}

CoefficientCheck verify_coefficient(GateKind kind, ChannelKind channel, int subsystem, const VerifyOptions &o) {
    const std::vector<double> xs = log_grid(o);
    const double t = gate_time_us(kind, o.g);
    const bool quadratic_law = channel == ChannelKind::dephasing_1f;
    Eigen::MatrixXd design(xs.size(), 2);
    Eigen::VectorXd y(xs.size());
    for (size_t i = 0; i < xs.size(); i++) {
        NoiseChannel ch{channel, subsystem, xs[i] / t};
        std::vector<NoiseChannel> channels{ch};
        y(i) = simulated_infidelity(kind, channels, o.g, o.rk4_steps);
        const double u = quadratic_law ? xs[i] * xs[i] : xs[i];
        design(i, 0) = u;
        design(i, 1) = u * u;
    }
    LinearFit fit = fit_through_origin(design, y);
    return finish(
        channel_label(kind, channel, subsystem), analytic_coefficient(kind, channel, subsystem), fit.coef(0),
        fit.residual, o, o.tolerance);
}

CoefficientCheck verify_combined_form(const VerifyOptions &o) {
    const std::vector<double> xs = log_grid(o);
    const double t = gate_time_us(GateKind::cz20, o.g);
    // Directions in (Gamma_1,1, Gamma_1,2, Gamma_phi,1, Gamma_phi,2).
    const double rays[][4] = {{1, 1, 0, 0}, {1, 1, 1, 1}, {1, 0, 0, 1}, {0, 1, 2, 0}, {1, 0.5, 0.3, 0.7}};
    const int n = static_cast<int>(std::size(rays) * xs.size());
    Eigen::MatrixXd design(n, 5);
    Eigen::VectorXd y(n);
    int row = 0;
    for (const auto &ray : rays) {
        for (double x : xs) {
            const double g11 = ray[0] * x / t, g12 = ray[1] * x / t;
            const double gp1 = ray[2] * x / t, gp2 = ray[3] * x / t;
            std::vector<NoiseChannel> channels{
                {ChannelKind::relaxation, 0, g11},
                {ChannelKind::relaxation, 1, g12},
                {ChannelKind::dephasing, 0, gp1},
                {ChannelKind::dephasing, 1, gp2}};
            y(row) = simulated_infidelity(GateKind::cz20, channels, o.g);
            const double x1 = (g11 + g12) * t;
            const double x2 = (61.0 / 80 * (gp1 + g11 / 2) + 29.0 / 80 * (gp2 + g12 / 2)) * t;
            design.row(row) << x1, x2, x1 * x1, x1 * x2, x2 * x2;
            row++;
        }
    }
    LinearFit fit = fit_through_origin(design, y);
    CoefficientCheck c = finish("CZ20 combined form, Gamma_1 sum", 19.0 / 160, fit.coef(0), fit.residual, o, 0.01);
    if (c.detail.empty()) {
        c.detail = fmt::format("Gamma_2 weight {:.6f} (expected 1)", fit.coef(1));
    }
    return c;
}

OneOverFComparison compare_iswap_one_over_f(double gamma_t, const VerifyOptions &o) {
    const double t = gate_time_us(GateKind::iswap, o.g);
    std::vector<NoiseChannel> channels{{ChannelKind::dephasing_1f, 0, gamma_t / t}};
    OneOverFComparison out;
    out.gamma_t = gamma_t;
    out.runge_kutta4 =
        simulated_infidelity(GateKind::iswap, channels, o.g, o.rk4_steps, TimeDependentMode::runge_kutta4);
    out.integral_exponent =
        simulated_infidelity(GateKind::iswap, channels, o.g, o.rk4_steps, TimeDependentMode::integral_exponent);
    const double x = gamma_t * gamma_t;
    out.closed_form = -0.5 * std::expm1(-x / 2) - 0.15 * std::expm1(-x);
    return out;
}

CoefficientCheck verify_iswap_one_over_f(const VerifyOptions &o) {
    OneOverFComparison cmp = compare_iswap_one_over_f(0.05, o);
    CoefficientCheck c = finish("iSWAP 1/f exact form at Gamma t = 0.05", cmp.closed_form, cmp.runge_kutta4, 0, o, o.tolerance);
    c.detail += fmt::format(
        "{}rk4 - integral = {:.3g}, rk4 - closed = {:.3g}", c.detail.empty() ? "" : "; ", cmp.runge_kutta4 - cmp.integral_exponent,
        cmp.runge_kutta4 - cmp.closed_form);
    return c;
}

std::vector<ChannelSelector> standard_channels() {
    std::vector<ChannelSelector> out;
    for (GateKind kind : {GateKind::cz20, GateKind::cz02, GateKind::iswap}) {
        for (ChannelKind ch : {ChannelKind::relaxation, ChannelKind::dephasing}) {
            for (int q = 0; q < 2; q++) {
                out.push_back({kind, ch, q});
            }
        }
    }
    return out;
}

std::vector<CoefficientCheck> verify_all(const VerifyOptions &o) {
    std::vector<CoefficientCheck> out;
    for (const auto &s : standard_channels()) {
        out.push_back(verify_coefficient(s.kind, s.channel, s.subsystem, o));
    }
    out.push_back(verify_combined_form(o));
    out.push_back(verify_iswap_one_over_f(o));
    return out;
}

}  // namespace gatebudget
