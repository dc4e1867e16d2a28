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

#include "gatebudget/error_budget.h"

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "gatebudget/errors.h"

namespace gatebudget {

namespace {

constexpr double kPi = std::numbers::pi;

double inv(double t) {
    return 1.0 / t;
}

double sq(double x) {
    return x * x;
}

void check_time(double t, const std::string &what) {
    if (std::isnan(t) || !(t > 0)) {
        throw InputError(fmt::format("{} must be positive, got {}", what, t));
    }
}

double gate_us(const GateTiming &timing) {
    return timing.t_g * 1e-3;
}

double idle_us(const GateTiming &timing) {
    return timing.idle() * 1e-3;
}

// Weights on the (modulated |2>-occupant, partner) pair for the CZ kinds.
std::pair<int, int> cz_roles(GateKind kind) {
    if (kind == GateKind::cz20) {
        return {0, 1};
    }
    if (kind == GateKind::cz02) {
        return {1, 0};
    }
    throw InputError("expected a CZ gate kind");
}

double white_rate(const PhaseCoherence &q) {
    return white_dephasing_rate(q.t1_us, q.t2r_us).rate_per_us;
}

double one_over_f_rate(const CoherenceSet &c, int qubit) {
    if (!c.flux_sensitive[qubit]) {
        return 0;
    }
    const auto &t = c.active[qubit].t_phi_1f_us;
    if (!t.has_value()) {
        throw InputError(fmt::format("qubit {} is flux sensitive but has no active 1/f dephasing time", qubit + 1));
    }
    return inv(*t);
}

// First-order uncertainty of f with respect to every coherence time carrying a sigma.
double coherence_sigma(const CoherenceSet &c, const std::function<double(const CoherenceSet &)> &f) {
    CoherenceSet work = c;
    std::vector<std::pair<double *, double>> knobs;
    for (auto *phase : {&work.idle, &work.active}) {
        for (auto &q : *phase) {
            knobs.emplace_back(&q.t1_us, q.t1_sigma_us);
            knobs.emplace_back(&q.t2r_us, q.t2r_sigma_us);
            if (q.t_phi_1f_us.has_value()) {
                knobs.emplace_back(&*q.t_phi_1f_us, q.t_phi_1f_sigma_us);
            }
        }
    }
    double var = 0;
    for (auto [ptr, s] : knobs) {
        if (!(s > 0) || !std::isfinite(*ptr)) {
            continue;
        }
        const double x0 = *ptr;
        const double h = 1e-6 * x0;
        *ptr = x0 + h;
        const double fp = f(work);
        *ptr = x0 - h;
        const double fm = f(work);
        *ptr = x0;
        var += sq((fp - fm) / (2 * h) * s);
    }
    return std::sqrt(var);
}

double scalar_sigma(const std::function<double(double)> &f, double x, double s) {
    if (!(s > 0)) {
        return 0;
    }
    const double h = 1e-6 * std::max(std::abs(x), s);
    return std::abs((f(x + h) - f(x - h)) / (2 * h)) * s;
}

}  // namespace

std::vector<std::string> CoherenceSet::validate() const {
    std::vector<std::string> warnings;
    const char *phase_names[] = {"idle", "active"};
    int phase_index = 0;
    for (const auto *phase : {&idle, &active}) {
        for (int k = 0; k < 2; k++) {
            const PhaseCoherence &q = (*phase)[k];
            const std::string where = fmt::format("qubit {} {}", k + 1, phase_names[phase_index]);
            check_time(q.t1_us, where + " t1_us");
            check_time(q.t2r_us, where + " t2r_us");
            if (q.t_phi_1f_us.has_value()) {
                check_time(*q.t_phi_1f_us, where + " t_phi_1f_us");
            }
            for (double s : {q.t1_sigma_us, q.t2r_sigma_us, q.t_phi_1f_sigma_us}) {
                if (!(s >= 0)) {
                    throw InputError(where + ": uncertainties must be nonnegative");
                }
            }
            if (std::isfinite(q.t1_us) && q.t2r_us > 2 * q.t1_us) {
                if (q.t2r_us > 2.2 * q.t1_us) {
                    throw InputError(fmt::format(
                        "{}: t2r_us = {} exceeds 2 * t1_us = {} by more than 10%", where, q.t2r_us, 2 * q.t1_us));
                }
                warnings.push_back(fmt::format("{}: t2r_us exceeds 2 * t1_us; dephasing rate clamped to 0", where));
            }
        }
        phase_index++;
    }
    for (int k = 0; k < 2; k++) {
        if (flux_sensitive[k] && !active[k].t_phi_1f_us.has_value()) {
            throw InputError(fmt::format("qubit {} is flux sensitive but has no active 1/f dephasing time", k + 1));
        }
    }
    return warnings;
}

CoherenceSet CoherenceSet::with_qubits_swapped() const {
    CoherenceSet out = *this;
    std::swap(out.idle[0], out.idle[1]);
    std::swap(out.active[0], out.active[1]);
    std::swap(out.flux_sensitive[0], out.flux_sensitive[1]);
    return out;
}

CoherenceSet reference_coherence() {
    CoherenceSet c;
    c.idle[0] = {23.9, 13.1, std::nullopt, 5.3, 2.8, 0};
    c.idle[1] = {23.0, 20.0, std::nullopt, 1.5, 0.6, 0};
    c.active[0] = {23.9, 13.1, std::nullopt, 5.3, 2.8, 0};
    c.active[1] = {23.4, 18.8, 28.0, 2.9, 2.3, 4.8};
    c.flux_sensitive = {false, true};
    return c;
}

void GateConfig::validate() const {
    timing.validate();
    if (!std::isfinite(g_mhz) || g_mhz < 0) {
        throw InputError("g_mhz must be finite and nonnegative");
    }
    for (double v : {cond_phase_rad, swap_angle_rad}) {
        if (!std::isfinite(v)) {
            throw InputError("gate angles must be finite");
        }
    }
    for (double v : {cond_phase_sigma_rad, swap_angle_sigma_rad}) {
        if (!(v >= 0)) {
            throw InputError("gate angle uncertainties must be nonnegative");
        }
    }
}

double GateConfig::target_cond_phase() const {
    return is_cz(kind) ? kPi : 0.0;
}

double GateConfig::target_swap_angle() const {
    return is_cz(kind) ? 0.0 : kPi / 2;
}

double GateConfig::delta_phi() const {
    return target_cond_phase() - cond_phase_rad;
}

double GateConfig::delta_theta() const {
    return swap_angle_rad - target_swap_angle();
}

DephasingRate white_dephasing_rate(double t1_us, double t2_us) {
    if (!(t1_us > 0) || !(t2_us > 0)) {
        throw InputError("coherence times must be positive");
    }
    const double r = inv(t2_us) - 0.5 * inv(t1_us);
    if (r < 0) {
        return {0, true};
    }
    return {r, false};
}

double cz_t1_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind) {
    auto [hi, lo] = cz_roles(kind);
    const double idle = 0.4 * (inv(c.idle[0].t1_us) + inv(c.idle[1].t1_us)) * idle_us(timing);
    const double gate = (0.5 * inv(c.active[hi].t1_us) + 0.3 * inv(c.active[lo].t1_us)) * gate_us(timing);
    return idle + gate;
}

double cz_dephasing_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind) {
    auto [hi, lo] = cz_roles(kind);
    const double idle = 0.4 * (white_rate(c.idle[0]) + white_rate(c.idle[1])) * idle_us(timing);
    const double gate = (61.0 / 80 * white_rate(c.active[hi]) + 29.0 / 80 * white_rate(c.active[lo])) * gate_us(timing);
    return idle + gate;
}

double cz_one_over_f_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind) {
    auto [hi, lo] = cz_roles(kind);
    const double t = gate_us(timing);
    return 61.0 / 80 * sq(one_over_f_rate(c, hi) * t) + 29.0 / 80 * sq(one_over_f_rate(c, lo) * t);
}

double iswap_t1_error(const CoherenceSet &c, const GateTiming &timing) {
    double r = 0;
    for (int k = 0; k < 2; k++) {
        r += 0.4 * (inv(c.idle[k].t1_us) * idle_us(timing) + inv(c.active[k].t1_us) * gate_us(timing));
    }
    return r;
}

double iswap_dephasing_error(const CoherenceSet &c, const GateTiming &timing) {
    double r = 0;
    for (int k = 0; k < 2; k++) {
        r += 0.4 * (white_rate(c.idle[k]) * idle_us(timing) + white_rate(c.active[k]) * gate_us(timing));
    }
    return r;
}

double iswap_one_over_f_error(const CoherenceSet &c, const GateTiming &timing, bool exact) {
    const double x = (sq(one_over_f_rate(c, 0)) + sq(one_over_f_rate(c, 1))) * sq(gate_us(timing));
    if (!exact) {
        return 0.4 * x;
    }
    return -0.5 * std::expm1(-x / 2) - 0.15 * std::expm1(-x);
}

double t1_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind) {
    return is_cz(kind) ? cz_t1_error(c, timing, kind) : iswap_t1_error(c, timing);
}

double dephasing_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind) {
    return is_cz(kind) ? cz_dephasing_error(c, timing, kind) : iswap_dephasing_error(c, timing);
}

double one_over_f_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind) {
    return is_cz(kind) ? cz_one_over_f_error(c, timing, kind) : iswap_one_over_f_error(c, timing, false);
}

double amplitude_error(double delta_theta) {
    return 0.4 * (3 + std::cos(delta_theta)) * sq(std::sin(delta_theta / 2));
}

double phase_error(double delta_phi) {
    // 1 - cos x = 2 sin^2(x / 2) avoids cancellation for small angles.
    return 0.6 * sq(std::sin(delta_phi / 2));
}

void LeakageFit::validate() const {
    if (!(p > 0 && p <= 1)) {
        throw InputError(fmt::format("leakage fit p must lie in (0, 1], got {}", p));
    }
    if (!(b >= 0 && b <= 1)) {
        throw InputError(fmt::format("leakage fit b must lie in [0, 1], got {}", b));
    }
}

double leakage_from_fit(const LeakageFit &fit) {
    fit.validate();
    return (1 - fit.b) * (1 - fit.p);
}

GateLeakage gate_leakage(double l_ref, double l_int) {
    if (!(l_ref >= 0 && l_ref < 1) || !(l_int >= 0 && l_int < 1)) {
        throw DomainError("leakage rates must lie in [0, 1)");
    }
    const double v = 1 - (1 - l_int) / (1 - l_ref);
    return {v, v < 0};
}

double rb_error_from_decay(double p, int d) {
    if (d < 2) {
        throw InputError("dimension must be at least 2");
    }
    if (!(p > 0 && p <= 1)) {
        throw DomainError("RB decay parameter must lie in (0, 1]");
    }
    return (d - 1.0) / d * (1 - p);
}

double rb_decay_from_error(double r, int d) {
    if (d < 2) {
        throw InputError("dimension must be at least 2");
    }
    return 1 - r * d / (d - 1.0);
}

double irb_gate_error(double p_ref, double p_int, int d) {
    if (d < 2) {
        throw InputError("dimension must be at least 2");
    }
    if (!(p_ref > 0 && p_ref <= 1) || !(p_int > 0 && p_int <= 1)) {
        throw DomainError("RB decay parameters must lie in (0, 1]");
    }
    return (d - 1.0) / d * (1 - p_int / p_ref);
}

const BudgetEntry &ErrorBudget::entry(const std::string &channel) const {
    for (const auto &e : entries) {
        if (e.channel == channel) {
            return e;
        }
    }
    throw InputError("no budget channel named " + channel);
}

double ErrorBudget::incoherent_fraction() const {
    return total > 0 ? incoherent / total : 0.0;
}

ErrorBudget assemble_budget(const CoherenceSet &c, const GateConfig &gate, double leakage, double leakage_sigma) {
    gate.validate();
    ErrorBudget out;
    out.warnings = c.validate();
    if (!(leakage >= 0 && leakage < 1)) {
        throw InputError(fmt::format("leakage must lie in [0, 1), got {}", leakage));
    }
    if (!(leakage_sigma >= 0)) {
        throw InputError("leakage uncertainty must be nonnegative");
    }
    for (int k = 0; k < 2; k++) {
        for (const auto *q : {&c.idle[k], &c.active[k]}) {
            if (white_dephasing_rate(q->t1_us, q->t2r_us).clamped) {
                out.warnings.push_back(fmt::format("qubit {}: white dephasing rate clamped to 0", k + 1));
            }
        }
    }

    const GateTiming &timing = gate.timing;
    const GateKind kind = gate.kind;
    const std::string name(gate_kind_name(kind));
    auto f_t1 = [&](const CoherenceSet &x) { return t1_error(x, timing, kind); };
    auto f_wh = [&](const CoherenceSet &x) { return dephasing_error(x, timing, kind); };
    auto f_1f = [&](const CoherenceSet &x) { return one_over_f_error(x, timing, kind); };
    auto f_inc = [&](const CoherenceSet &x) { return f_t1(x) + f_wh(x) + f_1f(x); };

    const bool cz = is_cz(kind);
    out.entries.push_back(
        {"t1", f_t1(c), coherence_sigma(c, f_t1), 0,
         cz ? name + " relaxation: 2/5 per qubit over t_w; 1/2 and 3/10 over t_g"
            : name + " relaxation: 2/5 per qubit over t_w and t_g"});
    out.entries.push_back(
        {"t_phi_white", f_wh(c), coherence_sigma(c, f_wh), 0,
         cz ? name + " white dephasing: 2/5 per qubit over t_w; 61/80 and 29/80 over t_g"
            : name + " white dephasing: 2/5 per qubit over t_w and t_g"});
    out.entries.push_back(
        {"t_phi_1f", f_1f(c), coherence_sigma(c, f_1f), 0,
         cz ? name + " 1/f dephasing: 61/80 and 29/80 on (t_g / T_phi_1f)^2"
            : name + " 1/f dephasing: 2/5 on (t_g / T_phi_1f)^2"});

    const double dtheta = gate.delta_theta();
    const double dphi = gate.delta_phi();
    out.entries.push_back(
        {"amplitude", amplitude_error(dtheta), scalar_sigma(amplitude_error, dtheta, gate.swap_angle_sigma_rad), 0,
         "swap angle: (2/5)(3 + cos dtheta) sin^2(dtheta / 2)"});
    out.entries.push_back(
        {"phase", phase_error(dphi), scalar_sigma(phase_error, dphi, gate.cond_phase_sigma_rad), 0,
         "conditional phase: (3/10)(1 - cos dphi)"});
    out.entries.push_back({"leakage", leakage, leakage_sigma, 0, "leakage RB: 1 - (1 - L_int) / (1 - L_ref)"});

    out.incoherent = out.entries[0].error + out.entries[1].error + out.entries[2].error;
    out.coherent = out.entries[3].error + out.entries[4].error + out.entries[5].error;
    out.total = out.incoherent + out.coherent;
    out.incoherent_sigma = coherence_sigma(c, f_inc);
    out.coherent_sigma = std::sqrt(sq(out.entries[3].sigma) + sq(out.entries[4].sigma) + sq(out.entries[5].sigma));
    out.total_sigma = std::hypot(out.incoherent_sigma, out.coherent_sigma);
    for (auto &e : out.entries) {
        e.fraction = out.total > 0 ? e.error / out.total : 0.0;
    }
    return out;
}

}  // namespace gatebudget
