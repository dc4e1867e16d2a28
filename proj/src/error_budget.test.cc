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
#include <numbers>

#include "gtest/gtest.h"

#include "gatebudget/errors.h"

using namespace gatebudget;

namespace {

GateTiming worked_timing() {
    return {48, 8, 8, 4};
}

GateConfig worked_gate() {
    GateConfig g;
    g.kind = GateKind::cz20;
    g.g_mhz = 10.4;
    g.timing = worked_timing();
    g.cond_phase_rad = 3.086;
    g.swap_angle_rad = -0.015;
    return g;
}

CoherenceSet uniform(double t1, double t2) {
    CoherenceSet c;
    for (int k = 0; k < 2; k++) {
        c.idle[k].t1_us = c.active[k].t1_us = t1;
        c.idle[k].t2r_us = c.active[k].t2r_us = t2;
    }
    return c;
}

CoherenceSet scaled(CoherenceSet c, double s) {
    for (auto *phase : {&c.idle, &c.active}) {
        for (auto &q : *phase) {
            q.t1_us *= s;
            q.t2r_us *= s;
            if (q.t_phi_1f_us) {
                *q.t_phi_1f_us *= s;
            }
        }
    }
    return c;
}

}  // namespace

TEST(error_budget, white_dephasing_rate) {
    EXPECT_NEAR(white_dephasing_rate(1e9, 13.1).rate_per_us, 1 / 13.1, 1e-9);
    DephasingRate limited = white_dephasing_rate(10, 20);
    EXPECT_EQ(limited.rate_per_us, 0);
    EXPECT_FALSE(limited.clamped);
    EXPECT_NEAR(white_dephasing_rate(23.9, 13.1).rate_per_us, 0.055415375770545214, 1e-15);
    EXPECT_TRUE(white_dephasing_rate(10, 21).clamped);
    EXPECT_THROW(white_dephasing_rate(0, 1), InputError);
}

TEST(error_budget, cz_t1_error) {
    GateTiming timing = worked_timing();
    EXPECT_EQ(cz_t1_error(CoherenceSet{}, timing, GateKind::cz20), 0);
    EXPECT_NEAR(cz_t1_error(reference_coherence(), timing, GateKind::cz20), 0.0021656120121464856, 1e-15);
    GateTiming no_idle{48, 0, 0, 4};
    EXPECT_NEAR(cz_t1_error(uniform(20, 30), no_idle, GateKind::cz20), 0.8 * 0.048 / 20, 1e-15);
    EXPECT_NEAR(cz_t1_error(reference_coherence(), timing, GateKind::cz02), 0.0021741947822355315, 1e-15);
    EXPECT_THROW(cz_t1_error(uniform(20, 30), timing, GateKind::iswap), InputError);
}

TEST(error_budget, cz_dephasing_error) {
    GateTiming timing = worked_timing();
    EXPECT_EQ(cz_dephasing_error(CoherenceSet{}, timing, GateKind::cz20), 0);
    EXPECT_NEAR(cz_dephasing_error(reference_coherence(), timing, GateKind::cz20), 0.0031174677664495814, 1e-15);
    // T1 -> infinity makes Gamma_phi = 1 / T2.
    GateTiming no_idle{48, 0, 0, 4};
    EXPECT_NEAR(cz_dephasing_error(uniform(kInfiniteTime, 10), no_idle, GateKind::cz20), 9.0 / 8 * 0.1 * 0.048, 1e-15);
}

TEST(error_budget, cz_one_over_f_error) {
    GateTiming timing = worked_timing();
    CoherenceSet c = reference_coherence();
    EXPECT_NEAR(cz_one_over_f_error(c, timing, GateKind::cz20), 29.0 / 80 * std::pow(0.048 / 28, 2), 1e-18);
    EXPECT_NEAR(cz_one_over_f_error(c, timing, GateKind::cz20), 1.0653061224489797e-06, 1e-18);

    CoherenceSet sweet = c;
    sweet.flux_sensitive = {false, false};
    EXPECT_EQ(cz_one_over_f_error(sweet, timing, GateKind::cz20), 0);

    GateTiming doubled = timing;
    doubled.t_g *= 2;
    EXPECT_NEAR(cz_one_over_f_error(c, doubled, GateKind::cz20), 4 * cz_one_over_f_error(c, timing, GateKind::cz20), 1e-20);

    CoherenceSet missing = c;
    missing.active[1].t_phi_1f_us.reset();
    EXPECT_THROW(cz_one_over_f_error(missing, timing, GateKind::cz20), InputError);
}

TEST(error_budget, iswap_errors) {
    GateTiming timing = worked_timing();
    EXPECT_EQ(iswap_t1_error(CoherenceSet{}, timing), 0);
    EXPECT_EQ(iswap_dephasing_error(CoherenceSet{}, timing), 0);
    EXPECT_NEAR(iswap_t1_error(reference_coherence(), timing), 0.0021699033971910088, 1e-15);
    GateTiming no_idle{48, 0, 0, 4};
    EXPECT_NEAR(iswap_t1_error(uniform(20, 30), no_idle), 0.8 * 0.048 / 20, 1e-15);
    EXPECT_NEAR(iswap_dephasing_error(uniform(kInfiniteTime, 10), no_idle), 0.8 * 0.1 * 0.048, 1e-15);
}

TEST(error_budget, iswap_one_over_f_modes) {
    GateTiming timing{48, 0, 0, 4};
    CoherenceSet none;
    EXPECT_EQ(iswap_one_over_f_error(none, timing, true), 0);
    EXPECT_EQ(iswap_one_over_f_error(none, timing, false), 0);

    CoherenceSet c = uniform(100, 100);
    c.flux_sensitive = {true, false};
    c.active[0].t_phi_1f_us = 1e-9;
    EXPECT_NEAR(iswap_one_over_f_error(c, timing, true), 0.65, 1e-15);

    // Gamma t = 0.01.
    c.active[0].t_phi_1f_us = 4.8;
    const double exact = iswap_one_over_f_error(c, timing, true);
    const double lead = iswap_one_over_f_error(c, timing, false);
    EXPECT_NEAR(lead, 0.4 * 1e-4, 1e-18);
    EXPECT_LT(std::abs(exact / lead - 1), 0.01);
    EXPECT_NEAR(exact / lead - 1, -3.4374114602275796e-05, 1e-9);

    GateTiming doubled{96, 0, 0, 4};
    EXPECT_NEAR(iswap_one_over_f_error(c, doubled, false), 4 * lead, 1e-18);
}

TEST(error_budget, coherent_errors) {
    EXPECT_EQ(amplitude_error(0), 0);
    EXPECT_EQ(phase_error(0), 0);
    const double dphi = std::numbers::pi - 3.086;
    EXPECT_NEAR(phase_error(dphi), 4.6346208906148376e-4, 1e-15);
    EXPECT_EQ(std::round(phase_error(dphi) * 1e4), 5);
    EXPECT_NEAR(amplitude_error(-0.015), 8.999578135757647e-05, 1e-15);
    EXPECT_EQ(std::round(amplitude_error(-0.015) * 1e4), 1);
    EXPECT_NEAR(amplitude_error(std::numbers::pi), 0.8, 1e-15);
    EXPECT_NEAR(phase_error(std::numbers::pi), 0.6, 1e-15);
    for (double x = 0.01; x < 6.3; x += 0.37) {
        EXPECT_EQ(amplitude_error(x), amplitude_error(-x));
        EXPECT_EQ(phase_error(x), phase_error(-x));
        EXPECT_LE(amplitude_error(x), 0.8 + 1e-15);
        EXPECT_LE(phase_error(x), 0.6 + 1e-15);
    }
}

TEST(error_budget, leakage) {
    EXPECT_EQ(leakage_from_fit({0.5, 0.3, 1.0}), 0);
    EXPECT_EQ(leakage_from_fit({0.5, 1.0, 0.9}), 0);
    EXPECT_NEAR(leakage_from_fit({0.5, 0.5, 0.998}), 0.001, 1e-15);
    EXPECT_THROW(leakage_from_fit({0.5, 0.5, 1.1}), InputError);

    EXPECT_EQ(gate_leakage(0.001, 0.001).value, 0);
    EXPECT_NEAR(gate_leakage(0.001, 0.0025).value, 0.0015015015015014122, 1e-15);
    EXPECT_NEAR(gate_leakage(0, 0.003).value, 0.003, 1e-15);
    GateLeakage neg = gate_leakage(0.003, 0.001);
    EXPECT_LT(neg.value, 0);
    EXPECT_TRUE(neg.negative);
    EXPECT_THROW(gate_leakage(1, 0.1), DomainError);
}

TEST(error_budget, rb_conversions) {
    EXPECT_EQ(rb_error_from_decay(1, 4), 0);
    EXPECT_EQ(irb_gate_error(0.97, 0.97, 4), 0);
    const double p = rb_decay_from_error(0.0066, 4);
    EXPECT_NEAR(p, 1 - 4.0 / 3 * 0.0066, 1e-15);
    EXPECT_NEAR(rb_error_from_decay(p, 4), 0.0066, 1e-15);
    EXPECT_THROW(irb_gate_error(0, 0.9, 4), DomainError);
}

TEST(error_budget, worked_budget) {
    ErrorBudget b = assemble_budget(reference_coherence(), worked_gate(), 0.0015, 0.0005);
    EXPECT_NEAR(b.entry("t1").error, 0.0021656120121464856, 1e-15);
    EXPECT_NEAR(b.entry("t_phi_white").error, 0.0031174677664495814, 1e-15);
    EXPECT_NEAR(b.entry("t_phi_1f").error, 1.0653061224489797e-06, 1e-18);
    EXPECT_NEAR(b.incoherent, 0.0052841450847185166, 1e-15);
    EXPECT_NEAR(b.coherent, 0.0020534578704190605, 1e-15);
    EXPECT_NEAR(b.total, 0.007337602955137577, 1e-15);
    EXPECT_NEAR(b.total, 0.0069, 0.0010);
    EXPECT_NEAR(b.incoherent, 0.0048, 0.0010);

    double sum = 0, frac = 0;
    for (const auto &e : b.entries) {
        EXPECT_GE(e.error, 0);
        EXPECT_GE(e.sigma, 0);
        sum += e.error;
        frac += e.fraction;
    }
    EXPECT_NEAR(sum, b.total, 1e-12);
    EXPECT_NEAR(frac, 1, 1e-12);
    EXPECT_GT(b.entry("t1").sigma, 0);
    EXPECT_EQ(b.entry("leakage").sigma, 0.0005);
}

TEST(error_budget, sigma_matches_hand_derivative) {
    // Only the active T1 of qubit 1 carries an uncertainty: sigma = (1/2) t_g s / T^2.
    CoherenceSet c = uniform(20, 30);
    c.active[0].t1_sigma_us = 2;
    GateConfig gate = worked_gate();
    ErrorBudget b = assemble_budget(c, gate, 0);
    EXPECT_NEAR(b.entry("t1").sigma, 0.5 * 0.048 * 2 / 400, 1e-10);
}

TEST(error_budget, zero_budget) {
    GateConfig gate = worked_gate();
    gate.cond_phase_rad = std::numbers::pi;
    gate.swap_angle_rad = 0;
    ErrorBudget b = assemble_budget(CoherenceSet{}, gate, 0);
    EXPECT_EQ(b.total, 0);
    for (const auto &e : b.entries) {
        EXPECT_EQ(e.error, 0);
        EXPECT_EQ(e.fraction, 0);
    }
}

TEST(error_budget, linearity_in_inverse_times) {
    CoherenceSet c = reference_coherence();
    GateTiming timing = worked_timing();
    for (GateKind kind : {GateKind::cz20, GateKind::cz02, GateKind::iswap}) {
        for (double s : {0.5, 2.0, 7.0}) {
            CoherenceSet cs = scaled(c, s);
            EXPECT_NEAR(t1_error(cs, timing, kind), t1_error(c, timing, kind) / s, 1e-16);
            EXPECT_NEAR(dephasing_error(cs, timing, kind), dephasing_error(c, timing, kind) / s, 1e-16);
        }
    }
}

TEST(error_budget, index_exchange_symmetry) {
    CoherenceSet c = reference_coherence();
    c.flux_sensitive = {true, true};
    c.active[0].t_phi_1f_us = 40.0;
    GateTiming gate_only{48, 0, 0, 4};
    CoherenceSet sw = c.with_qubits_swapped();
    EXPECT_EQ(cz_t1_error(c, gate_only, GateKind::cz02), cz_t1_error(sw, gate_only, GateKind::cz20));
    EXPECT_EQ(cz_dephasing_error(c, gate_only, GateKind::cz02), cz_dephasing_error(sw, gate_only, GateKind::cz20));
    EXPECT_EQ(cz_one_over_f_error(c, gate_only, GateKind::cz02), cz_one_over_f_error(sw, gate_only, GateKind::cz20));
}

TEST(error_budget, coherence_validation) {
    CoherenceSet c = uniform(10, 21);
    EXPECT_FALSE(c.validate().empty());
    CoherenceSet bad = uniform(10, 23);
    EXPECT_THROW(bad.validate(), InputError);
    CoherenceSet neg = uniform(-1, 1);
    EXPECT_THROW(neg.validate(), InputError);
    EXPECT_TRUE(reference_coherence().validate().empty());
    CoherenceSet missing = reference_coherence();
    missing.active[1].t_phi_1f_us.reset();
    EXPECT_THROW(missing.validate(), InputError);
    EXPECT_THROW(assemble_budget(reference_coherence(), worked_gate(), -0.001), InputError);
}

TEST(error_budget, gate_targets) {
    GateConfig g = worked_gate();
    EXPECT_NEAR(g.delta_phi(), std::numbers::pi - 3.086, 1e-15);
    EXPECT_EQ(g.delta_theta(), -0.015);
    g.kind = GateKind::iswap;
    g.cond_phase_rad = 0;
    g.swap_angle_rad = std::numbers::pi / 2;
    EXPECT_EQ(g.delta_phi(), 0);
    EXPECT_EQ(g.delta_theta(), 0);
}
