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

#ifndef GATEBUDGET_ERROR_BUDGET_H
#define GATEBUDGET_ERROR_BUDGET_H

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gatebudget/lindblad_engine.h"
#include "gatebudget/pulse_shapes.h"

namespace gatebudget {

constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// Coherence times of one qubit during one phase of the gate, in us. `t_phi_1f_us` is
/// only meaningful while the flux pulse is on. Sigmas are 1-sigma uncertainties.
struct PhaseCoherence {
    double t1_us = kInfiniteTime;
    double t2r_us = kInfiniteTime;
    std::optional<double> t_phi_1f_us;
    double t1_sigma_us = 0;
    double t2r_sigma_us = 0;
    double t_phi_1f_sigma_us = 0;
};

struct CoherenceSet {
    /// Index 0 is qubit 1.
    std::array<PhaseCoherence, 2> idle;
    std::array<PhaseCoherence, 2> active;
    /// A qubit away from its sweet spot picks up 1/f dephasing while it is modulated.
    std::array<bool, 2> flux_sensitive{false, false};

    /// Throws InputError for nonpositive times or T2R above 2 T1 by more than 10%.
    /// Returns warnings for smaller T2R > 2 T1 violations.
    std::vector<std::string> validate() const;
    CoherenceSet with_qubits_swapped() const;
};

/// Measured coherence of the two-qubit device used for the 64 ns worked example.
CoherenceSet reference_coherence();

struct GateConfig {
    GateKind kind = GateKind::cz20;
    /// Exchange coupling in MHz (linear frequency).
    double g_mhz = 0;
    GateTiming timing;
    /// Measured conditional phase and swap angle, in rad.
    double cond_phase_rad = 0;
    double swap_angle_rad = 0;
    double cond_phase_sigma_rad = 0;
    double swap_angle_sigma_rad = 0;

    void validate() const;
    /// pi for the CZ kinds, 0 for iSWAP.
    double target_cond_phase() const;
    /// 0 for the CZ kinds, pi / 2 for iSWAP.
    double target_swap_angle() const;
    double delta_phi() const;
    double delta_theta() const;
};

struct DephasingRate {
    double rate_per_us = 0;
    bool clamped = false;
};

/// Gamma_phi = 1 / T2 - 1 / (2 T1), clamped at zero.
DephasingRate white_dephasing_rate(double t1_us, double t2_us);

double cz_t1_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind);
double cz_dephasing_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind);
/// Leading-order 1/f error. Qubits that are not flux sensitive contribute nothing; a
/// flux-sensitive qubit without an active 1/f time raises InputError.
double cz_one_over_f_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind);

double iswap_t1_error(const CoherenceSet &c, const GateTiming &timing);
double iswap_dephasing_error(const CoherenceSet &c, const GateTiming &timing);
/// `exact` selects 13/20 - exp(-G^2 t^2 / 2) / 2 - 3 exp(-G^2 t^2) / 20 with
/// G^2 = G_1^2 + G_2^2; otherwise the leading term (2/5) G^2 t^2.
double iswap_one_over_f_error(const CoherenceSet &c, const GateTiming &timing, bool exact);

double t1_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind);
double dephasing_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind);
double one_over_f_error(const CoherenceSet &c, const GateTiming &timing, GateKind kind);

/// (2/5) (3 + cos dtheta) sin^2(dtheta / 2).
double amplitude_error(double delta_theta);
/// (3/10) (1 - cos dphi).
double phase_error(double delta_phi);

/// Parameters of the subspace population model P = b + a p^N.
struct LeakageFit {
    double a = 0;
    double b = 1;
    double p = 1;

    void validate() const;
};

/// (1 - b)(1 - p).
double leakage_from_fit(const LeakageFit &fit);

struct GateLeakage {
    double value = 0;
    /// Set when the interleaved leakage is below the reference (value < 0).
    bool negative = false;
};

/// 1 - (1 - L_int) / (1 - L_ref). Throws DomainError if either input is >= 1 or < 0.
GateLeakage gate_leakage(double l_ref, double l_int);

/// (d - 1) / d (1 - p).
double rb_error_from_decay(double p, int d);
double rb_decay_from_error(double r, int d);
/// (d - 1) / d (1 - p_int / p_ref).
double irb_gate_error(double p_ref, double p_int, int d);

struct BudgetEntry {
    std::string channel;
    double error = 0;
    double sigma = 0;
    double fraction = 0;
    std::string provenance;
};

struct ErrorBudget {
    std::vector<BudgetEntry> entries;
    double incoherent = 0;
    double coherent = 0;
    double total = 0;
    double incoherent_sigma = 0;
    double coherent_sigma = 0;
    double total_sigma = 0;
    std::vector<std::string> warnings;

    const BudgetEntry &entry(const std::string &channel) const;
    double incoherent_fraction() const;
};

/// Channel order: t1, t_phi_white, t_phi_1f (incoherent), amplitude, phase, leakage
/// (coherent). Uncertainties are propagated to first order assuming independent inputs.
ErrorBudget assemble_budget(
    const CoherenceSet &c, const GateConfig &gate, double leakage, double leakage_sigma = 0);

}  // namespace gatebudget

#endif
