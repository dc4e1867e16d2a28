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

#ifndef GATEBUDGET_VERIFICATION_H
#define GATEBUDGET_VERIFICATION_H

#include <span>
#include <string>
#include <vector>

#include "gatebudget/lindblad_engine.h"

namespace gatebudget {

struct VerifyOptions {
    /// Exchange rate used for the simulations, rad/us.
    double g = 1.0;
    /// Log-spaced Gamma * t_gate grid.
    int points = 9;
    double x_min = 1e-4;
    double x_max = 1e-2;
    double tolerance = 0.005;
    /// Maximum rms fit residual relative to the rms data.
    double residual_threshold = 1e-3;
    /// Negative-control hook: every analytic target is multiplied by (1 + this).
    double target_perturbation = 0;
    int rk4_steps = 2000;
};

struct CoefficientCheck {
    std::string label;
    double target = 0;
    double extracted = 0;
    double relative_error = 0;
    double tolerance = 0;
    double fit_residual = 0;
    bool passed = false;
    std::string detail;
};

/// Leading-order coefficient of 1 - F in Gamma * t_gate for one channel: 1/2, 3/10 (CZ20
/// relaxation), 61/80, 29/80 (CZ20 dephasing), the same with qubits exchanged for CZ02,
/// and 2/5 for every iSWAP relaxation and dephasing channel. For `dephasing_1f` the
/// coefficient multiplies (Gamma t_gate)^2.
double analytic_coefficient(GateKind kind, ChannelKind channel, int subsystem);

/// 1 - F of the simulated gate at its nominal duration, projected to the qubit space for
/// the CZ kinds. Channels with 1/f dephasing are propagated by `mode`.
double simulated_infidelity(
    GateKind kind, std::span<const NoiseChannel> channels, double g, int rk4_steps = 2000,
    TimeDependentMode mode = TimeDependentMode::runge_kutta4);

/// Fits 1 - F = c x + q x^2 over the Gamma * t grid with a single channel active.
/// The quadratic term absorbs the second-order bias; c is compared to the target.
CoefficientCheck verify_coefficient(
    GateKind kind, ChannelKind channel, int subsystem, const VerifyOptions &options = {});

/// CZ20 infidelity rewritten over (Gamma_1,1 + Gamma_1,2) and the total dephasing
/// rates Gamma_2,k: the Gamma_1 coefficient must come out as 19/160. Fitted jointly over
/// rays mixing relaxation and dephasing on both qubits.
CoefficientCheck verify_combined_form(const VerifyOptions &options = {});

struct OneOverFComparison {
    double gamma_t = 0;
    double runge_kutta4 = 0;
    double integral_exponent = 0;
    double closed_form = 0;
};

/// iSWAP with one 1/f channel on qubit 1 at Gamma * t_gate = gamma_t.
OneOverFComparison compare_iswap_one_over_f(double gamma_t, const VerifyOptions &options = {});

/// RK4 against the closed form at Gamma t = 0.05.
CoefficientCheck verify_iswap_one_over_f(const VerifyOptions &options = {});

struct ChannelSelector {
    GateKind kind;
    ChannelKind channel;
    int subsystem;
};

/// The twelve single-channel checks: CZ20 and CZ02 (relaxation and dephasing on each
/// qubit) followed by the four iSWAP channels.
std::vector<ChannelSelector> standard_channels();

std::string channel_label(GateKind kind, ChannelKind channel, int subsystem);

/// Every single-channel check, then the combined form, then the iSWAP 1/f check.
std::vector<CoefficientCheck> verify_all(const VerifyOptions &options = {});

}  // namespace gatebudget

#endif
