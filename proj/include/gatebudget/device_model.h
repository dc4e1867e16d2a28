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

#ifndef GATEBUDGET_DEVICE_MODEL_H
#define GATEBUDGET_DEVICE_MODEL_H

#include <utility>

namespace gatebudget {

/// Junction and charging energies of a SQUID-tunable transmon, all in GHz.
/// By convention the small junction is `ejs <= ejl`.
struct TransmonParams {
    double ejs = 0;
    double ejl = 0;
    double ec = 0;

    void validate() const;
};

/// Which transmon frequency expression to use.
///
/// `bare` is sqrt(8 EJ EC) - EC. `xi_corrected` subtracts an additional
/// EC * xi / 4 with xi = sqrt(2 EC / EJ); it is the model used for the coupler.
enum class FrequencyModel { bare, xi_corrected };

/// How the qubit-coupler couplings g1c, g2c follow the coupler frequency.
enum class CouplingScaling {
    /// g_jc(phi) = g_jc(ref) * sqrt(f_c(phi) / f_c(ref)), so the product scales linearly in f_c.
    sqrt_coupler_frequency,
    /// g_jc independent of flux.
    constant,
};

struct CouplingParams {
    double g12_mhz = 0;
    /// Product g1c * g2c at the reference coupler flux, MHz^2.
    double gprod0_mhz2 = 0;
    /// Reference coupler flux in units of the flux quantum.
    double ref_flux = 0;
    CouplingScaling scaling = CouplingScaling::sqrt_coupler_frequency;
};

struct DeviceParams {
    TransmonParams qubit1;
    TransmonParams qubit2;
    TransmonParams coupler;
    CouplingParams coupling;
    /// Qubit 0-1 transition frequencies at the operating bias, GHz.
    double f01_1_ghz = 0;
    double f01_2_ghz = 0;

    void validate() const;
};

/// Effective EJ of a two-junction SQUID at external phase `phi_e` (radians).
double effective_josephson_energy(const TransmonParams &p, double phi_e);

/// Phase offset of the effective junction; continuous in `phi_e` across odd multiples of pi.
double junction_phase_offset(const TransmonParams &p, double phi_e);

/// 0-1 transition frequency in GHz. Throws DomainError unless EJ(phi_e) > 2 EC.
double transmon_frequency(const TransmonParams &p, double phi_e, FrequencyModel model);

/// Inverts the frequency model from the two flux extrema.
///
/// EC is pinned at |anharmonicity| and (EJs + EJl, EJs / EJl) are found by damped Newton
/// iteration with a finite-difference Jacobian. The returned parameters reproduce both
/// extrema to 1e-6 GHz or CalibrationError is thrown.
TransmonParams calibrate_from_extrema(double f_max_ghz, double f_min_ghz, double anharmonicity_ghz, FrequencyModel model);

/// Coupler frequency (xi-corrected model) at coupler phase `phi_ec`, GHz.
double coupler_frequency(const DeviceParams &d, double phi_ec);

/// Net qubit-qubit coupling for an explicitly given coupler frequency, MHz.
///
/// `fc_ref_ghz` is the coupler frequency at the reference flux and only matters for
/// `CouplingScaling::sqrt_coupler_frequency`. Throws DomainError when the coupler is
/// resonant with either qubit.
double coupling_at_coupler_frequency(const DeviceParams &d, double fc_ghz, double fc_ref_ghz);

/// Net qubit-qubit coupling g(phi_ec) in MHz: direct coupling minus the coupler-mediated
/// second-order exchange (rotating and counter-rotating terms).
double qubit_qubit_coupling(const DeviceParams &d, double phi_ec);

/// Coupler phase in [lo, hi] where the net coupling vanishes.
///
/// Bracketed bisection with secant refinement; absolute phase tolerance 1e-10 rad.
/// Throws BracketError when the coupling has the same sign at both ends.
double find_zero_coupling(const DeviceParams &d, double lo, double hi);

/// Converts a flux in units of the flux quantum to an external phase and back.
double flux_to_phase(double flux);
double phase_to_flux(double phi);

/// Two flux-tunable transmons and a floating tunable coupler, calibrated from measured
/// spectroscopy extrema. Qubits sit at their upper sweet spots; the coupling constants
/// are referenced to the coupler idle bias of 0.212 flux quanta.
DeviceParams reference_device();

}  // namespace gatebudget

#endif
