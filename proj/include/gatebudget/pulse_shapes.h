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

#ifndef GATEBUDGET_PULSE_SHAPES_H
#define GATEBUDGET_PULSE_SHAPES_H

#include <vector>

namespace gatebudget {

/// Timing of a two-qubit gate, all in ns.
///
/// The active flux pulse lasts `t_g` (rise + flat + fall) and is padded by idle
/// windows `t_wl` before and `t_wr` after. The full gate length is t_g + t_wl + t_wr.
struct GateTiming {
    double t_g = 0;
    double t_wl = 0;
    double t_wr = 0;
    double t_r = 0;

    double total() const {
        return t_g + t_wl + t_wr;
    }
    double idle() const {
        return t_wl + t_wr;
    }
    void validate() const;
};

struct FluxPulse {
    /// Flux amplitude in units of the flux quantum.
    double amplitude = 0;
    /// Carrier frequency in MHz; 0 gives a baseband (DC) pulse.
    double mod_freq_mhz = 0;
    GateTiming timing;
};

/// Width parameter of the erf edges: (t_r / 2) / (2 sqrt(2 ln 2)).
double erf_sigma(const GateTiming &timing);

/// Flat-top envelope with erf edges. The rising edge is centered at t_wl + t_r/2 and
/// the falling edge at t_wl + t_g - t_r/2.
double erf_envelope(double t_ns, const GateTiming &timing);

/// amplitude * envelope * cos(2 pi f_mod t) on [t_wl, total + t_wr], zero elsewhere.
double flux_pulse_waveform(const FluxPulse &pulse, double t_ns);

struct WaveformSample {
    double t_ns;
    double value;
};

/// Samples the waveform over [0, total] at `samples_per_ns` (endpoints included).
std::vector<WaveformSample> sample_waveform(const FluxPulse &pulse, double samples_per_ns = 1.0);

}  // namespace gatebudget

#endif
