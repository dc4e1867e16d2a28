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

#include "gatebudget/pulse_shapes.h"

#include <cmath>
#include <numbers>

#include "gatebudget/errors.h"

namespace gatebudget {

void GateTiming::validate() const {
    if (!(t_g >= 0 && t_wl >= 0 && t_wr >= 0 && t_r >= 0)) {
        throw InputError("gate timing values must be nonnegative");
    }
    if (t_g < 2 * t_r) {
        throw InputError("active pulse length t_g must be at least twice the rise time");
    }
}

double erf_sigma(const GateTiming &timing) {
    return (timing.t_r / 2) / (2 * std::sqrt(2 * std::numbers::ln2));
}

double erf_envelope(double t_ns, const GateTiming &timing) {
    const double t1 = timing.t_r / 2;
    const double t2 = timing.t_g - t1;
    const double sigma = erf_sigma(timing);
    const double rise = t_ns - t1 - timing.t_wl;
    const double fall = t_ns - t2 - timing.t_wl;
    if (sigma == 0) {
        // Hard-edged limit of the erf pair.
        auto step = [](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); };
        return 0.5 * (step(rise) - step(fall));
    }
    return 0.5 * (std::erf(rise / sigma) - std::erf(fall / sigma));
}

double flux_pulse_waveform(const FluxPulse &pulse, double t_ns) {
    const GateTiming &tm = pulse.timing;
    if (t_ns < tm.t_wl || t_ns > tm.total() + tm.t_wr) {
        return 0;
    }
    double value = pulse.amplitude * erf_envelope(t_ns, tm);
    if (pulse.mod_freq_mhz != 0) {
        value *= std::cos(2 * std::numbers::pi * pulse.mod_freq_mhz * 1e-3 * t_ns);
    }
    return value;
}

std::vector<WaveformSample> sample_waveform(const FluxPulse &pulse, double samples_per_ns) {
    if (!(samples_per_ns > 0)) {
        throw InputError("sample rate must be positive");
    }
    pulse.timing.validate();
    const double dt = 1 / samples_per_ns;
    const auto n = static_cast<long>(std::floor(pulse.timing.total() * samples_per_ns + 1e-9));
    std::vector<WaveformSample> out;
    out.reserve(n + 1);
    for (long k = 0; k <= n; k++) {
        double t = k * dt;
        out.push_back({t, flux_pulse_waveform(pulse, t)});
    }
    return out;
}

}  // namespace gatebudget
