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

#include "gatebudget/synthetic.h"

#include <cmath>
#include <numbers>

#include "gatebudget/errors.h"
#include "gatebudget/lindblad_engine.h"

namespace gatebudget {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) {
        throw InputError("grids need at least 2 points");
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; i++) {
        out[i] = lo + (hi - lo) * i / (n - 1);
    }
    return out;
}

void check_noise(double sigma) {
    if (!(sigma >= 0)) {
        throw InputError("noise level must be nonnegative");
    }
}

}  // namespace

GaussianSource::GaussianSource(uint64_t seed) : engine_(seed) {
}

double GaussianSource::uniform() {
    // 53 random bits mapped to (0, 1].
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianSource::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2 * std::log(uniform()));
    const double theta = 2 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::vector<int> default_rb_lengths() {
    std::vector<int> out;
    for (int k = 0; k < 30; k++) {
        out.push_back(10 * k);
    }
    return out;
}

XYDataset synth_rb(const RbSynthParams &p, uint64_t seed) {
    check_noise(p.noise);
    GaussianSource noise(seed);
    XYDataset d;
    for (int n : p.lengths.empty() ? default_rb_lengths() : p.lengths) {
        if (n < 0) {
            throw InputError("sequence lengths must be nonnegative");
        }
        d.x.push_back(n);
        d.y.push_back(p.b + p.a * std::pow(p.p, n) + p.noise * noise.next());
    }
    return d;
}

XYDataset synth_ramsey(const RamseySynthParams &p, uint64_t seed) {
    check_noise(p.noise);
    GaussianSource noise(seed);
    XYDataset d;
    d.x = linspace(0, p.t_max_us, p.points);
    for (double t : d.x) {
        d.y.push_back(ramsey_model(t, p.amp, p.gamma2, p.gamma_1f, p.delta, p.phase, p.offset) + p.noise * noise.next());
    }
    return d;
}

ChevronGrid synth_chevron(const ChevronSynthParams &p, uint64_t seed) {
    check_noise(p.noise);
    GaussianSource noise(seed);
    ChevronGrid g;
    g.flux = linspace(p.flux_min, p.flux_max, p.flux_points);
    g.time_ns = linspace(0, p.t_max_ns, p.time_points);
    g.population.resize(p.time_points, p.flux_points);
    // Column-major fill: one flux column after another.
    for (int j = 0; j < p.flux_points; j++) {
        const double det = p.detuning_mhz_per_flux * (g.flux[j] - p.flux_center);
        for (int i = 0; i < p.time_points; i++) {
            g.population(i, j) = chevron_population(p.g_mhz, det, g.time_ns[i]) + p.noise * noise.next();
        }
    }
    return g;
}

XYDataset synth_coupling(const DeviceParams &device, const CouplingSynthParams &p, uint64_t seed) {
    check_noise(p.noise);
    GaussianSource noise(seed);
    XYDataset d;
    d.x = linspace(p.flux_min, p.flux_max, p.points);
    for (double flux : d.x) {
        d.y.push_back(qubit_qubit_coupling(device, flux_to_phase(flux)) + p.noise * noise.next());
    }
    return d;
}

}  // namespace gatebudget
