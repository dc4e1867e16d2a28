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

#ifndef GATEBUDGET_SYNTHETIC_H
#define GATEBUDGET_SYNTHETIC_H

#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "gatebudget/device_model.h"
#include "gatebudget/fitting.h"

namespace gatebudget {

/// Standard normal deviates from mt19937_64 via the Box-Muller transform. Unlike
/// std::normal_distribution the sequence is identical on every standard library.
class GaussianSource {
   public:
    explicit GaussianSource(uint64_t seed);
    double next();

   private:
    double uniform();

    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0;
};

struct RbSynthParams {
    double a = 0.7;
    double b = 0.3;
    double p = 0.98;
    std::vector<int> lengths;  // empty: 0, 10, ..., 290
    double noise = 0.01;
};

struct RamseySynthParams {
    double amp = 0.5;
    double gamma2 = 1 / 18.8;
    double gamma_1f = 1 / 28.0;
    /// rad/us.
    double delta = 2 * std::numbers::pi * 0.5;
    double phase = 0;
    double offset = 0.5;
    double t_max_us = 60;
    int points = 301;
    double noise = 0.002;
};

struct ChevronSynthParams {
    double g_mhz = 5;
    /// Flux where the exchange is resonant and the detuning slope around it.
    double flux_center = 0;
    double detuning_mhz_per_flux = 400;
    double flux_min = -0.15;
    double flux_max = 0.15;
    int flux_points = 31;
    double t_max_ns = 400;
    int time_points = 101;
    double noise = 0;
};

struct CouplingSynthParams {
    double flux_min = 0;
    double flux_max = 0.5;
    int points = 41;
    /// MHz.
    double noise = 0.1;
};

std::vector<int> default_rb_lengths();

XYDataset synth_rb(const RbSynthParams &p, uint64_t seed);
XYDataset synth_ramsey(const RamseySynthParams &p, uint64_t seed);
ChevronGrid synth_chevron(const ChevronSynthParams &p, uint64_t seed);
XYDataset synth_coupling(const DeviceParams &device, const CouplingSynthParams &p, uint64_t seed);

}  // namespace gatebudget

#endif
