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

#ifndef GATEBUDGET_CONFIG_H
#define GATEBUDGET_CONFIG_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gatebudget/device_model.h"
#include "gatebudget/error_budget.h"

namespace gatebudget {

constexpr int kSchemaVersion = 1;

/// Exactly one of the three forms is set after parsing.
struct LeakageInput {
    std::optional<double> value;
    std::optional<double> l_ref;
    std::optional<double> l_int;
    std::optional<LeakageFit> reference_fit;
    std::optional<LeakageFit> interleaved_fit;
    double sigma = 0;

    /// Gate leakage in [0, 1). Negative gate leakage is reported and clamped to zero.
    double resolve(std::vector<std::string> *warnings = nullptr) const;
};

/// One gate time of a sweep with everything already merged onto the base config.
struct SweepPoint {
    GateConfig gate;
    CoherenceSet coherence;
    LeakageInput leakage;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    DeviceParams device;
    CoherenceSet coherence;
    GateConfig gate;
    LeakageInput leakage;
    /// Set when the file has a "sweep" key, even an empty one.
    std::optional<std::vector<SweepPoint>> sweep;
    /// "source:line: /sweep", for messages about the sweep as a whole.
    std::string sweep_location;
    uint64_t seed = 0;
    std::vector<std::string> warnings;
};

/// Parses and validates a config document. `source` names the document in messages,
/// which read "source:line: /json/pointer: reason". Throws InputError.
RunConfig parse_config(const std::string &text, const std::string &source = "<config>");
RunConfig load_config(const std::string &path);

/// Config reproducing the 64 ns worked example, leakage included.
RunConfig reference_config();

}  // namespace gatebudget

#endif
