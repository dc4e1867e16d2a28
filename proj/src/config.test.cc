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

#include "gatebudget/config.h"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"

#include "gatebudget/errors.h"

using namespace gatebudget;

namespace {

const char *kWorked = R"({
  "schema_version": 1,
  "seed": 42,
  "coherence": {"preset": "reference"},
  "gate": {
    "kind": "CZ20",
    "t_g_ns": 48, "t_wl_ns": 8, "t_wr_ns": 8, "t_r_ns": 4,
    "delta_phi_rad": 0.056,
    "delta_theta_rad": -0.015
  },
  "leakage": {"value": 0.0015}
})";

std::string error_of(const std::string &text) {
    try {
        parse_config(text, "cfg.json");
    } catch (const InputError &e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(config, worked_example) {
    RunConfig c = parse_config(kWorked);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.gate.kind, GateKind::cz20);
    EXPECT_DOUBLE_EQ(c.gate.timing.t_g, 48);
    EXPECT_DOUBLE_EQ(c.gate.timing.t_wr, 8);
    EXPECT_NEAR(c.gate.delta_phi(), 0.056, 1e-15);
    EXPECT_NEAR(c.gate.delta_theta(), -0.015, 1e-15);
    EXPECT_DOUBLE_EQ(c.leakage.resolve(), 0.0015);
    EXPECT_DOUBLE_EQ(c.coherence.active[1].t2r_us, 18.8);
    EXPECT_FALSE(c.sweep.has_value());

    RunConfig r = reference_config();
    EXPECT_NEAR(r.gate.delta_phi(), c.gate.delta_phi(), 1e-15);
    EXPECT_EQ(r.device.coupling.g12_mhz, c.device.coupling.g12_mhz);
}

TEST(config, defaults_are_noise_free) {
    RunConfig c = parse_config(R"({"schema_version": 1, "gate": {"kind": "iSWAP", "g_mhz": 5}})");
    EXPECT_TRUE(std::isinf(c.coherence.idle[0].t1_us));
    EXPECT_NEAR(c.gate.timing.t_g, 50, 1e-12);
    EXPECT_NEAR(c.gate.swap_angle_rad, std::numbers::pi / 2, 1e-15);
    EXPECT_EQ(c.leakage.resolve(), 0);
}

TEST(config, infinite_times_and_overrides) {
    RunConfig c = parse_config(R"({
  "schema_version": 1,
  "coherence": {"preset": "reference", "idle": [{"t1_us": "inf", "t2r_us": "inf"}, {}]},
  "gate": {"t_g_ns": 48},
  "sweep": [
    {"t_g_ns": 60, "coherence": {"active": [{}, {"t_phi_1f_us": 14}]}, "leakage": {"l_ref": 0.001, "l_int": 0.0025}},
    {"t_g_ns": 80}
  ]
})");
    EXPECT_TRUE(std::isinf(c.coherence.idle[0].t1_us));
    EXPECT_DOUBLE_EQ(c.coherence.idle[1].t1_us, 23.0);
    ASSERT_EQ(c.sweep->size(), 2u);
    const SweepPoint &a = (*c.sweep)[0];
    EXPECT_DOUBLE_EQ(a.gate.timing.t_g, 60);
    EXPECT_DOUBLE_EQ(*a.coherence.active[1].t_phi_1f_us, 14);
    EXPECT_NEAR(a.leakage.resolve(), 0.0015015015015014122, 1e-15);
    const SweepPoint &b = (*c.sweep)[1];
    EXPECT_DOUBLE_EQ(*b.coherence.active[1].t_phi_1f_us, 28);
    EXPECT_EQ(b.leakage.resolve(), 0);
}

TEST(config, leakage_from_rb_fits) {
    RunConfig c = parse_config(R"({"schema_version": 1, "gate": {"t_g_ns": 48},
      "leakage": {"reference_fit": {"a": 0.1, "b": 0.9, "p": 0.99},
                  "interleaved_fit": {"a": 0.1, "b": 0.8, "p": 0.99}, "sigma": 1e-4}})");
    EXPECT_NEAR(c.leakage.resolve(), 1 - (1 - 0.002) / (1 - 0.001), 1e-15);
    EXPECT_DOUBLE_EQ(c.leakage.sigma, 1e-4);
}

TEST(config, errors_name_the_line) {
    EXPECT_EQ(error_of(R"({
  "schema_version": 1,
  "gate": {
    "t_g_ns": 48,
    "t_gate_ns": 48
  }
})"),
              "cfg.json:5: /gate/t_gate_ns: unknown key");
    EXPECT_EQ(error_of("{\n\"schema_version\": 2,\n\"gate\": {}}"), "cfg.json:2: /schema_version: unsupported schema version, expected 1");
    EXPECT_EQ(error_of("{\"schema_version\": 1}"), "cfg.json:1: /: missing key \"gate\"");
    EXPECT_EQ(error_of("{\"schema_version\": 1,\n\"gate\": {\"t_g_ns\": 48},\n\"sweep\": [\n{\"t_g_ns\": 1},\n{\"t_wl_ns\": 1}]}"),
              "cfg.json:5: /sweep/1: missing key \"t_g_ns\"");
    EXPECT_EQ(error_of("{\"schema_version\": 1,\n\"gate\": {\"t_g_ns\": \"48\"}}"), "cfg.json:2: /gate/t_g_ns: expected a number");
}

TEST(config, malformed_json_has_line) {
    const std::string e = error_of("{\n\"schema_version\": 1,\n\"gate\": {\"t_g_ns\": 48,}\n}");
    EXPECT_EQ(e.rfind("cfg.json:3: malformed JSON", 0), 0u) << e;
}

TEST(config, flux_sensitive_without_one_over_f_time) {
    const std::string e = error_of(R"({"schema_version": 1,
"coherence": {"active": [{"t1_us": 20}, {"t1_us": 20}], "flux_sensitive": [true, false]},
"gate": {"t_g_ns": 48}})");
    EXPECT_EQ(e.rfind("cfg.json:2: /coherence:", 0), 0u) << e;
}

TEST(config, validation_errors) {
    EXPECT_NE(error_of(R"({"schema_version": 1, "gate": {"t_g_ns": 48}, "leakage": {"value": 1.5}})"), "");
    EXPECT_NE(error_of(R"({"schema_version": 1, "gate": {"t_g_ns": 48}, "leakage": {"value": 0.1, "l_ref": 0}})"), "");
    EXPECT_NE(error_of(R"({"schema_version": 1, "gate": {"kind": "CNOT", "t_g_ns": 48}})"), "");
    EXPECT_NE(error_of(R"({"schema_version": 1, "gate": {"t_g_ns": -1}})"), "");
    EXPECT_NE(error_of(R"({"schema_version": 1, "gate": {"t_g_ns": 48}, "seed": -3})"), "");
    EXPECT_NE(error_of(R"({"schema_version": 1, "gate": {"t_g_ns": 48},
        "coherence": {"idle": [{"t1_us": 10, "t2r_us": 30}, {}]}})"), "");
    EXPECT_NE(error_of(R"({"schema_version": 1, "gate": {"t_g_ns": 48},
        "device": {"qubit1": {"f_max_ghz": 4.5, "ejs_ghz": 3}}})"), "");
    EXPECT_NE(error_of(R"({"schema_version": 1, "gate": {"t_g_ns": 48}, "sweep": {}})"), "");
    EXPECT_THROW(load_config("/nonexistent/cfg.json"), InputError);
}

TEST(config, device_from_extrema) {
    RunConfig c = parse_config(R"({"schema_version": 1, "gate": {"t_g_ns": 48},
      "device": {"qubit1": {"f_max_ghz": 4.576, "f_min_ghz": 3.989, "anharmonicity_ghz": -0.203},
                 "coupling": {"g12_mhz": -7.0, "scaling": "constant"}}})");
    DeviceParams ref = reference_device();
    EXPECT_NEAR(c.device.qubit1.ejl, ref.qubit1.ejl, 1e-12);
    EXPECT_EQ(c.device.coupling.g12_mhz, -7.0);
    EXPECT_EQ(c.device.coupling.scaling, CouplingScaling::constant);
}
