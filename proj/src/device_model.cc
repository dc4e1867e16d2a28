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

#include "gatebudget/device_model.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "gatebudget/errors.h"

namespace gatebudget {

namespace {

constexpr double kResonanceTolGhz = 1e-9;
constexpr double kPhaseTol = 1e-10;

double transmon_frequency_from_ej(double ej, double ec, FrequencyModel model) {
    if (!(ej > 2 * ec)) {
        throw DomainError(
            "transmon regime requires EJ > 2 EC (EJ=" + std::to_string(ej) + " GHz, EC=" + std::to_string(ec) +
            " GHz)");
    }
    double f = std::sqrt(8 * ej * ec) - ec;
    if (model == FrequencyModel::xi_corrected) {
        double xi = std::sqrt(2 * ec / ej);
        f -= ec * xi / 4;
    }
    return f;
}

TransmonParams from_sum_ratio(double ej_sum, double ratio, double ec) {
    TransmonParams p;
    p.ejl = ej_sum / (1 + ratio);
    p.ejs = ej_sum - p.ejl;
    p.ec = ec;
    return p;
}

}  // namespace

void TransmonParams::validate() const {
    if (!(ejs > 0 && ejl > 0 && ec > 0)) {
        throw InputError("transmon energies must be positive");
    }
    if (ejs > ejl) {
        throw InputError("small-junction energy ejs must not exceed ejl");
    }
}

void DeviceParams::validate() const {
    qubit1.validate();
    qubit2.validate();
    coupler.validate();
    if (!(f01_1_ghz > 0 && f01_2_ghz > 0)) {
        throw InputError("qubit frequencies must be positive");
    }
}

double flux_to_phase(double flux) {
    return 2 * std::numbers::pi * flux;
}

double phase_to_flux(double phi) {
    return phi / (2 * std::numbers::pi);
}

double effective_josephson_energy(const TransmonParams &p, double phi_e) {
    double sq = p.ejs * p.ejs + p.ejl * p.ejl + 2 * p.ejs * p.ejl * std::cos(phi_e);
    // Rounding can push the radicand a hair below zero for ejs == ejl at phi_e = pi.
    return std::sqrt(std::max(sq, 0.0));
}

double junction_phase_offset(const TransmonParams &p, double phi_e) {
    double k = (p.ejs - p.ejl) / (p.ejs + p.ejl);
    if (k == 0) {
        return 0;
    }
    double u = phi_e / 2;
    // Lift of atan(k tan u) that is continuous where tan u diverges.
    double turns = std::round(u / std::numbers::pi);
    return std::atan(k * std::tan(u)) + (k > 0 ? 1 : -1) * std::numbers::pi * turns;
}

double transmon_frequency(const TransmonParams &p, double phi_e, FrequencyModel model) {
    return transmon_frequency_from_ej(effective_josephson_energy(p, phi_e), p.ec, model);
}

TransmonParams calibrate_from_extrema(
    double f_max_ghz, double f_min_ghz, double anharmonicity_ghz, FrequencyModel model) {
    if (!(f_min_ghz > 0) || !(anharmonicity_ghz < 0)) {
        throw InputError("calibration needs f_min > 0 and a negative anharmonicity");
    }
    if (f_max_ghz < f_min_ghz) {
        throw InputError("calibration needs f_max >= f_min");
    }
    if (f_max_ghz == f_min_ghz) {
        throw CalibrationError("equal frequency extrema imply a vanishing small junction; inversion is singular");
    }
    const double ec = -anharmonicity_ghz;

    // Bare-model inversion gives the starting point; it is exact for FrequencyModel::bare.
    double ej_max = std::pow(f_max_ghz + ec, 2) / (8 * ec);
    double ej_min = std::pow(f_min_ghz + ec, 2) / (8 * ec);
    std::array<double, 2> x{ej_max, (ej_max - ej_min) / (ej_max + ej_min)};

    auto residual = [&](const std::array<double, 2> &v) -> std::array<double, 2> {
        TransmonParams p = from_sum_ratio(v[0], v[1], ec);
        return {
            transmon_frequency(p, 0, model) - f_max_ghz,
            transmon_frequency(p, std::numbers::pi, model) - f_min_ghz,
        };
    };
    auto norm = [](const std::array<double, 2> &r) {
        return std::max(std::abs(r[0]), std::abs(r[1]));
    };
    auto admissible = [&](const std::array<double, 2> &v) {
        // ejl - ejs must stay above 2 EC so the lower extremum is still a transmon.
        if (!(v[0] > 0 && v[1] > 0 && v[1] <= 1)) {
            return false;
        }
        TransmonParams p = from_sum_ratio(v[0], v[1], ec);
        return p.ejl - p.ejs > 2 * ec;
    };
    if (!admissible(x)) {
        throw CalibrationError("frequency extrema have no solution in the transmon regime");
    }

    auto r = residual(x);
    for (int iter = 0; iter < 100 && norm(r) > 1e-13; iter++) {
        double jac[2][2];
        for (int j = 0; j < 2; j++) {
            double h = 1e-7 * std::max(1.0, std::abs(x[j]));
            auto xp = x;
            auto xm = x;
            xp[j] += h;
            xm[j] -= h;
            auto rp = residual(xp);
            auto rm = residual(xm);
            jac[0][j] = (rp[0] - rm[0]) / (2 * h);
            jac[1][j] = (rp[1] - rm[1]) / (2 * h);
        }
        double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if (det == 0 || !std::isfinite(det)) {
            throw CalibrationError("singular Jacobian during calibration");
        }
        std::array<double, 2> step{
            (jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            (-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        };
        double damping = 1;
        bool accepted = false;
        for (int k = 0; k < 40; k++) {
            std::array<double, 2> trial{x[0] - damping * step[0], x[1] - damping * step[1]};
            if (admissible(trial)) {
                auto rt = residual(trial);
                if (norm(rt) < norm(r)) {
                    x = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            damping /= 2;
        }
        if (!accepted) {
            break;
        }
    }
    if (!(norm(r) <= 1e-6)) {
        throw CalibrationError("calibration did not reproduce the frequency extrema");
    }
    return from_sum_ratio(x[0], x[1], ec);
}

double coupler_frequency(const DeviceParams &d, double phi_ec) {
    return transmon_frequency(d.coupler, phi_ec, FrequencyModel::xi_corrected);
}

double coupling_at_coupler_frequency(const DeviceParams &d, double fc_ghz, double fc_ref_ghz) {
    double gprod = d.coupling.gprod0_mhz2;
    if (d.coupling.scaling == CouplingScaling::sqrt_coupler_frequency) {
        gprod *= fc_ghz / fc_ref_ghz;
    }
    const double fc = fc_ghz * 1e3;
    double mediated = 0;
    for (double fq_ghz : {d.f01_1_ghz, d.f01_2_ghz}) {
        double delta = fc_ghz - fq_ghz;
        if (std::abs(delta) < kResonanceTolGhz) {
            throw DomainError("coupler resonant with a qubit; dispersive coupling is singular");
        }
        double fq = fq_ghz * 1e3;
        mediated += 1 / (fc - fq) + 1 / (fc + fq);
    }
    return d.coupling.g12_mhz - 0.5 * gprod * mediated;
}

double qubit_qubit_coupling(const DeviceParams &d, double phi_ec) {
    double fc = coupler_frequency(d, phi_ec);
    double fc_ref = coupler_frequency(d, flux_to_phase(d.coupling.ref_flux));
    return coupling_at_coupler_frequency(d, fc, fc_ref);
}

double find_zero_coupling(const DeviceParams &d, double lo, double hi) {
    if (!(lo < hi)) {
        throw InputError("zero-coupling bracket must satisfy lo < hi");
    }
    double a = lo;
    double b = hi;
    double ga = qubit_qubit_coupling(d, a);
    double gb = qubit_qubit_coupling(d, b);
    if (ga == 0) {
        return a;
    }
    if (gb == 0) {
        return b;
    }
    if ((ga > 0) == (gb > 0)) {
        throw BracketError("net coupling does not change sign over the bracket");
    }
    bool bisect_next = false;
    for (int iter = 0; iter < 400 && b - a > kPhaseTol; iter++) {
        double width = b - a;
        double x = 0.5 * (a + b);
        if (!bisect_next) {
            double secant = b - gb * (b - a) / (gb - ga);
            if (secant > a + 1e-3 * width && secant < b - 1e-3 * width) {
                x = secant;
            }
        }
        double gx = qubit_qubit_coupling(d, x);
        if (gx == 0) {
            return x;
        }
        if ((gx > 0) == (ga > 0)) {
            a = x;
            ga = gx;
        } else {
            b = x;
            gb = gx;
        }
        // Force a bisection whenever the secant step failed to halve the bracket.
        bisect_next = !bisect_next && (b - a) > 0.5 * width;
    }
    return std::abs(ga) < std::abs(gb) ? a : b;
}

DeviceParams reference_device() {
    DeviceParams d;
    d.qubit1 = calibrate_from_extrema(4.576, 3.989, -0.203, FrequencyModel::bare);
    d.qubit2 = calibrate_from_extrema(4.415, 3.773, -0.203, FrequencyModel::bare);
    d.coupler = calibrate_from_extrema(3.597, 1.044, -0.130, FrequencyModel::xi_corrected);
    d.f01_1_ghz = 4.576;
    d.f01_2_ghz = 4.415;
    d.coupling.g12_mhz = -7.45;
    d.coupling.gprod0_mhz2 = 104.55 * 104.55;
    d.coupling.ref_flux = 0.212;
    d.coupling.scaling = CouplingScaling::sqrt_coupler_frequency;
    return d;
}

}  // namespace gatebudget
