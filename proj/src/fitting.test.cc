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

#include "gatebudget/fitting.h"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"

#include "gatebudget/error_budget.h"
#include "gatebudget/errors.h"
#include "gatebudget/lindblad_engine.h"
#include "gatebudget/synthetic.h"

using namespace gatebudget;

namespace {

constexpr double kPi = std::numbers::pi;

DeviceParams perturbed_guess() {
    DeviceParams guess = reference_device();
    guess.coupling.g12_mhz = -6;
    guess.coupling.gprod0_mhz2 = 9000;
    guess.coupler.ejl *= 1.03;
    return guess;
}

}  // namespace

TEST(fitting, dataset_validation) {
    XYDataset d{{1, 2}, {1}, {}};
    EXPECT_THROW(d.validate(), InputError);
    XYDataset s{{1, 2}, {1, 2}, {1, 0}};
    EXPECT_THROW(s.validate(), InputError);
}

TEST(fitting, exact_model_recovery) {
    XYDataset d;
    for (int i = 0; i < 40; i++) {
        double x = 0.1 * i;
        d.x.push_back(x);
        d.y.push_back(2.5 * std::exp(-0.7 * x) + 0.3);
    }
    const ParamDef defs[] = {{"A", 1}, {"k", 0.3, ParamTransform::square}, {"c", 0}};
    auto model = [](double x, std::span<const double> v) { return v[0] * std::exp(-v[1] * x) + v[2]; };
    FitResult r = least_squares(model, d, defs);
    EXPECT_TRUE(r.converged) << r.status;
    EXPECT_LT(r.residual_norm, 1e-10);
    EXPECT_NEAR(r.param("A"), 2.5, 1e-8);
    EXPECT_NEAR(r.param("k"), 0.7, 1e-8);
    EXPECT_NEAR(r.param("c"), 0.3, 1e-8);
}

TEST(fitting, linear_slope_matches_weighted_closed_form) {
    XYDataset d;
    GaussianSource noise(3);
    for (int i = 1; i <= 25; i++) {
        d.x.push_back(i);
        d.y.push_back(1.7 * i + 0.5 * noise.next());
        d.sigma.push_back(0.2 + 0.05 * i);
    }
    double num = 0, den = 0;
    for (size_t i = 0; i < d.size(); i++) {
        const double w = 1 / (d.sigma[i] * d.sigma[i]);
        num += w * d.x[i] * d.y[i];
        den += w * d.x[i] * d.x[i];
    }
    const ParamDef defs[] = {{"a", 1}};
    FitResult r = least_squares([](double x, std::span<const double> v) { return v[0] * x; }, d, defs);
    EXPECT_NEAR(r.param("a"), num / den, 1e-10);
    // Absolute sigmas: the slope variance is 1 / sum(w x^2).
    EXPECT_NEAR(r.sigma("a"), 1 / std::sqrt(den), 1e-8);
}

TEST(fitting, flat_data_with_decay_model_does_not_crash) {
    XYDataset d;
    for (int i = 0; i < 10; i++) {
        d.x.push_back(i);
        d.y.push_back(0.4);
    }
    const ParamDef defs[] = {{"a", 0.1}, {"b", 0.3}, {"p", 0.9, ParamTransform::unit_interval}};
    auto model = [](double x, std::span<const double> v) { return v[1] + v[0] * std::pow(v[2], x); };
    FitResult r = least_squares(model, d, defs);
    EXPECT_TRUE(std::isfinite(r.residual_norm));
    EXPECT_LE(r.param("p"), 1);

    FitResult rb = fit_rb_decay(d);
    EXPECT_EQ(rb.param("p"), 1);
    EXPECT_NEAR(rb.param("a") + rb.param("b"), 0.4, 1e-15);
}

TEST(fitting, iteration_cap_reports_non_convergence) {
    XYDataset d = synth_rb({}, 42);
    const ParamDef defs[] = {{"a", 0.1}, {"b", 0.9}, {"p", 0.5, ParamTransform::unit_interval}};
    auto model = [](double x, std::span<const double> v) { return v[1] + v[0] * std::pow(v[2], x); };
    LsqOptions o;
    o.max_iterations = 1;
    FitResult r = least_squares(model, d, defs, o);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 1);
    EXPECT_EQ(r.params.size(), 3u);
}

TEST(fitting, model_exceptions_become_large_residuals) {
    XYDataset d{{1, 2, 3, 4}, {1, 2, 3, 4}, {}};
    const ParamDef defs[] = {{"a", 1}};
    auto model = [](double x, std::span<const double> v) {
        if (v[0] > 10) {
            throw DomainError("outside");
        }
        return v[0] * x;
    };
    FitResult r = least_squares(model, d, defs);
    EXPECT_NEAR(r.param("a"), 1, 1e-8);
}

TEST(fitting, rb_seeded_roundtrip) {
    FitResult r = fit_rb_decay(synth_rb({}, 42));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.param("p"), 0.98, 0.002);
    EXPECT_LT(std::abs(r.param("p") - 0.98), 3 * r.sigma("p"));
    EXPECT_NEAR(r.param("a"), 0.7, 0.05);
    EXPECT_NEAR(r.param("b"), 0.3, 0.05);
}

TEST(fitting, rb_noiseless_recovery_and_monotone_consistency) {
    RbSynthParams p;
    p.noise = 0;
    p.p = 0.995;
    FitResult r = fit_rb_decay(synth_rb(p, 1));
    EXPECT_NEAR(r.param("p"), 0.995, 1e-9);
    EXPECT_NEAR(r.param("a"), 0.7, 1e-6);
    EXPECT_LT(r.param("p"), 1);

    RbSynthParams flat = p;
    flat.p = 1;
    FitResult f = fit_rb_decay(synth_rb(flat, 1));
    EXPECT_EQ(f.param("p"), 1);
    EXPECT_NEAR(f.param("a") + f.param("b"), 1.0, 1e-12);
}

TEST(fitting, rb_input_errors) {
    XYDataset few{{0, 1, 2}, {1, 0.9, 0.8}, {}};
    EXPECT_THROW(fit_rb_decay(few), InputError);
    XYDataset frac{{0, 1.5, 2, 3}, {1, 0.9, 0.8, 0.7}, {}};
    EXPECT_THROW(fit_rb_decay(frac), InputError);
}

TEST(fitting, rb_measured_scale_fidelities) {
    const double p_ref = rb_decay_from_error(0.02, 4);
    const double p_int = p_ref * rb_decay_from_error(0.0066, 4);
    RbSynthParams ref;
    ref.p = p_ref;
    ref.noise = 0.002;
    RbSynthParams inter = ref;
    inter.p = p_int;
    FitResult fr = fit_rb_decay(synth_rb(ref, 5));
    FitResult fi = fit_rb_decay(synth_rb(inter, 6));
    const double f_ref = 1 - rb_error_from_decay(fr.param("p"), 4);
    const double f_cz = 1 - irb_gate_error(fr.param("p"), fi.param("p"), 4);
    EXPECT_NEAR(f_ref, 0.9800, 0.0003);
    EXPECT_NEAR(f_cz, 0.9934, 0.0008);
}

TEST(fitting, ramsey_roundtrips) {
    FitResult r = fit_ramsey_modulated(synth_ramsey({}, 42));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.param("gamma2") * 18.8, 1, 0.05);
    EXPECT_NEAR(r.param("gamma_1f") * 28, 1, 0.05);
    EXPECT_NEAR(r.param("delta"), kPi, 0.01);
    EXPECT_TRUE(r.warnings.empty());

    RamseySynthParams z;
    z.noise = 0;
    FitResult e = fit_ramsey_modulated(synth_ramsey(z, 1));
    EXPECT_NEAR(e.param("gamma2") * 18.8, 1, 1e-6);
    EXPECT_NEAR(e.param("gamma_1f") * 28, 1, 1e-6);
    EXPECT_NEAR(e.param("amp"), 0.5, 1e-6);

    RamseySynthParams pure = z;
    pure.gamma_1f = 0;
    pure.noise = 0.002;
    FitResult x = fit_ramsey_modulated(synth_ramsey(pure, 2));
    EXPECT_NEAR(x.param("gamma2") * 18.8, 1, 0.02);
}

TEST(fitting, ramsey_noise_within_three_sigma) {
    for (uint64_t seed : {1, 2, 3, 4}) {
        FitResult r = fit_ramsey_modulated(synth_ramsey({}, seed));
        EXPECT_LT(std::abs(r.param("gamma2") - 1 / 18.8), 3 * r.sigma("gamma2")) << seed;
        EXPECT_LT(std::abs(r.param("gamma_1f") - 1 / 28.0), 3 * r.sigma("gamma_1f")) << seed;
    }
}

TEST(fitting, ramsey_unit_rescaling) {
    XYDataset us = synth_ramsey({}, 9);
    XYDataset ns = us;
    for (double &t : ns.x) {
        t *= 1e3;
    }
    FitResult a = fit_ramsey_modulated(us);
    FitResult b = fit_ramsey_modulated(ns);
    EXPECT_NEAR(b.param("gamma2") * 1e3 / a.param("gamma2"), 1, 1e-6);
    EXPECT_NEAR(b.param("gamma_1f") * 1e3 / a.param("gamma_1f"), 1, 1e-6);
    EXPECT_NEAR(b.param("delta") * 1e3 / a.param("delta"), 1, 1e-8);
    EXPECT_NEAR(a.residual_norm, b.residual_norm, 1e-9 * a.residual_norm);
}

TEST(fitting, ramsey_warnings) {
    RamseySynthParams p;
    p.t_max_us = 10;
    p.points = 101;
    FitResult r = fit_ramsey_modulated(synth_ramsey(p, 4));
    bool low = false;
    for (const auto &w : r.warnings) {
        low |= w.find("low confidence") != std::string::npos;
    }
    EXPECT_TRUE(low);

    RamseySynthParams fast;
    fast.noise = 0;
    fast.delta = 2 * kPi * 4.0;
    fast.points = 241;  // 0.25 us spacing, Nyquist 2 MHz
    RamseyFitOptions o;
    o.nominal_delta = fast.delta;
    FitResult a = fit_ramsey_modulated(synth_ramsey(fast, 4), o);
    bool aliased = false;
    for (const auto &w : a.warnings) {
        aliased |= w.find("aliasing") != std::string::npos;
    }
    EXPECT_TRUE(aliased);
}

TEST(fitting, coupling_noiseless_roundtrip_all_five) {
    CouplingSynthParams p;
    p.noise = 0;
    DeviceParams truth = reference_device();
    CouplingFit c = fit_coupling_curve(synth_coupling(truth, p, 1), perturbed_guess());
    EXPECT_NEAR(c.fit.param("g12_mhz") / -7.45, 1, 1e-6);
    EXPECT_NEAR(c.fit.param("gprod0_mhz2") / (104.55 * 104.55), 1, 1e-6);
    EXPECT_NEAR(c.fit.param("coupler_ec_ghz") / truth.coupler.ec, 1, 1e-6);
    EXPECT_NEAR(c.fit.param("coupler_ej_sum_ghz") / (truth.coupler.ejs + truth.coupler.ejl), 1, 1e-6);
    // EJ and EC trade off along a nearly flat valley; the fit says so.
    EXPECT_FALSE(c.identifiable);
    EXPECT_FALSE(c.fit.converged);
    ASSERT_TRUE(c.zero_flux.has_value());
    EXPECT_NEAR(*c.zero_flux, 0.19677, 1e-4);
    EXPECT_EQ(c.coupler_ghz.size(), p.points);
}

TEST(fitting, coupling_noisy_roundtrip_fixed_ec) {
    CouplingFitOptions o;
    o.fix_coupler_ec = true;
    CouplingFit c = fit_coupling_curve(synth_coupling(reference_device(), {}, 42), perturbed_guess(), o);
    EXPECT_TRUE(c.identifiable);
    EXPECT_TRUE(c.fit.converged);
    EXPECT_NEAR(c.fit.param("g12_mhz") / -7.45, 1, 0.05);
    EXPECT_NEAR(std::sqrt(c.fit.param("gprod0_mhz2")) / 104.55, 1, 0.05);
    ASSERT_TRUE(c.zero_flux.has_value());
    EXPECT_NEAR(*c.zero_flux / 0.212, 1, 0.10);
    EXPECT_LT(std::abs(c.fit.param("g12_mhz") + 7.45), 3 * c.fit.sigma("g12_mhz"));
}

TEST(fitting, coupling_needs_six_points) {
    CouplingSynthParams p;
    p.points = 5;
    EXPECT_THROW(fit_coupling_curve(synth_coupling(reference_device(), p, 1), perturbed_guess()), InputError);
}

TEST(fitting, dominant_frequency_of_cosine) {
    std::vector<double> x, y;
    for (int i = 0; i < 200; i++) {
        x.push_back(0.01 * i);
        y.push_back(std::cos(2 * kPi * 7.3 * x.back()));
    }
    EXPECT_NEAR(dominant_frequency(x, y), 7.3, 0.05);
}

TEST(fitting, chevron_extraction) {
    ChevronAnalysis a = extract_coupling_from_chevron(synth_chevron({}, 42));
    EXPECT_NEAR(a.g_mhz, 5, 0.1);
    EXPECT_NEAR(a.resonance_flux, 0, 1e-3);
    ChevronSynthParams p;
    for (size_t j = 0; j < a.column_freq_mhz.size(); j++) {
        const double flux = p.flux_min + (p.flux_max - p.flux_min) * j / (p.flux_points - 1);
        const double det = p.detuning_mhz_per_flux * flux;
        EXPECT_NEAR(a.column_freq_mhz[j], std::sqrt(det * det + 4 * p.g_mhz * p.g_mhz), 1e-3 * a.column_freq_mhz[j]);
    }
}

TEST(fitting, chevron_with_noise) {
    ChevronSynthParams p;
    p.noise = 0.02;
    ChevronAnalysis a = extract_coupling_from_chevron(synth_chevron(p, 7));
    EXPECT_NEAR(a.g_mhz, 5, 0.1);
}

TEST(fitting, chevron_errors) {
    ChevronSynthParams zero;
    zero.g_mhz = 0;
    EXPECT_THROW(extract_coupling_from_chevron(synth_chevron(zero, 1)), FitError);
    ChevronSynthParams edge;
    edge.flux_center = 0.3;
    EXPECT_THROW(extract_coupling_from_chevron(synth_chevron(edge, 1)), FitError);
}

TEST(fitting, chevron_noiseless_recovery) {
    ChevronAnalysis a = extract_coupling_from_chevron(synth_chevron({}, 1));
    EXPECT_NEAR(a.g_mhz / 5, 1, 1e-6);
}

TEST(fitting, converged_covariances_are_symmetric_psd) {
    CouplingFitOptions fixed;
    fixed.fix_coupler_ec = true;
    const FitResult fits[] = {
        fit_rb_decay(synth_rb({}, 11)),
        fit_ramsey_modulated(synth_ramsey({}, 12)),
        fit_coupling_curve(synth_coupling(reference_device(), {}, 13), perturbed_guess(), fixed).fit,
    };
    for (const FitResult &r : fits) {
        ASSERT_TRUE(r.converged);
        const Eigen::MatrixXd &c = r.covariance;
        ASSERT_EQ(c.rows(), static_cast<Eigen::Index>(r.params.size()));
        const double scale = c.cwiseAbs().maxCoeff();
        EXPECT_LE((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-12 * scale);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
        EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12 * scale);
    }
}
