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

#ifndef GATEBUDGET_FITTING_H
#define GATEBUDGET_FITTING_H

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gatebudget/device_model.h"

namespace gatebudget {

struct XYDataset {
    std::vector<double> x;
    std::vector<double> y;
    /// Empty, or one positive uncertainty per point.
    std::vector<double> sigma;

    size_t size() const {
        return x.size();
    }
    void validate() const;
};

/// Maps the unconstrained value u seen by the optimizer onto the model parameter.
enum class ParamTransform {
    identity,
    /// v = u^2, for nonnegative rates.
    square,
    /// v = exp(-u^2), which covers (0, 1] including the endpoint 1.
    unit_interval,
};

struct ParamDef {
    std::string name;
    double init = 0;
    ParamTransform transform = ParamTransform::identity;
};

using ModelFn = std::function<double(double x, std::span<const double> params)>;

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> params;
    /// Covariance of the model parameters (not the internal ones).
    Eigen::MatrixXd covariance;
    /// Euclidean norm of the weighted residual vector.
    double residual_norm = 0;
    /// residual_norm^2 / (points - params), or 0 when that is not positive.
    double reduced_chi2 = 0;
    int iterations = 0;
    bool converged = false;
    /// Reciprocal condition number of J^T J at the solution.
    double jtj_rcond = 0;
    std::string status;
    std::vector<std::string> warnings;

    double param(std::string_view name) const;
    double sigma(std::string_view name) const;
};

struct LsqOptions {
    double xtol = 1e-10;
    double gtol = 1e-12;
    int max_iterations = 500;
};

/// Levenberg-Marquardt on (y - model) / sigma with a central-difference Jacobian.
///
/// Model evaluations that throw or return non-finite values are treated as very large
/// residuals. The covariance is (J^T J)^+ in model parameters, scaled by the reduced
/// chi-square when the dataset has no sigmas. A failure to converge is reported through
/// `converged` with the best parameters found.
FitResult least_squares(
    const ModelFn &model, const XYDataset &data, std::span<const ParamDef> params, const LsqOptions &options = {});

/// P(N) = b + a p^N. Needs at least 4 points; x must be nonnegative integers.
FitResult fit_rb_decay(const XYDataset &data);

struct RamseyFitOptions {
    /// Programmed detuning in rad/us. Folding above the Nyquist limit cannot be seen in
    /// uniformly sampled data, so this is what the aliasing check compares against.
    std::optional<double> nominal_delta;
};

/// amp * exp(-gamma2 t - (gamma_1f t)^2) * cos(delta t + phase) + offset, with t in us,
/// rates in 1/us and delta in rad/us. Warns on aliasing and on records shorter than 1/gamma2.
FitResult fit_ramsey_modulated(const XYDataset &data, const RamseyFitOptions &options = {});

double ramsey_model(double t, double amp, double gamma2, double gamma_1f, double delta, double phase, double offset);

/// Net coupling versus coupler flux (x in flux quanta, y in MHz). Parameters:
/// g12_mhz, gprod0_mhz2, coupler_ej_sum_ghz, coupler_ej_asymmetry ((ejl - ejs) / (ejl + ejs))
/// and coupler_ec_ghz. `guess` supplies the qubit frequencies, the coupling scaling, the
/// reference flux and the starting point.
struct CouplingFit {
    FitResult fit;
    /// Whether the fitted parameters are separately determined: the reciprocal condition
    /// of the column-normalized J^T J exceeds 1e-8.
    bool identifiable = false;
    DeviceParams device;
    /// Zero-coupling flux of the fitted device in flux quanta, if one exists in (0, 0.5).
    std::optional<double> zero_flux;
    /// Coupler frequency of the fitted device at the data fluxes, GHz.
    std::vector<double> coupler_ghz;
};

struct CouplingFitOptions {
    /// Hold the coupler EC at the guess (|anharmonicity| from spectroscopy). From g(flux)
    /// alone only the plasma frequency sqrt(8 EJ EC) is well determined, so the five
    /// parameter problem is nearly degenerate along EJ * EC = const.
    bool fix_coupler_ec = false;
};

CouplingFit fit_coupling_curve(const XYDataset &data, const DeviceParams &guess, const CouplingFitOptions &options = {});

/// Population on a flux x time grid: `population(i, j)` is at time_ns[i] and flux[j].
struct ChevronGrid {
    std::vector<double> flux;
    std::vector<double> time_ns;
    Eigen::MatrixXd population;

    void validate() const;
};

struct ChevronAnalysis {
    double g_mhz = 0;
    /// Oscillation frequency of every flux column, MHz.
    std::vector<double> column_freq_mhz;
    /// Flux where the parabola through the slowest columns has its minimum.
    double resonance_flux = 0;
};

/// Fits every column with a decaying cosine seeded from its discrete spectrum, then finds
/// the minimum oscillation frequency through a parabola in f^2 around the slowest column.
/// g is half that minimum. Throws FitError when no column oscillates or the minimum sits
/// on the edge of the grid.
ChevronAnalysis extract_coupling_from_chevron(const ChevronGrid &grid);

/// Periodogram peak of (y - mean) over (0, Nyquist], in cycles per unit of x.
/// The samples must be uniformly spaced.
double dominant_frequency(std::span<const double> x, std::span<const double> y);

}  // namespace gatebudget

#endif
