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

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <fmt/format.h>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "gatebudget/errors.h"

namespace gatebudget {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBadResidual = 1e100;

double to_model(double u, ParamTransform t) {
    switch (t) {
        case ParamTransform::identity:
            return u;
        case ParamTransform::square:
            return u * u;
        case ParamTransform::unit_interval:
            return std::exp(-u * u);
    }
    return u;
}

double to_internal(double v, ParamTransform t, const std::string &name) {
    switch (t) {
        case ParamTransform::identity:
            return v;
        case ParamTransform::square:
            if (!(v > 0)) {
                throw InputError(fmt::format("initial value of {} must be positive", name));
            }
            return std::sqrt(v);
        case ParamTransform::unit_interval:
            if (!(v > 0 && v <= 1)) {
                throw InputError(fmt::format("initial value of {} must lie in (0, 1]", name));
            }
            // u = 0 is a stationary point of exp(-u^2); start just inside the interval.
            return std::sqrt(-std::log(std::min(v, 1 - 1e-9)));
    }
    return v;
}

double safe_eval(const ModelFn &model, double x, std::span<const double> v) {
    try {
        double m = model(x, v);
        return std::isfinite(m) ? m : std::numeric_limits<double>::quiet_NaN();
    } catch (const std::exception &) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double weight(const XYDataset &d, size_t i) {
    return d.sigma.empty() ? 1.0 : 1.0 / d.sigma[i];
}

double diff_step(double u) {
    return 6e-6 * std::max(std::abs(u), 1e-2);
}

struct Residuals : Eigen::DenseFunctor<double> {
    const ModelFn &model;
    const XYDataset &data;
    std::span<const ParamDef> defs;

    Residuals(const ModelFn &m, const XYDataset &d, std::span<const ParamDef> s)
        : Eigen::DenseFunctor<double>(static_cast<int>(s.size()), static_cast<int>(d.size())),
          model(m),
          data(d),
          defs(s) {
    }

    std::vector<double> model_params(const Eigen::VectorXd &u) const {
        std::vector<double> v(defs.size());
        for (size_t k = 0; k < defs.size(); k++) {
            v[k] = to_model(u(k), defs[k].transform);
        }
        return v;
    }

    int operator()(const Eigen::VectorXd &u, Eigen::VectorXd &f) const {
        std::vector<double> v = model_params(u);
        for (size_t i = 0; i < data.size(); i++) {
            double m = safe_eval(model, data.x[i], v);
            double r = (data.y[i] - m) * weight(data, i);
            f(i) = std::isfinite(r) ? r : kBadResidual;
        }
        return 0;
    }

    int df(const Eigen::VectorXd &u, Eigen::MatrixXd &jac) const {
        Eigen::VectorXd up = u, fp(values()), fm(values());
        for (int k = 0; k < inputs(); k++) {
            const double h = diff_step(u(k));
            up(k) = u(k) + h;
            (*this)(up, fp);
            up(k) = u(k) - h;
            (*this)(up, fm);
            up(k) = u(k);
            jac.col(k) = (fp - fm) / (2 * h);
        }
        return 0;
    }
};

// Central-difference Jacobian of the weighted model with respect to model parameters.
Eigen::MatrixXd model_jacobian(const ModelFn &model, const XYDataset &data, std::vector<double> v) {
    Eigen::MatrixXd jac(data.size(), v.size());
    for (size_t k = 0; k < v.size(); k++) {
        const double v0 = v[k];
        const double h = diff_step(v0);
        for (size_t i = 0; i < data.size(); i++) {
            v[k] = v0 + h;
            double fp = safe_eval(model, data.x[i], v);
            v[k] = v0 - h;
            double fm = safe_eval(model, data.x[i], v);
            jac(i, k) = (fp - fm) / (2 * h) * weight(data, i);
        }
        v[k] = v0;
    }
    return jac;
}

const char *status_name(Eigen::LevenbergMarquardtSpace::Status s) {
    using namespace Eigen::LevenbergMarquardtSpace;
    switch (s) {
        case RelativeReductionTooSmall:
            return "relative reduction below tolerance";
        case RelativeErrorTooSmall:
            return "relative step below tolerance";
        case RelativeErrorAndReductionTooSmall:
            return "relative step and reduction below tolerance";
        case CosinusTooSmall:
            return "gradient below tolerance";
        case TooManyFunctionEvaluation:
            return "too many function evaluations";
        case FtolTooSmall:
        case XtolTooSmall:
        case GtolTooSmall:
            return "no further improvement possible at machine precision";
        case Running:
            return "iteration limit reached";
        default:
            return "stopped";
    }
}

bool is_converged(Eigen::LevenbergMarquardtSpace::Status s) {
    using namespace Eigen::LevenbergMarquardtSpace;
    switch (s) {
        case RelativeReductionTooSmall:
        case RelativeErrorTooSmall:
        case RelativeErrorAndReductionTooSmall:
        case CosinusTooSmall:
        case FtolTooSmall:
        case XtolTooSmall:
        case GtolTooSmall:
            return true;
        default:
            return false;
    }
}

void require_sorted(const XYDataset &d) {
    if (!std::is_sorted(d.x.begin(), d.x.end())) {
        throw InputError("x values must be in increasing order");
    }
}

double median_spacing(std::span<const double> x) {
    std::vector<double> dx;
    for (size_t i = 1; i < x.size(); i++) {
        dx.push_back(x[i] - x[i - 1]);
    }
    std::nth_element(dx.begin(), dx.begin() + dx.size() / 2, dx.end());
    return dx[dx.size() / 2];
}

std::complex<double> fourier_coefficient(std::span<const double> x, std::span<const double> y, double mean, double f) {
    std::complex<double> acc = 0;
    for (size_t i = 0; i < x.size(); i++) {
        acc += (y[i] - mean) * std::polar(1.0, -2 * kPi * f * x[i]);
    }
    return acc;
}

double wrap_phase(double p) {
    p = std::remainder(p, 2 * kPi);
    return p <= -kPi ? p + 2 * kPi : p;
}

// Flips signs of the selected parameters and the matching covariance rows and columns.
void negate_params(FitResult &r, std::initializer_list<size_t> which) {
    for (size_t k : which) {
        r.params[k] = -r.params[k];
        if (r.covariance.size() > 0) {
            r.covariance.row(k) *= -1;
            r.covariance.col(k) *= -1;
        }
    }
}

}  // namespace

void XYDataset::validate() const {
    if (x.size() != y.size()) {
        throw InputError(fmt::format("x has {} values but y has {}", x.size(), y.size()));
    }
    if (!sigma.empty() && sigma.size() != x.size()) {
        throw InputError(fmt::format("sigma has {} values but x has {}", sigma.size(), x.size()));
    }
    for (size_t i = 0; i < x.size(); i++) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw InputError(fmt::format("non-finite data at point {}", i));
        }
        if (!sigma.empty() && !(sigma[i] > 0 && std::isfinite(sigma[i]))) {
            throw InputError(fmt::format("sigma must be positive at point {}", i));
        }
    }
}

double FitResult::param(std::string_view name) const {
    for (size_t k = 0; k < names.size(); k++) {
        if (names[k] == name) {
            return params[k];
        }
    }
    throw InputError(fmt::format("no fit parameter named {}", name));
}

double FitResult::sigma(std::string_view name) const {
    for (size_t k = 0; k < names.size(); k++) {
        if (names[k] == name) {
            return std::sqrt(std::max(0.0, covariance(k, k)));
        }
    }
    throw InputError(fmt::format("no fit parameter named {}", name));
}

FitResult least_squares(
    const ModelFn &model, const XYDataset &data, std::span<const ParamDef> params, const LsqOptions &options) {
    data.validate();
    const size_t n = params.size();
    if (n == 0) {
        throw InputError("no parameters to fit");
    }
    if (data.size() < n) {
        throw InputError(fmt::format("{} points cannot determine {} parameters", data.size(), n));
    }
    Eigen::VectorXd u(n);
    for (size_t k = 0; k < n; k++) {
        if (!std::isfinite(params[k].init)) {
            throw InputError(fmt::format("initial value of {} is not finite", params[k].name));
        }
        u(k) = to_internal(params[k].init, params[k].transform, params[k].name);
    }

    Residuals functor(model, data, params);
    Eigen::LevenbergMarquardt<Residuals> lm(functor);
    lm.setXtol(options.xtol);
    lm.setGtol(options.gtol);
    lm.setFtol(1e-15);
    lm.setMaxfev(100 * options.max_iterations * static_cast<int>(n + 1));
    auto status = lm.minimizeInit(u);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters) {
        throw InputError("improper least-squares setup");
    }
    status = Eigen::LevenbergMarquardtSpace::Running;
    int iterations = 0;
    while (status == Eigen::LevenbergMarquardtSpace::Running && iterations < options.max_iterations) {
        status = lm.minimizeOneStep(u);
        iterations++;
    }

    FitResult r;
    r.iterations = iterations;
    r.status = status_name(status);
    r.converged = is_converged(status);
    for (const auto &p : params) {
        r.names.push_back(p.name);
    }
    r.params = functor.model_params(u);

    Eigen::VectorXd f(data.size());
    functor(u, f);
    if ((f.array().abs() >= kBadResidual).any()) {
        r.converged = false;
        r.warnings.push_back("model could not be evaluated at every point");
    }
    r.residual_norm = f.norm();
    const double dof = static_cast<double>(data.size()) - static_cast<double>(n);
    r.reduced_chi2 = dof > 0 ? r.residual_norm * r.residual_norm / dof : 0.0;

    Eigen::MatrixXd jac = model_jacobian(model, data, r.params);
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jtj);
    Eigen::VectorXd lam = eig.eigenvalues();
    const double lam_max = lam.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv_lam(n);
    for (size_t k = 0; k < n; k++) {
        inv_lam(k) = lam(k) > 1e-14 * lam_max ? 1 / lam(k) : 0.0;
    }
    r.covariance = eig.eigenvectors() * inv_lam.asDiagonal() * eig.eigenvectors().transpose();
    if (data.sigma.empty()) {
        r.covariance *= r.reduced_chi2;
    }
    // Conditioning of the column-normalized J^T J is independent of parameter units.
    Eigen::VectorXd scale = jtj.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd normalized = scale.asDiagonal() * jtj * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_n(normalized, Eigen::EigenvaluesOnly);
    const double nmax = eig_n.eigenvalues().cwiseAbs().maxCoeff();
    r.jtj_rcond = nmax > 0 ? std::max(0.0, eig_n.eigenvalues().minCoeff()) / nmax : 0.0;
    return r;
}

double dominant_frequency(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 4) {
        throw InputError("spectrum estimate needs at least 4 samples");
    }
    const double dt = median_spacing(x);
    if (!(dt > 0)) {
        throw InputError("samples must have increasing x");
    }
    double mean = 0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(y.size());
    const size_t n = x.size();
    const double nyquist = 1 / (2 * dt);
    const double df = 1 / (8.0 * n * dt);
    const size_t bins = static_cast<size_t>(nyquist / df);
    std::vector<double> power(bins + 1, 0);
    size_t best = 1;
    for (size_t k = 1; k <= bins; k++) {
        power[k] = std::norm(fourier_coefficient(x, y, mean, k * df));
        if (power[k] > power[best]) {
            best = k;
        }
    }
    double shift = 0;
    if (best > 1 && best < bins) {
        const double a = power[best - 1], b = power[best], c = power[best + 1];
        const double denom = a - 2 * b + c;
        if (denom < 0) {
            shift = 0.5 * (a - c) / denom;
        }
    }
    return (static_cast<double>(best) + shift) * df;
}

FitResult fit_rb_decay(const XYDataset &data) {
    data.validate();
    if (data.size() < 4) {
        throw InputError("RB decay fit needs at least 4 points");
    }
    for (double x : data.x) {
        if (x < 0 || x != std::floor(x)) {
            throw InputError("RB sequence lengths must be nonnegative integers");
        }
    }
    const auto [ymin, ymax] = std::minmax_element(data.y.begin(), data.y.end());
    const size_t n = data.size();
    double mean = 0;
    for (double v : data.y) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    if (*ymax - *ymin <= 1e-12 * std::max(1.0, std::abs(mean))) {
        FitResult r;
        r.names = {"a", "b", "p"};
        r.params = {0.0, mean, 1.0};
        r.covariance = Eigen::MatrixXd::Zero(3, 3);
        r.converged = true;
        r.status = "constant data: no decay";
        r.jtj_rcond = 0;
        return r;
    }

    // Order by sequence length so the tail really is the longest sequences.
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; i++) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return data.x[a] < data.x[b]; });
    const size_t tail = std::max<size_t>(1, n / 4);
    double b0 = 0;
    for (size_t i = n - tail; i < n; i++) {
        b0 += data.y[order[i]];
    }
    b0 /= static_cast<double>(tail);
    const double a0 = data.y[order[0]] - b0;

    const ParamDef defs[] = {{"a", a0}, {"b", b0}, {"p", 0.99, ParamTransform::unit_interval}};
    auto model = [](double x, std::span<const double> v) { return v[1] + v[0] * std::pow(v[2], x); };
    return least_squares(model, data, defs);
}

double ramsey_model(double t, double amp, double gamma2, double gamma_1f, double delta, double phase, double offset) {
    const double g = gamma_1f * t;
    return amp * std::exp(-gamma2 * t - g * g) * std::cos(delta * t + phase) + offset;
}

FitResult fit_ramsey_modulated(const XYDataset &data, const RamseyFitOptions &options) {
    data.validate();
    if (data.size() < 8) {
        throw InputError("Ramsey fit needs at least 8 points");
    }
    require_sorted(data);
    const double span = data.x.back() - data.x.front();
    if (!(span > 0)) {
        throw InputError("Ramsey samples must span a positive time");
    }
    double mean = 0;
    for (double v : data.y) {
        mean += v;
    }
    mean /= static_cast<double>(data.size());

    const double f0 = dominant_frequency(data.x, data.y);
    const std::complex<double> c = fourier_coefficient(data.x, data.y, mean, f0);
    double amp0 = 0;
    for (double v : data.y) {
        amp0 = std::max(amp0, std::abs(v - mean));
    }
    const double phase0 = std::arg(c) + 2 * kPi * f0 * data.x.front();

    auto model = [](double t, std::span<const double> v) { return ramsey_model(t, v[0], v[1], v[2], v[3], v[4], v[5]); };
    FitResult best;
    bool have = false;
    std::vector<std::string> warnings;
    for (double s2 : {0.3, 1.0, 3.0}) {
        for (double sf : {0.3, 1.0, 3.0}) {
            const ParamDef defs[] = {
                {"amp", amp0},
                {"gamma2", s2 / span, ParamTransform::square},
                {"gamma_1f", sf / span, ParamTransform::square},
                {"delta", 2 * kPi * f0},
                {"phase", phase0},
                {"offset", mean}};
            FitResult r = least_squares(model, data, defs);
            const bool better = !have || (r.converged && !best.converged) ||
                                (r.converged == best.converged && r.residual_norm < best.residual_norm);
            if (better) {
                best = std::move(r);
                have = true;
            }
        }
    }

    if (best.params[3] < 0) {
        negate_params(best, {3, 4});
    }
    if (best.params[0] < 0) {
        negate_params(best, {0});
        best.params[4] += kPi;
    }
    best.params[4] = wrap_phase(best.params[4]);

    const double nyquist_angular = kPi / median_spacing(data.x);
    const bool nominal_aliased = options.nominal_delta.has_value() && std::abs(*options.nominal_delta) >= nyquist_angular;
    if (nominal_aliased || best.params[3] > 0.9 * nyquist_angular) {
        best.warnings.push_back("oscillation frequency is close to or above the sampling Nyquist limit; aliasing likely");
    }
    const double decay = best.params[1] + best.params[2];
    if (span * best.params[1] < 1 && span * decay < 1) {
        best.warnings.push_back("record is shorter than 1 / gamma2; rates are low confidence");
    }
    return best;
}

namespace {

TransmonParams coupler_from(double ej_sum, double asym, double ec) {
    return {0.5 * ej_sum * (1 - asym), 0.5 * ej_sum * (1 + asym), ec};
}

DeviceParams device_from(const DeviceParams &base, std::span<const double> v) {
    DeviceParams d = base;
    d.coupling.g12_mhz = v[0];
    d.coupling.gprod0_mhz2 = v[1];
    d.coupler = coupler_from(v[2], v[3], v[4]);
    return d;
}

}  // namespace

CouplingFit fit_coupling_curve(const XYDataset &data, const DeviceParams &guess, const CouplingFitOptions &options) {
    data.validate();
    if (data.size() < 6) {
        throw InputError("coupling fit needs at least 6 flux points");
    }
    const TransmonParams &c = guess.coupler;
    const double sum = c.ejs + c.ejl;
    if (!(sum > 0) || !(c.ec > 0)) {
        throw InputError("initial coupler parameters must be positive");
    }
    std::vector<ParamDef> defs{
        {"g12_mhz", guess.coupling.g12_mhz},
        {"gprod0_mhz2", guess.coupling.gprod0_mhz2},
        {"coupler_ej_sum_ghz", sum},
        {"coupler_ej_asymmetry", (c.ejl - c.ejs) / sum}};
    if (!options.fix_coupler_ec) {
        defs.push_back({"coupler_ec_ghz", c.ec});
    }
    auto full = [&](std::span<const double> v) {
        return std::array<double, 5>{v[0], v[1], v[2], v[3], options.fix_coupler_ec ? c.ec : v[4]};
    };
    auto model = [&](double flux, std::span<const double> v) {
        return qubit_qubit_coupling(device_from(guess, full(v)), flux_to_phase(flux));
    };

    CouplingFit out;
    out.fit = least_squares(model, data, defs);
    if (options.fix_coupler_ec) {
        out.fit.warnings.push_back(fmt::format("coupler_ec_ghz held at {}", c.ec));
    }
    bool sign_change = false, near_zero = false;
    double ymax = 0;
    for (double y : data.y) {
        ymax = std::max(ymax, std::abs(y));
    }
    for (size_t i = 0; i < data.size(); i++) {
        sign_change |= i > 0 && (data.y[i] > 0) != (data.y[i - 1] > 0);
        near_zero |= std::abs(data.y[i]) < 0.1 * ymax;
    }
    if (!sign_change && !near_zero) {
        out.fit.warnings.push_back("data neither changes sign nor approaches zero coupling");
    }
    out.identifiable = out.fit.jtj_rcond > 1e-8;
    if (!out.identifiable) {
        out.fit.converged = false;
        out.fit.warnings.push_back(fmt::format(
            "parameters are not separately identifiable (normalized J^T J reciprocal condition {:.3g})",
            out.fit.jtj_rcond));
    }
    out.device = device_from(guess, full(out.fit.params));
    try {
        out.zero_flux = phase_to_flux(find_zero_coupling(out.device, flux_to_phase(1e-6), kPi));
    } catch (const std::exception &) {
        out.zero_flux.reset();
    }
    for (double flux : data.x) {
        try {
            out.coupler_ghz.push_back(coupler_frequency(out.device, flux_to_phase(flux)));
        } catch (const std::exception &) {
            out.coupler_ghz.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

void ChevronGrid::validate() const {
    if (flux.size() < 3 || time_ns.size() < 8) {
        throw InputError("chevron grid needs at least 3 flux columns and 8 time samples");
    }
    if (population.rows() != static_cast<Eigen::Index>(time_ns.size()) ||
        population.cols() != static_cast<Eigen::Index>(flux.size())) {
        throw InputError("chevron population shape does not match its axes");
    }
    if (!std::is_sorted(flux.begin(), flux.end()) || !std::is_sorted(time_ns.begin(), time_ns.end())) {
        throw InputError("chevron axes must be increasing");
    }
    if (!population.allFinite()) {
        throw InputError("chevron population contains non-finite values");
    }
}

ChevronAnalysis extract_coupling_from_chevron(const ChevronGrid &grid) {
    grid.validate();
    const size_t nf = grid.flux.size();
    const size_t nt = grid.time_ns.size();
    const double span_ns = grid.time_ns.back() - grid.time_ns.front();
    ChevronAnalysis out;
    out.column_freq_mhz.assign(nf, std::numeric_limits<double>::quiet_NaN());

    auto model = [](double t, std::span<const double> v) {
        return v[0] + v[1] * std::exp(-v[2] * t) * std::cos(2 * kPi * v[3] * 1e-3 * t + v[4]);
    };
    for (size_t j = 0; j < nf; j++) {
        XYDataset col;
        col.x = grid.time_ns;
        col.y.resize(nt);
        for (size_t i = 0; i < nt; i++) {
            col.y[i] = grid.population(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        const auto [lo, hi] = std::minmax_element(col.y.begin(), col.y.end());
        if (*hi - *lo < 1e-6) {
            continue;
        }
        double mean = 0;
        for (double v : col.y) {
            mean += v;
        }
        mean /= static_cast<double>(nt);
        const double f0 = dominant_frequency(col.x, col.y);
        const std::complex<double> c = fourier_coefficient(col.x, col.y, mean, f0);
        const ParamDef defs[] = {
            {"offset", mean},
            {"amp", 0.5 * (*hi - *lo)},
            {"decay_per_ns", 0.01 / span_ns, ParamTransform::square},
            {"freq_mhz", f0 * 1e3},
            {"phase", std::arg(c)}};
        FitResult r = least_squares(model, col, defs);
        if (r.converged && std::abs(r.params[1]) > 1e-6) {
            out.column_freq_mhz[j] = std::abs(r.params[3]);
        }
    }

    std::vector<size_t> valid;
    for (size_t j = 0; j < nf; j++) {
        if (std::isfinite(out.column_freq_mhz[j])) {
            valid.push_back(j);
        }
    }
    if (valid.empty()) {
        throw FitError("no oscillation detected in any chevron column");
    }
    size_t best = 0;
    for (size_t k = 1; k < valid.size(); k++) {
        if (out.column_freq_mhz[valid[k]] < out.column_freq_mhz[valid[best]]) {
            best = k;
        }
    }
    if (best == 0 || best + 1 == valid.size()) {
        throw FitError("minimum oscillation frequency lies on the edge of the grid; resonance not captured");
    }

    const size_t lo = best >= 2 ? best - 2 : 0;
    const size_t hi = std::min(valid.size() - 1, best + 2);
    const double x0 = grid.flux[valid[best]];
    Eigen::MatrixXd design(hi - lo + 1, 3);
    Eigen::VectorXd f2(hi - lo + 1);
    for (size_t k = lo; k <= hi; k++) {
        const double dx = grid.flux[valid[k]] - x0;
        design.row(k - lo) << 1, dx, dx * dx;
        f2(k - lo) = out.column_freq_mhz[valid[k]] * out.column_freq_mhz[valid[k]];
    }
    Eigen::Vector3d q = design.colPivHouseholderQr().solve(f2);
    double f2_min = f2(best - lo);
    out.resonance_flux = x0;
    if (q(2) > 0) {
        const double vertex = -q(1) / (2 * q(2));
        const double value = q(0) - q(1) * q(1) / (4 * q(2));
        if (value > 0 && std::abs(vertex) <= std::abs(grid.flux[valid[hi]] - grid.flux[valid[lo]])) {
            f2_min = value;
            out.resonance_flux = x0 + vertex;
        }
    }
    out.g_mhz = 0.5 * std::sqrt(f2_min);
    return out;
}

}  // namespace gatebudget
