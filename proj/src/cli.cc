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

#include "gatebudget/cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "gatebudget/errors.h"
#include "gatebudget/synthetic.h"
#include "gatebudget/verification.h"

namespace gatebudget {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

std::string csv_quote(const std::string &s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

// Infinite or NaN values become null.
json number_or_null(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(fmt::format("{}: cannot open file", path));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path &path, const std::string &content) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        throw InputError(fmt::format("{}: cannot write file", path.string()));
    }
}

std::string percent(double x) {
    return fmt::format("{:.3f}%", 100 * x);
}

std::vector<std::vector<double>> parse_numeric_csv(const std::string &text, const std::string &source,
                                                   size_t min_cols, size_t max_cols) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool seen_first = false;
    size_t width = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::vector<double> row;
        bool numeric = true;
        std::string cell;
        std::istringstream cells(line);
        while (std::getline(cells, cell, ',')) {
            const size_t a = cell.find_first_not_of(" \t");
            const size_t b = cell.find_last_not_of(" \t");
            const std::string trimmed = a == std::string::npos ? "" : cell.substr(a, b - a + 1);
            double v = 0;
            auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), v);
            if (trimmed.empty() || ec != std::errc() || ptr != trimmed.data() + trimmed.size() || !std::isfinite(v)) {
                numeric = false;
                if (seen_first) {
                    throw InputError(fmt::format("{}:{}: not a finite number: \"{}\"", source, line_no, trimmed));
                }
            }
            row.push_back(v);
        }
        if (!line.empty() && line.back() == ',') {
            throw InputError(fmt::format("{}:{}: empty trailing field", source, line_no));
        }
        const bool header = !seen_first && !numeric;
        seen_first = true;
        if (row.size() < min_cols || row.size() > max_cols) {
            throw InputError(fmt::format("{}:{}: expected {} to {} columns, got {}", source, line_no, min_cols,
                                         max_cols, row.size()));
        }
        if (header) {
            width = row.size();
            continue;
        }
        if (width != 0 && row.size() != width) {
            throw InputError(fmt::format("{}:{}: expected {} columns like the first row, got {}", source, line_no,
                                         width, row.size()));
        }
        width = row.size();
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw InputError(fmt::format("{}: no data rows", source));
    }
    return rows;
}

json fit_result_json(const FitResult &r) {
    json j;
    json params = json::object();
    json sigmas = json::object();
    for (size_t i = 0; i < r.names.size(); i++) {
        params[r.names[i]] = number_or_null(r.params[i]);
        sigmas[r.names[i]] = number_or_null(r.sigma(r.names[i]));
    }
    json cov = json::array();
    for (Eigen::Index i = 0; i < r.covariance.rows(); i++) {
        json row = json::array();
        for (Eigen::Index k = 0; k < r.covariance.cols(); k++) {
            row.push_back(number_or_null(r.covariance(i, k)));
        }
        cov.push_back(row);
    }
    j["params"] = params;
    j["sigmas"] = sigmas;
    j["covariance"] = cov;
    j["residual_norm"] = number_or_null(r.residual_norm);
    j["reduced_chi2"] = number_or_null(r.reduced_chi2);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["jtj_rcond"] = number_or_null(r.jtj_rcond);
    j["status"] = r.status;
    j["warnings"] = r.warnings;
    return j;
}

// Two-column name,value[,sigma] view of a fit report.
std::string fit_report_csv(const json &report) {
    std::string out = "name,value,sigma\n";
    auto emit = [&](const std::string &prefix, const json &fit) {
        for (const auto &[name, v] : fit["params"].items()) {
            const json &s = fit["sigmas"][name];
            out += fmt::format("{}{},{},{}\n", prefix, name, v.is_null() ? "" : format_number(v.get<double>()),
                               s.is_null() ? "" : format_number(s.get<double>()));
        }
    };
    if (report.contains("fit")) {
        emit("", report["fit"]);
    }
    if (report.contains("interleaved_fit")) {
        emit("interleaved_", report["interleaved_fit"]);
    }
    for (const auto &[name, v] : report["derived"].items()) {
        if (v.is_number()) {
            out += fmt::format("{},{},\n", name, format_number(v.get<double>()));
        }
    }
    return out;
}

struct Globals {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<uint64_t> seed;
    std::string format = "json";
};

std::optional<RunConfig> maybe_config(const Globals &g, std::ostream &err) {
    if (g.config_path.empty()) {
        return std::nullopt;
    }
    RunConfig c = load_config(g.config_path);
    for (const auto &w : c.warnings) {
        err << "warning: " << w << "\n";
    }
    return c;
}

RunConfig require_config(const Globals &g, const char *command, std::ostream &err) {
    std::optional<RunConfig> c = maybe_config(g, err);
    if (!c) {
        throw InputError(fmt::format("{} needs --config", command));
    }
    return *c;
}

ErrorBudget budget_for(const CoherenceSet &c, const GateConfig &gate, const LeakageInput &leakage,
                       std::vector<std::string> &warnings) {
    const double l = leakage.resolve(&warnings);
    ErrorBudget b = assemble_budget(c, gate, l, leakage.sigma);
    for (const auto &w : warnings) {
        b.warnings.push_back(w);
    }
    return b;
}

int cmd_budget(const Globals &g, std::ostream &out, std::ostream &err) {
    RunConfig cfg = require_config(g, "budget", err);
    std::vector<std::string> warnings;
    ErrorBudget b = budget_for(cfg.coherence, cfg.gate, cfg.leakage, warnings);
    const double leakage = cfg.leakage.resolve();
    write_file(fs::path(g.out_dir) / "budget.json", budget_json(b, cfg.gate, leakage));
    write_file(fs::path(g.out_dir) / "budget.csv", budget_csv(b));
    for (const auto &w : b.warnings) {
        err << "warning: " << w << "\n";
    }
    out << fmt::format("{} gate, tau = {} ns (t_g = {} ns)\n", gate_kind_name(cfg.gate.kind),
                       format_number(cfg.gate.timing.total()), format_number(cfg.gate.timing.t_g));
    out << fmt::format("{:<12} {:>10} {:>10} {:>9}\n", "channel", "error", "sigma", "fraction");
    for (const BudgetEntry &e : b.entries) {
        out << fmt::format("{:<12} {:>10} {:>10} {:>8.1f}%\n", e.channel, percent(e.error), percent(e.sigma),
                           100 * e.fraction);
    }
    out << fmt::format("{:<12} {:>10} {:>10} {:>8.1f}%\n", "incoherent", percent(b.incoherent),
                       percent(b.incoherent_sigma), 100 * b.incoherent_fraction());
    out << fmt::format("{:<12} {:>10} {:>10}\n", "coherent", percent(b.coherent), percent(b.coherent_sigma));
    out << fmt::format("{:<12} {:>10} {:>10}\n", "total", percent(b.total), percent(b.total_sigma));
    return kExitOk;
}

int cmd_sweep(const Globals &g, std::ostream &out, std::ostream &err) {
    RunConfig cfg = require_config(g, "sweep", err);
    if (!cfg.sweep) {
        throw InputError(fmt::format("{}: config has no \"sweep\" list", g.config_path));
    }
    if (cfg.sweep->empty()) {
        throw InputError(fmt::format("{}: sweep list is empty", cfg.sweep_location));
    }
    std::vector<SweepRow> rows;
    double fraction_sum = 0;
    out << fmt::format("{:>9} {:>10} {:>10} {:>10} {:>9}\n", "tau_ns", "incoherent", "coherent", "total", "inc/total");
    for (const SweepPoint &p : *cfg.sweep) {
        std::vector<std::string> warnings;
        ErrorBudget b = budget_for(p.coherence, p.gate, p.leakage, warnings);
        for (const auto &w : b.warnings) {
            err << fmt::format("warning (tau = {} ns): {}\n", format_number(p.gate.timing.total()), w);
        }
        out << fmt::format("{:>9} {:>10} {:>10} {:>10} {:>8.1f}%\n", format_number(p.gate.timing.total()),
                           percent(b.incoherent), percent(b.coherent), percent(b.total),
                           100 * b.incoherent_fraction());
        fraction_sum += b.incoherent_fraction();
        rows.push_back({p.gate.timing, std::move(b)});
    }
    write_file(fs::path(g.out_dir) / "sweep.csv", sweep_csv(rows));
    out << fmt::format("mean incoherent fraction {:.1f}%\n", 100 * fraction_sum / rows.size());
    return kExitOk;
}

struct VerifyItem {
    std::string name;
    std::function<CoefficientCheck(const VerifyOptions &)> run;
};

std::vector<VerifyItem> verify_items() {
    std::vector<VerifyItem> items;
    for (const ChannelSelector &s : standard_channels()) {
        std::string kind(gate_kind_name(s.kind));
        std::transform(kind.begin(), kind.end(), kind.begin(), [](unsigned char c) { return std::tolower(c); });
        const char *ch = s.channel == ChannelKind::relaxation ? "relaxation" : "dephasing";
        items.push_back({fmt::format("{}-{}-q{}", kind, ch, s.subsystem + 1),
                         [s](const VerifyOptions &o) { return verify_coefficient(s.kind, s.channel, s.subsystem, o); }});
    }
    items.push_back({"cz20-combined", [](const VerifyOptions &o) { return verify_combined_form(o); }});
    items.push_back({"iswap-1f-exact", [](const VerifyOptions &o) { return verify_iswap_one_over_f(o); }});
    return items;
}

int cmd_verify(const Globals &g, const std::string &channel, double perturbation, std::ostream &out,
               std::ostream &err) {
    VerifyOptions o;
    o.target_perturbation = perturbation;
    std::vector<VerifyItem> items = verify_items();
    if (!channel.empty()) {
        auto it = std::find_if(items.begin(), items.end(), [&](const VerifyItem &i) { return i.name == channel; });
        if (it == items.end()) {
            std::string names;
            for (const auto &i : items) {
                names += " " + i.name;
            }
            throw InputError(fmt::format("unknown channel \"{}\"; choose one of:{}", channel, names));
        }
        items = {*it};
    }
    std::vector<std::pair<std::string, CoefficientCheck>> results;
    for (const VerifyItem &i : items) {
        results.emplace_back(i.name, i.run(o));
    }
    out << fmt::format("{:<40} {:>12} {:>12} {:>10} {:>7}  {}\n", "check", "target", "extracted", "rel.err", "tol",
                       "result");
    json report = json::array();
    std::string csv = "name,label,target,extracted,relative_error,tolerance,fit_residual,passed\n";
    bool all = true;
    for (const auto &[name, c] : results) {
        out << fmt::format("{:<40} {:>12.6g} {:>12.6g} {:>10.2e} {:>7.2g}  {}\n", c.label, c.target, c.extracted,
                           c.relative_error, c.tolerance, c.passed ? "pass" : "FAIL");
        report.push_back({{"name", name},
                          {"label", c.label},
                          {"target", c.target},
                          {"extracted", c.extracted},
                          {"relative_error", c.relative_error},
                          {"tolerance", c.tolerance},
                          {"fit_residual", c.fit_residual},
                          {"passed", c.passed},
                          {"detail", c.detail}});
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", name, csv_quote(c.label), format_number(c.target),
                           format_number(c.extracted), format_number(c.relative_error), format_number(c.tolerance),
                           format_number(c.fit_residual), c.passed ? 1 : 0);
        if (!c.passed) {
            all = false;
            err << fmt::format("verification failed: {} ({})\n", name, c.detail.empty() ? c.label : c.detail);
        }
    }
    if (g.format == "csv") {
        write_file(fs::path(g.out_dir) / "verify.csv", csv);
    } else {
        write_file(fs::path(g.out_dir) / "verify.json", report.dump(2) + "\n");
    }
    return all ? kExitOk : kExitVerificationFailed;
}

struct FitArgs {
    std::string kind;
    std::string data;
    std::string interleaved;
    int dim = 4;
    std::optional<double> nominal_detuning_mhz;
    bool fix_coupler_ec = false;
};

int finish_fit(const Globals &g, const FitArgs &a, json report, bool converged, std::ostream &out,
               std::ostream &err) {
    report["kind"] = a.kind;
    report["data"] = fs::path(a.data).filename().string();
    const fs::path path = fs::path(g.out_dir) / fmt::format("fit_{}.{}", a.kind, g.format);
    write_file(path, g.format == "csv" ? fit_report_csv(report) : report.dump(2) + "\n");
    for (const auto &[name, v] : report["derived"].items()) {
        if (v.is_number()) {
            out << fmt::format("{:<24} {:.8g}\n", name, v.get<double>());
        }
    }
    if (!converged) {
        err << fmt::format("fit did not converge ({})\n", report.value("/fit/status"_json_pointer, std::string("")));
        for (const auto &w : report.value("/fit/warnings"_json_pointer, json::array())) {
            err << "  " << w.get<std::string>() << "\n";
        }
        return kExitFitFailed;
    }
    return kExitOk;
}

int cmd_fit(const Globals &g, const FitArgs &a, std::ostream &out, std::ostream &err) {
    const std::string text = read_file(a.data);
    json report;
    json derived = json::object();
    bool converged = true;
    if (a.kind == "rb") {
        if (a.dim < 2) {
            throw InputError("--dim must be at least 2");
        }
        FitResult ref = fit_rb_decay(parse_xy_csv(text, a.data));
        report["fit"] = fit_result_json(ref);
        converged = ref.converged;
        const LeakageFit lf{ref.param("a"), ref.param("b"), ref.param("p")};
        derived["error_per_clifford"] = rb_error_from_decay(lf.p, a.dim);
        std::optional<double> l_ref;
        try {
            lf.validate();
            l_ref = leakage_from_fit(lf);
            derived["leakage_l1"] = *l_ref;
        } catch (const InputError &e) {
            err << "note: no leakage estimate from this fit: " << e.what() << "\n";
        }
        if (!a.interleaved.empty()) {
            FitResult inter = fit_rb_decay(parse_xy_csv(read_file(a.interleaved), a.interleaved));
            report["interleaved_fit"] = fit_result_json(inter);
            converged = converged && inter.converged;
            derived["gate_error"] = irb_gate_error(ref.param("p"), inter.param("p"), a.dim);
            const LeakageFit li{inter.param("a"), inter.param("b"), inter.param("p")};
            try {
                li.validate();
                if (l_ref) {
                    GateLeakage gl = gate_leakage(*l_ref, leakage_from_fit(li));
                    derived["gate_leakage"] = gl.value;
                }
            } catch (const std::exception &e) {
                err << "note: no gate leakage estimate: " << e.what() << "\n";
            }
        }
    } else if (a.kind == "ramsey") {
        RamseyFitOptions o;
        if (a.nominal_detuning_mhz) {
            o.nominal_delta = 2 * kPi * *a.nominal_detuning_mhz;
        }
        FitResult r = fit_ramsey_modulated(parse_xy_csv(text, a.data), o);
        report["fit"] = fit_result_json(r);
        converged = r.converged;
        derived["t2r_us"] = number_or_null(1 / r.param("gamma2"));
        derived["t_phi_1f_us"] = number_or_null(1 / r.param("gamma_1f"));
        derived["detuning_mhz"] = r.param("delta") / (2 * kPi);
    } else if (a.kind == "coupling") {
        std::optional<RunConfig> cfg = maybe_config(g, err);
        CouplingFitOptions o;
        o.fix_coupler_ec = a.fix_coupler_ec;
        CouplingFit c = fit_coupling_curve(parse_xy_csv(text, a.data), cfg ? cfg->device : reference_device(), o);
        report["fit"] = fit_result_json(c.fit);
        converged = c.fit.converged;
        derived["g12_mhz"] = c.fit.param("g12_mhz");
        derived["sqrt_gprod0_mhz"] = std::sqrt(std::max(c.fit.param("gprod0_mhz2"), 0.0));
        derived["identifiable"] = c.identifiable;
        if (c.zero_flux) {
            derived["zero_flux_phi0"] = *c.zero_flux;
            derived["coupler_ghz_at_zero"] = coupler_frequency(c.device, flux_to_phase(*c.zero_flux));
        }
    } else {
        ChevronAnalysis c = extract_coupling_from_chevron(parse_chevron_csv(text, a.data));
        derived["g_mhz"] = c.g_mhz;
        derived["resonance_flux_phi0"] = c.resonance_flux;
        report["column_freq_mhz"] = c.column_freq_mhz;
    }
    report["derived"] = derived;
    return finish_fit(g, a, report, converged, out, err);
}

struct SynthArgs {
    std::string kind;
    std::vector<std::string> set;
    bool zero_noise = false;
};

// Assigns key=value pairs onto named fields; unknown keys are input errors.
class Settings {
   public:
    explicit Settings(const std::vector<std::string> &pairs) {
        for (const std::string &p : pairs) {
            const size_t eq = p.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw InputError(fmt::format("--set expects key=value, got \"{}\"", p));
            }
            const std::string v = p.substr(eq + 1);
            double x = 0;
            auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc() || ptr != v.data() + v.size()) {
                throw InputError(fmt::format("--set {}: not a number", p));
            }
            values_[p.substr(0, eq)] = x;
        }
    }
    Settings &bind(const std::string &key, double &target) {
        bound_.push_back(key);
        if (auto it = values_.find(key); it != values_.end()) {
            target = it->second;
        }
        return *this;
    }
    Settings &bind(const std::string &key, int &target) {
        double x = target;
        bind(key, x);
        if (x != std::floor(x) || x < 0 || x > 1e7) {
            throw InputError(fmt::format("--set {}: expected a nonnegative integer", key));
        }
        target = static_cast<int>(x);
        return *this;
    }
    void check() const {
        for (const auto &[k, _] : values_) {
            if (std::find(bound_.begin(), bound_.end(), k) == bound_.end()) {
                std::string names;
                for (const auto &b : bound_) {
                    names += " " + b;
                }
                throw InputError(fmt::format("unknown synth parameter \"{}\"; known:{}", k, names));
            }
        }
    }

   private:
    std::map<std::string, double> values_;
    std::vector<std::string> bound_;
};

int cmd_synth(const Globals &g, const SynthArgs &a, std::ostream &out, std::ostream &err) {
    std::optional<RunConfig> cfg = maybe_config(g, err);
    const uint64_t seed = g.seed ? *g.seed : cfg ? cfg->seed : 42;
    Settings s(a.set);
    std::string csv;
    if (a.kind == "rb") {
        RbSynthParams p;
        int max_length = 290, step = 10;
        s.bind("a", p.a).bind("b", p.b).bind("p", p.p).bind("noise", p.noise);
        s.bind("max_length", max_length).bind("step", step);
        s.check();
        if (step < 1) {
            throw InputError("--set step: must be at least 1");
        }
        for (int n = 0; n <= max_length; n += step) {
            p.lengths.push_back(n);
        }
        if (a.zero_noise) {
            p.noise = 0;
        }
        csv = xy_csv(synth_rb(p, seed), "length", "population");
    } else if (a.kind == "ramsey") {
        RamseySynthParams p;
        s.bind("amp", p.amp).bind("gamma2", p.gamma2).bind("gamma_1f", p.gamma_1f).bind("delta", p.delta);
        s.bind("phase", p.phase).bind("offset", p.offset).bind("t_max_us", p.t_max_us).bind("points", p.points);
        s.bind("noise", p.noise);
        s.check();
        if (a.zero_noise) {
            p.noise = 0;
        }
        csv = xy_csv(synth_ramsey(p, seed), "time_us", "signal");
    } else if (a.kind == "chevron") {
        ChevronSynthParams p;
        s.bind("g_mhz", p.g_mhz).bind("flux_center", p.flux_center).bind("detuning_mhz_per_flux", p.detuning_mhz_per_flux);
        s.bind("flux_min", p.flux_min).bind("flux_max", p.flux_max).bind("flux_points", p.flux_points);
        s.bind("t_max_ns", p.t_max_ns).bind("time_points", p.time_points).bind("noise", p.noise);
        s.check();
        if (a.zero_noise) {
            p.noise = 0;
        }
        csv = chevron_csv(synth_chevron(p, seed));
    } else if (a.kind == "coupling") {
        CouplingSynthParams p;
        s.bind("flux_min", p.flux_min).bind("flux_max", p.flux_max).bind("points", p.points).bind("noise", p.noise);
        s.check();
        if (a.zero_noise) {
            p.noise = 0;
        }
        csv = xy_csv(synth_coupling(cfg ? cfg->device : reference_device(), p, seed), "flux_phi0", "coupling_mhz");
    } else {
        FluxPulse pulse;
        pulse.amplitude = 0.1;
        pulse.timing = {48, 8, 8, 4};
        double rate = 1;
        s.bind("amplitude", pulse.amplitude).bind("mod_freq_mhz", pulse.mod_freq_mhz);
        s.bind("t_g_ns", pulse.timing.t_g).bind("t_wl_ns", pulse.timing.t_wl).bind("t_wr_ns", pulse.timing.t_wr);
        s.bind("t_r_ns", pulse.timing.t_r).bind("samples_per_ns", rate);
        s.check();
        pulse.timing.validate();
        csv = "t_ns,value\n";
        for (const WaveformSample &w : sample_waveform(pulse, rate)) {
            csv += fmt::format("{},{}\n", format_number(w.t_ns), format_number(w.value));
        }
    }
    const fs::path path = fs::path(g.out_dir) / fmt::format("synth_{}.csv", a.kind);
    write_file(path, csv);
    out << path.string() << "\n";
    return kExitOk;
}

}  // namespace

std::string format_number(double x) {
    return fmt::format("{:.17g}", x);
}

std::string budget_csv(const ErrorBudget &b) {
    std::string out = "channel,error,sigma,fraction,provenance\n";
    for (const BudgetEntry &e : b.entries) {
        out += fmt::format("{},{},{},{},{}\n", e.channel, format_number(e.error), format_number(e.sigma),
                           format_number(e.fraction), csv_quote(e.provenance));
    }
    const double coherent_fraction = b.total > 0 ? b.coherent / b.total : 0;
    out += fmt::format("incoherent,{},{},{},{}\n", format_number(b.incoherent), format_number(b.incoherent_sigma),
                       format_number(b.incoherent_fraction()), csv_quote("sum of t1, t_phi_white, t_phi_1f"));
    out += fmt::format("coherent,{},{},{},{}\n", format_number(b.coherent), format_number(b.coherent_sigma),
                       format_number(coherent_fraction), csv_quote("sum of amplitude, phase, leakage"));
    out += fmt::format("total,{},{},{},{}\n", format_number(b.total), format_number(b.total_sigma),
                       format_number(b.total > 0 ? 1.0 : 0.0), csv_quote("incoherent + coherent"));
    return out;
}

std::string budget_json(const ErrorBudget &b, const GateConfig &gate, double leakage) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["gate"] = {{"kind", std::string(gate_kind_name(gate.kind))},
                 {"t_g_ns", gate.timing.t_g},
                 {"t_wl_ns", gate.timing.t_wl},
                 {"t_wr_ns", gate.timing.t_wr},
                 {"t_r_ns", gate.timing.t_r},
                 {"delta_phi_rad", gate.delta_phi()},
                 {"delta_theta_rad", gate.delta_theta()},
                 {"leakage", leakage}};
    json channels = json::array();
    for (const BudgetEntry &e : b.entries) {
        channels.push_back({{"channel", e.channel},
                            {"error", e.error},
                            {"sigma", e.sigma},
                            {"fraction", e.fraction},
                            {"provenance", e.provenance}});
    }
    j["channels"] = channels;
    j["incoherent"] = {{"error", b.incoherent}, {"sigma", b.incoherent_sigma}, {"fraction", b.incoherent_fraction()}};
    j["coherent"] = {{"error", b.coherent}, {"sigma", b.coherent_sigma}};
    j["total"] = {{"error", b.total}, {"sigma", b.total_sigma}};
    j["warnings"] = b.warnings;
    return j.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
    static const char *kChannels[] = {"t1", "t_phi_white", "t_phi_1f", "amplitude", "phase", "leakage"};
    std::string out = "tau_ns,t_g_ns,t_wl_ns,t_wr_ns";
    for (const char *c : kChannels) {
        out += fmt::format(",{}", c);
    }
    out += ",incoherent,coherent,total,incoherent_sigma,coherent_sigma,total_sigma,incoherent_fraction\n";
    for (const SweepRow &r : rows) {
        out += fmt::format("{},{},{},{}", format_number(r.timing.total()), format_number(r.timing.t_g),
                           format_number(r.timing.t_wl), format_number(r.timing.t_wr));
        for (const char *c : kChannels) {
            out += "," + format_number(r.budget.entry(c).error);
        }
        const ErrorBudget &b = r.budget;
        for (double v : {b.incoherent, b.coherent, b.total, b.incoherent_sigma, b.coherent_sigma, b.total_sigma,
                         b.incoherent_fraction()}) {
            out += "," + format_number(v);
        }
        out += "\n";
    }
    return out;
}

XYDataset parse_xy_csv(const std::string &text, const std::string &source) {
    XYDataset d;
    for (const auto &row : parse_numeric_csv(text, source, 2, 3)) {
        d.x.push_back(row[0]);
        d.y.push_back(row[1]);
        if (row.size() == 3) {
            d.sigma.push_back(row[2]);
        }
    }
    try {
        d.validate();
    } catch (const InputError &e) {
        throw InputError(fmt::format("{}: {}", source, e.what()));
    }
    return d;
}

ChevronGrid parse_chevron_csv(const std::string &text, const std::string &source) {
    const auto rows = parse_numeric_csv(text, source, 3, 3);
    std::vector<double> flux, time;
    for (const auto &r : rows) {
        flux.push_back(r[0]);
        time.push_back(r[1]);
    }
    auto unique_sorted = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    ChevronGrid g;
    g.flux = unique_sorted(flux);
    g.time_ns = unique_sorted(time);
    if (g.flux.size() * g.time_ns.size() != rows.size()) {
        throw InputError(fmt::format("{}: {} rows do not form a full {} x {} flux-time grid", source, rows.size(),
                                     g.flux.size(), g.time_ns.size()));
    }
    g.population = Eigen::MatrixXd::Constant(g.time_ns.size(), g.flux.size(), std::nan(""));
    for (const auto &r : rows) {
        const auto j = std::lower_bound(g.flux.begin(), g.flux.end(), r[0]) - g.flux.begin();
        const auto i = std::lower_bound(g.time_ns.begin(), g.time_ns.end(), r[1]) - g.time_ns.begin();
        if (!std::isnan(g.population(i, j))) {
            throw InputError(fmt::format("{}: duplicate point flux {} time {}", source, r[0], r[1]));
        }
        g.population(i, j) = r[2];
    }
    try {
        g.validate();
    } catch (const InputError &e) {
        throw InputError(fmt::format("{}: {}", source, e.what()));
    }
    return g;
}

std::string xy_csv(const XYDataset &d, const std::string &x_name, const std::string &y_name) {
    std::string out = x_name + "," + y_name + (d.sigma.empty() ? "" : ",sigma") + "\n";
    for (size_t i = 0; i < d.size(); i++) {
        out += format_number(d.x[i]) + "," + format_number(d.y[i]);
        if (!d.sigma.empty()) {
            out += "," + format_number(d.sigma[i]);
        }
        out += "\n";
    }
    return out;
}

std::string chevron_csv(const ChevronGrid &g) {
    std::string out = "flux_phi0,time_ns,population\n";
    for (size_t j = 0; j < g.flux.size(); j++) {
        for (size_t i = 0; i < g.time_ns.size(); i++) {
            out += fmt::format("{},{},{}\n", format_number(g.flux[j]), format_number(g.time_ns[i]),
                               format_number(g.population(i, j)));
        }
    }
    return out;
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Error budgets for tunable-coupler two-qubit gates", "gatebudget"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "JSON run configuration");
    app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
    app.add_option("--seed", g.seed, "RNG seed for synth (overrides the config seed)");
    app.add_option("--format", g.format, "Report format for verify and fit")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    CLI::App *budget = app.add_subcommand("budget", "Write budget.json and budget.csv for the configured gate");
    CLI::App *sweep = app.add_subcommand("sweep", "Write sweep.csv over the configured gate times");

    CLI::App *verify = app.add_subcommand("verify", "Check the analytic coefficients against Lindblad simulation");
    std::string channel;
    double perturbation = 0;
    verify->add_option("--channel", channel, "Run a single check, e.g. cz20-relaxation-q1");
    verify->add_option("--inject-coefficient-error", perturbation)->group("");

    CLI::App *fit = app.add_subcommand("fit", "Fit a measured or synthetic dataset");
    FitArgs fa;
    fit->add_option("kind", fa.kind, "rb, ramsey, coupling or chevron")
        ->required()
        ->check(CLI::IsMember({"rb", "ramsey", "coupling", "chevron"}));
    fit->add_option("data", fa.data, "CSV file")->required();
    fit->add_option("--interleaved", fa.interleaved, "Interleaved RB CSV (rb only)");
    fit->add_option("--dim", fa.dim, "Hilbert-space dimension for RB error conversion")->capture_default_str();
    fit->add_option("--nominal-detuning-mhz", fa.nominal_detuning_mhz, "Programmed Ramsey detuning (ramsey only)");
    fit->add_flag("--fix-coupler-ec", fa.fix_coupler_ec, "Hold the coupler EC at the guess (coupling only)");

    CLI::App *synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    SynthArgs sa;
    synth->add_option("kind", sa.kind, "rb, ramsey, chevron, coupling or waveform")
        ->required()
        ->check(CLI::IsMember({"rb", "ramsey", "chevron", "coupling", "waveform"}));
    synth->add_option("--set", sa.set, "Model parameter as key=value (repeatable)");
    synth->add_flag("--zero-noise", sa.zero_noise, "Exact forward-model values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp &e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kExitInputError;
    }

    try {
        if (budget->parsed()) {
            return cmd_budget(g, out, err);
        }
        if (sweep->parsed()) {
            return cmd_sweep(g, out, err);
        }
        if (verify->parsed()) {
            return cmd_verify(g, channel, perturbation, out, err);
        }
        if (fit->parsed()) {
            return cmd_fit(g, fa, out, err);
        }
        return cmd_synth(g, sa, out, err);
    } catch (const FitError &e) {
        err << "fit failed: " << e.what() << "\n";
        return kExitFitFailed;
    } catch (const InputError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const CalibrationError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const BracketError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const fs::filesystem_error &e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception &e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitVerificationFailed;
    }
}

}  // namespace gatebudget
