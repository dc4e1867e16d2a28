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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

#include "gatebudget/errors.h"
#include "gatebudget/lindblad_engine.h"

namespace gatebudget {

namespace {

using json = nlohmann::json;

// Forward iterator over the text that publishes how far the parser has read.
class CountingIterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char *;
    using reference = const char &;

    CountingIterator(const char *p, const char **head) : p_(p), head_(head) {}
    reference operator*() const {
        return *p_;
    }
    CountingIterator &operator++() {
        ++p_;
        *head_ = std::max(*head_, p_);
        return *this;
    }
    CountingIterator operator++(int) {
        CountingIterator old = *this;
        ++*this;
        return old;
    }
    bool operator==(const CountingIterator &o) const {
        return p_ == o.p_;
    }
    bool operator!=(const CountingIterator &o) const {
        return p_ != o.p_;
    }

   private:
    const char *p_;
    const char **head_;
};

class LineIndex {
   public:
    explicit LineIndex(const std::string &text) {
        for (size_t i = 0; i < text.size(); i++) {
            if (text[i] == '\n') {
                newlines_.push_back(i);
            }
        }
    }
    int line_of(size_t offset) const {
        return 1 + static_cast<int>(std::lower_bound(newlines_.begin(), newlines_.end(), offset) - newlines_.begin());
    }

   private:
    std::vector<size_t> newlines_;
};

// Builds the DOM through nlohmann's own SAX builder and records the line of every key
// and array element under its JSON pointer.
class LineTrackingSax {
   public:
    LineTrackingSax(json &root, const char *begin, const char **head, const LineIndex &index,
                    std::map<std::string, int> &lines)
        : dom_(root, true), begin_(begin), head_(head), index_(index), lines_(lines) {}

    bool null() {
        element(1);
        return dom_.null();
    }
    bool boolean(bool v) {
        element(1);
        return dom_.boolean(v);
    }
    // The lexer reads one character past a number.
    bool number_integer(json::number_integer_t v) {
        element(2);
        return dom_.number_integer(v);
    }
    bool number_unsigned(json::number_unsigned_t v) {
        element(2);
        return dom_.number_unsigned(v);
    }
    bool number_float(json::number_float_t v, const json::string_t &s) {
        element(2);
        return dom_.number_float(v, s);
    }
    bool string(json::string_t &v) {
        element(1);
        return dom_.string(v);
    }
    bool binary(json::binary_t &v) {
        element(1);
        return dom_.binary(v);
    }
    bool start_object(std::size_t n) {
        frames_.push_back({false, 0, "", element(1)});
        return dom_.start_object(n);
    }
    bool key(json::string_t &k) {
        frames_.back().key = k;
        lines_[frames_.back().path + "/" + k] = line(1);
        return dom_.key(k);
    }
    bool end_object() {
        frames_.pop_back();
        return dom_.end_object();
    }
    bool start_array(std::size_t n) {
        frames_.push_back({true, 0, "", element(1)});
        return dom_.start_array(n);
    }
    bool end_array() {
        frames_.pop_back();
        return dom_.end_array();
    }
    bool parse_error(std::size_t pos, const std::string &tok, const nlohmann::detail::exception &ex) {
        return dom_.parse_error(pos, tok, ex);
    }

   private:
    struct Frame {
        bool array;
        size_t index;
        std::string key;
        std::string path;
    };

    int line(size_t back) const {
        const size_t consumed = static_cast<size_t>(*head_ - begin_);
        return index_.line_of(consumed >= back ? consumed - back : 0);
    }

    std::string element(size_t back) {
        if (frames_.empty()) {
            lines_[""] = line(back);
            return "";
        }
        Frame &top = frames_.back();
        if (!top.array) {
            return top.path + "/" + top.key;
        }
        std::string path = top.path + "/" + std::to_string(top.index++);
        lines_[path] = line(back);
        return path;
    }

    nlohmann::detail::json_sax_dom_parser<json> dom_;
    const char *begin_;
    const char **head_;
    const LineIndex &index_;
    std::map<std::string, int> &lines_;
    std::vector<Frame> frames_;
};

struct Document {
    std::string source;
    std::map<std::string, int> lines;
};

// A value together with its location, for anchored error messages.
class Node {
   public:
    Node(const json &value, std::string path, const Document &doc) : v_(value), path_(std::move(path)), doc_(doc) {}

    const json &value() const {
        return v_;
    }
    const std::string &path() const {
        return path_;
    }

    [[noreturn]] void fail(const std::string &reason) const {
        throw InputError(fmt::format("{}: {}", location(), reason));
    }

    std::string location() const {
        std::string p = path_;
        auto it = doc_.lines.find(p);
        while (it == doc_.lines.end() && !p.empty()) {
            p.erase(p.rfind('/'));
            it = doc_.lines.find(p);
        }
        const int line = it == doc_.lines.end() ? 1 : it->second;
        return fmt::format("{}:{}: {}", doc_.source, line, path_.empty() ? "/" : path_);
    }

    void expect_object() const {
        if (!v_.is_object()) {
            fail("expected an object");
        }
    }

    void allow_keys(std::initializer_list<std::string_view> keys) const {
        expect_object();
        for (const auto &[k, _] : v_.items()) {
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
                child(k).fail("unknown key");
            }
        }
    }

    bool has(std::string_view key) const {
        return v_.contains(key);
    }

    Node child(std::string_view key) const {
        return Node(v_.at(std::string(key)), path_ + "/" + std::string(key), doc_);
    }

    Node element(size_t i) const {
        return Node(v_.at(i), path_ + "/" + std::to_string(i), doc_);
    }

    double as_number() const {
        if (!v_.is_number()) {
            fail("expected a number");
        }
        const double x = v_.get<double>();
        if (!std::isfinite(x)) {
            fail("expected a finite number");
        }
        return x;
    }

    // A number or the string "inf".
    double as_time() const {
        if (v_.is_string() && v_.get<std::string>() == "inf") {
            return kInfiniteTime;
        }
        if (!v_.is_number()) {
            fail("expected a number or \"inf\"");
        }
        const double x = v_.get<double>();
        if (!(x > 0)) {
            fail("times must be positive");
        }
        return x;
    }

    std::string as_string() const {
        if (!v_.is_string()) {
            fail("expected a string");
        }
        return v_.get<std::string>();
    }

    bool as_bool() const {
        if (!v_.is_boolean()) {
            fail("expected true or false");
        }
        return v_.get<bool>();
    }

    double number(std::string_view key) const {
        if (!has(key)) {
            fail(fmt::format("missing key \"{}\"", key));
        }
        return child(key).as_number();
    }

    void read(std::string_view key, double &out) const {
        if (has(key)) {
            out = child(key).as_number();
        }
    }

    void read_nonnegative(std::string_view key, double &out) const {
        if (has(key)) {
            out = child(key).as_number();
            if (out < 0) {
                child(key).fail("must be nonnegative");
            }
        }
    }

    // Runs `f` and re-anchors InputError and friends from the model validation here.
    template <class F>
    auto anchored(F &&f) const {
        try {
            return f();
        } catch (const InputError &e) {
            fail(e.what());
        } catch (const DomainError &e) {
            fail(e.what());
        } catch (const CalibrationError &e) {
            fail(e.what());
        }
    }

   private:
    const json &v_;
    std::string path_;
    const Document &doc_;
};

TransmonParams parse_transmon(const Node &n, FrequencyModel model, const TransmonParams &base) {
    n.allow_keys({"ejs_ghz", "ejl_ghz", "ec_ghz", "f_max_ghz", "f_min_ghz", "anharmonicity_ghz"});
    const bool energies = n.has("ejs_ghz") || n.has("ejl_ghz") || n.has("ec_ghz");
    const bool extrema = n.has("f_max_ghz") || n.has("f_min_ghz") || n.has("anharmonicity_ghz");
    if (energies && extrema) {
        n.fail("give either junction energies or frequency extrema, not both");
    }
    TransmonParams t = base;
    if (extrema) {
        const double f_max = n.number("f_max_ghz");
        const double f_min = n.number("f_min_ghz");
        const double alpha = n.number("anharmonicity_ghz");
        t = n.anchored([&] { return calibrate_from_extrema(f_max, f_min, alpha, model); });
    } else {
        n.read("ejs_ghz", t.ejs);
        n.read("ejl_ghz", t.ejl);
        n.read("ec_ghz", t.ec);
    }
    n.anchored([&] { t.validate(); });
    return t;
}

DeviceParams parse_device(const Node &n) {
    n.allow_keys({"preset", "qubit1", "qubit2", "coupler", "f01_1_ghz", "f01_2_ghz", "coupling"});
    if (n.has("preset") && n.child("preset").as_string() != "reference") {
        n.child("preset").fail("the only device preset is \"reference\"");
    }
    DeviceParams d = reference_device();
    if (n.has("qubit1")) {
        d.qubit1 = parse_transmon(n.child("qubit1"), FrequencyModel::bare, d.qubit1);
    }
    if (n.has("qubit2")) {
        d.qubit2 = parse_transmon(n.child("qubit2"), FrequencyModel::bare, d.qubit2);
    }
    if (n.has("coupler")) {
        d.coupler = parse_transmon(n.child("coupler"), FrequencyModel::xi_corrected, d.coupler);
    }
    n.read("f01_1_ghz", d.f01_1_ghz);
    n.read("f01_2_ghz", d.f01_2_ghz);
    if (n.has("coupling")) {
        Node c = n.child("coupling");
        c.allow_keys({"g12_mhz", "gprod0_mhz2", "ref_flux_phi0", "scaling"});
        c.read("g12_mhz", d.coupling.g12_mhz);
        c.read("gprod0_mhz2", d.coupling.gprod0_mhz2);
        c.read("ref_flux_phi0", d.coupling.ref_flux);
        if (c.has("scaling")) {
            const std::string s = c.child("scaling").as_string();
            if (s == "sqrt_coupler_frequency") {
                d.coupling.scaling = CouplingScaling::sqrt_coupler_frequency;
            } else if (s == "constant") {
                d.coupling.scaling = CouplingScaling::constant;
            } else {
                c.child("scaling").fail("expected \"sqrt_coupler_frequency\" or \"constant\"");
            }
        }
    }
    n.anchored([&] { d.validate(); });
    return d;
}

void parse_phase(const Node &n, PhaseCoherence &q) {
    n.allow_keys({"t1_us", "t1_sigma_us", "t2r_us", "t2r_sigma_us", "t_phi_1f_us", "t_phi_1f_sigma_us"});
    if (n.has("t1_us")) {
        q.t1_us = n.child("t1_us").as_time();
    }
    if (n.has("t2r_us")) {
        q.t2r_us = n.child("t2r_us").as_time();
    }
    if (n.has("t_phi_1f_us")) {
        Node t = n.child("t_phi_1f_us");
        if (t.value().is_null()) {
            q.t_phi_1f_us.reset();
        } else {
            q.t_phi_1f_us = t.as_time();
        }
    }
    n.read_nonnegative("t1_sigma_us", q.t1_sigma_us);
    n.read_nonnegative("t2r_sigma_us", q.t2r_sigma_us);
    n.read_nonnegative("t_phi_1f_sigma_us", q.t_phi_1f_sigma_us);
}

// Applies the fields present in `n` on top of `c`.
void parse_coherence(const Node &n, CoherenceSet &c, std::vector<std::string> &warnings) {
    n.allow_keys({"preset", "idle", "active", "flux_sensitive"});
    if (n.has("preset")) {
        const std::string p = n.child("preset").as_string();
        if (p == "reference") {
            c = reference_coherence();
        } else if (p == "none") {
            c = CoherenceSet{};
        } else {
            n.child("preset").fail("expected \"reference\" or \"none\"");
        }
    }
    for (const char *phase : {"idle", "active"}) {
        if (!n.has(phase)) {
            continue;
        }
        Node a = n.child(phase);
        if (!a.value().is_array() || a.value().size() != 2) {
            a.fail("expected an array of two qubit entries");
        }
        auto &target = std::string_view(phase) == "idle" ? c.idle : c.active;
        for (size_t k = 0; k < 2; k++) {
            parse_phase(a.element(k), target[k]);
        }
    }
    if (n.has("flux_sensitive")) {
        Node f = n.child("flux_sensitive");
        if (!f.value().is_array() || f.value().size() != 2) {
            f.fail("expected an array of two booleans");
        }
        for (size_t k = 0; k < 2; k++) {
            c.flux_sensitive[k] = f.element(k).as_bool();
        }
    }
    for (const std::string &w : n.anchored([&] { return c.validate(); })) {
        warnings.push_back(w);
    }
}

void parse_angles(const Node &n, GateConfig &g) {
    if (n.has("cond_phase_rad") && n.has("delta_phi_rad")) {
        n.fail("give cond_phase_rad or delta_phi_rad, not both");
    }
    if (n.has("swap_angle_rad") && n.has("delta_theta_rad")) {
        n.fail("give swap_angle_rad or delta_theta_rad, not both");
    }
    n.read("cond_phase_rad", g.cond_phase_rad);
    n.read("swap_angle_rad", g.swap_angle_rad);
    if (n.has("delta_phi_rad")) {
        g.cond_phase_rad = g.target_cond_phase() - n.child("delta_phi_rad").as_number();
    }
    if (n.has("delta_theta_rad")) {
        g.swap_angle_rad = g.target_swap_angle() + n.child("delta_theta_rad").as_number();
    }
    n.read_nonnegative("cond_phase_sigma_rad", g.cond_phase_sigma_rad);
    n.read_nonnegative("swap_angle_sigma_rad", g.swap_angle_sigma_rad);
}

void parse_timing(const Node &n, GateTiming &t) {
    n.read("t_g_ns", t.t_g);
    n.read("t_wl_ns", t.t_wl);
    n.read("t_wr_ns", t.t_wr);
    n.read("t_r_ns", t.t_r);
}

GateConfig parse_gate(const Node &n) {
    n.allow_keys({"kind", "g_mhz", "t_g_ns", "t_wl_ns", "t_wr_ns", "t_r_ns", "cond_phase_rad", "delta_phi_rad",
                  "swap_angle_rad", "delta_theta_rad", "cond_phase_sigma_rad", "swap_angle_sigma_rad"});
    GateConfig g;
    if (n.has("kind")) {
        const std::string k = n.child("kind").as_string();
        g.kind = n.child("kind").anchored([&] { return parse_gate_kind(k); });
    }
    // Ideal angles unless told otherwise.
    g.cond_phase_rad = g.target_cond_phase();
    g.swap_angle_rad = g.target_swap_angle();
    n.read_nonnegative("g_mhz", g.g_mhz);
    parse_timing(n, g.timing);
    if (!n.has("t_g_ns")) {
        if (!(g.g_mhz > 0)) {
            n.fail("need t_g_ns or a positive g_mhz");
        }
        g.timing.t_g = 1e3 * gate_time_us(g.kind, 2 * std::numbers::pi * g.g_mhz);
    }
    parse_angles(n, g);
    n.anchored([&] { g.validate(); });
    return g;
}

LeakageFit parse_leakage_fit(const Node &n) {
    n.allow_keys({"a", "b", "p"});
    LeakageFit f{n.number("a"), n.number("b"), n.number("p")};
    n.anchored([&] { f.validate(); });
    return f;
}

LeakageInput parse_leakage(const Node &n) {
    n.allow_keys({"value", "l_ref", "l_int", "reference_fit", "interleaved_fit", "sigma"});
    LeakageInput l;
    const int forms = int(n.has("value")) + int(n.has("l_ref") || n.has("l_int")) +
                      int(n.has("reference_fit") || n.has("interleaved_fit"));
    if (forms != 1) {
        n.fail("give exactly one of value, l_ref/l_int, reference_fit/interleaved_fit");
    }
    if (n.has("value")) {
        l.value = n.child("value").as_number();
    } else if (n.has("l_ref") || n.has("l_int")) {
        l.l_ref = n.number("l_ref");
        l.l_int = n.number("l_int");
    } else {
        if (!n.has("reference_fit") || !n.has("interleaved_fit")) {
            n.fail("need both reference_fit and interleaved_fit");
        }
        l.reference_fit = parse_leakage_fit(n.child("reference_fit"));
        l.interleaved_fit = parse_leakage_fit(n.child("interleaved_fit"));
    }
    n.read_nonnegative("sigma", l.sigma);
    n.anchored([&] { return l.resolve(); });
    return l;
}

SweepPoint parse_sweep_point(const Node &n, const RunConfig &base, std::vector<std::string> &warnings) {
    n.allow_keys({"t_g_ns", "t_wl_ns", "t_wr_ns", "t_r_ns", "cond_phase_rad", "delta_phi_rad", "swap_angle_rad",
                  "delta_theta_rad", "cond_phase_sigma_rad", "swap_angle_sigma_rad", "coherence", "leakage"});
    SweepPoint p{base.gate, base.coherence, base.leakage};
    if (!n.has("t_g_ns")) {
        n.fail("missing key \"t_g_ns\"");
    }
    parse_timing(n, p.gate.timing);
    parse_angles(n, p.gate);
    n.anchored([&] { p.gate.validate(); });
    if (n.has("coherence")) {
        parse_coherence(n.child("coherence"), p.coherence, warnings);
    }
    if (n.has("leakage")) {
        p.leakage = parse_leakage(n.child("leakage"));
    }
    return p;
}

}  // namespace

double LeakageInput::resolve(std::vector<std::string> *warnings) const {
    double v = 0;
    if (value) {
        v = *value;
    } else if (l_ref && l_int) {
        GateLeakage g = gate_leakage(*l_ref, *l_int);
        if (g.negative && warnings) {
            warnings->push_back(fmt::format("interleaved leakage below reference (gate leakage {:.3g}); using 0", g.value));
        }
        v = std::max(g.value, 0.0);
    } else if (reference_fit && interleaved_fit) {
        GateLeakage g = gate_leakage(leakage_from_fit(*reference_fit), leakage_from_fit(*interleaved_fit));
        if (g.negative && warnings) {
            warnings->push_back(fmt::format("interleaved leakage below reference (gate leakage {:.3g}); using 0", g.value));
        }
        v = std::max(g.value, 0.0);
    }
    if (!(v >= 0 && v < 1)) {
        throw InputError(fmt::format("leakage must lie in [0, 1), got {}", v));
    }
    return v;
}

RunConfig parse_config(const std::string &text, const std::string &source) {
    Document doc{source, {}};
    json root;
    const LineIndex index(text);
    const char *begin = text.data();
    const char *head = begin;
    LineTrackingSax sax(root, begin, &head, index, doc.lines);
    try {
        json::sax_parse(CountingIterator(begin, &head), CountingIterator(begin + text.size(), &head), &sax);
    } catch (const json::exception &e) {
        // The DOM builder rethrows a sliced copy without the byte offset.
        const size_t consumed = static_cast<size_t>(head - begin);
        throw InputError(
            fmt::format("{}:{}: malformed JSON: {}", source, index.line_of(consumed > 0 ? consumed - 1 : 0), e.what()));
    }

    Node n(root, "", doc);
    n.allow_keys({"schema_version", "seed", "device", "coherence", "gate", "leakage", "sweep"});
    RunConfig cfg;
    if (!n.has("schema_version")) {
        n.fail("missing key \"schema_version\"");
    }
    Node version = n.child("schema_version");
    if (!version.value().is_number_integer() || version.value().get<int64_t>() != kSchemaVersion) {
        version.fail(fmt::format("unsupported schema version, expected {}", kSchemaVersion));
    }
    if (n.has("seed")) {
        Node s = n.child("seed");
        if (!s.value().is_number_unsigned()) {
            s.fail("expected a nonnegative integer");
        }
        cfg.seed = s.value().get<uint64_t>();
    }
    cfg.device = n.has("device") ? parse_device(n.child("device")) : reference_device();
    if (n.has("coherence")) {
        parse_coherence(n.child("coherence"), cfg.coherence, cfg.warnings);
    }
    if (!n.has("gate")) {
        n.fail("missing key \"gate\"");
    }
    cfg.gate = parse_gate(n.child("gate"));
    if (n.has("leakage")) {
        cfg.leakage = parse_leakage(n.child("leakage"));
    } else {
        cfg.leakage.value = 0;
    }
    if (n.has("sweep")) {
        Node s = n.child("sweep");
        if (!s.value().is_array()) {
            s.fail("expected an array of gate times");
        }
        cfg.sweep.emplace();
        cfg.sweep_location = s.location();
        for (size_t i = 0; i < s.value().size(); i++) {
            cfg.sweep->push_back(parse_sweep_point(s.element(i), cfg, cfg.warnings));
        }
    }
    return cfg;
}

RunConfig load_config(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(fmt::format("{}: cannot open config", path));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

RunConfig reference_config() {
    RunConfig cfg;
    cfg.device = reference_device();
    cfg.coherence = reference_coherence();
    cfg.gate.kind = GateKind::cz20;
    cfg.gate.g_mhz = 10.4;
    cfg.gate.timing = {48, 8, 8, 4};
    cfg.gate.cond_phase_rad = std::numbers::pi - 0.056;
    cfg.gate.swap_angle_rad = -0.015;
    cfg.leakage.value = 0.0015;
    return cfg;
}

}  // namespace gatebudget
