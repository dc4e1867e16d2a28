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

#include "gatebudget/lindblad_engine.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gatebudget/errors.h"

namespace gatebudget {

namespace {

constexpr Complex kI{0, 1};

int product(std::span<const int> dims) {
    int d = 1;
    for (int k : dims) {
        d *= k;
    }
    return d;
}

double norm1(const ComplexMatrix &a) {
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

double max_abs(const ComplexMatrix &a) {
    return a.size() == 0 ? 0 : a.cwiseAbs().maxCoeff();
}

void require_finite(const ComplexMatrix &m, const char *what) {
    if (!m.allFinite()) {
        throw NumericError(std::string(what) + " contains non-finite entries");
    }
}

// Adds gamma * (2 L* kron L - I kron L^dag L - (L^dag L)^T kron I) / 2 * scale to `out`.
void add_dissipator(ComplexMatrix &out, const ComplexMatrix &op, double weight) {
    const auto d = op.rows();
    ComplexMatrix id = ComplexMatrix::Identity(d, d);
    ComplexMatrix ldl = op.adjoint() * op;
    out += weight * (kron(op.conjugate(), op) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
}

void check_channels(std::span<const int> dims, std::span<const NoiseChannel> channels) {
    for (const auto &c : channels) {
        if (c.subsystem < 0 || c.subsystem >= static_cast<int>(dims.size())) {
            throw InputError("noise channel subsystem index out of range");
        }
        if (!(c.rate >= 0) || !std::isfinite(c.rate)) {
            throw InputError("noise channel rates must be finite and nonnegative");
        }
    }
}

void check_hamiltonian(const ComplexMatrix &h, std::span<const int> dims) {
    if (h.rows() != h.cols() || h.rows() != product(dims)) {
        throw InputError("Hamiltonian shape does not match subsystem dimensions");
    }
    require_finite(h, "Hamiltonian");
    if (max_abs(h - h.adjoint()) > 1e-12 * std::max(1.0, max_abs(h))) {
        throw InputError("Hamiltonian is not Hermitian");
    }
}

ComplexMatrix coherent_part(const ComplexMatrix &h) {
    const auto d = h.rows();
    ComplexMatrix id = ComplexMatrix::Identity(d, d);
    return -kI * (kron(id, h) - kron(h.transpose(), id));
}

}  // namespace

int Superoperator::hilbert_dim() const {
    return product(dims);
}

void Superoperator::validate() const {
    const int d = hilbert_dim();
    if (matrix.rows() != d * d || matrix.cols() != d * d) {
        throw InputError("superoperator size is inconsistent with its subsystem dimensions");
    }
}

std::string_view gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::cz20:
            return "CZ20";
        case GateKind::cz02:
            return "CZ02";
        case GateKind::iswap:
            return "iSWAP";
    }
    return "?";
}

GateKind parse_gate_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "cz20") {
        return GateKind::cz20;
    }
    if (lower == "cz02") {
        return GateKind::cz02;
    }
    if (lower == "iswap") {
        return GateKind::iswap;
    }
    throw InputError("unknown gate kind '" + std::string(name) + "' (expected CZ20, CZ02 or iSWAP)");
}

bool is_cz(GateKind kind) {
    return kind != GateKind::iswap;
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexVector vectorize(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        throw InputError("vectorize expects a square matrix");
    }
    // Eigen storage is column-major, which is exactly column stacking.
    return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvectorize(const ComplexVector &v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) {
        throw InputError("vector length is not a perfect square");
    }
    return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

ComplexMatrix lowering_op(int levels) {
    if (levels != 2 && levels != 3) {
        throw InputError("only 2- and 3-level operators are supported");
    }
    ComplexMatrix a = ComplexMatrix::Zero(levels, levels);
    for (int k = 1; k < levels; k++) {
        a(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    return a;
}

ComplexMatrix number_op(int levels) {
    ComplexMatrix a = lowering_op(levels);
    return a.adjoint() * a;
}

ComplexMatrix embed_operator(const ComplexMatrix &op, int subsystem, std::span<const int> dims) {
    if (subsystem < 0 || subsystem >= static_cast<int>(dims.size())) {
        throw InputError("subsystem index out of range");
    }
    if (op.rows() != dims[subsystem] || op.cols() != dims[subsystem]) {
        throw InputError("operator size does not match the subsystem dimension");
    }
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int k = 0; k < static_cast<int>(dims.size()); k++) {
        out = kron(out, k == subsystem ? op : ComplexMatrix::Identity(dims[k], dims[k]));
    }
    return out;
}

std::vector<int> gate_dims(GateKind kind) {
    return is_cz(kind) ? std::vector<int>{3, 3} : std::vector<int>{2, 2};
}

ComplexMatrix gate_hamiltonian(GateKind kind, double g) {
    auto dims = gate_dims(kind);
    const int d = product(dims);
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    auto index = [&](int q1, int q2) { return q1 * dims[1] + q2; };
    int a = 0;
    int b = 0;
    switch (kind) {
        case GateKind::cz20:
            a = index(1, 1);
            b = index(2, 0);
            break;
        case GateKind::cz02:
            a = index(1, 1);
            b = index(0, 2);
            break;
        case GateKind::iswap:
            a = index(1, 0);
            b = index(0, 1);
            break;
    }
    h(a, b) = g;
    h(b, a) = g;
    return h;
}

ComplexMatrix ideal_gate_unitary(GateKind kind) {
    ComplexMatrix u = ComplexMatrix::Identity(4, 4);
    if (is_cz(kind)) {
        u(3, 3) = -1;
    } else {
        u(1, 1) = 0;
        u(2, 2) = 0;
        u(1, 2) = -kI;
        u(2, 1) = -kI;
    }
    return u;
}

double gate_time_us(GateKind kind, double g) {
    if (!(g > 0)) {
        throw InputError("coupling rate must be positive");
    }
    return is_cz(kind) ? std::numbers::pi / g : std::numbers::pi / (2 * g);
}

double angular_rate(double f_mhz) {
    return 2 * std::numbers::pi * f_mhz;
}

ComplexMatrix unitary_superoperator(const ComplexMatrix &u) {
    return kron(u.conjugate(), u);
}

Superoperator build_liouvillian(const ComplexMatrix &h, std::vector<int> dims, std::span<const NoiseChannel> channels) {
    for (const auto &c : channels) {
        if (c.kind == ChannelKind::dephasing_1f) {
            throw InputError("1/f dephasing is time dependent; use build_time_dependent_liouvillian");
        }
    }
    TimeDependentLiouvillian td = build_time_dependent_liouvillian(h, std::move(dims), channels);
    return td.static_part;
}

TimeDependentLiouvillian build_time_dependent_liouvillian(
    const ComplexMatrix &h, std::vector<int> dims, std::span<const NoiseChannel> channels) {
    check_hamiltonian(h, dims);
    check_channels(dims, channels);
    TimeDependentLiouvillian out;
    out.static_part.matrix = coherent_part(h);
    out.slope = ComplexMatrix::Zero(h.rows() * h.rows(), h.rows() * h.rows());
    for (const auto &c : channels) {
        const int levels = dims[c.subsystem];
        switch (c.kind) {
            case ChannelKind::relaxation:
                add_dissipator(out.static_part.matrix, embed_operator(lowering_op(levels), c.subsystem, dims), c.rate);
                break;
            case ChannelKind::dephasing:
                add_dissipator(out.static_part.matrix, embed_operator(number_op(levels), c.subsystem, dims), 2 * c.rate);
                break;
            case ChannelKind::dephasing_1f:
                add_dissipator(out.slope, embed_operator(number_op(levels), c.subsystem, dims), 2 * c.rate * c.rate);
                break;
        }
    }
    out.static_part.dims = std::move(dims);
    return out;
}

ComplexMatrix TimeDependentLiouvillian::at(double t) const {
    return static_part.matrix + 2 * t * slope;
}

ComplexMatrix TimeDependentLiouvillian::integral(double t) const {
    return static_part.matrix * t + (t * t) * slope;
}

ComplexMatrix expm(const ComplexMatrix &a) {
    if (a.rows() != a.cols()) {
        throw InputError("expm expects a square matrix");
    }
    require_finite(a, "exponent");
    const auto n = a.rows();
    const double norm = norm1(a);
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    }
    ComplexMatrix b = a / std::ldexp(1.0, squarings);

    // With ||b||_1 <= 1/2 the Taylor tail after the last kept term is below that term,
    // so stopping at 1e-17 relative keeps the backward error well under 1e-13.
    ComplexMatrix sum = ComplexMatrix::Identity(n, n);
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    for (int k = 1; k <= 40; k++) {
        term = (term * b) / static_cast<double>(k);
        sum += term;
        if (norm1(term) <= 1e-17 * norm1(sum)) {
            break;
        }
    }
    for (int k = 0; k < squarings; k++) {
        sum = sum * sum;
    }
    require_finite(sum, "matrix exponential");
    return sum;
}

Superoperator propagate(const Superoperator &l, double t) {
    l.validate();
    if (!(t >= 0)) {
        throw InputError("propagation time must be nonnegative");
    }
    return {expm(l.matrix * t), l.dims};
}

Superoperator propagate_time_dependent(
    const GeneratorFn &l_of_t, std::vector<int> dims, double t_end, int steps, TimeDependentMode mode) {
    if (steps < 100) {
        throw InputError("time-dependent propagation needs at least 100 steps");
    }
    if (!(t_end >= 0)) {
        throw InputError("propagation time must be nonnegative");
    }
    const int d = product(dims);
    const auto n = static_cast<Eigen::Index>(d) * d;
    Superoperator out{ComplexMatrix::Identity(n, n), std::move(dims)};
    if (t_end == 0) {
        return out;
    }
    const double h = t_end / steps;
    if (!(h >= std::numeric_limits<double>::min()) || t_end + h == t_end) {
        throw NumericError("time step underflow");
    }
    auto eval = [&](double t) {
        ComplexMatrix l = l_of_t(t);
        if (l.rows() != n || l.cols() != n) {
            throw InputError("generator size does not match subsystem dimensions");
        }
        require_finite(l, "generator");
        return l;
    };

    if (mode == TimeDependentMode::integral_exponent) {
        const int m = steps % 2 == 0 ? steps : steps + 1;
        const double hs = t_end / m;
        ComplexMatrix acc = eval(0) + eval(t_end);
        for (int k = 1; k < m; k++) {
            acc += (k % 2 == 1 ? 4.0 : 2.0) * eval(k * hs);
        }
        out.matrix = expm(acc * (hs / 3));
        return out;
    }

    ComplexMatrix &s = out.matrix;
    for (int k = 0; k < steps; k++) {
        const double t = k * h;
        ComplexMatrix l0 = eval(t);
        ComplexMatrix lm = eval(t + h / 2);
        ComplexMatrix l1 = eval(t + h);
        ComplexMatrix k1 = l0 * s;
        ComplexMatrix k2 = lm * (s + (h / 2) * k1);
        ComplexMatrix k3 = lm * (s + (h / 2) * k2);
        ComplexMatrix k4 = l1 * (s + h * k3);
        s += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    require_finite(s, "propagator");
    return out;
}

Superoperator project_computational(const Superoperator &s) {
    s.validate();
    ComplexMatrix p = ComplexMatrix::Identity(1, 1);
    for (int d : s.dims) {
        if (d != 2 && d != 3) {
            throw InputError("projection supports only 2- and 3-level subsystems");
        }
        ComplexMatrix local = ComplexMatrix::Zero(2, d);
        local(0, 0) = 1;
        local(1, 1) = 1;
        p = kron(p, local);
    }
    ComplexMatrix big = kron(p, p);
    return {big * s.matrix * big.transpose(), std::vector<int>(s.dims.size(), 2)};
}

double average_gate_fidelity(const Superoperator &s, const ComplexMatrix &u) {
    s.validate();
    const auto d = u.rows();
    if (u.cols() != d || s.matrix.rows() != d * d) {
        throw InputError("target unitary dimension does not match the superoperator");
    }
    ComplexMatrix su = unitary_superoperator(u);
    // Tr(A^dagger B) = sum conj(A) .* B
    Complex tr = (su.conjugate().array() * s.matrix.array()).sum();
    const double dd = static_cast<double>(d);
    return (tr.real() + dd) / (dd * (dd + 1));
}

ComplexMatrix choi_matrix(const Superoperator &s) {
    s.validate();
    const int d = s.hilbert_dim();
    ComplexMatrix j(d * d, d * d);
    for (int a = 0; a < d; a++) {
        for (int b = 0; b < d; b++) {
            for (int r = 0; r < d; r++) {
                for (int c = 0; c < d; c++) {
                    j(a * d + r, b * d + c) = s.matrix(c * d + r, b * d + a);
                }
            }
        }
    }
    return j;
}

CptpDiagnostics cptp_diagnostics(const Superoperator &s) {
    s.validate();
    const int d = s.hilbert_dim();
    CptpDiagnostics out;
    // Row vector (vec I)^dagger S sums the diagonal-index rows.
    for (int col = 0; col < d * d; col++) {
        Complex acc = 0;
        for (int k = 0; k < d; k++) {
            acc += s.matrix(k * d + k, col);
        }
        const bool diagonal = col % (d + 1) == 0;
        out.trace_residual = std::max(out.trace_residual, std::abs(acc - (diagonal ? 1.0 : 0.0)));
    }
    ComplexMatrix j = choi_matrix(s);
    out.hermiticity_residual = max_abs(j - j.adjoint());
    ComplexMatrix herm = 0.5 * (j + j.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm, Eigen::EigenvaluesOnly);
    out.min_choi_eigenvalue = eig.eigenvalues().minCoeff();
    return out;
}

double chevron_population(double g_mhz, double detuning_mhz, double t_ns) {
    const double w2 = detuning_mhz * detuning_mhz + 4 * g_mhz * g_mhz;
    if (w2 == 0) {
        return 0;
    }
    const double s = std::sin(std::numbers::pi * std::sqrt(w2) * t_ns * 1e-3);
    return 4 * g_mhz * g_mhz / w2 * s * s;
}

}  // namespace gatebudget
