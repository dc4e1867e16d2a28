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

#ifndef GATEBUDGET_LINDBLAD_ENGINE_H
#define GATEBUDGET_LINDBLAD_ENGINE_H

#include <complex>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gatebudget {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// A linear map on d x d matrices acting on column-stacked vectors.
///
/// `dims` lists the local dimensions of the subsystems; their product is d and the
/// first entry is the most significant index of the Kronecker ordering.
struct Superoperator {
    ComplexMatrix matrix;
    std::vector<int> dims;

    int hilbert_dim() const;
    void validate() const;
};

enum class GateKind { cz20, cz02, iswap };

std::string_view gate_kind_name(GateKind kind);
/// Accepts "CZ20", "CZ02", "iSWAP" (case-insensitive). Throws InputError otherwise.
GateKind parse_gate_kind(std::string_view name);
bool is_cz(GateKind kind);

enum class ChannelKind { relaxation, dephasing, dephasing_1f };

/// One dissipative channel on one subsystem. Rates are in 1/us; for `dephasing_1f` the
/// rate is the Gaussian decay rate whose square enters with a 2t prefactor.
struct NoiseChannel {
    ChannelKind kind = ChannelKind::relaxation;
    int subsystem = 0;
    double rate = 0;
};

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

/// Column-stacking vectorization: vec(A B C) = (C^T kron A) vec(B).
ComplexVector vectorize(const ComplexMatrix &m);
ComplexMatrix unvectorize(const ComplexVector &v);

/// a = sum_k sqrt(k) |k-1><k| and n = a^dagger a, for 2 or 3 levels.
ComplexMatrix lowering_op(int levels);
ComplexMatrix number_op(int levels);

/// Pads a single-subsystem operator with identities.
ComplexMatrix embed_operator(const ComplexMatrix &op, int subsystem, std::span<const int> dims);

/// Two qutrits for the CZ kinds, two qubits for iSWAP.
std::vector<int> gate_dims(GateKind kind);

/// Resonant exchange Hamiltonian with angular rate `g` (rad/us):
/// |11><20| + h.c. (CZ20), |11><02| + h.c. (CZ02), |10><01| + h.c. (iSWAP).
ComplexMatrix gate_hamiltonian(GateKind kind, double g);

/// Target unitary on the two-qubit computational space reached by the exchange at the
/// gate time: diag(1, 1, 1, -1) for the CZ kinds and the (-i)-phased swap for iSWAP.
ComplexMatrix ideal_gate_unitary(GateKind kind);

/// pi / g for the CZ kinds (one full exchange), pi / (2 g) for iSWAP.
double gate_time_us(GateKind kind, double g);

/// Converts a linear frequency in MHz to an angular rate in rad/us.
double angular_rate(double f_mhz);

/// U* kron U, the superoperator of rho -> U rho U^dagger.
ComplexMatrix unitary_superoperator(const ComplexMatrix &u);

/// Time-independent Liouvillian for `h` plus relaxation and white dephasing channels.
/// Throws InputError for non-Hermitian `h`, bad subsystem indices, negative rates, or
/// `dephasing_1f` channels (use TimeDependentLiouvillian for those).
Superoperator build_liouvillian(const ComplexMatrix &h, std::vector<int> dims, std::span<const NoiseChannel> channels);

/// L(t) = L0 + 2 t * sum_k Gamma_k^2 D[n_k], with L0 holding every time-independent term.
struct TimeDependentLiouvillian {
    Superoperator static_part;
    ComplexMatrix slope;

    ComplexMatrix at(double t) const;
    /// Closed form of the integral of L over [0, t].
    ComplexMatrix integral(double t) const;
};

TimeDependentLiouvillian build_time_dependent_liouvillian(
    const ComplexMatrix &h, std::vector<int> dims, std::span<const NoiseChannel> channels);

/// Matrix exponential by scaling and squaring of an adaptively truncated Taylor series.
ComplexMatrix expm(const ComplexMatrix &a);

/// exp(L t). Throws InputError for t < 0 and NumericError for non-finite entries.
Superoperator propagate(const Superoperator &l, double t);

enum class TimeDependentMode {
    /// Classical RK4 on dS/dt = L(t) S.
    runge_kutta4,
    /// exp of the time integral of L (composite Simpson, exact for linear-in-t generators).
    integral_exponent,
};

using GeneratorFn = std::function<ComplexMatrix(double)>;

/// Propagator of a time-dependent generator over [0, t_end] using `steps` steps (>= 100).
Superoperator propagate_time_dependent(
    const GeneratorFn &l_of_t, std::vector<int> dims, double t_end, int steps, TimeDependentMode mode);

/// P S P^T with P = p kron p, where p keeps the two lowest levels of each subsystem.
Superoperator project_computational(const Superoperator &s);

/// (Tr(S_U^dagger S) + d) / (d (d + 1)) with S_U = U* kron U.
double average_gate_fidelity(const Superoperator &s, const ComplexMatrix &u);

/// Choi matrix sum_ij |i><j| kron E(|i><j|).
ComplexMatrix choi_matrix(const Superoperator &s);

struct CptpDiagnostics {
    double trace_residual = 0;
    double hermiticity_residual = 0;
    double min_choi_eigenvalue = 0;

    bool within(double tol) const {
        return trace_residual <= tol && hermiticity_residual <= tol && min_choi_eigenvalue >= -tol;
    }
};

/// Trace residual is the max-norm of (vec I)^dagger S - (vec I)^dagger; hermiticity
/// residual the max-norm of J - J^dagger for the Choi matrix J.
CptpDiagnostics cptp_diagnostics(const Superoperator &s);

/// Two-level exchange probability (4 g^2 / W^2) sin^2(pi W t) with W = sqrt(detuning^2 + 4 g^2).
/// Frequencies in MHz, time in ns.
double chevron_population(double g_mhz, double detuning_mhz, double t_ns);

}  // namespace gatebudget

#endif
