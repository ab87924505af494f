// Copyright 2026 The twirlbreak Authors
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

#pragma once

// CPTP maps in Kraus form, their unitary dilations with explicit classical
// environments, and the Choi-state entanglement-breaking test.

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twirlbreak/bipartite.hpp"
#include "twirlbreak/states.hpp"

namespace twirlbreak {

inline constexpr double kCompletenessTol = 1e-10;
inline constexpr double kProbabilityTol = 1e-12;
inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kClassicalEnvTol = 1e-14;

class ProbabilityVector {
   public:
    explicit ProbabilityVector(std::vector<double> p) : p_(std::move(p)) {
        if (p_.empty()) {
            throw std::invalid_argument("ProbabilityVector: empty");
        }
        double s = 0;
        for (double v : p_) {
            if (!(v >= 0) || !std::isfinite(v)) {
                throw std::invalid_argument("ProbabilityVector: negative or non-finite entry " + std::to_string(v));
            }
            s += v;
        }
        if (std::abs(s - 1.0) > kProbabilityTol) {
            std::ostringstream ss;
            ss.precision(17);
            ss << "ProbabilityVector: entries sum to " << s;
            throw std::invalid_argument(ss.str());
        }
    }

    const std::vector<double> &values() const { return p_; }
    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    double max() const { return *std::max_element(p_.begin(), p_.end()); }

   private:
    std::vector<double> p_;
};

/// The qubit Pauli basis {I, X, Y, Z} with Y = iXZ.
inline const std::array<ComplexMatrix, 4> &paulis() {
    static const std::array<ComplexMatrix, 4> ps = [] {
        const Complex i1{0, 1};
        std::array<ComplexMatrix, 4> out;
        out[0] = identity(2);
        out[1] = ComplexMatrix::Zero(2, 2);
        out[1] << 0, 1, 1, 0;
        out[2] = ComplexMatrix::Zero(2, 2);
        out[2] << 0, -i1, i1, 0;
        out[3] = ComplexMatrix::Zero(2, 2);
        out[3] << 1, 0, 0, -1;
        return out;
    }();
    return ps;
}

inline double unitarity_defect(const ComplexMatrix &u) {
    if (u.rows() != u.cols()) {
        return INFINITY;
    }
    return (u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

/// Kraus representation with weights already folded into the operators.
/// `dims` describes the space the operators act on; a single-system channel
/// uses dims {d, 1}.
class KrausChannel {
   public:
    KrausChannel(std::vector<ComplexMatrix> ops, Dims dims) : ops_(std::move(ops)), dims_(dims) {
        if (ops_.empty()) {
            throw std::invalid_argument("KrausChannel: no operators");
        }
        for (const auto &k : ops_) {
            check_dims(k, dims_, "KrausChannel");
            if (!all_finite(k)) {
                throw std::invalid_argument("KrausChannel: non-finite operator entry");
            }
        }
        const double r = completeness_residual();
        if (r > kCompletenessTol) {
            std::ostringstream ss;
            ss << "KrausChannel: completeness violated, max |sum K^dag K - I| = " << r;
            throw std::invalid_argument(ss.str());
        }
    }
    KrausChannel(std::vector<ComplexMatrix> ops, std::size_t d) : KrausChannel(std::move(ops), Dims{d, 1}) {}

    /// max-abs entry of Σ K†K - I.
    static double completeness_residual(const std::vector<ComplexMatrix> &ops) {
        if (ops.empty()) {
            return INFINITY;
        }
        ComplexMatrix s = ComplexMatrix::Zero(ops.front().cols(), ops.front().cols());
        for (const auto &k : ops) {
            s += k.adjoint() * k;
        }
        return (s - ComplexMatrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
    }
    double completeness_residual() const { return completeness_residual(ops_); }

    const std::vector<ComplexMatrix> &operators() const { return ops_; }
    Dims dims() const { return dims_; }
    std::size_t dim() const { return dims_.total(); }

   private:
    std::vector<ComplexMatrix> ops_;
    Dims dims_;
};

/// Σ K ρ K† on linear operators (no state validation).
inline ComplexMatrix apply_kraus(const KrausChannel &ch, const ComplexMatrix &m) {
    if (m.rows() != static_cast<Eigen::Index>(ch.dim()) || m.cols() != m.rows()) {
        throw std::invalid_argument("apply_kraus: operator of size " + std::to_string(m.rows()) +
                                    " does not match channel dimension " + std::to_string(ch.dim()));
    }
    ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
    for (const auto &k : ch.operators()) {
        out.noalias() += k * m * k.adjoint();
    }
    return out;
}

inline DensityOperator apply_kraus(const KrausChannel &ch, const DensityOperator &rho) {
    if (ch.dims() != rho.dims()) {
        throw std::invalid_argument("apply_kraus: channel dims " + std::to_string(ch.dims().a) + "x" +
                                    std::to_string(ch.dims().b) + " vs state dims " + std::to_string(rho.dim_a()) +
                                    "x" + std::to_string(rho.dim_b()));
    }
    return DensityOperator(apply_kraus(ch, rho.matrix()), rho.dims());
}

namespace detail {

inline const ProbabilityVector &require_four(const ProbabilityVector &p, const char *what) {
    if (p.size() != 4) {
        throw std::invalid_argument(std::string(what) + ": expected 4 probabilities, got " + std::to_string(p.size()));
    }
    return p;
}

}  // namespace detail

/// {√p_k P_k⊗P_k}: the same random Pauli applied to both qubits.
inline KrausChannel correlated_pauli(const ProbabilityVector &p) {
    detail::require_four(p, "correlated_pauli");
    std::vector<ComplexMatrix> ops;
    for (std::size_t k = 0; k < 4; k++) {
        ops.push_back(std::sqrt(p[k]) * kron(paulis()[k], paulis()[k]));
    }
    return KrausChannel(std::move(ops), Dims{2, 2});
}

/// {√p_k P_k⊗P_k*}
inline KrausChannel correlated_pauli_conjugate(const ProbabilityVector &p) {
    detail::require_four(p, "correlated_pauli_conjugate");
    std::vector<ComplexMatrix> ops;
    for (std::size_t k = 0; k < 4; k++) {
        ops.push_back(std::sqrt(p[k]) * kron(paulis()[k], paulis()[k].conjugate()));
    }
    return KrausChannel(std::move(ops), Dims{2, 2});
}

/// Single-qubit Pauli channel {√p_k P_k}.
inline KrausChannel pauli_channel(const ProbabilityVector &p) {
    detail::require_four(p, "pauli_channel");
    std::vector<ComplexMatrix> ops;
    for (std::size_t k = 0; k < 4; k++) {
        ops.push_back(std::sqrt(p[k]) * paulis()[k]);
    }
    return KrausChannel(std::move(ops), 2);
}

/// Lifts a single-system channel to E⊗I (side A) or I⊗E (side B).
inline KrausChannel lift_local(const KrausChannel &local, Side side, std::size_t other_dim) {
    if (local.dims().b != 1) {
        throw std::invalid_argument("lift_local: channel is not single-system");
    }
    std::vector<ComplexMatrix> ops;
    for (const auto &k : local.operators()) {
        ops.push_back(side == Side::A ? kron(k, identity(other_dim)) : kron(identity(other_dim), k));
    }
    const std::size_t d = local.dim();
    return KrausChannel(std::move(ops), side == Side::A ? Dims{d, other_dim} : Dims{other_dim, d});
}

/// {√p_k P_k⊗I} or {√p_k I⊗P_k} on two qubits.
inline KrausChannel local_depolarizing(const ProbabilityVector &p, Side side) {
    detail::require_four(p, "local_depolarizing");
    return lift_local(pauli_channel(p), side, 2);
}

namespace detail {

/// Recovers the single-system operators of a channel of the form E⊗I.
inline std::vector<ComplexMatrix> local_factor_a(const KrausChannel &ch) {
    if (ch.dims().b == 1) {
        return ch.operators();
    }
    const Dims dims = ch.dims();
    std::vector<ComplexMatrix> out;
    for (const auto &k : ch.operators()) {
        ComplexMatrix local = partial_trace(k, dims, Side::B) / static_cast<double>(dims.b);
        const double err = frobenius_distance(kron(local, identity(dims.b)), k);
        if (err > 1e-12 * std::max(1.0, k.norm())) {
            throw std::invalid_argument("is_entanglement_breaking: channel is not of the form E⊗I");
        }
        out.push_back(std::move(local));
    }
    return out;
}

}  // namespace detail

struct EntanglementBreakingReport {
    /// PT of the Choi state is PSD within tolerance.
    bool ppt = false;
    /// Conclusive only when d = 2.
    bool conclusive = false;
    /// "EB" / "NOT-EB" for qubits, "PPT" / "NPT" otherwise.
    std::string verdict;
    HermitianSpectrum witness;
    DensityOperator choi;
};

/// Applies E⊗I to the maximally entangled state and inspects the partial
/// transpose of the result.
inline EntanglementBreakingReport is_entanglement_breaking(const KrausChannel &ch, double tol = kPsdTol) {
    if (!(tol > 0)) {
        throw std::invalid_argument("is_entanglement_breaking: tolerance must be positive");
    }
    if (ch.dims().b != 1 && ch.dims().a != ch.dims().b) {
        throw std::invalid_argument("is_entanglement_breaking: expected a d⊗d channel of the form E⊗I");
    }
    std::vector<ComplexMatrix> local = detail::local_factor_a(ch);
    const std::size_t d = static_cast<std::size_t>(local.front().rows());
    KrausChannel lifted = lift_local(KrausChannel(std::move(local), d), Side::A, d);
    DensityOperator choi = apply_kraus(lifted, max_entangled(static_cast<int>(d)));
    HermitianSpectrum witness = pt_spectrum(choi);
    const bool ppt = witness.min() >= -tol;
    std::string verdict = d == 2 ? (ppt ? "EB" : "NOT-EB") : (ppt ? "PPT" : "NPT");
    return {ppt, d == 2, std::move(verdict), std::move(witness), std::move(choi)};
}

/// ||ρ - Tr_B ρ ⊗ Tr_A ρ||_F; zero exactly for product states.
inline double product_residual(const DensityOperator &rho) {
    const ComplexMatrix ra = partial_trace(rho.matrix(), rho.dims(), Side::B);
    const ComplexMatrix rb = partial_trace(rho.matrix(), rho.dims(), Side::A);
    return frobenius_distance(rho.matrix(), kron(ra, rb));
}

/// Product form certifies separability regardless of dimension.
inline bool certify_product_form(const DensityOperator &rho, double tol = 1e-12) { return product_residual(rho) <= tol; }

/// Diagonal in the computational product basis: a zero-discord certificate.
inline bool env_is_classical(const DensityOperator &state, double tol = 1e-12) {
    const ComplexMatrix &m = state.matrix();
    for (Eigen::Index i = 0; i < m.rows(); i++) {
        for (Eigen::Index j = 0; j < m.cols(); j++) {
            if (i != j && std::abs(m(i, j)) > tol) {
                return false;
            }
        }
    }
    return true;
}

/// Environment E1E2 prepared in a classical state, coupled by U_{E1A}⊗U_{E2B}.
/// Tensor order of the full space is E1 A E2 B.
class DilatedChannel {
   public:
    DilatedChannel(DensityOperator env_state, ComplexMatrix unitary_e1a, ComplexMatrix unitary_e2b, Dims system)
        : env_(std::move(env_state)), u1_(std::move(unitary_e1a)), u2_(std::move(unitary_e2b)), system_(system) {
        const std::size_t k1 = env_.dim_a();
        const std::size_t k2 = env_.dim_b();
        check_dims(u1_, Dims{k1, system_.a}, "DilatedChannel U_E1A");
        check_dims(u2_, Dims{k2, system_.b}, "DilatedChannel U_E2B");
        const double defect = std::max(unitarity_defect(u1_), unitarity_defect(u2_));
        if (defect > kUnitarityTol) {
            throw std::invalid_argument("DilatedChannel: control unitary defect " + std::to_string(defect));
        }
        if (!env_is_classical(env_, kClassicalEnvTol)) {
            throw std::invalid_argument("DilatedChannel: environment state is not diagonal in the product basis");
        }
    }

    const DensityOperator &env_state() const { return env_; }
    const ComplexMatrix &unitary_e1a() const { return u1_; }
    const ComplexMatrix &unitary_e2b() const { return u2_; }
    Dims system_dims() const { return system_; }
    std::size_t env_dim_e1() const { return env_.dim_a(); }
    std::size_t env_dim_e2() const { return env_.dim_b(); }

    /// The full interaction U_{E1A}⊗U_{E2B} on E1 A E2 B.
    ComplexMatrix control_unitary() const { return kron(u1_, u2_); }

   private:
    DensityOperator env_;
    ComplexMatrix u1_;
    ComplexMatrix u2_;
    Dims system_;
};

/// Tr_E[U(ρ⊗σ_E)U†]. With σ_E = Σ s_{k1k2}|k1k2⟩⟨k1k2| this is
/// Σ s_{k1k2} Σ_{m1m2} (W1_{m1k1}⊗W2_{m2k2}) ρ (W1_{m1k1}⊗W2_{m2k2})†, where
/// W_{mk} = ⟨m|U|k⟩ is a block of the control unitary.
inline ComplexMatrix apply_dilation(const DilatedChannel &dc, const ComplexMatrix &rho) {
    const Dims sys = dc.system_dims();
    check_dims(rho, sys, "apply_dilation");
    const auto da = static_cast<Eigen::Index>(sys.a);
    const auto db = static_cast<Eigen::Index>(sys.b);
    const auto k1n = static_cast<Eigen::Index>(dc.env_dim_e1());
    const auto k2n = static_cast<Eigen::Index>(dc.env_dim_e2());
    const ComplexMatrix &env = dc.env_state().matrix();
    const ComplexMatrix &u1 = dc.unitary_e1a();
    const ComplexMatrix &u2 = dc.unitary_e2b();

    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (Eigen::Index k1 = 0; k1 < k1n; k1++) {
        for (Eigen::Index k2 = 0; k2 < k2n; k2++) {
            const double w = env(k1 * k2n + k2, k1 * k2n + k2).real();
            if (w == 0.0) {
                continue;
            }
            for (Eigen::Index m1 = 0; m1 < k1n; m1++) {
                const ComplexMatrix w1 = u1.block(m1 * da, k1 * da, da, da);
                if (w1.cwiseAbs().maxCoeff() == 0.0) {
                    continue;
                }
                for (Eigen::Index m2 = 0; m2 < k2n; m2++) {
                    const ComplexMatrix w2 = u2.block(m2 * db, k2 * db, db, db);
                    if (w2.cwiseAbs().maxCoeff() == 0.0) {
                        continue;
                    }
                    const ComplexMatrix op = kron(w1, w2);
                    out.noalias() += w * (op * rho * op.adjoint());
                }
            }
        }
    }
    return out;
}

inline DensityOperator apply_dilation(const DilatedChannel &dc, const DensityOperator &rho) {
    if (rho.dims() != dc.system_dims()) {
        throw std::invalid_argument("apply_dilation: state dims do not match the dilation");
    }
    return DensityOperator(apply_dilation(dc, rho.matrix()), rho.dims());
}

/// Σ_k |k⟩⟨k| ⊗ U_k
inline ComplexMatrix controlled_unitary(const std::vector<ComplexMatrix> &us) {
    const auto d = us.front().rows();
    const auto k = static_cast<Eigen::Index>(us.size());
    ComplexMatrix out = ComplexMatrix::Zero(k * d, k * d);
    for (Eigen::Index i = 0; i < k; i++) {
        out.block(i * d, i * d, d, d) = us[static_cast<std::size_t>(i)];
    }
    return out;
}

/// Σ_k w_k |k⟩⟨k| ⊗ |k⟩⟨k|
inline DensityOperator correlated_classical_state(const std::vector<double> &weights) {
    const auto k = static_cast<Eigen::Index>(weights.size());
    ComplexMatrix m = ComplexMatrix::Zero(k * k, k * k);
    for (Eigen::Index i = 0; i < k; i++) {
        m(i * k + i, i * k + i) = weights[static_cast<std::size_t>(i)];
    }
    return DensityOperator(std::move(m), weights.size(), weights.size());
}

/// Environment Σ p_k |kk⟩⟨kk| with two control-Pauli unitaries.
inline DilatedChannel build_pauli_dilation(const ProbabilityVector &p) {
    detail::require_four(p, "build_pauli_dilation");
    std::vector<ComplexMatrix> us(paulis().begin(), paulis().end());
    ComplexMatrix cu = controlled_unitary(us);
    return DilatedChannel(correlated_classical_state(p.values()), cu, cu, Dims{2, 2});
}

}  // namespace twirlbreak
