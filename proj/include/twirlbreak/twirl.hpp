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

// Twirling over finite unitary sets (the qubit Clifford 2-design) and over
// Haar-random samples, the analytic U⊗U / U⊗U* projectors, and the
// dilation of a twirl into a classically correlated environment.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "twirlbreak/bipartite.hpp"
#include "twirlbreak/channel.hpp"
#include "twirlbreak/random.hpp"
#include "twirlbreak/states.hpp"

namespace twirlbreak {

enum class UnitarySetKind { exact_2design, finite, mc_haar };

enum class TwirlMode { uu, uustar, partial_a, partial_b };

inline const char *twirl_mode_name(TwirlMode m) {
    switch (m) {
        case TwirlMode::uu:
            return "uu";
        case TwirlMode::uustar:
            return "uustar";
        case TwirlMode::partial_a:
            return "partial-A";
        case TwirlMode::partial_b:
            return "partial-B";
    }
    return "?";
}

/// True when a and b agree up to a global phase.
inline bool equal_up_to_phase(const ComplexMatrix &a, const ComplexMatrix &b, double tol = 1e-9) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        return false;
    }
    const Complex overlap = (a.adjoint() * b).trace();
    if (std::abs(overlap) < tol) {
        return a.norm() < tol && b.norm() < tol;
    }
    const Complex phase = overlap / std::abs(overlap);
    return (a * phase - b).cwiseAbs().maxCoeff() <= tol;
}

class UnitarySet {
   public:
    UnitarySet(std::vector<ComplexMatrix> unitaries, UnitarySetKind kind) : us_(std::move(unitaries)), kind_(kind) {
        if (us_.empty()) {
            throw std::invalid_argument("UnitarySet: empty");
        }
        d_ = static_cast<int>(us_.front().rows());
        for (const auto &u : us_) {
            if (u.rows() != d_ || u.cols() != d_) {
                throw std::invalid_argument("UnitarySet: mixed dimensions");
            }
            const double defect = unitarity_defect(u);
            if (defect > kUnitarityTol) {
                throw std::invalid_argument("UnitarySet: element not unitary (defect " + std::to_string(defect) + ")");
            }
        }
        if (kind_ == UnitarySetKind::exact_2design) {
            for (const auto &u : us_) {
                if (!contains(u.adjoint())) {
                    throw std::invalid_argument("UnitarySet: exact design is not closed under inverse");
                }
            }
        }
    }

    const std::vector<ComplexMatrix> &unitaries() const { return us_; }
    UnitarySetKind kind() const { return kind_; }
    int d() const { return d_; }
    std::size_t size() const { return us_.size(); }

    /// Membership up to global phase.
    bool contains(const ComplexMatrix &m) const {
        for (const auto &u : us_) {
            if (equal_up_to_phase(u, m)) {
                return true;
            }
        }
        return false;
    }

   private:
    std::vector<ComplexMatrix> us_;
    UnitarySetKind kind_;
    int d_ = 0;
};

namespace detail {

/// Multiplies by a phase so the first entry with modulus > 1e-9 is real positive.
inline ComplexMatrix canonical_phase(const ComplexMatrix &m) {
    for (Eigen::Index i = 0; i < m.size(); i++) {
        const Complex z = m.data()[i];
        if (std::abs(z) > 1e-9) {
            return m * (std::conj(z) / std::abs(z));
        }
    }
    return m;
}

inline std::vector<long long> fingerprint(const ComplexMatrix &m) {
    std::vector<long long> key;
    key.reserve(static_cast<std::size_t>(2 * m.size()));
    for (Eigen::Index i = 0; i < m.size(); i++) {
        key.push_back(std::llround(m.data()[i].real() * 1e9));
        key.push_back(std::llround(m.data()[i].imag() * 1e9));
    }
    return key;
}

}  // namespace detail

/// Single-qubit Clifford group modulo phase: closure of {H, S}.
inline UnitarySet clifford_group_qubit() {
    ComplexMatrix h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::numbers::sqrt2;
    ComplexMatrix s(2, 2);
    s << 1, 0, 0, Complex(0, 1);
    const std::vector<ComplexMatrix> gens{h, s};

    std::vector<ComplexMatrix> elems;
    std::set<std::vector<long long>> seen;
    ComplexMatrix start = detail::canonical_phase(identity(2));
    seen.insert(detail::fingerprint(start));
    elems.push_back(start);
    for (std::size_t head = 0; head < elems.size(); head++) {
        for (const auto &g : gens) {
            ComplexMatrix next = detail::canonical_phase(elems[head] * g);
            if (seen.insert(detail::fingerprint(next)).second) {
                elems.push_back(std::move(next));
            }
        }
    }
    return UnitarySet(std::move(elems), UnitarySetKind::exact_2design);
}

/// {I, X, Y, Z}: a 1-design only.
inline UnitarySet pauli_set() {
    return UnitarySet(std::vector<ComplexMatrix>(paulis().begin(), paulis().end()), UnitarySetKind::finite);
}

/// Deterministic Haar sampler over U(d).
class HaarSampler {
   public:
    HaarSampler(std::uint64_t seed, int d) : seed_(seed), d_(d), stream_(seed) {
        if (d < 1) {
            throw std::invalid_argument("HaarSampler: dimension must be >= 1");
        }
    }
    std::uint64_t seed() const { return seed_; }
    int d() const { return d_; }
    GaussianStream &stream() { return stream_; }

   private:
    std::uint64_t seed_;
    int d_;
    GaussianStream stream_;
};

/// Ginibre matrix, QR, then column phases fixed so R has a positive diagonal.
inline ComplexMatrix haar_sample(HaarSampler &s) {
    const auto d = static_cast<std::size_t>(s.d());
    Eigen::MatrixXcd z = ginibre(s.stream(), d, d);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd &r = qr.matrixQR();
    for (Eigen::Index j = 0; j < q.cols(); j++) {
        const Complex rjj = r(j, j);
        const double a = std::abs(rjj);
        q.col(j) *= a > 0 ? rjj / a : Complex(1.0);
    }
    return q;
}

inline UnitarySet haar_unitary_set(HaarSampler &s, std::size_t n) {
    if (n < 1) {
        throw std::invalid_argument("haar_unitary_set: need at least one sample");
    }
    std::vector<ComplexMatrix> us;
    us.reserve(n);
    for (std::size_t i = 0; i < n; i++) {
        us.push_back(haar_sample(s));
    }
    return UnitarySet(std::move(us), UnitarySetKind::mc_haar);
}

namespace detail {

inline ComplexMatrix pair_operator(const ComplexMatrix &u, TwirlMode mode, Dims dims) {
    switch (mode) {
        case TwirlMode::uu:
            return kron(u, u);
        case TwirlMode::uustar:
            return kron(u, u.conjugate());
        case TwirlMode::partial_a:
            return kron(u, identity(dims.b));
        case TwirlMode::partial_b:
            return kron(identity(dims.a), u);
    }
    return {};
}

inline void check_twirl_dims(Dims dims, TwirlMode mode, int d, const char *what) {
    bool ok = false;
    switch (mode) {
        case TwirlMode::uu:
        case TwirlMode::uustar:
            ok = dims.a == static_cast<std::size_t>(d) && dims.b == static_cast<std::size_t>(d);
            break;
        case TwirlMode::partial_a:
            ok = dims.a == static_cast<std::size_t>(d);
            break;
        case TwirlMode::partial_b:
            ok = dims.b == static_cast<std::size_t>(d);
            break;
    }
    if (!ok) {
        throw std::invalid_argument(std::string(what) + ": unitary dimension " + std::to_string(d) +
                                    " does not fit " + std::to_string(dims.a) + "x" + std::to_string(dims.b) +
                                    " for mode " + twirl_mode_name(mode));
    }
}

}  // namespace detail

/// (1/K) Σ (U_k⊗V_k) X (U_k⊗V_k)† over a finite set, on any linear operator.
inline ComplexMatrix twirl(const ComplexMatrix &x, Dims dims, TwirlMode mode, const UnitarySet &set) {
    check_dims(x, dims, "twirl");
    detail::check_twirl_dims(dims, mode, set.d(), "twirl");
    ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
    for (const auto &u : set.unitaries()) {
        const ComplexMatrix w = detail::pair_operator(u, mode, dims);
        out.noalias() += w * x * w.adjoint();
    }
    return out / static_cast<double>(set.size());
}

inline DensityOperator twirl_uu(const DensityOperator &rho, const UnitarySet &set) {
    return DensityOperator(twirl(rho.matrix(), rho.dims(), TwirlMode::uu, set), rho.dims());
}

inline DensityOperator twirl_uustar(const DensityOperator &rho, const UnitarySet &set) {
    return DensityOperator(twirl(rho.matrix(), rho.dims(), TwirlMode::uustar, set), rho.dims());
}

inline ComplexMatrix partial_twirl(const ComplexMatrix &x, Dims dims, Side side, const UnitarySet &set) {
    return twirl(x, dims, side == Side::A ? TwirlMode::partial_a : TwirlMode::partial_b, set);
}

inline DensityOperator partial_twirl(const DensityOperator &rho, Side side, const UnitarySet &set) {
    return DensityOperator(partial_twirl(rho.matrix(), rho.dims(), side, set), rho.dims());
}

/// Empirical twirl over n Haar samples. Samples are drawn serially from the
/// sampler before any averaging, so the result depends only on the seed.
inline DensityOperator mc_twirl(const DensityOperator &rho, TwirlMode mode, std::size_t n, HaarSampler &s) {
    if (n < 1) {
        throw std::invalid_argument("mc_twirl: n must be >= 1");
    }
    detail::check_twirl_dims(rho.dims(), mode, s.d(), "mc_twirl");
    const UnitarySet samples = haar_unitary_set(s, n);
    return DensityOperator(twirl(rho.matrix(), rho.dims(), mode, samples), rho.dims());
}

/// Exact Haar U⊗U twirl: the Hilbert-Schmidt projection onto span{I, V}.
/// Preserves Tr(X) and Tr(VX).
inline ComplexMatrix analytic_twirl_uu(const ComplexMatrix &x, int d) {
    check_dims(x, Dims{static_cast<std::size_t>(d), static_cast<std::size_t>(d)}, "analytic_twirl_uu");
    const ComplexMatrix v = flip_operator(d);
    const double dd = d;
    const Complex t = x.trace();
    const Complex tv = (v * x).trace();
    // [d² d; d d²] [a; b] = [t; tv]
    const double det = dd * dd * dd * dd - dd * dd;
    const Complex a = (dd * dd * t - dd * tv) / det;
    const Complex b = (dd * dd * tv - dd * t) / det;
    return a * identity(static_cast<std::size_t>(d * d)) + b * v;
}

/// Exact Haar U⊗U* twirl: projection onto span{I, |ψ⟩⟨ψ|}. Preserves Tr(X)
/// and ⟨ψ|X|ψ⟩.
inline ComplexMatrix analytic_twirl_uustar(const ComplexMatrix &x, int d) {
    check_dims(x, Dims{static_cast<std::size_t>(d), static_cast<std::size_t>(d)}, "analytic_twirl_uustar");
    const ComplexVector psi = max_entangled_ket(d);
    const ComplexMatrix p = psi * psi.adjoint();
    const double d2 = static_cast<double>(d) * d;
    const Complex t = x.trace();
    const Complex tp = (psi.adjoint() * x * psi)(0, 0);
    // [d² 1; 1 1] [a; b] = [t; tp]
    const Complex a = (t - tp) / (d2 - 1.0);
    const Complex b = tp - a;
    return a * identity(static_cast<std::size_t>(d * d)) + b * p;
}

/// Exact Haar partial twirl: I/d ⊗ Tr_A(X) (or Tr_B(X) ⊗ I/d).
inline ComplexMatrix analytic_partial_twirl(const ComplexMatrix &x, Dims dims, Side side) {
    const ComplexMatrix reduced = partial_trace(x, dims, side);
    if (side == Side::A) {
        return kron(identity(dims.a) / static_cast<double>(dims.a), reduced);
    }
    return kron(reduced, identity(dims.b) / static_cast<double>(dims.b));
}

inline ComplexMatrix analytic_twirl(const ComplexMatrix &x, Dims dims, TwirlMode mode) {
    switch (mode) {
        case TwirlMode::uu:
            return analytic_twirl_uu(x, static_cast<int>(dims.a));
        case TwirlMode::uustar:
            return analytic_twirl_uustar(x, static_cast<int>(dims.a));
        case TwirlMode::partial_a:
            return analytic_partial_twirl(x, dims, Side::A);
        case TwirlMode::partial_b:
            return analytic_partial_twirl(x, dims, Side::B);
    }
    return {};
}

inline DensityOperator analytic_twirl(const DensityOperator &rho, TwirlMode mode) {
    return DensityOperator(analytic_twirl(rho.matrix(), rho.dims(), mode), rho.dims());
}

/// Frobenius residual of x after projecting onto span{I, V}.
inline double span_iv_residual(const ComplexMatrix &x, int d) { return frobenius_distance(x, analytic_twirl_uu(x, d)); }

struct DesignCheck {
    bool passed = false;
    double partial_twirl_residual = 0;
    double span_residual = 0;
};

/// Checks the two consequences of 2-design-ness on every matrix unit of
/// C²⊗C²: the partial twirl gives I/2 ⊗ Tr_A and the U⊗U twirl lands in
/// span{I, V}.
inline DesignCheck check_2design(const UnitarySet &set, double partial_tol = 1e-12, double span_tol = 1e-11) {
    if (set.d() != 2) {
        throw std::invalid_argument("verify_2design: only qubit sets are supported");
    }
    const Dims dims{2, 2};
    DesignCheck out;
    for (Eigen::Index i = 0; i < 4; i++) {
        for (Eigen::Index j = 0; j < 4; j++) {
            ComplexMatrix e = ComplexMatrix::Zero(4, 4);
            e(i, j) = 1.0;
            const ComplexMatrix pt = partial_twirl(e, dims, Side::A, set);
            const ComplexMatrix expect = kron(identity(2) / 2.0, partial_trace(e, dims, Side::A));
            out.partial_twirl_residual = std::max(out.partial_twirl_residual, frobenius_distance(pt, expect));
            const ComplexMatrix tw = twirl(e, dims, TwirlMode::uu, set);
            out.span_residual = std::max(out.span_residual, span_iv_residual(tw, 2));
        }
    }
    out.passed = out.partial_twirl_residual <= partial_tol && out.span_residual <= span_tol;
    return out;
}

inline bool verify_2design(const UnitarySet &set) { return check_2design(set).passed; }

/// Kraus form {(U_k⊗V_k)/√K} of a finite-set twirl.
inline KrausChannel twirl_channel(const UnitarySet &set, TwirlMode mode, Dims dims) {
    detail::check_twirl_dims(dims, mode, set.d(), "twirl_channel");
    std::vector<ComplexMatrix> ops;
    const double w = 1.0 / std::sqrt(static_cast<double>(set.size()));
    for (const auto &u : set.unitaries()) {
        ops.push_back(w * detail::pair_operator(u, mode, dims));
    }
    return KrausChannel(std::move(ops), dims);
}

/// Uniform classical environment (1/K) Σ|kk⟩⟨kk| with control unitaries
/// Σ|k⟩⟨k|⊗U_k on E1A and Σ|k⟩⟨k|⊗V_k on E2B (V_k = U_k or U_k*).
inline DilatedChannel build_twirl_dilation(const UnitarySet &set, TwirlMode mode) {
    if (mode != TwirlMode::uu && mode != TwirlMode::uustar) {
        throw std::invalid_argument("build_twirl_dilation: mode must be uu or uustar");
    }
    std::vector<ComplexMatrix> vs;
    for (const auto &u : set.unitaries()) {
        vs.push_back(mode == TwirlMode::uu ? u : ComplexMatrix(u.conjugate()));
    }
    const std::vector<double> weights(set.size(), 1.0 / static_cast<double>(set.size()));
    const auto d = static_cast<std::size_t>(set.d());
    return DilatedChannel(correlated_classical_state(weights), controlled_unitary(set.unitaries()),
                          controlled_unitary(vs), Dims{d, d});
}

}  // namespace twirlbreak
