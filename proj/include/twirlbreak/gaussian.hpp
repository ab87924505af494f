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

// Two-mode Gaussian states at the covariance-matrix level and the
// truncated-Fock uniform dephasing channel.
//
// Conventions: quadrature order (x_A, p_A, x_B, p_B), vacuum CM = I, and
// Ω = [[0,1],[-1,0]] ⊕ [[0,1],[-1,0]]. A CM is physical when V + iΩ ≥ 0.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twirlbreak/bipartite.hpp"
#include "twirlbreak/random.hpp"

namespace twirlbreak {

using Matrix2 = Eigen::Matrix2d;
using Matrix4 = Eigen::Matrix4d;

inline constexpr double kCmSymmetryTol = 1e-12;
inline constexpr double kBonaFideTol = 1e-10;
inline constexpr double kSymplecticTol = 1e-10;

inline Matrix4 symplectic_form() {
    Matrix4 om = Matrix4::Zero();
    om(0, 1) = 1;
    om(1, 0) = -1;
    om(2, 3) = 1;
    om(3, 2) = -1;
    return om;
}

/// Minimum eigenvalue of V + iΩ.
inline double bona_fide_margin(const Matrix4 &v) {
    Eigen::Matrix4cd h = v.cast<Complex>() + Complex(0, 1) * symplectic_form().cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

class CovarianceMatrix {
   public:
    explicit CovarianceMatrix(const Matrix4 &m) : m_(m) {
        if (!m_.allFinite()) {
            throw std::invalid_argument("CovarianceMatrix: non-finite entries");
        }
        const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
        if (asym > kCmSymmetryTol) {
            throw std::invalid_argument("CovarianceMatrix: not symmetric (defect " + std::to_string(asym) + ")");
        }
        const double margin = bona_fide_margin(m_);
        if (margin < -kBonaFideTol) {
            std::ostringstream ss;
            ss << "CovarianceMatrix: violates V + iΩ >= 0 (min eigenvalue " << margin << ")";
            throw std::invalid_argument(ss.str());
        }
    }

    const Matrix4 &matrix() const { return m_; }
    Matrix2 block_a() const { return m_.block<2, 2>(0, 0); }
    Matrix2 block_b() const { return m_.block<2, 2>(2, 2); }
    Matrix2 block_c() const { return m_.block<2, 2>(0, 2); }

   private:
    Matrix4 m_;
};

/// [[cos θ, sin θ], [-sin θ, cos θ]]
inline Matrix2 rotation_matrix(double theta) {
    Matrix2 r;
    r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return r;
}

inline Matrix4 direct_sum(const Matrix2 &a, const Matrix2 &b) {
    Matrix4 m = Matrix4::Zero();
    m.block<2, 2>(0, 0) = a;
    m.block<2, 2>(2, 2) = b;
    return m;
}

/// (R_θA ⊕ R_θB) V (R_θA ⊕ R_θB)ᵀ on a raw matrix.
inline Matrix4 rotate(const Matrix4 &v, double theta_a, double theta_b) {
    const Matrix4 g = direct_sum(rotation_matrix(theta_a), rotation_matrix(theta_b));
    return g * v * g.transpose();
}

inline CovarianceMatrix apply_rotations(const CovarianceMatrix &v, double theta_a, double theta_b) {
    Matrix4 out = rotate(v.matrix(), theta_a, theta_b);
    // Congruence leaves roundoff asymmetry of order 1e-16.
    out = 0.5 * (out + out.transpose()).eval();
    return CovarianceMatrix(out);
}

/// Two-mode squeezed vacuum: blocks μI and √(μ²-1) Z.
inline CovarianceMatrix epr_cm(double mu) {
    if (!(mu >= 1.0)) {
        throw std::invalid_argument("epr_cm: mu must be >= 1, got " + std::to_string(mu));
    }
    const double c = std::sqrt(mu * mu - 1.0);
    Matrix4 m = Matrix4::Zero();
    m.diagonal().setConstant(mu);
    m(0, 2) = m(2, 0) = c;
    m(1, 3) = m(3, 1) = -c;
    return CovarianceMatrix(m);
}

/// Moduli of the eigenvalues of iΩM, one per mode, ascending. M need not be physical.
inline std::pair<double, double> symplectic_spectrum(const Matrix4 &m) {
    Eigen::EigenSolver<Matrix4> solver(symplectic_form() * m, false);
    std::array<double, 4> mods{};
    for (int i = 0; i < 4; i++) {
        mods[static_cast<std::size_t>(i)] = std::abs(solver.eigenvalues()(i));
    }
    std::sort(mods.begin(), mods.end());
    // Values come in ± pairs.
    return {0.5 * (mods[0] + mods[1]), 0.5 * (mods[2] + mods[3])};
}

inline std::pair<double, double> symplectic_eigenvalues(const CovarianceMatrix &v) {
    return symplectic_spectrum(v.matrix());
}

/// Λ = diag(1, 1, 1, -1): momentum reflection on mode B.
inline Matrix4 partial_transpose_cm(const Matrix4 &m) {
    const Matrix4 lambda = Eigen::Vector4d(1, 1, 1, -1).asDiagonal();
    return lambda * m * lambda;
}

inline std::pair<double, double> pt_symplectic_eigenvalues(const CovarianceMatrix &v) {
    return symplectic_spectrum(partial_transpose_cm(v.matrix()));
}

/// PPT at CM level; conclusive for 1×1-mode Gaussian states.
inline bool is_separable_two_mode(const CovarianceMatrix &v, double tol = kSymplecticTol) {
    return pt_symplectic_eigenvalues(v).first >= 1.0 - tol;
}

/// Parameters of the rotation-invariant form A = αI, B = βI,
/// C = [[ω, φ], [-φ, ω]].
struct QuasiNormalParams {
    double alpha = 1;
    double beta = 1;
    double omega = 0;
    double phi = 0;
};

inline Matrix4 quasi_normal_matrix(const QuasiNormalParams &p) {
    Matrix4 m = Matrix4::Zero();
    m(0, 0) = m(1, 1) = p.alpha;
    m(2, 2) = m(3, 3) = p.beta;
    m(0, 2) = m(2, 0) = p.omega;
    m(0, 3) = m(3, 0) = p.phi;
    m(1, 2) = m(2, 1) = -p.phi;
    m(1, 3) = m(3, 1) = p.omega;
    return m;
}

inline bool is_bona_fide(const QuasiNormalParams &p) {
    return p.alpha >= 1.0 && p.beta >= 1.0 && bona_fide_margin(quasi_normal_matrix(p)) >= -kBonaFideTol;
}

/// Throws std::invalid_argument for parameters outside the physical region.
inline CovarianceMatrix quasi_normal_cm(const QuasiNormalParams &p) {
    if (!(p.alpha >= 1.0 && p.beta >= 1.0)) {
        throw std::invalid_argument("quasi_normal_cm: alpha and beta must be >= 1");
    }
    return CovarianceMatrix(quasi_normal_matrix(p));
}

/// [[αI, γI], [γI, βI]]
inline Matrix4 simple_form_matrix(double alpha, double beta, double gamma) {
    Matrix4 m = Matrix4::Zero();
    m(0, 0) = m(1, 1) = alpha;
    m(2, 2) = m(3, 3) = beta;
    m(0, 2) = m(2, 0) = gamma;
    m(1, 3) = m(3, 1) = gamma;
    return m;
}

/// Local rotations (0, ψ) turning C = γ R_ψ into γI.
struct SimpleFormReduction {
    double theta_a = 0;
    double theta_b = 0;
    double gamma = 0;
    CovarianceMatrix reduced;
};

inline SimpleFormReduction reduce_to_simple_form(const QuasiNormalParams &p) {
    const double gamma = std::hypot(p.omega, p.phi);
    const double psi = std::atan2(p.phi, p.omega);
    CovarianceMatrix reduced = apply_rotations(quasi_normal_cm(p), 0.0, psi);
    return {0.0, psi, gamma, std::move(reduced)};
}

enum class RotationCorrelation { correlated, anticorrelated };

/// Basis of the symmetric 4×4 matrices left fixed by (R_θ ⊕ R_±θ) congruence.
struct InvariantFamily {
    RotationCorrelation mode = RotationCorrelation::correlated;
    std::vector<double> angles;
    /// Orthonormal in the 10 independent upper-triangle coordinates.
    std::vector<Matrix4> basis;
    std::vector<double> singular_values;

    std::size_t dimension() const { return basis.size(); }

    /// Distance from m to its least-squares projection on the family.
    double projection_residual(const Matrix4 &m) const;
};

namespace detail {

inline constexpr std::array<std::pair<int, int>, 10> kSymmetricCoords{
    {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}};

inline Matrix4 symmetric_unit(std::size_t idx) {
    Matrix4 e = Matrix4::Zero();
    const auto [r, c] = kSymmetricCoords[idx];
    e(r, c) = 1;
    e(c, r) = 1;
    return e;
}

inline Eigen::Matrix<double, 10, 1> symmetric_coords(const Matrix4 &m) {
    Eigen::Matrix<double, 10, 1> x;
    for (std::size_t i = 0; i < 10; i++) {
        const auto [r, c] = kSymmetricCoords[i];
        x(static_cast<Eigen::Index>(i)) = r == c ? m(r, c) : 0.5 * (m(r, c) + m(c, r));
    }
    return x;
}

}  // namespace detail

inline double InvariantFamily::projection_residual(const Matrix4 &m) const {
    const Eigen::Matrix<double, 10, 1> x = detail::symmetric_coords(m);
    Eigen::Matrix<double, 10, 1> proj = Eigen::Matrix<double, 10, 1>::Zero();
    for (const auto &b : basis) {
        const Eigen::Matrix<double, 10, 1> bx = detail::symmetric_coords(b);
        proj += bx.dot(x) * bx;
    }
    Matrix4 back = Matrix4::Zero();
    for (std::size_t i = 0; i < 10; i++) {
        back += proj(static_cast<Eigen::Index>(i)) * detail::symmetric_unit(i);
    }
    return (m - back).norm();
}

/// Default sample angles: multiples of √2, none close to a multiple of π.
inline std::vector<double> generic_angles(std::size_t n = 8) {
    std::vector<double> out;
    for (std::size_t j = 1; j <= n; j++) {
        out.push_back(std::numbers::sqrt2 * static_cast<double>(j));
    }
    return out;
}

/// Solves G V Gᵀ = V for all sampled angles as a linear system in the 10
/// independent entries of V, and returns the null space.
inline InvariantFamily solve_invariant_cm(RotationCorrelation mode, std::vector<double> angles = generic_angles()) {
    if (angles.empty()) {
        throw std::invalid_argument("solve_invariant_cm: no angles");
    }
    const auto rows = static_cast<Eigen::Index>(16 * angles.size());
    Eigen::MatrixXd sys(rows, 10);
    for (std::size_t a = 0; a < angles.size(); a++) {
        const double th = angles[a];
        const double th_b = mode == RotationCorrelation::correlated ? th : -th;
        for (std::size_t i = 0; i < 10; i++) {
            const Matrix4 e = detail::symmetric_unit(i);
            const Matrix4 diff = rotate(e, th, th_b) - e;
            for (int r = 0; r < 4; r++) {
                for (int c = 0; c < 4; c++) {
                    sys(static_cast<Eigen::Index>(16 * a) + 4 * r + c, static_cast<Eigen::Index>(i)) = diff(r, c);
                }
            }
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double cutoff = 1e-10 * std::max(1.0, sv(0));

    InvariantFamily fam;
    fam.mode = mode;
    fam.angles = std::move(angles);
    fam.singular_values.assign(sv.data(), sv.data() + sv.size());
    for (Eigen::Index k = 0; k < 10; k++) {
        if (sv(k) > cutoff) {
            continue;
        }
        Matrix4 m = Matrix4::Zero();
        for (std::size_t i = 0; i < 10; i++) {
            m += svd.matrixV()(static_cast<Eigen::Index>(i), k) * detail::symmetric_unit(i);
        }
        fam.basis.push_back(m);
    }
    return fam;
}

/// max-abs of G V Gᵀ - V over the given angles.
inline double invariance_residual(const Matrix4 &v, RotationCorrelation mode, const std::vector<double> &angles) {
    double worst = 0;
    for (double th : angles) {
        const double th_b = mode == RotationCorrelation::correlated ? th : -th;
        worst = std::max(worst, (rotate(v, th, th_b) - v).cwiseAbs().maxCoeff());
    }
    return worst;
}

inline std::vector<double> uniform_angles(std::size_t n) {
    std::vector<double> out;
    for (std::size_t j = 0; j < n; j++) {
        out.push_back(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
    }
    return out;
}

struct CorrelatedSweep {
    std::size_t points = 0;
    std::size_t bona_fide = 0;
    std::size_t separable = 0;
    double min_pt_eigenvalue = INFINITY;
};

/// Quasi-normal parameter grid, points-per-axis^4 points; non-physical
/// points are skipped.
inline CorrelatedSweep sweep_correlated_family(std::size_t per_axis, double max_alpha = 4.0) {
    CorrelatedSweep s;
    const double span = max_alpha - 1.0;
    auto axis = [&](std::size_t i, double lo, double hi) {
        return per_axis == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(per_axis - 1);
    };
    for (std::size_t ia = 0; ia < per_axis; ia++) {
        for (std::size_t ib = 0; ib < per_axis; ib++) {
            for (std::size_t iw = 0; iw < per_axis; iw++) {
                for (std::size_t ip = 0; ip < per_axis; ip++) {
                    QuasiNormalParams q{axis(ia, 1.0, 1.0 + span), axis(ib, 1.0, 1.0 + span),
                                        axis(iw, -span, span), axis(ip, -span, span)};
                    s.points++;
                    if (!is_bona_fide(q)) {
                        continue;
                    }
                    s.bona_fide++;
                    const CovarianceMatrix v = quasi_normal_cm(q);
                    const double nu = pt_symplectic_eigenvalues(v).first;
                    s.min_pt_eigenvalue = std::min(s.min_pt_eigenvalue, nu);
                    if (is_separable_two_mode(v)) {
                        s.separable++;
                    }
                }
            }
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Truncated Fock space

/// Two-mode state on the Fock cutoff N, basis |k⟩_A|j⟩_B with k, j < N.
class TruncatedFockState {
   public:
    explicit TruncatedFockState(DensityOperator rho) : rho_(std::move(rho)) {
        if (rho_.dim_a() != rho_.dim_b()) {
            throw std::invalid_argument("TruncatedFockState: both modes need the same cutoff");
        }
    }
    const DensityOperator &rho() const { return rho_; }
    std::size_t cutoff() const { return rho_.dim_a(); }

   private:
    DensityOperator rho_;
};

/// Weight λ^{2N} of the squeezed-vacuum distribution beyond the cutoff.
inline double fock_tail_mass(double lambda, std::size_t cutoff) {
    return std::pow(lambda * lambda, static_cast<double>(cutoff));
}

/// λ = tanh r for the squeezed vacuum whose CM is epr_cm(μ).
inline double squeezing_lambda(double mu) {
    if (!(mu >= 1.0)) {
        throw std::invalid_argument("squeezing_lambda: mu must be >= 1");
    }
    return std::sqrt((mu - 1.0) / (mu + 1.0));
}

/// Σ_{k<N} λ^k |kk⟩, renormalized.
inline TruncatedFockState truncated_two_mode_squeezed(double lambda, std::size_t cutoff) {
    if (!(lambda >= 0.0 && lambda < 1.0) || cutoff < 1) {
        throw std::invalid_argument("truncated_two_mode_squeezed: need 0 <= lambda < 1 and cutoff >= 1");
    }
    ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(cutoff * cutoff));
    for (std::size_t k = 0; k < cutoff; k++) {
        psi(static_cast<Eigen::Index>(k * cutoff + k)) = std::pow(lambda, static_cast<double>(k));
    }
    return TruncatedFockState(DensityOperator::pure(psi, cutoff, cutoff));
}

inline TruncatedFockState random_pure_fock_state(GaussianStream &g, std::size_t cutoff) {
    return TruncatedFockState(random_pure_state(g, cutoff, cutoff));
}

/// Uniform phase averaging of one mode: the θ-integral of e^{-iθ(k-k')}
/// leaves only k = k' on the dephased side.
inline TruncatedFockState dephase_truncated(const TruncatedFockState &in, Side side) {
    const auto n = static_cast<Eigen::Index>(in.cutoff());
    ComplexMatrix m = in.rho().matrix();
    for (Eigen::Index r = 0; r < m.rows(); r++) {
        for (Eigen::Index c = 0; c < m.cols(); c++) {
            const Eigen::Index kr = side == Side::A ? r / n : r % n;
            const Eigen::Index kc = side == Side::A ? c / n : c % n;
            if (kr != kc) {
                m(r, c) = 0.0;
            }
        }
    }
    return TruncatedFockState(DensityOperator(std::move(m), in.cutoff(), in.cutoff()));
}

/// d_k |k⟩⟨k| ⊗ |ξ(k)⟩⟨ξ(k)|
struct SeparableComponent {
    double weight = 0;
    std::size_t fock_index = 0;
    ComplexVector xi;
};

/// Decomposition of the A-dephased output of a pure input:
/// d_k = Σ_j |c_kj|², ξ(k) = Σ_j c_kj/√d_k |j⟩. Components with d_k ≤ 1e-14
/// are dropped. Throws for mixed input.
inline std::vector<SeparableComponent> separable_decomposition_dephased(const TruncatedFockState &pure_in) {
    const double purity = pure_in.rho().purity();
    if (purity < 1.0 - 1e-10) {
        std::ostringstream ss;
        ss << "separable_decomposition_dephased: input is mixed (purity " << purity
           << "); decompose it spectrally first";
        throw std::invalid_argument(ss.str());
    }
    auto sys = detail::hermitian_eigensystem(pure_in.rho().matrix(), true);
    Eigen::Index top = 0;
    sys.values.maxCoeff(&top);
    const ComplexVector c = sys.vectors.col(top);
    const auto n = static_cast<Eigen::Index>(pure_in.cutoff());

    std::vector<SeparableComponent> out;
    for (Eigen::Index k = 0; k < n; k++) {
        const ComplexVector row = c.segment(k * n, n);
        const double dk = row.squaredNorm();
        if (dk <= 1e-14) {
            continue;
        }
        out.push_back({dk, static_cast<std::size_t>(k), row / std::sqrt(dk)});
    }
    return out;
}

inline ComplexMatrix reconstruct_separable(const std::vector<SeparableComponent> &parts, std::size_t cutoff) {
    const auto n = static_cast<Eigen::Index>(cutoff);
    ComplexMatrix out = ComplexMatrix::Zero(n * n, n * n);
    for (const auto &p : parts) {
        ComplexMatrix fock = ComplexMatrix::Zero(n, n);
        fock(static_cast<Eigen::Index>(p.fock_index), static_cast<Eigen::Index>(p.fock_index)) = 1.0;
        out += p.weight * kron(fock, p.xi * p.xi.adjoint());
    }
    return out;
}

}  // namespace twirlbreak
