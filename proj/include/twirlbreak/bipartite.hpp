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

// Dense complex linear algebra on bipartite systems A⊗B. Subsystem A is the
// slow (left) tensor factor: the basis index of |i⟩_A|j⟩_B is i*dim_b + j.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace twirlbreak {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

enum class Side { A, B };

inline const char *side_name(Side s) { return s == Side::A ? "A" : "B"; }

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kEigenInputTol = 1e-10;

struct Dims {
    std::size_t a = 1;
    std::size_t b = 1;
    std::size_t total() const { return a * b; }
    bool operator==(const Dims &) const = default;
};

/// Largest |m - m†| entry.
inline double hermiticity_defect(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        return INFINITY;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix &m) {
    for (Eigen::Index i = 0; i < m.size(); i++) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            return false;
        }
    }
    return true;
}

/// Eigenvalues of a Hermitian matrix in ascending order.
struct HermitianSpectrum {
    std::vector<double> eigenvalues;

    std::size_t size() const { return eigenvalues.size(); }
    double min() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
    double max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
    double sum() const {
        double s = 0;
        for (double v : eigenvalues) {
            s += v;
        }
        return s;
    }
};

namespace detail {

struct Eigensystem {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
};

inline Eigensystem hermitian_eigensystem(const ComplexMatrix &m, bool with_vectors) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("eigensolve: matrix is not square");
    }
    const double defect = hermiticity_defect(m);
    if (!(defect <= kEigenInputTol)) {
        throw std::invalid_argument("eigensolve: matrix is not Hermitian (defect " + std::to_string(defect) + ")");
    }
    // Only the lower triangle is read; symmetrize first so tiny defects average out.
    Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        h, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigensolve: did not converge");
    }
    Eigensystem out;
    out.values = solver.eigenvalues();
    if (with_vectors) {
        out.vectors = solver.eigenvectors();
    }
    return out;
}

}  // namespace detail

/// All eigenvalues of a Hermitian matrix, ascending. Throws std::invalid_argument
/// if `m` deviates from Hermitian by more than 1e-10.
inline HermitianSpectrum hermitian_eigenvalues(const ComplexMatrix &m) {
    auto sys = detail::hermitian_eigensystem(m, false);
    HermitianSpectrum out;
    out.eigenvalues.assign(sys.values.data(), sys.values.data() + sys.values.size());
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    return out;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline ComplexMatrix identity(std::size_t d) {
    return ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

inline double frobenius_distance(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(
            "frobenius_distance: shape mismatch " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
            " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    return (a - b).norm();
}

inline void check_dims(const ComplexMatrix &m, Dims dims, const char *what) {
    const auto n = static_cast<Eigen::Index>(dims.total());
    if (dims.a == 0 || dims.b == 0 || m.rows() != n || m.cols() != n) {
        throw std::invalid_argument(std::string(what) + ": dimensions " + std::to_string(dims.a) + "x" +
                                    std::to_string(dims.b) + " do not match a " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + " matrix");
    }
}

/// Partial trace of a linear operator on A⊗B over subsystem `traced`.
inline ComplexMatrix partial_trace(const ComplexMatrix &m, Dims dims, Side traced) {
    check_dims(m, dims, "partial_trace");
    const auto da = static_cast<Eigen::Index>(dims.a);
    const auto db = static_cast<Eigen::Index>(dims.b);
    if (traced == Side::A) {
        ComplexMatrix out = ComplexMatrix::Zero(db, db);
        for (Eigen::Index i = 0; i < da; i++) {
            out += m.block(i * db, i * db, db, db);
        }
        return out;
    }
    ComplexMatrix out(da, da);
    for (Eigen::Index i = 0; i < da; i++) {
        for (Eigen::Index k = 0; k < da; k++) {
            out(i, k) = m.block(i * db, k * db, db, db).trace();
        }
    }
    return out;
}

/// Partial transpose; `side` B swaps j↔l in ⟨i j|m|k l⟩. Side A is the full
/// transpose composed with the side-B transpose.
inline ComplexMatrix partial_transpose(const ComplexMatrix &m, Dims dims, Side side = Side::B) {
    check_dims(m, dims, "partial_transpose");
    const auto da = static_cast<Eigen::Index>(dims.a);
    const auto db = static_cast<Eigen::Index>(dims.b);
    ComplexMatrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < da; i++) {
        for (Eigen::Index k = 0; k < da; k++) {
            out.block(i * db, k * db, db, db) = m.block(i * db, k * db, db, db).transpose();
        }
    }
    if (side == Side::A) {
        return out.transpose();
    }
    return out;
}

/// A validated bipartite density matrix: Hermitian, unit trace and PSD.
class DensityOperator {
   public:
    DensityOperator(ComplexMatrix m, std::size_t dim_a, std::size_t dim_b) : m_(std::move(m)), dims_{dim_a, dim_b} {
        validate();
    }
    DensityOperator(ComplexMatrix m, Dims dims) : DensityOperator(std::move(m), dims.a, dims.b) {}

    /// |ψ⟩⟨ψ| for a nonzero vector; the vector is normalized first.
    static DensityOperator pure(const ComplexVector &psi, std::size_t dim_a, std::size_t dim_b) {
        const double n = psi.norm();
        if (!(n > 0) || !std::isfinite(n)) {
            throw std::invalid_argument("DensityOperator::pure: zero or non-finite vector");
        }
        ComplexVector v = psi / n;
        return DensityOperator(v * v.adjoint(), dim_a, dim_b);
    }

    const ComplexMatrix &matrix() const { return m_; }
    Dims dims() const { return dims_; }
    std::size_t dim_a() const { return dims_.a; }
    std::size_t dim_b() const { return dims_.b; }
    std::size_t dim() const { return dims_.total(); }

    double purity() const { return (m_ * m_).trace().real(); }

   private:
    void validate() const {
        check_dims(m_, dims_, "DensityOperator");
        if (!all_finite(m_)) {
            throw std::invalid_argument("DensityOperator: non-finite entries");
        }
        const double herm = hermiticity_defect(m_);
        if (herm > kHermitianTol) {
            throw std::invalid_argument("DensityOperator: not Hermitian (defect " + std::to_string(herm) + ")");
        }
        const Complex tr = m_.trace();
        if (std::abs(tr - 1.0) > kTraceTol) {
            throw std::invalid_argument("DensityOperator: trace " + std::to_string(tr.real()) + " is not 1");
        }
        const double lo = hermitian_eigenvalues(m_).min();
        if (lo < -kPsdTol) {
            throw std::invalid_argument("DensityOperator: negative eigenvalue " + std::to_string(lo));
        }
    }

    ComplexMatrix m_;
    Dims dims_;
};

/// Reduced state on the complement of `traced`, stored with dims (d, 1).
inline DensityOperator partial_trace(const DensityOperator &rho, Side traced) {
    ComplexMatrix r = partial_trace(rho.matrix(), rho.dims(), traced);
    const std::size_t d = traced == Side::A ? rho.dim_b() : rho.dim_a();
    return DensityOperator(std::move(r), d, 1);
}

inline ComplexMatrix partial_transpose(const DensityOperator &rho, Side side = Side::B) {
    return partial_transpose(rho.matrix(), rho.dims(), side);
}

inline HermitianSpectrum pt_spectrum(const DensityOperator &rho) {
    return hermitian_eigenvalues(partial_transpose(rho));
}

/// Peres-Horodecki test: minimum eigenvalue of the partial transpose ≥ -tol.
inline bool is_ppt(const DensityOperator &rho, double tol = kPsdTol) {
    if (!(tol > 0)) {
        throw std::invalid_argument("is_ppt: tolerance must be positive");
    }
    return pt_spectrum(rho).min() >= -tol;
}

/// Sum of |λ| over partial-transpose eigenvalues below -tol, so that the
/// result is exactly zero whenever is_ppt(rho, tol) holds.
inline double negativity(const DensityOperator &rho, double tol = kPsdTol) {
    double n = 0;
    for (double v : pt_spectrum(rho).eigenvalues) {
        if (v < -tol) {
            n -= v;
        }
    }
    return n;
}

}  // namespace twirlbreak
