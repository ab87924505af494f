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

// Named bipartite state families and their entanglement thresholds.

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "twirlbreak/bipartite.hpp"

namespace twirlbreak {

namespace detail {

inline void require_dimension(int d, const char *what) {
    if (d < 2) {
        throw std::invalid_argument(std::string(what) + ": dimension must be >= 2, got " + std::to_string(d));
    }
}

inline void require_range(double v, double lo, double hi, const char *what) {
    // Boundaries are inclusive and compared exactly.
    if (!(v >= lo && v <= hi)) {
        std::ostringstream ss;
        ss.precision(17);
        ss << what << ": " << v << " outside [" << lo << ", " << hi << "]";
        throw std::invalid_argument(ss.str());
    }
}

}  // namespace detail

/// Two-qubit Werner weight, -1/3 ≤ γ ≤ 1.
class WernerParamQubit {
   public:
    explicit WernerParamQubit(double gamma) : gamma_(gamma) {
        detail::require_range(gamma, -1.0 / 3.0, 1.0, "werner-qubit gamma");
    }
    double gamma() const { return gamma_; }

   private:
    double gamma_;
};

/// d⊗d Werner parameter, -1 ≤ μ ≤ 1.
class WernerParamMulti {
   public:
    WernerParamMulti(int d, double mu) : d_(d), mu_(mu) {
        detail::require_dimension(d, "werner");
        detail::require_range(mu, -1.0, 1.0, "werner mu");
    }
    int d() const { return d_; }
    double mu() const { return mu_; }

   private:
    int d_;
    double mu_;
};

/// d⊗d isotropic weight, -1/(d²-1) ≤ γ ≤ 1.
class IsotropicParam {
   public:
    IsotropicParam(int d, double gamma) : d_(d), gamma_(gamma) {
        detail::require_dimension(d, "isotropic");
        detail::require_range(gamma, -1.0 / (static_cast<double>(d) * d - 1.0), 1.0, "isotropic gamma");
    }
    int d() const { return d_; }
    double gamma() const { return gamma_; }

   private:
    int d_;
    double gamma_;
};

inline ComplexVector max_entangled_ket(int d) {
    detail::require_dimension(d, "max_entangled");
    ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(d) * d);
    for (int k = 0; k < d; k++) {
        psi(k * d + k) = 1.0 / std::sqrt(static_cast<double>(d));
    }
    return psi;
}

inline DensityOperator max_entangled(int d) {
    const ComplexVector psi = max_entangled_ket(d);
    return DensityOperator(psi * psi.adjoint(), d, d);
}

/// (|01⟩ - |10⟩)/√2
inline DensityOperator singlet() {
    ComplexVector psi = ComplexVector::Zero(4);
    psi(1) = std::sqrt(0.5);
    psi(2) = -std::sqrt(0.5);
    return DensityOperator(psi * psi.adjoint(), 2, 2);
}

/// (|00⟩ + |11⟩)/√2
inline DensityOperator triplet() { return max_entangled(2); }

inline DensityOperator werner_qubit(WernerParamQubit p) {
    const double g = p.gamma();
    ComplexMatrix m = (1.0 - g) / 4.0 * identity(4) + g * singlet().matrix();
    return DensityOperator(std::move(m), 2, 2);
}

/// Swap operator V|φ⟩|ψ⟩ = |ψ⟩|φ⟩ on C^d ⊗ C^d.
inline ComplexMatrix flip_operator(int d) {
    detail::require_dimension(d, "flip_operator");
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    ComplexMatrix v = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < d; i++) {
        for (int j = 0; j < d; j++) {
            v(j * d + i, i * d + j) = 1.0;
        }
    }
    return v;
}

/// (I + μV) / (d² + dμ)
inline DensityOperator werner_multi(WernerParamMulti p) {
    const int d = p.d();
    const double mu = p.mu();
    ComplexMatrix m = (identity(static_cast<std::size_t>(d * d)) + mu * flip_operator(d)) /
                      (static_cast<double>(d) * d + d * mu);
    return DensityOperator(std::move(m), d, d);
}

/// (1-γ) I/d² + γ |ψ⟩⟨ψ| with |ψ⟩ maximally entangled.
inline DensityOperator isotropic(IsotropicParam p) {
    const int d = p.d();
    const double g = p.gamma();
    ComplexMatrix m = (1.0 - g) / (static_cast<double>(d) * d) * identity(static_cast<std::size_t>(d * d)) +
                      g * max_entangled(d).matrix();
    return DensityOperator(std::move(m), d, d);
}

// Entanglement predicates, kept apart from the negativity numerics.

inline bool werner_qubit_entangled(WernerParamQubit p) { return p.gamma() > 1.0 / 3.0; }

inline bool werner_multi_entangled(WernerParamMulti p) { return p.mu() < -1.0 / p.d(); }

inline bool isotropic_entangled(IsotropicParam p) { return p.gamma() > 1.0 / (1.0 + p.d()); }

/// max(0, (3γ-1)/4)
inline double werner_qubit_negativity(WernerParamQubit p) { return std::max(0.0, (3.0 * p.gamma() - 1.0) / 4.0); }

/// Maps the d = 2 Werner parameter μ to the qubit weight γ = -μ/(2+μ).
inline WernerParamQubit werner_mu_to_gamma(double mu) { return WernerParamQubit(-mu / (2.0 + mu)); }

}  // namespace twirlbreak
