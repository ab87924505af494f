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

// Seeded random sources. Everything is derived from std::mt19937_64, whose
// output sequence is fixed by the standard, and converted to normals with
// Box-Muller here so results do not depend on the standard library vendor.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "twirlbreak/bipartite.hpp"

namespace twirlbreak {

class GaussianStream {
   public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1), 53 bits.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    /// Standard complex normal: E|z|^2 = 1.
    Complex complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re * std::numbers::sqrt2 / 2, im * std::numbers::sqrt2 / 2};
    }

    std::mt19937_64 &engine() { return engine_; }

   private:
    std::mt19937_64 engine_;
    double spare_ = 0;
    bool has_spare_ = false;
};

inline ComplexMatrix ginibre(GaussianStream &g, std::size_t rows, std::size_t cols) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); i++) {
        for (Eigen::Index j = 0; j < m.cols(); j++) {
            m(i, j) = g.complex_normal();
        }
    }
    return m;
}

inline ComplexVector random_ket(GaussianStream &g, std::size_t dim) {
    ComplexVector v(dim);
    for (Eigen::Index i = 0; i < v.size(); i++) {
        v(i) = g.complex_normal();
    }
    return v / v.norm();
}

inline DensityOperator random_pure_state(GaussianStream &g, std::size_t dim_a, std::size_t dim_b) {
    return DensityOperator::pure(random_ket(g, dim_a * dim_b), dim_a, dim_b);
}

/// Induced-measure mixed state G G† / Tr(G G†) with G of shape d×rank.
inline DensityOperator random_density_operator(GaussianStream &g, std::size_t dim_a, std::size_t dim_b,
                                               std::size_t rank = 0) {
    const std::size_t d = dim_a * dim_b;
    ComplexMatrix gm = ginibre(g, d, rank == 0 ? d : rank);
    ComplexMatrix rho = gm * gm.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityOperator(std::move(rho), dim_a, dim_b);
}

/// Hermitian, unit trace, generally indefinite.
inline ComplexMatrix random_hermitian_unit_trace(GaussianStream &g, std::size_t d) {
    ComplexMatrix m = ginibre(g, d, d);
    ComplexMatrix h = 0.5 * (m + m.adjoint());
    Complex tr = h.trace();
    if (std::abs(tr) < 1e-3) {
        h += identity(d) * (1.0 / static_cast<double>(d));
        tr = h.trace();
    }
    h /= tr.real();
    return 0.5 * (h + h.adjoint());
}

}  // namespace twirlbreak
