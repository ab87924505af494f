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

#include "twirlbreak/states.hpp"

#include <gtest/gtest.h>

#include "twirlbreak/random.hpp"
#include "twirlbreak/twirl.hpp"

using namespace twirlbreak;

namespace {

double conj_distance(const DensityOperator &rho, const ComplexMatrix &w) {
    return frobenius_distance(w * rho.matrix() * w.adjoint(), rho.matrix());
}

}  // namespace

TEST(singlet, basic_properties) {
    const DensityOperator s = singlet();
    EXPECT_NEAR(s.matrix().trace().real(), 1.0, 1e-15);
    EXPECT_NEAR(negativity(s), 0.5, 1e-14);
    HaarSampler hs(1, 2);
    for (int t = 0; t < 100; t++) {
        const ComplexMatrix u = haar_sample(hs);
        EXPECT_LE(conj_distance(s, kron(u, u)), 1e-12);
    }
}

TEST(triplet, basic_properties) {
    EXPECT_EQ(frobenius_distance(triplet().matrix(), max_entangled(2).matrix()), 0.0);
    EXPECT_NEAR(negativity(triplet()), 0.5, 1e-14);
    HaarSampler hs(2, 2);
    for (int t = 0; t < 100; t++) {
        const ComplexMatrix u = haar_sample(hs);
        EXPECT_LE(conj_distance(triplet(), kron(u, u.conjugate())), 1e-12);
    }
}

TEST(max_entangled, marginal_and_purity) {
    for (int d : {2, 3, 5}) {
        const DensityOperator p = max_entangled(d);
        EXPECT_NEAR(p.purity(), 1.0, 1e-14);
        EXPECT_LE(frobenius_distance(partial_trace(p, Side::A).matrix(), identity(static_cast<std::size_t>(d)) / d),
                  1e-15);
    }
    EXPECT_THROW(max_entangled(1), std::invalid_argument);
}

TEST(werner_qubit, endpoints_and_threshold) {
    EXPECT_LE(frobenius_distance(werner_qubit(WernerParamQubit(0)).matrix(), identity(4) / 4.0), 1e-16);
    EXPECT_LE(frobenius_distance(werner_qubit(WernerParamQubit(1)).matrix(), singlet().matrix()), 1e-16);
    for (double g : {-1.0 / 3.0, 0.0, 0.3, 1.0 / 3.0, 0.34, 0.6, 1.0}) {
        const WernerParamQubit wp(g);
        EXPECT_EQ(werner_qubit_entangled(wp), negativity(werner_qubit(wp)) > 0) << g;
    }
}

TEST(werner_qubit, rejects_out_of_range) {
    EXPECT_THROW(WernerParamQubit(-0.34), std::invalid_argument);
    EXPECT_THROW(WernerParamQubit(1.0000001), std::invalid_argument);
    EXPECT_THROW(WernerParamQubit(NAN), std::invalid_argument);
}

TEST(werner_qubit, negativity_closed_form_on_grid) {
    for (int i = 0; i < 50; i++) {
        const double g = -1.0 / 3.0 + (4.0 / 3.0) * i / 49.0;
        const WernerParamQubit wp(g);
        EXPECT_NEAR(negativity(werner_qubit(wp)), werner_qubit_negativity(wp), 1e-14) << g;
    }
}

TEST(werner_qubit, invariant_under_haar_uu) {
    HaarSampler hs(3, 2);
    for (double g : {-1.0 / 3.0, 0.2, 0.7}) {
        const DensityOperator rho = werner_qubit(WernerParamQubit(g));
        for (int t = 0; t < 100; t++) {
            const ComplexMatrix u = haar_sample(hs);
            EXPECT_LE(conj_distance(rho, kron(u, u)), 1e-12);
        }
    }
}

TEST(flip_operator, definition) {
    const ComplexMatrix v = flip_operator(2);
    // V|01⟩ = |10⟩
    EXPECT_EQ(v(2, 1), Complex(1));
    EXPECT_EQ(v(1, 2), Complex(1));
    for (int d : {2, 3, 4}) {
        const ComplexMatrix vd = flip_operator(d);
        EXPECT_NEAR(vd.trace().real(), d, 0);
        EXPECT_EQ(frobenius_distance(vd * vd, identity(static_cast<std::size_t>(d * d))), 0.0);
        EXPECT_EQ(hermiticity_defect(vd), 0.0);
    }
    EXPECT_THROW(flip_operator(1), std::invalid_argument);
}

TEST(flip_operator, swap_trace_identity) {
    GaussianStream g(12);
    for (int t = 0; t < 20; t++) {
        const DensityOperator a = random_density_operator(g, 3, 1);
        const DensityOperator b = random_density_operator(g, 3, 1);
        const Complex lhs = (flip_operator(3) * kron(a.matrix(), b.matrix())).trace();
        const Complex rhs = (a.matrix() * b.matrix()).trace();
        EXPECT_LE(std::abs(lhs - rhs), 1e-14);
    }
}

TEST(werner_multi, maps_to_qubit_werner) {
    EXPECT_LE(frobenius_distance(werner_multi(WernerParamMulti(3, 0)).matrix(), identity(9) / 9.0), 1e-16);
    for (double mu : {-1.0, -0.6, 0.0, 0.4, 1.0}) {
        EXPECT_LE(frobenius_distance(werner_multi(WernerParamMulti(2, mu)).matrix(),
                                     werner_qubit(werner_mu_to_gamma(mu)).matrix()),
                  1e-12)
            << mu;
    }
}

TEST(werner_multi, entanglement_threshold_matches_ppt) {
    for (int d : {2, 3}) {
        for (int i = 0; i <= 40; i++) {
            const double mu = -1.0 + 2.0 * i / 40.0;
            if (std::abs(mu + 1.0 / d) < 1e-9) {
                continue;  // boundary
            }
            const WernerParamMulti wp(d, mu);
            EXPECT_EQ(werner_multi_entangled(wp), negativity(werner_multi(wp)) > 0) << d << " " << mu;
        }
    }
}

TEST(werner_multi, invariant_under_haar_uu) {
    for (int d : {2, 3, 4}) {
        HaarSampler hs(40 + static_cast<std::uint64_t>(d), d);
        const DensityOperator rho = werner_multi(WernerParamMulti(d, -0.8));
        for (int t = 0; t < 50; t++) {
            const ComplexMatrix u = haar_sample(hs);
            EXPECT_LE(conj_distance(rho, kron(u, u)), 1e-12);
        }
    }
}

TEST(werner_multi, rejects_out_of_range) {
    EXPECT_THROW(WernerParamMulti(3, -1.01), std::invalid_argument);
    EXPECT_THROW(WernerParamMulti(1, 0.0), std::invalid_argument);
}

TEST(isotropic, endpoints_threshold_and_invariance) {
    EXPECT_LE(frobenius_distance(isotropic(IsotropicParam(3, 0)).matrix(), identity(9) / 9.0), 1e-16);
    EXPECT_LE(frobenius_distance(isotropic(IsotropicParam(3, 1)).matrix(), max_entangled(3).matrix()), 1e-16);
    for (double g : {-0.125, 0.0, 0.2, 0.24, 0.26, 0.5, 1.0}) {
        const IsotropicParam ip(3, g);
        EXPECT_EQ(isotropic_entangled(ip), negativity(isotropic(ip)) > 0) << g;
    }
    for (int d : {2, 3, 4}) {
        HaarSampler hs(50 + static_cast<std::uint64_t>(d), d);
        const DensityOperator rho = isotropic(IsotropicParam(d, 0.6));
        for (int t = 0; t < 50; t++) {
            const ComplexMatrix u = haar_sample(hs);
            EXPECT_LE(conj_distance(rho, kron(u, u.conjugate())), 1e-12);
        }
    }
    EXPECT_THROW(IsotropicParam(3, -0.126), std::invalid_argument);
}
