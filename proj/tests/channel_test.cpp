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

#include "twirlbreak/channel.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "twirlbreak/random.hpp"
#include "twirlbreak/states.hpp"
#include "twirlbreak/twirl.hpp"

using namespace twirlbreak;

namespace {

ProbabilityVector random_probabilities(GaussianStream &g) {
    std::vector<double> p(4);
    double s = 0;
    for (auto &x : p) {
        x = -std::log(1.0 - g.uniform());
        s += x;
    }
    for (auto &x : p) {
        x /= s;
    }
    return ProbabilityVector(p);
}

const ProbabilityVector kBoundaryP({0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0});

}  // namespace

TEST(probability_vector, validation) {
    EXPECT_NO_THROW(ProbabilityVector({0.25, 0.25, 0.25, 0.25}));
    EXPECT_THROW(ProbabilityVector({0.5, 0.6, -0.1, 0.0}), std::invalid_argument);
    EXPECT_THROW(ProbabilityVector({0.5, 0.5, 0.1, 0.0}), std::invalid_argument);
    EXPECT_THROW(ProbabilityVector(std::vector<double>{}), std::invalid_argument);
    EXPECT_THROW(ProbabilityVector({NAN, 1.0}), std::invalid_argument);
}

TEST(paulis, algebra) {
    const auto &s = paulis();
    for (std::size_t k = 0; k < 4; k++) {
        EXPECT_LE(unitarity_defect(s[k]), 1e-15);
        EXPECT_EQ(hermiticity_defect(s[k]), 0.0);
    }
    // Y = iXZ
    EXPECT_LE(frobenius_distance(s[2], Complex(0, 1) * s[1] * s[3]), 1e-15);
    EXPECT_LE(frobenius_distance(s[1] * s[1], identity(2)), 1e-15);
}

TEST(kraus_channel, rejects_incomplete_sets) {
    std::vector<ComplexMatrix> ops{0.9 * identity(2)};
    EXPECT_THROW(KrausChannel(ops, 2), std::invalid_argument);
    EXPECT_NEAR(KrausChannel::completeness_residual(ops), 0.19, 1e-15);
    EXPECT_THROW(KrausChannel({}, 2), std::invalid_argument);
    EXPECT_THROW(KrausChannel({identity(3)}, Dims{2, 2}), std::invalid_argument);
}

TEST(kraus_channel, trace_preserving_on_random_inputs) {
    GaussianStream g(7);
    for (int t = 0; t < 20; t++) {
        const auto p = random_probabilities(g);
        for (const auto &ch : {correlated_pauli(p), correlated_pauli_conjugate(p), local_depolarizing(p, Side::A)}) {
            const DensityOperator rho = random_density_operator(g, 2, 2);
            const DensityOperator out = apply_kraus(ch, rho);
            EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-13);
        }
    }
}

TEST(correlated_pauli, conjugate_variant_matches_on_real_paulis) {
    // X, Z real and Y* = -Y, so σ⊗σ* = ±σ⊗σ and both channels coincide.
    GaussianStream g(8);
    const auto p = random_probabilities(g);
    const DensityOperator rho = random_density_operator(g, 2, 2);
    EXPECT_LE(frobenius_distance(apply_kraus(correlated_pauli(p), rho).matrix(),
                                 apply_kraus(correlated_pauli_conjugate(p), rho).matrix()),
              1e-14);
}

TEST(correlated_pauli, preserves_singlet_and_werner) {
    GaussianStream g(9);
    for (int t = 0; t < 20; t++) {
        const auto p = random_probabilities(g);
        for (double gamma : {0.0, 0.4, 1.0}) {
            const DensityOperator w = werner_qubit(WernerParamQubit(gamma));
            EXPECT_LE(frobenius_distance(apply_kraus(correlated_pauli(p), w).matrix(), w.matrix()), 1e-14);
        }
    }
}

TEST(local_depolarizing, boundary_channel_breaks_singlet_entanglement) {
    const DensityOperator out = apply_kraus(local_depolarizing(kBoundaryP, Side::A), singlet());
    EXPECT_LE(negativity(out), 1e-12);
    EXPECT_TRUE(is_ppt(out));
}

TEST(local_depolarizing, double_transmission_is_identity_on_werner) {
    for (double gamma : {0.4, 0.6, 0.9}) {
        const DensityOperator w = werner_qubit(WernerParamQubit(gamma));
        const DensityOperator out = apply_kraus(correlated_pauli(kBoundaryP), w);
        EXPECT_LE(frobenius_distance(out.matrix(), w.matrix()), 1e-12);
        EXPECT_NEAR(negativity(out), (3 * gamma - 1) / 4, 1e-10);
    }
}

TEST(is_entanglement_breaking, qubit_verdict_matches_max_probability) {
    GaussianStream g(11);
    for (int t = 0; t < 200; t++) {
        const auto p = random_probabilities(g);
        const auto rep = is_entanglement_breaking(pauli_channel(p));
        EXPECT_TRUE(rep.conclusive);
        EXPECT_EQ(rep.verdict == "EB", p.max() <= 0.5);
        // PT of the Pauli Choi state has eigenvalues 1/2 - p_k.
        std::vector<double> expect;
        for (double v : p.values()) {
            expect.push_back(0.5 - v);
        }
        std::sort(expect.begin(), expect.end());
        ASSERT_EQ(rep.witness.eigenvalues.size(), 4u);
        for (std::size_t k = 0; k < 4; k++) {
            EXPECT_NEAR(rep.witness.eigenvalues[k], expect[k], 1e-10);
        }
    }
}

TEST(is_entanglement_breaking, accepts_lifted_form_and_rejects_nonlocal) {
    const auto lifted = is_entanglement_breaking(local_depolarizing(kBoundaryP, Side::A));
    EXPECT_EQ(lifted.verdict, "EB");
    EXPECT_THROW(is_entanglement_breaking(correlated_pauli(kBoundaryP)), std::invalid_argument);
    EXPECT_THROW(is_entanglement_breaking(pauli_channel(kBoundaryP), 0.0), std::invalid_argument);
}

TEST(is_entanglement_breaking, identity_is_not_eb) {
    const auto rep = is_entanglement_breaking(KrausChannel({identity(2)}, 2));
    EXPECT_EQ(rep.verdict, "NOT-EB");
    EXPECT_NEAR(rep.witness.min(), -0.5, 1e-14);
    const auto rep3 = is_entanglement_breaking(KrausChannel({identity(3)}, 3));
    EXPECT_EQ(rep3.verdict, "NPT");
    EXPECT_FALSE(rep3.conclusive);
}

TEST(product_form, certificate) {
    GaussianStream g(13);
    const DensityOperator a = random_density_operator(g, 3, 1);
    const DensityOperator b = random_density_operator(g, 3, 1);
    EXPECT_TRUE(certify_product_form(DensityOperator(kron(a.matrix(), b.matrix()), 3, 3)));
    EXPECT_FALSE(certify_product_form(max_entangled(3)));
    EXPECT_FALSE(certify_product_form(isotropic(IsotropicParam(3, 0.1))));
}

TEST(env_is_classical, diagonal_check) {
    EXPECT_TRUE(env_is_classical(correlated_classical_state({0.5, 0.5})));
    EXPECT_FALSE(env_is_classical(max_entangled(2)));
}

TEST(dilated_channel, rejects_bad_inputs) {
    const ComplexMatrix cu = controlled_unitary({identity(2), paulis()[1]});
    EXPECT_THROW(DilatedChannel(max_entangled(2), cu, cu, Dims{2, 2}), std::invalid_argument);
    EXPECT_THROW(DilatedChannel(correlated_classical_state({0.5, 0.5}), 1.1 * cu, cu, Dims{2, 2}),
                 std::invalid_argument);
    EXPECT_THROW(DilatedChannel(correlated_classical_state({0.5, 0.5}), cu, cu, Dims{2, 3}), std::invalid_argument);
}

TEST(pauli_dilation, control_unitary_shape_and_environment) {
    const DilatedChannel dc = build_pauli_dilation(kBoundaryP);
    EXPECT_EQ(dc.control_unitary().rows(), 64);
    EXPECT_LE(unitarity_defect(dc.control_unitary()), 1e-14);
    EXPECT_TRUE(env_is_classical(dc.env_state()));
    EXPECT_EQ(dc.env_dim_e1(), 4u);
}

TEST(pauli_dilation, block_formula_matches_dense_oracle) {
    GaussianStream g(17);
    for (int t = 0; t < 10; t++) {
        const auto p = random_probabilities(g);
        const DilatedChannel dc = build_pauli_dilation(p);
        const DensityOperator rho = random_density_operator(g, 2, 2);
        const ComplexMatrix fast = apply_dilation(dc, rho.matrix());
        const ComplexMatrix dense =
            oracle::dense_dilation(rho.matrix(), 2, 2, dc.env_state().matrix(), 4, 4, dc.control_unitary());
        EXPECT_LE(frobenius_distance(fast, dense), 1e-13);
        EXPECT_LE(frobenius_distance(fast, apply_kraus(correlated_pauli(p), rho.matrix())), 1e-13);
    }
}

TEST(pauli_dilation, uncorrelated_environment_matches_product_channel) {
    // Environment Σ p_j q_k |jk⟩⟨jk| gives independent Pauli channels on A and B.
    GaussianStream g(19);
    const auto p = random_probabilities(g);
    const auto q = random_probabilities(g);
    ComplexMatrix env = ComplexMatrix::Zero(16, 16);
    for (Eigen::Index j = 0; j < 4; j++) {
        for (Eigen::Index k = 0; k < 4; k++) {
            env(j * 4 + k, j * 4 + k) = p.values()[static_cast<std::size_t>(j)] * q.values()[static_cast<std::size_t>(k)];
        }
    }
    std::vector<ComplexMatrix> us(paulis().begin(), paulis().end());
    const ComplexMatrix cu = controlled_unitary(us);
    const DilatedChannel dc(DensityOperator(env, 4, 4), cu, cu, Dims{2, 2});
    const DensityOperator rho = random_density_operator(g, 2, 2);
    std::vector<ComplexMatrix> ops;
    for (std::size_t j = 0; j < 4; j++) {
        for (std::size_t k = 0; k < 4; k++) {
            ops.push_back(std::sqrt(p.values()[j] * q.values()[k]) * kron(paulis()[j], paulis()[k]));
        }
    }
    const KrausChannel product(ops, Dims{2, 2});
    EXPECT_LE(frobenius_distance(apply_dilation(dc, rho).matrix(), apply_kraus(product, rho).matrix()), 1e-13);
    EXPECT_LE(frobenius_distance(apply_dilation(dc, rho.matrix()),
                                 oracle::dense_dilation(rho.matrix(), 2, 2, env, 4, 4, dc.control_unitary())),
              1e-13);
}

TEST(lift_local, side_placement) {
    const KrausChannel x({paulis()[1]}, 2);
    const KrausChannel on_b = lift_local(x, Side::B, 3);
    EXPECT_EQ(on_b.dims(), (Dims{3, 2}));
    EXPECT_LE(frobenius_distance(on_b.operators()[0], kron(identity(3), paulis()[1])), 0.0);
    EXPECT_THROW(lift_local(correlated_pauli(kBoundaryP), Side::A, 2), std::invalid_argument);
}
