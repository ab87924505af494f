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

#include "twirlbreak/bipartite.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "twirlbreak/random.hpp"
#include "twirlbreak/states.hpp"

using namespace twirlbreak;

namespace {

ComplexMatrix pauli_x() {
    ComplexMatrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

ComplexMatrix pauli_z() {
    ComplexMatrix z(2, 2);
    z << 1, 0, 0, -1;
    return z;
}

ComplexVector basis(std::size_t dim, std::size_t i) {
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(i)) = 1;
    return v;
}

void expect_spectrum(const HermitianSpectrum &s, std::vector<double> expect, double tol) {
    ASSERT_EQ(s.size(), expect.size());
    for (std::size_t i = 0; i < expect.size(); i++) {
        EXPECT_NEAR(s.eigenvalues[i], expect[i], tol) << "index " << i;
    }
}

}  // namespace

TEST(kron, identity) { EXPECT_EQ(frobenius_distance(kron(identity(2), identity(2)), identity(4)), 0.0); }

TEST(kron, basis_action) {
    // |00⟩ -> |10⟩
    EXPECT_EQ(frobenius_distance(kron(pauli_x(), identity(2)) * basis(4, 0), basis(4, 2)), 0.0);
    // (-1)(-1)|11⟩
    EXPECT_EQ(frobenius_distance(kron(pauli_z(), pauli_z()) * basis(4, 3), basis(4, 3)), 0.0);
}

TEST(kron, shape) {
    const ComplexMatrix a = ComplexMatrix::Ones(2, 3);
    const ComplexMatrix b = ComplexMatrix::Ones(4, 5);
    const ComplexMatrix k = kron(a, b);
    EXPECT_EQ(k.rows(), 8);
    EXPECT_EQ(k.cols(), 15);
}

TEST(partial_trace, maximally_entangled_marginal) {
    for (int d : {2, 3, 4}) {
        const DensityOperator r = partial_trace(max_entangled(d), Side::A);
        EXPECT_LE(frobenius_distance(r.matrix(), identity(static_cast<std::size_t>(d)) / d), 1e-15);
        EXPECT_EQ(r.dim_a(), static_cast<std::size_t>(d));
    }
    EXPECT_LE(frobenius_distance(partial_trace(singlet(), Side::A).matrix(), identity(2) / 2.0), 1e-15);
}

TEST(partial_trace, product_state_marginal) {
    GaussianStream g(3);
    const DensityOperator ra = random_density_operator(g, 3, 1);
    const DensityOperator rb = random_density_operator(g, 2, 1);
    const DensityOperator prod(kron(ra.matrix(), rb.matrix()), 3, 2);
    EXPECT_LE(frobenius_distance(partial_trace(prod, Side::B).matrix(), ra.matrix()), 1e-14);
    EXPECT_LE(frobenius_distance(partial_trace(prod, Side::A).matrix(), rb.matrix()), 1e-14);
}

TEST(partial_trace, matches_index_sum_and_preserves_trace) {
    GaussianStream g(4);
    for (int t = 0; t < 10; t++) {
        const DensityOperator rho = random_density_operator(g, 3, 4);
        const ComplexMatrix ta = partial_trace(rho.matrix(), rho.dims(), Side::A);
        EXPECT_LE(frobenius_distance(ta, oracle::trace_out_a(rho.matrix(), 3, 4)), 1e-14);
        EXPECT_NEAR(ta.trace().real(), 1.0, 1e-12);
        const DensityOperator rb = partial_trace(rho, Side::B);
        EXPECT_NEAR(partial_trace(rb, Side::B).matrix().trace().real(), 1.0, 1e-12);
    }
}

TEST(partial_trace, rejects_inconsistent_dims) {
    EXPECT_THROW(partial_trace(identity(6), Dims{2, 2}, Side::A), std::invalid_argument);
    EXPECT_THROW(DensityOperator(identity(6) / 6.0, 2, 2), std::invalid_argument);
}

TEST(partial_transpose, appendix_identity_channel_output) {
    // Identity channel on the triplet: PT eigenvalues 1/2 - p_k with p = (1,0,0,0).
    expect_spectrum(pt_spectrum(triplet()), {-0.5, 0.5, 0.5, 0.5}, 1e-14);
}

TEST(partial_transpose, product_states_stay_ppt) {
    GaussianStream g(5);
    const DensityOperator ra = random_density_operator(g, 2, 1);
    const DensityOperator rb = random_density_operator(g, 3, 1);
    const DensityOperator prod(kron(ra.matrix(), rb.matrix()), 2, 3);
    const ComplexMatrix pt = partial_transpose(prod);
    EXPECT_LE(frobenius_distance(pt, kron(ra.matrix(), rb.matrix().transpose())), 1e-15);
    EXPECT_TRUE(is_ppt(prod));
}

TEST(partial_transpose, involution_trace_hermiticity_and_index_formula) {
    GaussianStream g(6);
    for (int t = 0; t < 10; t++) {
        const DensityOperator rho = random_density_operator(g, 2, 3);
        const ComplexMatrix pt = partial_transpose(rho);
        EXPECT_LE(frobenius_distance(pt, oracle::partial_transpose_b(rho.matrix(), 2, 3)), 0.0);
        EXPECT_EQ(frobenius_distance(partial_transpose(pt, rho.dims()), rho.matrix()), 0.0);
        EXPECT_NEAR(pt.trace().real(), 1.0, 1e-12);
        EXPECT_LE(hermiticity_defect(pt), 1e-15);
    }
}

TEST(partial_transpose, side_a_is_full_transpose_of_side_b) {
    GaussianStream g(7);
    const DensityOperator rho = random_density_operator(g, 2, 2);
    const ComplexMatrix pa = partial_transpose(rho, Side::A);
    // Same spectrum either way.
    const auto sa = hermitian_eigenvalues(pa);
    const auto sb = pt_spectrum(rho);
    for (std::size_t i = 0; i < 4; i++) {
        EXPECT_NEAR(sa.eigenvalues[i], sb.eigenvalues[i], 1e-13);
    }
    EXPECT_EQ(frobenius_distance(pa, partial_transpose(rho, Side::B).transpose()), 0.0);
}

TEST(hermitian_eigenvalues, basic_spectra) {
    expect_spectrum(hermitian_eigenvalues(identity(4)), {1, 1, 1, 1}, 1e-15);
    expect_spectrum(hermitian_eigenvalues(singlet().matrix()), {0, 0, 0, 1}, 1e-15);
    // Value frozen from the Jacobi oracle below.
    expect_spectrum(hermitian_eigenvalues(partial_transpose(singlet())), {-0.5, 0.5, 0.5, 0.5}, 1e-14);
    const auto jac = oracle::jacobi_eigenvalues(partial_transpose(singlet()));
    for (std::size_t i = 0; i < 4; i++) {
        EXPECT_NEAR(jac[i], (std::vector<double>{-0.5, 0.5, 0.5, 0.5})[i], 1e-12);
    }
}

TEST(hermitian_eigenvalues, agrees_with_jacobi_and_sums_to_trace) {
    GaussianStream g(8);
    for (int t = 0; t < 10; t++) {
        const ComplexMatrix h = random_hermitian_unit_trace(g, 6);
        const auto s = hermitian_eigenvalues(h);
        const auto jac = oracle::jacobi_eigenvalues(h);
        for (std::size_t i = 0; i < 6; i++) {
            EXPECT_NEAR(s.eigenvalues[i], jac[i], 1e-10);
        }
        EXPECT_NEAR(s.sum(), h.trace().real(), 1e-10);
        EXPECT_TRUE(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
    }
}

TEST(hermitian_eigenvalues, reconstruction_on_degenerate_spectrum) {
    const ComplexMatrix w = werner_multi(WernerParamMulti(3, -0.7)).matrix();
    const auto sys = detail::hermitian_eigensystem(w, true);
    const Eigen::MatrixXcd rebuilt = sys.vectors * sys.values.cast<Complex>().asDiagonal() * sys.vectors.adjoint();
    EXPECT_LE((rebuilt - Eigen::MatrixXcd(w)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(hermitian_eigenvalues, rejects_non_hermitian) {
    ComplexMatrix m = identity(2);
    m(0, 1) = 1.0;
    EXPECT_THROW(hermitian_eigenvalues(m), std::invalid_argument);
}

TEST(is_ppt, known_states) {
    EXPECT_FALSE(is_ppt(singlet()));
    EXPECT_TRUE(is_ppt(DensityOperator(identity(4) / 4.0, 2, 2)));
    // Boundary: min PT eigenvalue (1 - 3γ)/4 = 0.
    EXPECT_TRUE(is_ppt(werner_qubit(WernerParamQubit(1.0 / 3.0))));
    EXPECT_THROW(is_ppt(singlet(), 0.0), std::invalid_argument);
}

TEST(negativity, known_values) {
    EXPECT_NEAR(negativity(singlet()), 0.5, 1e-14);
    GaussianStream g(9);
    const DensityOperator ra = random_density_operator(g, 2, 1);
    const DensityOperator rb = random_density_operator(g, 2, 1);
    EXPECT_EQ(negativity(DensityOperator(kron(ra.matrix(), rb.matrix()), 2, 2)), 0.0);
    for (double gamma : {0.34, 0.5, 0.75, 1.0}) {
        EXPECT_NEAR(negativity(werner_qubit(WernerParamQubit(gamma))), (3 * gamma - 1) / 4, 1e-14);
    }
}

TEST(negativity, zero_iff_ppt_on_random_states) {
    GaussianStream g(10);
    int entangled = 0;
    for (int t = 0; t < 200; t++) {
        const DensityOperator rho = random_density_operator(g, 2, 2, 1 + t % 4);
        const double n = negativity(rho);
        EXPECT_GE(n, 0.0);
        EXPECT_EQ(n == 0.0, is_ppt(rho, 1e-10));
        entangled += n > 0;
    }
    // Both branches exercised.
    EXPECT_GT(entangled, 0);
    EXPECT_LT(entangled, 200);
}

TEST(frobenius_distance, values_and_errors) {
    GaussianStream g(11);
    const ComplexMatrix m = ginibre(g, 3, 3);
    EXPECT_EQ(frobenius_distance(m, m), 0.0);
    EXPECT_NEAR(frobenius_distance(identity(2), pauli_z()), 2.0, 1e-15);
    EXPECT_NEAR(frobenius_distance(singlet().matrix(), triplet().matrix()), std::sqrt(2.0), 1e-15);
    EXPECT_THROW(frobenius_distance(identity(2), identity(3)), std::invalid_argument);
}

TEST(density_operator, validates_invariants) {
    ComplexMatrix bad = identity(4) / 4.0;
    bad(0, 1) = Complex(0, 1e-9);
    EXPECT_THROW(DensityOperator(bad, 2, 2), std::invalid_argument);
    EXPECT_THROW(DensityOperator(identity(4) / 3.0, 2, 2), std::invalid_argument);
    ComplexMatrix neg = ComplexMatrix::Zero(4, 4);
    neg.diagonal() << 1.1, -0.1, 0, 0;
    EXPECT_THROW(DensityOperator(neg, 2, 2), std::invalid_argument);
    ComplexMatrix nan = identity(4) / 4.0;
    nan(2, 2) = NAN;
    EXPECT_THROW(DensityOperator(nan, 2, 2), std::invalid_argument);
}
