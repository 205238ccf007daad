// Copyright 2026 The qlab Authors
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

#include <random>

#include <gtest/gtest.h>

#include "qlab/core/linalg.hpp"
#include "qlab/core/pulse.hpp"
#include "qlab/core/state.hpp"
#include "qlab/entanglement.hpp"
#include "test_util.hpp"

using namespace qlab;
using qlab::testing::random_hermitian;
using qlab::testing::random_ket;
using qlab::testing::random_matrix;

TEST(HilbertSpec, strides_most_significant_first) {
    HilbertSpec s({2, 3, 4});
    EXPECT_EQ(s.total_dim(), 24u);
    EXPECT_EQ(s.stride(0), 12u);
    EXPECT_EQ(s.stride(2), 1u);
    EXPECT_EQ(s.index({1, 2, 3}), 23u);
    EXPECT_EQ(s.digits(23), (std::vector<int>{1, 2, 3}));
}

TEST(HilbertSpec, rejects_bad_dims_and_cap) {
    EXPECT_THROW(HilbertSpec({2, 1}), InvalidArgument);
    EXPECT_THROW(HilbertSpec(std::vector<int>{}), InvalidArgument);
    EXPECT_THROW(HilbertSpec::qubits(13), InvalidArgument);
    EXPECT_NO_THROW(HilbertSpec::qubits(12));
    EXPECT_THROW(HilbertSpec({8, 8}, 32), InvalidArgument);
}

TEST(Tensor, basis_kets) {
    Ket k0 = Ket::basis(HilbertSpec({2}), {0});
    Ket k1 = Ket::basis(HilbertSpec({2}), {1});
    Ket k = tensor(std::vector<Ket>{k0, k1});
    EXPECT_EQ(k.spec().dims(), (std::vector<int>{2, 2}));
    EXPECT_EQ(k[1], cplx(1.0));
    EXPECT_NEAR(k.amplitudes().norm(), 1.0, 1e-15);
}

TEST(Tensor, identities) {
    Operator i2 = Operator::identity(HilbertSpec({2}));
    Operator i3 = Operator::identity(HilbertSpec({3}));
    Operator i6 = tensor(std::vector<Operator>{i2, i3});
    EXPECT_EQ(i6.tag(), OpTag::unitary);
    EXPECT_LT(max_abs(i6.matrix() - CMatrix::Identity(6, 6)), 1e-15);
}

TEST(Tensor, sx_sx_fixes_phi_plus) {
    Operator x = qubit_op(pauli::X());
    Operator xx = tensor(std::vector<Operator>{x, x});
    Ket phi = bell(BellState::phi_plus);
    EXPECT_LT((xx.apply(phi).amplitudes() - phi.amplitudes()).norm(), 1e-15);
}

TEST(Tensor, mixed_kinds_and_cap) {
    std::vector<TensorFactor> parts{Ket::basis(HilbertSpec({2}), {0}), Operator::identity(HilbertSpec({2}))};
    EXPECT_THROW(tensor_any(parts), InvalidArgument);
    Ket big = Ket::basis(HilbertSpec({64}), {0});
    EXPECT_THROW(tensor(std::vector<Ket>{big, big, big}), InvalidArgument);
}

TEST(Tensor, associative) {
    std::mt19937_64 rng(1);
    Ket a = random_ket(HilbertSpec({2}), rng), b = random_ket(HilbertSpec({3}), rng),
        c = random_ket(HilbertSpec({2}), rng);
    Ket l = tensor(std::vector<Ket>{a, tensor(std::vector<Ket>{b, c})});
    Ket r = tensor(std::vector<Ket>{tensor(std::vector<Ket>{a, b}), c});
    EXPECT_EQ(l.spec(), r.spec());
    // products of three doubles in different order differ only by rounding
    EXPECT_LT((l.amplitudes() - r.amplitudes()).cwiseAbs().maxCoeff(), 1e-15);
    Ket ea = Ket::basis(HilbertSpec({2}), {1}), eb = Ket::basis(HilbertSpec({3}), {2}),
        ec = Ket::basis(HilbertSpec({2}), {0});
    Ket le = tensor(std::vector<Ket>{ea, tensor(std::vector<Ket>{eb, ec})});
    Ket re = tensor(std::vector<Ket>{tensor(std::vector<Ket>{ea, eb}), ec});
    EXPECT_EQ(le.amplitudes(), re.amplitudes());
    EXPECT_EQ(le[le.spec().index({1, 2, 0})], cplx(1.0));
}

TEST(PartialTrace, singlet_gives_maximally_mixed) {
    DensityOp rho(bell(BellState::psi_minus));
    DensityOp ra = partial_trace(rho, {0});
    EXPECT_LT(max_abs(ra.matrix() - CMatrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, oracle_index_contraction) {
    std::mt19937_64 rng(7);
    HilbertSpec spec({2, 3, 2});
    DensityOp rho = qlab::testing::random_density(spec, rng);
    // keep subsystems 0 and 2, contract 1 by hand
    CMatrix ref = CMatrix::Zero(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
            for (int a2 = 0; a2 < 2; ++a2)
                for (int c2 = 0; c2 < 2; ++c2)
                    for (int b = 0; b < 3; ++b)
                        ref(a * 2 + c, a2 * 2 + c2) += rho(spec.index({a, b, c}), spec.index({a2, b, c2}));
    EXPECT_LT(max_abs(partial_trace(rho, {2, 0}).matrix() - ref), 1e-14);
}

TEST(PartialTrace, product_state_reduces_to_rank_one) {
    std::mt19937_64 rng(3);
    Ket p1 = random_ket(HilbertSpec({2}), rng), p2 = random_ket(HilbertSpec({3}), rng);
    DensityOp rho(tensor(std::vector<Ket>{p1, p2}));
    DensityOp r1 = partial_trace(rho, {0});
    EXPECT_LT(max_abs(r1.matrix() - p1.projector()), 1e-14);
    EXPECT_LT(max_abs(partial_trace(rho, {0, 1}).matrix() - rho.matrix()), 1e-15);
    EXPECT_THROW(partial_trace(rho, {2}), InvalidArgument);
    EXPECT_THROW(partial_trace(rho, {}), InvalidArgument);
}

TEST(PartialTrace, trace_preserved_for_random_kets) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        HilbertSpec spec({2, 3, 2});
        DensityOp rho(random_ket(spec, rng));
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_NEAR(partial_trace(rho, {k}).matrix().trace().real(), 1.0, 1e-10);
        }
    }
}

TEST(PartialTranspose, involution_and_singlet_spectrum) {
    std::mt19937_64 rng(5);
    DensityOp rho = qlab::testing::random_density(HilbertSpec({2, 3}), rng);
    CMatrix once = partial_transpose(rho, 1).matrix();
    CMatrix twice = partial_transpose_matrix(rho.spec(), once, 1);
    EXPECT_LT(max_abs(twice - rho.matrix()), 1e-15);

    DensityOp singlet(bell(BellState::psi_minus));
    auto e = hermitian_eig(partial_transpose(singlet, 0).matrix());
    EXPECT_NEAR(e.values(0), -0.5, 1e-12);
    EXPECT_THROW(partial_transpose(singlet, 2), InvalidArgument);
}

TEST(PartialTranspose, oracle_elementwise) {
    std::mt19937_64 rng(9);
    HilbertSpec spec({3, 2});
    DensityOp rho = qlab::testing::random_density(spec, rng);
    CMatrix pt = partial_transpose(rho, 0).matrix();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 2; ++b)
            for (int a2 = 0; a2 < 3; ++a2)
                for (int b2 = 0; b2 < 2; ++b2)
                    EXPECT_EQ(pt(spec.index({a, b}), spec.index({a2, b2})),
                              rho(spec.index({a2, b}), spec.index({a, b2})));
}

TEST(PartialTranspose, product_state_stays_positive) {
    std::mt19937_64 rng(13);
    DensityOp ra = qlab::testing::random_density(HilbertSpec({2}), rng);
    DensityOp rb = qlab::testing::random_density(HilbertSpec({3}), rng);
    DensityOp rho = tensor(std::vector<DensityOp>{ra, rb});
    EXPECT_GT(hermitian_eig(partial_transpose(rho, 0).matrix()).values(0), -1e-12);
}

TEST(Evolve, closed_forms) {
    Ket zero = Ket::basis(HilbertSpec({2}), {0});
    Operator h0(HilbertSpec({2}), CMatrix::Zero(2, 2), OpTag::hermitian);
    EXPECT_LT((evolve(h0, 3.0, zero).amplitudes() - zero.amplitudes()).norm(), 1e-15);

    Operator hz(HilbertSpec({2}), pauli::Z() / 2.0, OpTag::hermitian);
    Ket z = evolve(hz, kPi, zero);
    EXPECT_LT(std::abs(z[0] - std::exp(kI * kPi / 2.0)), 1e-12);

    Operator hx(HilbertSpec({2}), pauli::X(), OpTag::hermitian);
    Ket x = evolve(hx, kPi / 2.0, zero);
    EXPECT_LT(std::abs(x[1] - (-kI)), 1e-12);
    EXPECT_LT(std::abs(x[0]), 1e-12);
}

TEST(Evolve, rejects_non_hermitian) {
    CMatrix m(2, 2);
    m << 0, 1, 0, 0;
    Operator g(HilbertSpec({2}), m, OpTag::general);
    EXPECT_THROW(evolve(g, 1.0, Ket::basis(HilbertSpec({2}), {0})), InvalidArgument);
}

TEST(Evolve, preserves_norm_for_random_hamiltonians) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ut(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        HilbertSpec spec({2, 4});
        CMatrix h = random_hermitian(8, rng);
        h *= 10.0 / h.operatorNorm();
        Ket psi = random_ket(spec, rng);
        Ket out = evolve(Operator(spec, h, OpTag::hermitian), ut(rng), psi);
        EXPECT_NEAR(out.amplitudes().norm(), 1.0, 1e-9);
    }
}

TEST(Decompositions, simple_spectra) {
    auto e = hermitian_eig(CMatrix::Identity(3, 3));
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(e.values(k), 1.0, 1e-15);
    auto z = hermitian_eig(pauli::Z());
    EXPECT_NEAR(z.values(0), -1.0, 1e-15);
    EXPECT_NEAR(z.values(1), 1.0, 1e-15);

    CMatrix c(2, 2);
    c << 1, 0, 0, 1;
    c /= std::sqrt(2.0);
    auto s = svd(c);
    EXPECT_NEAR(s.singular(0), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s.singular(1), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Decompositions, reconstruction_on_random_matrices) {
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<int> dim(1, 64);
    for (int trial = 0; trial < 100; ++trial) {
        int n = dim(rng), m = dim(rng);
        CMatrix h = random_hermitian(n, rng);
        auto e = hermitian_eig(h);
        EXPECT_LT(max_abs(h - e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint()), 1e-9);
        for (int k = 1; k < n; ++k) EXPECT_LE(e.values(k - 1), e.values(k));

        CMatrix a = random_matrix(n, m, rng);
        auto s = svd(a);
        EXPECT_LT(max_abs(a - s.U * s.singular.cast<cplx>().asDiagonal() * s.V), 1e-9);
        for (Eigen::Index k = 0; k < s.singular.size(); ++k) {
            EXPECT_GE(s.singular(k), 0.0);
            if (k > 0) {
                EXPECT_LE(s.singular(k), s.singular(k - 1));
            }
        }
    }
}

TEST(StateTypes, validation) {
    CMatrix bad = CMatrix::Identity(2, 2);
    EXPECT_THROW(DensityOp(HilbertSpec({2}), bad), InvalidArgument);
    CMatrix neg(2, 2);
    neg << 1.5, 0, 0, -0.5;
    EXPECT_THROW(DensityOp(HilbertSpec({2}), neg), InvalidArgument);
    CMatrix nu(2, 2);
    nu << 1, 1, 0, 1;
    EXPECT_THROW(Operator(HilbertSpec({2}), nu, OpTag::unitary), InvalidArgument);
    EXPECT_THROW(Operator(HilbertSpec({2}), nu, OpTag::hermitian), InvalidArgument);
    EXPECT_THROW(Ket(HilbertSpec({2}), CVector::Zero(2)), InvalidArgument);
}

TEST(Pulse, cubic_interpolation_and_integral) {
    auto f = RealPulse::sample([](double t) { return std::sin(t); }, 0.0, kPi, 201);
    EXPECT_NEAR(f(1.234), std::sin(1.234), 1e-8);
    EXPECT_NEAR(f.derivative(1.234), std::cos(1.234), 1e-6);
    EXPECT_NEAR(f.integral(), 2.0, 1e-8);
    EXPECT_EQ(f(-1.0), 0.0);
    auto r = f.reversed();
    EXPECT_NEAR(r(0.3), f(kPi - 0.3), 1e-12);
}
