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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qlab/qubit_protocols.hpp"
#include "test_util.hpp"

using namespace qlab;
using qlab::testing::random_ket;

namespace {

// Independent pure-state route: project |phi>_1 |psi->_23 with <b|_12 and
// return the unnormalized amplitudes of particle 3.
CVector project_by_hand(const CVector &phi, BellState b) {
    const double s = 1.0 / std::sqrt(2.0);
    CVector full = CVector::Zero(8);
    for (int i = 0; i < 2; ++i) {
        full(i * 4 + 0 * 2 + 1) += phi(i) * s;
        full(i * 4 + 1 * 2 + 0) -= phi(i) * s;
    }
    CVector bv = bell(b).amplitudes();
    CVector out = CVector::Zero(2);
    for (int ij = 0; ij < 4; ++ij) {
        for (int k = 0; k < 2; ++k) out(k) += std::conj(bv(ij)) * full(ij * 2 + k);
    }
    return out;
}

}  // namespace

TEST(Teleport, singlet_branches_by_hand) {
    Ket in = Ket::qubit(0.6, cplx(0.0, 0.8));
    DensityOp res(bell(BellState::psi_minus));
    for (auto &br : teleport_all(DensityOp(in), res)) {
        CVector v = project_by_hand(in.amplitudes(), br.outcome.which);
        EXPECT_NEAR(v.squaredNorm(), 0.25, 1e-14);
        CMatrix ref = v * v.adjoint() / v.squaredNorm();
        EXPECT_LT(max_abs(br.uncorrected - ref), 1e-14);
    }
}

TEST(Teleport, paper_branch_states) {
    const cplx a = 0.6, b = cplx(0.0, 0.8);
    Ket in = Ket::qubit(a, b);
    DensityOp res(bell(BellState::psi_minus));
    auto branches = teleport_all(DensityOp(in), res);
    auto expect_state = [&](BellState which, cplx c0, cplx c1) {
        for (auto &br : branches) {
            if (br.outcome.which != which) continue;
            CVector v(2);
            v << c0, c1;
            EXPECT_LT(max_abs(br.uncorrected - v * v.adjoint()), 1e-14) << to_string(which);
        }
    };
    expect_state(BellState::psi_minus, a, b);
    expect_state(BellState::psi_plus, -a, b);
    expect_state(BellState::phi_minus, b, a);
    expect_state(BellState::phi_plus, -b, a);
}

TEST(Teleport, psi_minus_needs_no_correction) {
    Ket in = Ket::qubit(0.6, 0.8);
    auto r = teleport(in, DensityOp(bell(BellState::psi_minus)), BellState::psi_minus);
    EXPECT_EQ(r.outcome.which, BellState::psi_minus);
    EXPECT_EQ(teleport_correction(BellState::psi_minus), pauli::I());
    EXPECT_NEAR(fidelity(r.output, in), 1.0, 1e-12);
}

TEST(Teleport, basis_state_every_outcome) {
    Ket zero = Ket::basis(HilbertSpec({2}), {0});
    for (BellState b : kBellStates) {
        auto r = teleport(zero, DensityOp(bell(BellState::psi_minus)), b);
        EXPECT_NEAR(fidelity(r.output, zero), 1.0, 1e-12);
    }
}

TEST(Teleport, random_inputs_all_branches) {
    std::mt19937_64 rng(31);
    DensityOp res(bell(BellState::psi_minus));
    for (int trial = 0; trial < 200; ++trial) {
        Ket in = random_ket(HilbertSpec({2}), rng);
        double total = 0.0;
        for (auto &br : teleport_all(DensityOp(in), res)) {
            EXPECT_NEAR(br.outcome.probability, 0.25, 1e-10);
            total += br.outcome.probability;
            EXPECT_GT(in.amplitudes().dot(br.corrected * in.amplitudes()).real(), 1.0 - 1e-10);
        }
        EXPECT_NEAR(total, 1.0, 1e-10);
    }
}

TEST(Teleport, werner_resource_average_fidelity) {
    std::mt19937_64 rng(37);
    for (double F : {0.25, 0.5, 0.8, 0.95}) {
        for (int trial = 0; trial < 10; ++trial) {
            Ket in = random_ket(HilbertSpec({2}), rng);
            double avg = 0.0;
            for (auto &br : teleport_all(DensityOp(in), werner(F))) {
                avg += br.outcome.probability * in.amplitudes().dot(br.corrected * in.amplitudes()).real();
            }
            EXPECT_NEAR(avg, (2.0 * F + 1.0) / 3.0, 1e-9);
        }
    }
}

TEST(Teleport, never_signals) {
    std::mt19937_64 rng(41);
    DensityOp res(bell(BellState::psi_minus));
    for (int trial = 0; trial < 20; ++trial) {
        Ket in = random_ket(HilbertSpec({2}), rng);
        EXPECT_LT(max_abs(teleport_unconditioned(DensityOp(in), res) - CMatrix::Identity(2, 2) / 2.0), 1e-10);
    }
    // externally entangled input: reference x particle 3 stays rho_ref x 1/2
    DensityOp ent(bell(BellState::phi_plus));
    CMatrix u = teleport_unconditioned(ent, res);
    EXPECT_LT(max_abs(u - CMatrix::Identity(4, 4) / 4.0), 1e-10);
}

TEST(Teleport, entanglement_swapping_by_linearity) {
    DensityOp ent(bell(BellState::phi_plus));
    for (BellState b : kBellStates) {
        auto r = teleport(ent, DensityOp(bell(BellState::psi_minus)), b);
        EXPECT_NEAR(fidelity(r.output, bell(BellState::phi_plus)), 1.0, 1e-12);
    }
}

TEST(Teleport, malformed_resource) {
    EXPECT_THROW(teleport(Ket::qubit(1, 0), DensityOp::maximally_mixed(HilbertSpec({2, 3}))), InvalidArgument);
}

TEST(Purify, analytic_values) {
    EXPECT_NEAR(purify_step_analytic(1.0).F_out, 1.0, 1e-12);
    EXPECT_NEAR(purify_step_analytic(1.0).p_success, 1.0, 1e-12);
    // 10/36 over 20/36
    EXPECT_NEAR(purify_step_analytic(0.5).F_out, 0.5, 1e-12);
    EXPECT_NEAR(purify_step_analytic(0.5).p_success, 20.0 / 36.0, 1e-15);
    EXPECT_NEAR(purify_step_analytic(0.75).F_out, 0.788462, 1e-6);
    // 0.5625 + 0.0625/9 over 0.5625 + 0.125 + 0.3125/9
    EXPECT_NEAR(purify_step_analytic(0.75).F_out, (0.5625 + 0.0625 / 9) / (0.5625 + 0.125 + 0.3125 / 9), 1e-15);
    EXPECT_THROW(purify_step_analytic(1.5), InvalidArgument);
}

TEST(Purify, simulation_matches_analytic_map) {
    for (double F = 0.55; F < 0.951; F += 0.05) {
        auto sim = purify_werner_simulated(F);
        auto ana = purify_step_analytic(F);
        EXPECT_NEAR(sim.F_out, ana.F_out, 1e-9) << F;
        EXPECT_NEAR(sim.p_success, ana.p_success, 1e-9) << F;
    }
    auto one = purify_step_simulated(tensor(std::vector<DensityOp>{werner(1.0), werner(1.0)}));
    EXPECT_NEAR(one.p_success, 1.0, 1e-12);
    EXPECT_LT(max_abs(one.kept.matrix() - bell(BellState::psi_minus).projector()), 1e-12);
    EXPECT_THROW(purify_step_simulated(werner(0.9)), InvalidArgument);
}

TEST(Purify, untwirled_kept_pair_has_same_singlet_weight) {
    auto tw = purify_step_simulated(tensor(std::vector<DensityOp>{werner(0.7), werner(0.7)}), std::nullopt, true);
    auto raw = purify_step_simulated(tensor(std::vector<DensityOp>{werner(0.7), werner(0.7)}), std::nullopt, false);
    EXPECT_NEAR(fidelity(tw.kept, bell(BellState::psi_minus)), fidelity(raw.kept, bell(BellState::psi_minus)), 1e-12);
}

TEST(Purify, curve_and_iteration) {
    auto c = purification_curve({0.6, 0.8, 0.95});
    for (auto &r : c.rounds) EXPECT_GT(r.F_out, r.F_in);
    EXPECT_NEAR(purification_curve({0.5}).rounds[0].F_out, 0.5, 1e-12);
    EXPECT_THROW(purification_curve({}), InvalidArgument);

    // 1 - F shrinks by about 2/3 per round near F = 1; the values below come
    // from iterating the map in long double.
    long double F = 0.6L;
    for (int k = 0; k < 20; ++k) {
        long double p = F * F + 2 * F * (1 - F) / 3 + 5 * (1 - F) * (1 - F) / 9;
        F = (F * F + (1 - F) * (1 - F) / 9) / p;
    }
    auto it = purification_iterate(0.6, 20);
    EXPECT_NEAR(it.rounds.back().F_out, static_cast<double>(F), 1e-12);
    EXPECT_NEAR(1.0 - it.rounds.back().F_out, 0.00188743, 1e-8);
    EXPECT_NEAR(purification_iterate(0.6, 40).rounds.back().F_out, 1.0, 1e-6);
}

TEST(Purify, noisy_map_has_two_fixed_points) {
    auto fp = noisy_fixed_points(NoisyGateModel(0.02, 0.0));
    ASSERT_TRUE(fp.has_value());
    EXPECT_GT(fp->F_min, 0.5);
    EXPECT_LT(fp->F_min, fp->F_max);
    EXPECT_LT(fp->F_max, 1.0);
    EXPECT_NEAR(purify_werner_simulated(fp->F_min, NoisyGateModel(0.02)).F_out, fp->F_min, 1e-7);
    EXPECT_NEAR(purify_werner_simulated(fp->F_max, NoisyGateModel(0.02)).F_out, fp->F_max, 1e-7);
    // a noisy run from inside the window converges to F_max, not to 1
    auto it = purification_iterate(0.8, 60, NoisyGateModel(0.02));
    EXPECT_NEAR(it.rounds.back().F_out, fp->F_max, 1e-6);
    // measurement errors shrink the window further
    auto fpm = noisy_fixed_points(NoisyGateModel(0.02, 0.01));
    ASSERT_TRUE(fpm.has_value());
    EXPECT_LT(fpm->F_max, fp->F_max);
    EXPECT_FALSE(noisy_fixed_points(NoisyGateModel(0.3)).has_value());
}

TEST(Qec, single_flips_are_corrected) {
    const cplx a = 0.6, b = cplx(0.0, 0.8);
    Ket L = logical_qubit(a, b);
    auto none = qec3_cycle(L, {});
    EXPECT_EQ(none.syndrome, 0);
    EXPECT_LT((none.state.amplitudes() - L.amplitudes()).norm(), 1e-15);
    for (int q = 0; q < 3; ++q) {
        auto out = qec3_cycle(L, {{q, PauliKind::x}});
        EXPECT_EQ(out.syndrome, q + 1);
        EXPECT_GT(std::abs(inner(out.state, L)), 1.0 - 1e-10);
    }
}

TEST(Qec, double_flip_gives_logical_flip) {
    const cplx a = 0.6, b = cplx(0.0, 0.8);
    auto out = qec3_cycle(logical_qubit(a, b), {{0, PauliKind::x}, {2, PauliKind::x}});
    EXPECT_GT(std::abs(inner(out.state, logical_qubit(b, a))), 1.0 - 1e-10);
    EXPECT_THROW(qec3_cycle(logical_qubit(a, b), {{0, PauliKind::z}}), InvalidArgument);
}

TEST(Hamming, minimum_lengths) {
    EXPECT_EQ(quantum_hamming_min_n(1, 1), 5);
    // 4 (1 + 3*7) = 88 <= 128 while 4 (1 + 3*6) = 76 > 64
    EXPECT_EQ(quantum_hamming_min_n(2, 1), 7);
    EXPECT_THROW(quantum_hamming_min_n(0, 1), InvalidArgument);
    for (int k = 1; k <= 5; ++k) {
        for (int t = 1; k + t <= 6; ++t) {
            int n = quantum_hamming_min_n(k, t);
            EXPECT_TRUE(quantum_hamming_holds(k, t, n));
            EXPECT_FALSE(quantum_hamming_holds(k, t, n - 1));
        }
    }
}

TEST(Repetition, closed_forms_and_monte_carlo) {
    EXPECT_NEAR(repetition_interval_success(0.4), 0.648, 1e-12);
    EXPECT_EQ(classical_repetition_mc(0.0, 10, 1000).success, 1.0);
    EXPECT_NEAR(repetition_bound(1.0, 100), std::pow(1 - 3e-4, 100), 1e-15);
    EXPECT_GT(repetition_bound(1.0, 100), 0.97);
    for (int N : {10, 100}) {
        auto mc = classical_repetition_mc(1.0, N, 100000, 5);
        EXPECT_GE(mc.success, mc.bound - 3 * mc.std_error) << N;
    }
    // N = 1 with per-interval flip probability 0.4
    auto one = classical_repetition_mc(-std::log(0.6), 1, 200000, 9);
    EXPECT_NEAR(one.success, 0.648, 4 * one.std_error);
}
