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

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include "qlab/repeater.hpp"

using namespace qlab;
using namespace qlab::repeater;

namespace {

RepeaterParams chain_params(int n, double eta_s, double p0 = 0.1) {
    RepeaterParams p;
    p.p_c = p0;
    p.eta_p_prime = 1.0;
    p.L0 = 1e-12;
    p.L_att = 1.0;
    p.eta_s = eta_s;
    p.n = n;
    return p;
}

// Swap by direct simulation on modes (L, I1, I2, R), occupation 0/1 each.
// The middle modes meet on a 50/50 beam splitter; success means exactly one
// photon registered, each photon being detected with probability eta.
struct SwapOracle {
    double p;           // total success probability (either detector)
    CMatrix rho_plus;   // normalized (L, R) state after a D+ click
};

SwapOracle swap_by_simulation(const EMEState &a, const EMEState &b, double eta) {
    CMatrix rho = kron(a.density().matrix(), b.density().matrix());  // (L, I1, I2, R)
    auto idx = [](int l, int i1, int i2, int r) { return 8 * l + 4 * i1 + 2 * i2 + r; };
    // POVM on (I1, I2): one excitation projected onto (|I1> +- |I2>)/sqrt2
    // with weight eta; two excitations bunch into one output port, giving
    // exactly one detection with probability 2 eta (1 - eta), split evenly.
    auto povm = [&](double sign) {
        CMatrix e = CMatrix::Zero(4, 4);  // basis |i1 i2>
        CVector d = CVector::Zero(4);
        d(2) = 1.0 / std::sqrt(2.0);   // |10>
        d(1) = sign / std::sqrt(2.0);  // |01>
        e += eta * d * d.adjoint();
        e(3, 3) += eta * (1.0 - eta);
        return e;
    };
    SwapOracle out{0.0, CMatrix::Zero(4, 4)};
    for (double sign : {1.0, -1.0}) {
        CMatrix e = povm(sign);
        CMatrix lr = CMatrix::Zero(4, 4);  // (L, R)
        for (int l = 0; l < 2; ++l)
            for (int r = 0; r < 2; ++r)
                for (int l2 = 0; l2 < 2; ++l2)
                    for (int r2 = 0; r2 < 2; ++r2)
                        for (int m = 0; m < 4; ++m)
                            for (int k = 0; k < 4; ++k)
                                lr(2 * l + r, 2 * l2 + r2) +=
                                    e(k, m) * rho(idx(l, m >> 1, m & 1, r), idx(l2, k >> 1, k & 1, r2));
        double pr = lr.trace().real();
        out.p += pr;
        if (sign > 0) out.rho_plus = lr / pr;
    }
    return out;
}

}  // namespace

TEST(Snr, collective_enhancement) {
    SnrInputs in;
    in.g = 0.3;
    in.kappa = 2.0;
    in.gamma_s = 0.5;
    EXPECT_NEAR(snr(SnrConfig::lambda_one, in), 4.0 * single_atom_snr(0.3, 2.0, 0.5), 1e-15);
    double one = snr(SnrConfig::lambda_two, in);
    in.N_a = 2.0;
    EXPECT_NEAR(snr(SnrConfig::lambda_two, in), 2.0 * one, 1e-15);
    in.N_a = 0.0;
    EXPECT_THROW(snr(SnrConfig::lambda_one, in), InvalidArgument);
}

TEST(Snr, free_space_optical_depth) {
    SnrInputs in;
    in.rho_n = 5e12 * 1e6;  // m^-3
    in.L_a = 0.02;
    in.k_s = 2.0 * kPi / 0.8e-6;
    double r = snr(SnrConfig::free_space, in);
    EXPECT_GT(r, 1e3);
    EXPECT_NEAR(r, 3.0 * 5e18 * 0.02 * 0.64e-12 / (4.0 * kPi * kPi), 1e-9);
}

TEST(TwoModeSqueezed, vacuum_and_small_r) {
    Ket v = two_mode_squeezed(0.0);
    EXPECT_EQ(v[0], cplx(1.0));
    const double r = 0.1;
    Ket s = two_mode_squeezed(r);
    const int d = static_cast<int>(s.spec().dim(0));
    // tanh and sech from exponentials.
    const double e2 = std::exp(2.0 * r);
    const double th = (e2 - 1.0) / (e2 + 1.0), sech = 2.0 * std::exp(r) / (e2 + 1.0);
    EXPECT_NEAR(s[d + 1].real(), th * sech, 1e-10);
    EXPECT_NEAR(excitation_probability(r), th * th, 1e-15);
    EXPECT_NEAR(excitation_probability(r), 0.00993370915, 1e-11);
    // Overlap with the perturbative form |00> + sqrt(p_c)|11> misses O(p_c^2).
    double pc = excitation_probability(r);
    double ov = std::abs(s[0] + std::sqrt(pc) * s[d + 1]) / std::sqrt(1.0 + pc);
    EXPECT_NEAR(ov, 1.0, pc * pc);
}

TEST(TwoModeSqueezed, perfect_pairing_and_truncation) {
    for (double r : {0.3, 0.6, 1.0}) {
        Ket s = two_mode_squeezed(r);
        const int d = static_cast<int>(s.spec().dim(0));
        double mismatch = 0.0, norm = 0.0;
        for (int na = 0; na < d; ++na)
            for (int np = 0; np < d; ++np) {
                double w = std::norm(s[na * d + np]);
                norm += w;
                mismatch += w * (na - np) * (na - np);
            }
        EXPECT_EQ(mismatch, 0.0);
        EXPECT_NEAR(norm, 1.0, 1e-12);
        EXPECT_LT(std::pow(std::tanh(r), 2.0 * d), 1e-10);
    }
    EXPECT_THROW(two_mode_squeezed(3.0, 4), NumericalError);
}

TEST(Eme, density_positive_unit_trace) {
    for (double c : {0.0, 1e-3, 0.5, 3.0, 100.0})
        for (double phi : {0.0, 1.1, -2.5}) {
            DensityOp rho = EMEState(c, phi).density();
            EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-14);
            EXPECT_GE(hermitian_eig(rho.matrix()).values.minCoeff(), -1e-14);
        }
    EXPECT_THROW(EMEState(-0.1), InvalidArgument);
}

TEST(Segment, generation_numbers) {
    auto p = chain_params(0, 1.0, 0.01);
    p.eta_p_prime = 0.3;
    p.p_dc = 1e-5;
    auto s = generate_segment(p);
    EXPECT_NEAR(s.state.c, 1.0 / 300.0, 1e-12);
    EXPECT_NEAR(s.T0, p.t_delta / 0.003, 1e-6);
    EXPECT_EQ(s.delta_F0, 0.01);
    p.p_dc = 0.0;
    EXPECT_EQ(generate_segment(p).state.c, 0.0);
    auto half = p;
    half.p_c = 0.005;
    EXPECT_NEAR(generate_segment(half).delta_F0, 0.5 * s.delta_F0, 1e-18);
    EXPECT_NEAR(generate_segment(half).T0, 2.0 * s.T0, 1e-9);
    p.p_c = 0.0;
    EXPECT_THROW(generate_segment(p), InvalidArgument);
}

TEST(Swap, recursion_values) {
    auto a = swap(0.0, 1.0);
    EXPECT_DOUBLE_EQ(a.p, 0.5);
    EXPECT_DOUBLE_EQ(a.c, 0.0);
    auto b = swap(0.0, 2.0 / 3.0);
    EXPECT_NEAR(b.p, 4.0 / 9.0, 1e-15);
    EXPECT_NEAR(b.c, 1.0 / 3.0, 1e-15);
    auto pair = swap(EMEState(0.2, 0.4), EMEState(0.2, 1.1), 0.9);
    EXPECT_NEAR(pair.state.phi, 1.5, 1e-15);
    EXPECT_THROW(swap(EMEState(0.1), EMEState(0.2), 0.9), InvalidArgument);
}

TEST(Swap, closed_form_exact_rational) {
    using boost::multiprecision::cpp_rational;
    const cpp_rational eta(2, 3), c0(1, 300);
    cpp_rational c = c0;
    for (int i = 1; i <= 20; ++i) {
        c = 2 * c + 1 - eta;
        cpp_rational two_i = cpp_rational(boost::multiprecision::cpp_int(1) << i);
        EXPECT_EQ(c, (two_i - 1) * (1 - eta) + two_i * c0) << i;
    }
    double cd = 1.0 / 300.0;
    for (int i = 1; i <= 20; ++i) {
        cd = swap(cd, 2.0 / 3.0).c;
        EXPECT_NEAR(cd, vacuum_coefficient_closed_form(i, 1.0 / 300.0, 2.0 / 3.0), 1e-12 * std::ldexp(1.0, i));
    }
}

TEST(Swap, matches_mode_simulation) {
    for (double c : {0.0, 0.2, 1.5})
        for (double eta : {1.0, 0.9, 2.0 / 3.0}) {
            EMEState a(c, 0.3), b(c, -1.2);
            auto sim = swap_by_simulation(a, b, eta);
            auto f = swap(a, b, eta);
            EXPECT_NEAR(sim.p, f.p, 1e-14);
            EXPECT_LT(max_abs(sim.rho_plus - f.state.density().matrix()), 1e-14);
        }
}

TEST(Chain, zero_depth_and_consistency) {
    auto p = chain_params(0, 0.8);
    p.p_dc = 1e-4;
    auto a = chain_analysis(p);
    EXPECT_EQ(a.T_n, a.T0);
    EXPECT_EQ(a.c_n, a.c[0]);
    for (int n : {1, 3, 6}) {
        auto q = chain_params(n, 2.0 / 3.0, 0.01);
        q.L0 = 2.5;
        auto b = chain_analysis(q);
        EXPECT_NEAR(b.log10_ratio, log10_ratio_exact(n, 2.5, 2.0 / 3.0), 1e-12);
        EXPECT_NEAR(b.delta_F_n, std::ldexp(0.01, n), 1e-15);
        EXPECT_NEAR(b.p_a, application_probability(b.c_n, q.eta_a), 1e-15);
    }
}

TEST(Chain, ideal_swap_reproduces_quadratic_law) {
    for (int n : {0, 2, 5, 9}) {
        double L0 = 1.7;
        EXPECT_NEAR(log10_ratio_exact(n, L0, 1.0), log10_ideal_swap_law(std::ldexp(L0, n), L0), 1e-12);
    }
}

TEST(Chain, monotone_in_swap_loss_and_length) {
    double prev = -1.0;
    for (double eta : {1.0, 0.95, 0.8, 0.66, 0.5, 0.3}) {
        auto p = chain_params(4, eta, 0.01);
        p.L0 = 3.0;
        double t = chain_analysis(p).T_tot;
        EXPECT_GT(t, prev);
        prev = t;
    }
    prev = -1.0;
    for (int n = 0; n <= 8; ++n) {
        auto p = chain_params(n, 0.8, 0.01);
        p.L0 = 3.0;
        double t = chain_analysis(p).T_tot;
        EXPECT_GT(t, prev);
        prev = t;
    }
}

TEST(Optimize, lossy_swap_paper_numbers) {
    auto o = optimize_segment_length(2.0 / 3.0, 100.0);
    EXPECT_EQ(o.law, ScalingLaw::lossy_swap);
    EXPECT_TRUE(o.unimodal);
    EXPECT_GE(o.L0_opt, 5.1);
    EXPECT_LE(o.L0_opt, 6.3);
    EXPECT_GE(o.log10_ratio, 6.0);
    EXPECT_LE(o.log10_ratio, 7.0);
    // Stationarity of p log x + L0 with p depending on x: L0 = log2 x + 1/2 + log2(1/eta - 1) + 2.
    EXPECT_NEAR(o.L0_opt, std::log2(100.0 / o.L0_opt) + 2.5 - 1.0, 1e-6);
    EXPECT_NEAR(o.fitted_power, o.L0_opt, 1e-4);
    // Product path over dyadic splits.
    EXPECT_EQ(o.exact_n, 4);
    EXPECT_NEAR(o.exact_log10_ratio, 7.55394424136616, 1e-9);
    EXPECT_NEAR(log10_direct(100.0), 43.42944819032518, 1e-12);
}

TEST(Optimize, quadratic_regime) {
    for (double L : {50.0, 100.0, 400.0}) {
        auto o = optimize_segment_length(1.0, L);
        EXPECT_EQ(o.law, ScalingLaw::ideal_swap);
        EXPECT_NEAR(o.L0_opt, 2.0, 1e-6);
        EXPECT_NEAR(o.fitted_power, 2.0, 1e-6);
    }
}

TEST(Chsh, paper_settings) {
    for (double c : {0.0, 0.4, 3.0}) {
        auto r = chsh_value(EMEState(c, 0.7));
        EXPECT_NEAR(r.S, 2.0 * std::sqrt(2.0), 1e-9);
        EXPECT_NEAR(r.S_cos, 2.0 * std::sqrt(2.0), 1e-12);
        EXPECT_NEAR(r.p_a, 1.0 / (2.0 * (c + 1.0) * (c + 1.0)), 1e-14);
    }
    EXPECT_NEAR(chsh_value(EMEState(0.5), {}, 0.3).p_a, application_probability(0.5, 0.3), 1e-15);
}

TEST(Chsh, random_settings_match_cosine) {
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    for (int k = 0; k < 100; ++k) {
        double l = ang(rng), r = ang(rng);
        auto c = correlation(EMEState(0.3, ang(rng)), l, r);
        EXPECT_NEAR(c.E, std::cos(l - r), 1e-10);
    }
    EXPECT_NEAR(correlation(EMEState(0.1), 0.8, 0.8).E, 1.0, 1e-14);
}

TEST(Noise, reporters) {
    double p = dark_count_probability(1e2, 1e7);
    EXPECT_NEAR(p, 1e-5, 1e-20);
    EXPECT_NEAR(dark_count_imperfection(1000.0, p), 1e-2, 1e-15);
    EXPECT_NEAR(nonstationary_imperfection(100.0, 1e-4), 1e-3, 1e-18);
}

TEST(MonteCarlo, geometric_stage) {
    auto p = chain_params(0, 1.0, 0.5);
    auto r = monte_carlo_chain(p, 20000, 0);
    EXPECT_NEAR(r.mean_time, 2.0, 3.0 * r.std_error);
    EXPECT_NEAR(r.closed_form, 2.0, 1e-9);
}

TEST(MonteCarlo, sequential_chain_matches_product) {
    auto p = chain_params(3, 2.0 / 3.0, 0.1);
    auto r = monte_carlo_chain(p, 10000, 0);
    double ratio = r.mean_time / r.closed_form;
    EXPECT_GE(ratio, 0.8);
    EXPECT_LE(ratio, 1.25);
    for (const auto &st : r.stages) EXPECT_NEAR(st.rate(), st.p, 3.0 * st.sigma());
    auto again = monte_carlo_chain(p, 10000, 0);
    EXPECT_EQ(again.mean_time, r.mean_time);
    EXPECT_NE(monte_carlo_chain(p, 10000, 1).mean_time, r.mean_time);
}

TEST(MonteCarlo, parallel_tree_and_no_memory) {
    auto p = chain_params(3, 2.0 / 3.0, 0.1);
    auto seq = monte_carlo_chain(p, 10000, 0);
    auto par = monte_carlo_chain(p, 10000, 0, ChainModel::parallel_tree);
    for (const auto &st : par.stages) EXPECT_NEAR(st.rate(), st.p, 3.0 * st.sigma());
    // Waiting for the slower of two pairs costs more than the product formula.
    EXPECT_GT(par.mean_time, seq.mean_time * 1.2);
    double prev_gap = 0.0;
    for (int n = 1; n <= 4; ++n) {
        auto q = chain_params(n, 2.0 / 3.0, 0.1);
        auto nm = monte_carlo_chain(q, 200, 0, ChainModel::no_memory);
        double gap = std::log10(nm.closed_form) - std::log10(chain_analysis(q).T_n / q.t_delta);
        EXPECT_GT(gap, 2.0 * prev_gap);
        prev_gap = gap;
    }
    auto small = chain_params(1, 1.0, 0.5);
    auto nm = monte_carlo_chain(small, 20000, 0, ChainModel::no_memory);
    EXPECT_NEAR(nm.closed_form, 8.0, 1e-9);
    EXPECT_NEAR(nm.mean_time, 8.0, 3.0 * nm.std_error);
}
