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
#include <numeric>

#include <gtest/gtest.h>

#include "qlab/core/ode.hpp"
#include "qlab/neutral_gates.hpp"

using namespace qlab;
using namespace qlab::neutral;

namespace {

CollisionConfig base_config(Trajectory xa, Trajectory xb, double T) {
    CollisionConfig c;
    c.a_s = 0.05;
    c.mass = 1.0;
    c.a0 = 1.0;
    c.nu = 10.0;
    c.xa = std::move(xa);
    c.xb = std::move(xb);
    c.t1 = T;
    return c;
}

// Wells start 6 a0 apart, meet, and return: sin^2 ramp.
CollisionConfig meeting_config(double T, double scale = 1.0) {
    auto xa = [T, scale](double t) {
        double s = std::sin(kPi * t / (T * scale));
        return -3.0 + 3.0 * s * s;
    };
    auto xb = [T, scale](double t) {
        double s = std::sin(kPi * t / (T * scale));
        return 3.0 - 3.0 * s * s;
    };
    return base_config(xa, xb, T * scale);
}

double signed_wrap(double p) {
    double w = wrap_phase(p);
    return w > kPi ? w - 2.0 * kPi : w;
}

// Closest product of local phase gates, found by minimizing
// sum_ij |e^{i theta_ij} - e^{i(x_i + y_j)}|^2 with x0 = 0 fixing the gauge.
// Returns max_ij |theta_ij - x_i - y_j| (mod 2 pi) at the optimum.
double local_residual(const std::array<double, 4> &th) {
    auto residual = [&](double x1, double y0, double y1, bool worst) {
        double xs[2] = {0.0, x1}, ys[2] = {y0, y1};
        double m = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double r = th[2 * i + j] - xs[i] - ys[j];
                m = worst ? std::max(m, std::abs(signed_wrap(r))) : m + 1.0 - std::cos(r);
            }
        return m;
    };
    auto cost = [&](double x1, double y0, double y1) { return residual(x1, y0, y1, false); };
    const int n = 36;
    double best = 1e9, bx = 0, by0 = 0, by1 = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                double x1 = 2 * kPi * a / n, y0 = 2 * kPi * b / n, y1 = 2 * kPi * c / n;
                double v = cost(x1, y0, y1);
                if (v < best) best = v, bx = x1, by0 = y0, by1 = y1;
            }
    for (double h = 2 * kPi / n; h > 1e-12; h *= 0.5) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (int d = 0; d < 3; ++d)
                for (double s : {-h, h}) {
                    double p[3] = {bx, by0, by1};
                    p[d] += s;
                    double v = cost(p[0], p[1], p[2]);
                    if (v < best - 1e-15) best = v, bx = p[0], by0 = p[1], by1 = p[2], moved = true;
                }
        }
    }
    return residual(bx, by0, by1, true);
}

CVector rydberg_ode(const RydbergConfig &c, CVector psi) {
    for (const auto &p : blockade_sequence()) {
        double omega = p.atom == 0 ? c.omega1 : c.omega2;
        CMatrix h = rydberg_hamiltonian(c, p.atom, omega);
        psi = ode::schrodinger([&](double) { return h; }, psi, 0.0, p.area / omega, {1e-13, 1e-12});
    }
    return psi;
}

}  // namespace

TEST(Collision, overlap_closed_form_matches_quadrature) {
    for (double a0 : {0.5, 1.0, 2.0})
        for (double d : {0.0, 0.3, 1.0, 4.0})
            EXPECT_NEAR(gaussian_overlap(d, a0), gaussian_overlap_quadrature(0.2, 0.2 + d, a0), 1e-13);
    EXPECT_NEAR(gaussian_overlap(0.0, 1.0), 1.0 / std::sqrt(2.0 * kPi), 1e-15);
}

TEST(Collision, overlapped_hold) {
    const double tau = 2.5;
    auto c = base_config([](double) { return 0.4; }, [](double) { return 0.4; }, tau);
    auto r = collisional_phase(c);
    EXPECT_TRUE(r.closed_form);
    double expect = 4.0 * kPi * c.a_s / c.mass * tau / (c.a0 * std::sqrt(2.0 * kPi));
    EXPECT_NEAR(r.phi, expect, 1e-12);
    EXPECT_NEAR(r.phi_crosscheck, expect, 1e-9);
    c.t1 = 2.0 * tau;
    EXPECT_NEAR(collisional_phase(c).phi, 2.0 * r.phi, 1e-12);
}

TEST(Collision, separated_wells_vanish) {
    auto c = base_config([](double) { return -50.0; }, [](double) { return 50.0; }, 10.0);
    EXPECT_LT(std::abs(collisional_phase(c).phi), 1e-12);
}

TEST(Collision, moving_wells_two_routes) {
    auto r = collisional_phase(meeting_config(20.0));
    EXPECT_FALSE(r.closed_form);
    EXPECT_GT(r.phi, 0.0);
    EXPECT_NEAR(r.phi, r.phi_crosscheck, 1e-9);
    EXPECT_TRUE(r.valid);
}

TEST(Collision, reparametrization_covariance) {
    double phi = collisional_phase(meeting_config(20.0)).phi;
    for (double s : {0.5, 2.0, 3.0}) EXPECT_NEAR(collisional_phase(meeting_config(20.0, s)).phi, s * phi, 1e-10 * s);
}

TEST(Collision, rejects_non_returning_and_flags_adiabaticity) {
    auto c = base_config([](double t) { return t; }, [](double) { return 3.0; }, 1.0);
    EXPECT_THROW(collisional_phase(c), InvalidArgument);
    auto strong = base_config([](double) { return 0.0; }, [](double) { return 0.0; }, 1.0);
    strong.a_s = 5.0;
    auto r = collisional_phase(strong);
    EXPECT_GT(r.adiabaticity_ratio, 1.0);
    EXPECT_FALSE(r.valid);
}

TEST(Collision, pulse_profile_trajectories) {
    const double T = 20.0;
    auto ra = RealPulse::sample([&](double t) { double s = std::sin(kPi * t / T); return -3.0 + 3.0 * s * s; }, 0, T, 401);
    auto rb = RealPulse::sample([&](double t) { double s = std::sin(kPi * t / T); return 3.0 - 3.0 * s * s; }, 0, T, 401);
    auto ref = meeting_config(T);
    auto c = collision_config(ref.a_s, ref.mass, ref.a0, ref.nu, ra, rb);
    EXPECT_NEAR(collisional_phase(c).phi, collisional_phase(ref).phi, 1e-6);
}

TEST(GateTable, controlled_sign) {
    auto t = collision_gate_table(0.0, 0.0, kPi);
    const double expect[4] = {1, -1, 1, 1};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::cos(t[i]), expect[i], 1e-15);
    EXPECT_NEAR(entangling_phase(t), kPi, 1e-15);
    EXPECT_NEAR(entangling_phase(collision_gate_table(0.3, -1.1, 0.0)), 0.0, 1e-15);
}

TEST(GateTable, entangling_power_from_local_phase_search) {
    for (double phab : {0.0, 0.4, 1.5, kPi, 4.0, 7.0}) {
        auto t = collision_gate_table(0.7, -0.2, phab);
        double expect = std::abs(signed_wrap(phab)) / 4.0;
        EXPECT_NEAR(local_residual(t), expect, 1e-6) << phab;
        EXPECT_NEAR(std::abs(signed_wrap(entangling_phase(t))), 4.0 * local_residual(t), 4e-6);
    }
}

TEST(Rydberg, u_formula_and_scaling) {
    EXPECT_DOUBLE_EQ(rydberg_u(2, 1.0), -36.0);
    EXPECT_NEAR(rydberg_u(30, 2e5) / rydberg_u(30, 1e5), 0.125, 1e-15);
    EXPECT_NEAR(rydberg_u_joule(2, 1.0), -36.0 * kRydbergJoule, 1e-30);
    EXPECT_DOUBLE_EQ(dipole_force(-2.0, 4.0), -1.5);
    EXPECT_NEAR(linear_stark_shift(2, 1, 1.0), 3.0 * kElementaryCharge * kBohrRadius, 1e-40);
}

TEST(Rydberg, n_scaling_slope) {
    auto slope = [](int lo, int hi) {
        std::vector<double> x, y;
        for (int n = lo; n <= hi; ++n) {
            x.push_back(std::log(n));
            y.push_back(std::log(std::abs(rydberg_u(n, 1e4))));
        }
        double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
        double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
        return sxy / sxx;
    };
    // [n(n-1)]^2 is steeper than n^4 at moderate n; the local slope is
    // 4 + 2/(n-1).
    EXPECT_NEAR(slope(20, 50), 4.0654, 5e-4);
    EXPECT_NEAR(slope(1000, 2000), 4.0, 5e-3);
}

TEST(Rydberg, branch_phases) {
    RydbergConfig c;
    c.u = -100.0;
    auto r = rydberg_gate_sim(c);
    EXPECT_EQ(r.phase[3], 0.0);
    EXPECT_NEAR(r.phase[1], kPi, 1e-9);
    EXPECT_NEAR(r.phase[2], kPi, 1e-9);
    double estimate = kPi * c.omega2 / (2.0 * std::abs(c.u));
    EXPECT_NEAR(r.small_phase, estimate, 0.1 * estimate);
    EXPECT_TRUE(r.regime_ok);
    for (double l : r.loss) EXPECT_NEAR(l, 0.0, 1e-12);

    c.u = 100.0;
    EXPECT_NEAR(rydberg_gate_sim(c).small_phase, -estimate, 0.1 * estimate);
}

TEST(Rydberg, matrix_exponential_matches_ode) {
    RydbergConfig c;
    c.u = -30.0;
    c.omega1 = 1.3;
    c.gamma = 0.01;
    c.delta2 = 0.05;
    auto r = rydberg_gate_sim(c);
    const int comp[4] = {0, 1, 3, 4};
    for (int i = 0; i < 4; ++i) {
        CVector psi = CVector::Zero(9);
        psi(comp[i]) = 1.0;
        CVector out = rydberg_ode(c, psi);
        for (int j = 0; j < 4; ++j) EXPECT_LT(std::abs(out(comp[j]) - r.block(j, i)), 1e-8);
        EXPECT_NEAR(1.0 - out.squaredNorm(), r.loss[i], 1e-9);
    }
}

TEST(Rydberg, blockade_unitarity_and_leakage) {
    for (double ratio : {30.0, 100.0, 300.0}) {
        RydbergConfig c;
        c.u = -ratio;
        auto r = rydberg_gate_sim(c);
        double bound = 1.0 / (ratio * ratio);
        CMatrix dev = r.block.adjoint() * r.block - CMatrix::Identity(4, 4);
        EXPECT_LT(max_abs(dev), bound) << ratio;
        for (double l : r.leakage) EXPECT_LT(l, bound);
        EXPECT_LT(r.max_rr_population, 2.0 * bound);
        EXPECT_GT(r.max_rr_population, 0.0);
    }
}

TEST(Rydberg, loss_follows_time_in_rydberg_state) {
    RydbergConfig c;
    c.u = -100.0;
    c.omega1 = 1.0;
    c.omega2 = 2.0;
    c.gamma = 1e-5;
    auto r = rydberg_gate_sim(c);
    EXPECT_NEAR(r.loss[3], 0.0, 1e-15);
    // |ge>: atom 1 spends pi/(2 omega1) on average in each pi pulse and the
    // whole 2 pi pulse on atom 2 in |r>.
    double ge = 2.0 * c.gamma * (kPi / c.omega1 + 2.0 * kPi / c.omega2);
    EXPECT_NEAR(r.loss[1], ge, 1e-3 * ge);
    double eg = 2.0 * c.gamma * (kPi / c.omega2);
    EXPECT_NEAR(r.loss[2], eg, 1e-3 * eg);
}

TEST(Rydberg, regime_flag) {
    RydbergConfig c;
    c.u = 100.0;
    EXPECT_EQ(c.regime(), Regime::blockade);
    c.u = 0.05;
    EXPECT_EQ(c.regime(), Regime::fast_phase);
    c.u = 1.0;
    EXPECT_EQ(c.regime(), Regime::intermediate);
    EXPECT_FALSE(rydberg_gate_sim(c).regime_ok);
}
