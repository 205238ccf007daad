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


#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/hilbert.hpp"
#include "qlab/core/linalg.hpp"
#include "qlab/core/ode.hpp"
#include "qlab/core/pulse.hpp"
#include "qlab/core/types.hpp"

namespace qlab::cavity {

// Single-excitation amplitudes of the two-node system: atom 1 excited, atom 2
// excited, photon in cavity 1, photon in cavity 2.
struct TransferState {
    cplx alpha1{1.0, 0.0};
    cplx alpha2{0.0, 0.0};
    cplx beta1{0.0, 0.0};
    cplx beta2{0.0, 0.0};

    double norm2() const { return std::norm(alpha1) + std::norm(alpha2) + std::norm(beta1) + std::norm(beta2); }
    double dark_residual() const { return std::abs(beta1 + beta2); }
};

struct NodeCouplings {
    RealPulse g1;
    RealPulse g2;
    double kappa = 1.0;
    double delta = 0.0;

    NodeCouplings(RealPulse g1_, RealPulse g2_, double kappa_, double delta_ = 0.0)
        : g1(std::move(g1_)), g2(std::move(g2_)), kappa(kappa_), delta(delta_) {
        require(kappa > 0.0, "NodeCouplings: kappa must be positive");
        require(std::isfinite(delta), "NodeCouplings: delta must be finite");
        require(g1.t_begin() == g2.t_begin() && g1.t_end() == g2.t_end(), "NodeCouplings: pulse windows differ");
        for (double v : g1.samples()) require(std::isfinite(v), "NodeCouplings: g1 not finite");
        for (double v : g2.samples()) require(std::isfinite(v), "NodeCouplings: g2 not finite");
    }

    double t_begin() const { return g1.t_begin(); }
    double t_end() const { return g1.t_end(); }
};

inline RealPulse zero_pulse_like(const RealPulse &p) {
    return RealPulse(p.t_begin(), p.dt(), std::vector<double>(p.size(), 0.0), p.rule());
}

// Amplitude equations of the no-jump evolution, in the order
// (alpha1, alpha2, beta1, beta2).
inline void amplitude_rhs(double g1, double g2, double kappa, double delta, const cplx *y, cplx *dy) {
    const cplx a1 = y[0], a2 = y[1], b1 = y[2], b2 = y[3];
    dy[0] = -g1 * b1;
    dy[1] = -g2 * b2;
    dy[2] = kI * delta * b1 + g1 * a1 - kappa * b1;
    dy[3] = kI * delta * b2 + g2 * a2 - kappa * b2 - 2.0 * kappa * b1;
}

// Full operator form of the effective Hamiltonian on
// {g,e}_1 x {g,e}_2 x {0,1}_c1 x {0,1}_c2 (16 states).
namespace full {

inline const HilbertSpec &spec() {
    static const HilbertSpec s({2, 2, 2, 2});
    return s;
}

inline int index(int atom1, int atom2, int n1, int n2) { return 8 * atom1 + 4 * atom2 + 2 * n1 + n2; }

inline CMatrix heff(double g1, double g2, double kappa, double delta) {
    CMatrix lower(2, 2);
    lower << 0, 1, 0, 0;  // a, and |g><e| with g = 0, e = 1
    CMatrix raise = lower.adjoint();
    const auto &s = spec();
    CMatrix a1 = embed(s, 2, lower), a2 = embed(s, 3, lower);
    CMatrix n1 = a1.adjoint() * a1, n2 = a2.adjoint() * a2;
    // |e><g| on each atom.
    CMatrix s1 = embed(s, 0, raise), s2 = embed(s, 1, raise);
    CMatrix jc1 = s1 * a1, jc2 = s2 * a2;
    CMatrix h = -delta * (n1 + n2) - kI * g1 * (jc1 - jc1.adjoint()) - kI * g2 * (jc2 - jc2.adjoint());
    h += -kI * kappa * (n1 + n2 + 2.0 * a2.adjoint() * a1);
    return h;
}

inline CMatrix jump_operator() {
    CMatrix lower(2, 2);
    lower << 0, 1, 0, 0;
    return embed(spec(), 2, lower) + embed(spec(), 3, lower);
}

}  // namespace full

enum class Route { amplitudes, full_operator };

struct Propagation {
    std::vector<double> t;
    std::vector<TransferState> states;
    // 2 kappa <c^dag c>, the click probability density.
    std::vector<double> jump_density;
    double jump_probability = 0.0;

    const TransferState &final_state() const { return states.back(); }
    double max_dark_residual() const {
        double m = 0.0;
        for (const auto &s : states) m = std::max(m, s.dark_residual());
        return m;
    }
};

inline std::vector<double> uniform_grid(double t0, double t1, std::size_t n) {
    require(n >= 2 && t1 > t0, "uniform_grid: bad grid");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    t.back() = t1;
    return t;
}

// Integrates the no-jump evolution over the coupling window. The jump
// probability is accumulated alongside as an extra component.
inline Propagation propagate(const NodeCouplings &c, const TransferState &psi0, std::size_t n_out = 2001,
                             Route route = Route::amplitudes, ode::Tolerances tol = {1e-12, 1e-10}) {
    const double kappa = c.kappa, delta = c.delta;
    std::vector<cplx> y0;
    CMatrix cjump;
    if (route == Route::amplitudes) {
        y0 = {psi0.alpha1, psi0.alpha2, psi0.beta1, psi0.beta2, 0.0};
    } else {
        y0.assign(17, 0.0);
        y0[full::index(1, 0, 0, 0)] = psi0.alpha1;
        y0[full::index(0, 1, 0, 0)] = psi0.alpha2;
        y0[full::index(0, 0, 1, 0)] = psi0.beta1;
        y0[full::index(0, 0, 0, 1)] = psi0.beta2;
        cjump = full::jump_operator();
    }
    auto rhs = [&](const std::vector<cplx> &y, std::vector<cplx> &dy, double t) {
        const double g1 = c.g1(t), g2 = c.g2(t);
        if (route == Route::amplitudes) {
            amplitude_rhs(g1, g2, kappa, delta, y.data(), dy.data());
            dy[4] = 2.0 * kappa * std::norm(y[2] + y[3]);
        } else {
            Eigen::Map<const CVector> ym(y.data(), 16);
            Eigen::Map<CVector> dym(dy.data(), 16);
            dym.noalias() = -kI * (full::heff(g1, g2, kappa, delta) * ym);
            dy[16] = 2.0 * kappa * (cjump * ym).squaredNorm();
        }
    };
    Propagation out;
    out.t = uniform_grid(c.t_begin(), c.t_end(), n_out);
    auto traj = ode::integrate_on_grid<cplx>(rhs, y0, out.t, tol, (out.t[1] - out.t[0]) * 0.1);
    for (const auto &y : traj) {
        TransferState s;
        if (route == Route::amplitudes) {
            s = {y[0], y[1], y[2], y[3]};
        } else {
            s = {y[full::index(1, 0, 0, 0)], y[full::index(0, 1, 0, 0)], y[full::index(0, 0, 1, 0)],
                 y[full::index(0, 0, 0, 1)]};
        }
        out.states.push_back(s);
        out.jump_density.push_back(2.0 * kappa * std::norm(s.beta1 + s.beta2));
    }
    out.jump_probability = traj.back().back().real();
    return out;
}

struct ReceiverConstruction {
    RealPulse g2;
    // Number of grid points where |g2| hit the cap.
    std::size_t capped_points = 0;
};

// Builds g2 so that the cascaded system stays dark (beta2 = -beta1), solving
// g2 alpha2 = 2 kappa beta1 - g1 alpha1 along the trajectory. The receiver is
// seeded with alpha2 = eps and |g2| is capped at g_max (default: 10x the
// largest |g1| plus 10 kappa).
inline ReceiverConstruction receiver_pulse_from_dark_state(const RealPulse &g1, double kappa, double eps = 1e-6,
                                                           double g_max = 0.0, ode::Tolerances tol = {1e-13, 1e-11}) {
    require(kappa > 0.0, "receiver_pulse_from_dark_state: kappa must be positive");
    require(eps > 0.0, "receiver_pulse_from_dark_state: eps must be positive");
    if (g_max <= 0.0) {
        double m = 0.0;
        for (double v : g1.samples()) m = std::max(m, std::abs(v));
        g_max = 10.0 * m + 10.0 * kappa;
    }
    ReceiverConstruction res{zero_pulse_like(g1), 0};
    bool any = false;
    for (double v : g1.samples()) any = any || v != 0.0;
    if (!any) return res;

    auto solve_g2 = [&](double g1v, double a1, double b1, double a2) {
        double g = (2.0 * kappa * b1 - g1v * a1) / a2;
        return std::clamp(g, -g_max, g_max);
    };
    // State (alpha1, beta1, alpha2) with beta2 = -beta1; real for delta = 0.
    auto rhs = [&](const std::vector<double> &y, std::vector<double> &dy, double t) {
        double gv = g1(t);
        double g2v = solve_g2(gv, y[0], y[1], y[2]);
        dy[0] = -gv * y[1];
        dy[1] = gv * y[0] - kappa * y[1];
        dy[2] = g2v * y[1];
    };
    std::vector<double> times(g1.size());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = g1.time(i);
    auto traj = ode::integrate_on_grid<double>(rhs, {1.0, 0.0, eps}, times, tol, g1.dt() * 0.1);
    std::vector<double> g2(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto &y = traj[i];
        double raw = (2.0 * kappa * y[1] - g1.samples()[i] * y[0]) / y[2];
        if (std::abs(raw) > g_max) ++res.capped_points;
        g2[i] = solve_g2(g1.samples()[i], y[0], y[1], y[2]);
    }
    res.g2 = RealPulse(g1.t_begin(), g1.dt(), std::move(g2), g1.rule());
    return res;
}

// Emitter pulse producing a photon with cavity amplitude A sech(t/tau),
// A^2 = 1/(4 kappa tau); needs kappa tau > 1.
inline RealPulse symmetric_emitter_pulse(double kappa, double tau, double T, std::size_t n) {
    require(kappa > 0.0 && tau > 0.0 && T > 0.0, "symmetric_emitter_pulse: parameters must be positive");
    require(kappa * tau > 1.0, "symmetric_emitter_pulse: need kappa tau > 1");
    const double amp = 1.0 / std::sqrt(4.0 * kappa * tau);
    auto g = [=](double t) {
        double x = t / tau;
        double b = amp / std::cosh(x);
        double db = -b * std::tanh(x) / tau;
        // Atom population left, 1 - beta^2 - emitted, in a cancellation-free form.
        double a2 = 1.0 / (1.0 + std::exp(2.0 * x)) - b * b;
        if (a2 <= 0.0) {
            // Large-t limit of (db + kappa b)/alpha.
            return 2.0 * amp * (kappa - 1.0 / tau) / std::sqrt(1.0 - 4.0 * amp * amp);
        }
        return (db + kappa * b) / std::sqrt(a2);
    };
    return RealPulse::sample(g, -T, T, n);
}

// Smooth switch-on g0 / (1 + exp(-t/tau)).
inline RealPulse switch_on_pulse(double g0, double tau, double T, std::size_t n) {
    require(tau > 0.0 && T > 0.0, "switch_on_pulse: tau and T must be positive");
    return RealPulse::sample([=](double t) { return g0 / (1.0 + std::exp(-t / tau)); }, -T, T, n);
}

inline double transfer_fidelity(const NodeCouplings &c, std::size_t n_out = 2001) {
    auto p = propagate(c, TransferState{}, n_out);
    return std::clamp(std::norm(p.final_state().alpha2), 0.0, 1.0);
}

struct QubitTransfer {
    // Output qubit on atom 2 (unnormalized if the photon was lost).
    cplx c_g;
    cplx c_e;
    double fidelity;
};

// (c_g|g> + c_e|e>)_1 -> (c_g|g> + c_e alpha2(T)|e>)_2; |gg,00> is stationary.
inline QubitTransfer transfer_qubit(const NodeCouplings &c, cplx c_g, cplx c_e, std::size_t n_out = 2001) {
    TransferState s0;
    s0.alpha1 = c_e;
    auto p = propagate(c, s0, n_out);
    QubitTransfer q{c_g, p.final_state().alpha2, 0.0};
    double in2 = std::norm(c_g) + std::norm(c_e);
    require(in2 > 0.0, "transfer_qubit: zero input");
    q.fidelity = std::norm(std::conj(c_g) * q.c_g + std::conj(c_e) * q.c_e) / (in2 * in2);
    return q;
}

}  // namespace qlab::cavity
