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
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "qlab/core/error.hpp"
#include "qlab/core/pulse.hpp"
#include "qlab/core/types.hpp"

namespace qlab::neutral {

using Trajectory = std::function<double(double)>;

// Collisional gate. Each well holds a 1-D harmonic ground state with
// |psi0(x)|^2 = exp(-x^2/a0^2) / (a0 sqrt(pi)), i.e. variance a0^2/2.
struct CollisionConfig {
    double a_s = 0.0;
    double mass = 1.0;
    double a0 = 1.0;
    double nu = 1.0;
    double hbar = 1.0;
    Trajectory xa;
    Trajectory xb;
    double t0 = 0.0;
    double t1 = 0.0;
    // Trajectories must return to their start within return_tol * a0.
    double return_tol = 1e-6;

    void validate() const {
        require(mass > 0.0 && a0 > 0.0 && nu > 0.0 && hbar > 0.0, "CollisionConfig: m, a0, nu, hbar must be positive");
        require(static_cast<bool>(xa) && static_cast<bool>(xb), "CollisionConfig: trajectories missing");
        require(t1 >= t0, "CollisionConfig: empty time window");
    }
};

inline CollisionConfig collision_config(double a_s, double mass, double a0, double nu, const RealPulse &xa,
                                        const RealPulse &xb, double hbar = 1.0) {
    require(xa.t_begin() == xb.t_begin() && xa.t_end() == xb.t_end(), "collision_config: trajectory windows differ");
    CollisionConfig c;
    c.a_s = a_s;
    c.mass = mass;
    c.a0 = a0;
    c.nu = nu;
    c.hbar = hbar;
    c.xa = [xa](double t) { return xa(t); };
    c.xb = [xb](double t) { return xb(t); };
    c.t0 = xa.t_begin();
    c.t1 = xa.t_end();
    return c;
}

// Closed-form overlap of two displaced ground-state densities.
inline double gaussian_overlap(double separation, double a0) {
    return std::exp(-separation * separation / (2.0 * a0 * a0)) / (a0 * std::sqrt(2.0 * kPi));
}

// Same overlap by adaptive quadrature over x.
inline double gaussian_overlap_quadrature(double xa, double xb, double a0) {
    using boost::math::quadrature::gauss_kronrod;
    auto rho = [a0](double x) { return std::exp(-x * x / (a0 * a0)) / (a0 * std::sqrt(kPi)); };
    auto f = [&](double x) { return rho(x - xa) * rho(x - xb); };
    double mid = 0.5 * (xa + xb);
    double half = 0.5 * std::abs(xa - xb) + 10.0 * a0;
    return gauss_kronrod<double, 31>::integrate(f, mid - half, mid + half, 20, 1e-13);
}

inline double collision_energy_shift(const CollisionConfig &c, double t) {
    return 4.0 * kPi * c.a_s * c.hbar * c.hbar / c.mass * gaussian_overlap(c.xa(t) - c.xb(t), c.a0);
}

struct CollisionResult {
    double phi = 0.0;
    // Independent route: overlap by x-quadrature, or the time quadrature when
    // the closed form was used.
    double phi_crosscheck = 0.0;
    bool closed_form = false;
    double max_energy_shift = 0.0;
    double adiabaticity_ratio = 0.0;
    bool valid = false;
};

inline CollisionResult collisional_phase(const CollisionConfig &c, std::size_t scan_points = 2001) {
    c.validate();
    require(scan_points >= 2, "collisional_phase: need at least two scan points");
    double tol = c.return_tol * c.a0;
    if (std::abs(c.xa(c.t1) - c.xa(c.t0)) > tol || std::abs(c.xb(c.t1) - c.xb(c.t0)) > tol) {
        throw InvalidArgument("collisional_phase: trajectories do not return to their initial positions");
    }
    CollisionResult r;
    double pref = 4.0 * kPi * c.a_s * c.hbar / c.mass;
    double T = c.t1 - c.t0;
    bool static_sep = true;
    double d0 = c.xa(c.t0) - c.xb(c.t0);
    for (std::size_t i = 0; i < scan_points; ++i) {
        double t = c.t0 + T * static_cast<double>(i) / static_cast<double>(scan_points - 1);
        double dsep = c.xa(t) - c.xb(t);
        if (std::abs(dsep - d0) > 1e-14 * std::max(1.0, c.a0)) static_sep = false;
        r.max_energy_shift = std::max(r.max_energy_shift, std::abs(collision_energy_shift(c, t)));
    }
    r.adiabaticity_ratio = r.max_energy_shift / (c.hbar * c.nu);
    r.valid = r.adiabaticity_ratio < 1.0;
    if (T == 0.0) return r;

    using boost::math::quadrature::gauss_kronrod;
    auto closed = [&](double t) { return gaussian_overlap(c.xa(t) - c.xb(t), c.a0); };
    double by_time = pref * gauss_kronrod<double, 31>::integrate(closed, c.t0, c.t1, 20, 1e-13);
    if (static_sep) {
        r.closed_form = true;
        r.phi = pref * gaussian_overlap(d0, c.a0) * T;
        r.phi_crosscheck = by_time;
    } else {
        auto numeric = [&](double t) { return gaussian_overlap_quadrature(c.xa(t), c.xb(t), c.a0); };
        r.phi = by_time;
        r.phi_crosscheck = pref * gauss_kronrod<double, 31>::integrate(numeric, c.t0, c.t1, 20, 1e-12);
    }
    return r;
}

// Branch phases on |aa>, |ab>, |ba>, |bb>; only |a>_1 and |b>_2 collide.
inline std::array<double, 4> collision_gate_table(double phi_a, double phi_b, double phi_ab) {
    return {2.0 * phi_a, phi_a + phi_b + phi_ab, phi_a + phi_b, 2.0 * phi_b};
}

inline double wrap_phase(double p) {
    double w = std::fmod(p, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    if (2.0 * kPi - w < 1e-12) w = 0.0;
    return w;
}

// Zero (mod 2 pi) exactly when the table is a product of local phase gates.
inline double entangling_phase(const std::array<double, 4> &t) { return wrap_phase(t[1] + t[2] - t[0] - t[3]); }

// Rydberg blockade gate.
namespace level {
inline constexpr int g = 0, e = 1, r = 2;
}

// Rydberg energy e^2/(8 pi eps0 a0) in joules and hbar in J s.
inline constexpr double kRydbergJoule = 2.1798723611035e-18;
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kElementaryCharge = 1.602176634e-19;
inline constexpr double kBohrRadius = 5.29177210903e-11;

// Dipole-dipole shift in units of e^2/(8 pi eps0 a0); R in Bohr radii.
inline double rydberg_u(int n, double R_over_a0) {
    require(n >= 2 && R_over_a0 > 0.0, "rydberg_u: need n >= 2 and R > 0");
    double nn = static_cast<double>(n) * static_cast<double>(n - 1);
    return -9.0 * nn * nn / (R_over_a0 * R_over_a0 * R_over_a0);
}

inline double rydberg_u_joule(int n, double R_over_a0) { return rydberg_u(n, R_over_a0) * kRydbergJoule; }

// Force between the atoms, F = 3u/R (diagnostic only).
inline double dipole_force(double u, double R) {
    require(R > 0.0, "dipole_force: R must be positive");
    return 3.0 * u / R;
}

// Linear Stark shift of |n q m> in joules for a field in V/m.
inline double linear_stark_shift(int n, int q, double field) {
    return 1.5 * n * q * kElementaryCharge * kBohrRadius * field;
}

enum class Regime { blockade, fast_phase, intermediate };

inline std::string to_string(Regime r) {
    switch (r) {
        case Regime::blockade: return "blockade";
        case Regime::fast_phase: return "fast_phase";
        case Regime::intermediate: return "intermediate";
    }
    return "?";
}

struct RydbergConfig {
    double u = 0.0;
    double omega1 = 1.0;
    double omega2 = 1.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double gamma = 0.0;
    // Ratio beyond which one scale counts as dominant.
    double regime_ratio = 10.0;
    // Steps per pulse used to track the doubly excited population.
    int steps_per_pulse = 400;

    void validate() const {
        require(omega1 > 0.0 && omega2 > 0.0, "RydbergConfig: Rabi frequencies must be positive");
        require(gamma >= 0.0, "RydbergConfig: gamma must be non-negative");
        require(steps_per_pulse >= 1, "RydbergConfig: steps_per_pulse must be positive");
    }

    Regime regime() const {
        double ratio = std::abs(u) / omega2;
        if (ratio >= regime_ratio) return Regime::blockade;
        if (ratio * regime_ratio <= 1.0) return Regime::fast_phase;
        return Regime::intermediate;
    }
};

inline int two_atom_index(int a, int b) { return 3 * a + b; }

// Model Hamiltonian on {g,e,r}^2 with atom 1 most significant. Only the laser
// on `atom` (0 or 1) is on; omega is its Rabi frequency.
inline CMatrix rydberg_hamiltonian(const RydbergConfig &c, int atom, double omega) {
    CMatrix h = CMatrix::Zero(9, 9);
    h(two_atom_index(level::r, level::r), two_atom_index(level::r, level::r)) += c.u;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            int i = two_atom_index(a, b);
            if (a == level::r) h(i, i) += cplx(c.delta1, -c.gamma);
            if (b == level::r) h(i, i) += cplx(c.delta2, -c.gamma);
        }
    }
    for (int other = 0; other < 3; ++other) {
        int ig = atom == 0 ? two_atom_index(level::g, other) : two_atom_index(other, level::g);
        int ir = atom == 0 ? two_atom_index(level::r, other) : two_atom_index(other, level::r);
        h(ig, ir) += -0.5 * omega;
        h(ir, ig) += -0.5 * omega;
    }
    return h;
}

struct RydbergPulse {
    int atom;
    double area;
};

inline std::array<RydbergPulse, 3> blockade_sequence() { return {{{0, kPi}, {1, 2.0 * kPi}, {0, kPi}}}; }

struct RydbergGateResult {
    // Phases on |gg>, |ge>, |eg>, |ee> in [0, 2 pi).
    std::array<double, 4> phase{};
    // pi minus the |gg> phase, wrapped to (-pi, pi].
    double small_phase = 0.0;
    // Total norm loss per branch, 1 - |psi|^2.
    std::array<double, 4> loss{};
    // Population left outside the computational subspace per branch.
    std::array<double, 4> leakage{};
    // Largest |rr> population seen on the |gg> branch.
    double max_rr_population = 0.0;
    // Computational block of the gate, rows/cols ordered gg, ge, eg, ee.
    CMatrix block;
    Regime regime = Regime::blockade;
    bool regime_ok = true;
};

inline RydbergGateResult rydberg_gate_sim(const RydbergConfig &c) {
    c.validate();
    static constexpr std::array<int, 4> comp = {0, 1, 3, 4};  // gg, ge, eg, ee
    CMatrix u_total = CMatrix::Identity(9, 9);
    RydbergGateResult res;
    CVector psi_gg = CVector::Zero(9);
    psi_gg(0) = 1.0;
    const int rr = two_atom_index(level::r, level::r);
    for (const auto &p : blockade_sequence()) {
        double omega = p.atom == 0 ? c.omega1 : c.omega2;
        double duration = p.area / omega;
        CMatrix h = rydberg_hamiltonian(c, p.atom, omega);
        CMatrix step = (CMatrix(-kI * h * (duration / c.steps_per_pulse))).exp();
        CMatrix whole = CMatrix::Identity(9, 9);
        for (int s = 0; s < c.steps_per_pulse; ++s) {
            psi_gg = step * psi_gg;
            whole = step * whole;
            res.max_rr_population = std::max(res.max_rr_population, std::norm(psi_gg(rr)));
        }
        u_total = whole * u_total;
    }
    res.block = CMatrix(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) res.block(i, j) = u_total(comp[i], comp[j]);
        CVector col = u_total.col(comp[i]);
        double norm2 = col.squaredNorm();
        double in_comp = 0.0;
        for (int k : comp) in_comp += std::norm(col(k));
        res.loss[i] = 1.0 - norm2;
        res.leakage[i] = norm2 - in_comp;
        res.phase[i] = wrap_phase(std::arg(u_total(comp[i], comp[i])));
    }
    double sp = kPi - res.phase[0];
    res.small_phase = sp;
    res.regime = c.regime();
    res.regime_ok = res.regime == Regime::blockade;
    return res;
}

}  // namespace qlab::neutral
