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

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qlab/core/error.hpp"
#include "qlab/core/linalg.hpp"
#include "qlab/core/ode.hpp"
#include "qlab/core/pulse.hpp"
#include "qlab/core/state.hpp"

namespace qlab::iontrap {

// Internal levels of each ion.
enum Level : int { g = 0, r0 = 1, r1 = 2 };

inline constexpr double kLeakageThreshold = 1e-8;

// CM and stretch mode frequencies of a two-ion linear trap, in units of the
// axial frequency nu.
inline constexpr double kCmMode = 1.0;
inline const double kStretchMode = std::sqrt(3.0);

// N ions with three internal levels each, followed by one CM phonon mode.
class IonRegister {
   public:
    explicit IonRegister(int n_ions = 2, int phonon_dim = 6) : n_(n_ions), dph_(phonon_dim) {
        require(n_ >= 1, "IonRegister: need at least one ion");
        require(dph_ >= 4, "IonRegister: phonon truncation must be >= 4");
        std::vector<int> dims(static_cast<std::size_t>(n_), 3);
        dims.push_back(dph_);
        spec_ = HilbertSpec(std::move(dims));
    }

    int n_ions() const { return n_; }
    int phonon_dim() const { return dph_; }
    const HilbertSpec &spec() const { return spec_; }
    std::size_t phonon_index() const { return static_cast<std::size_t>(n_); }

    Ket basis(const std::vector<int> &levels, int phonons) const {
        require(static_cast<int>(levels.size()) == n_, "IonRegister::basis: one level per ion");
        std::vector<int> d = levels;
        d.push_back(phonons);
        return Ket::basis(spec_, d);
    }

    CMatrix annihilation() const {
        CMatrix a = CMatrix::Zero(dph_, dph_);
        for (int n = 1; n < dph_; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
        return embed(spec_, phonon_index(), a);
    }

    // |to><from| on ion j.
    CMatrix transition(int j, int to, int from) const {
        require(j >= 0 && j < n_, "IonRegister: ion index out of range");
        CMatrix t = CMatrix::Zero(3, 3);
        t(to, from) = 1.0;
        return embed(spec_, static_cast<std::size_t>(j), t);
    }

    // Population of the highest retained phonon level.
    double top_phonon_population(const CVector &psi) const {
        double p = 0.0;
        for (std::size_t i = 0; i < spec_.total_dim(); ++i) {
            if (spec_.digits(i).back() == dph_ - 1) p += std::norm(psi(static_cast<Eigen::Index>(i)));
        }
        return p;
    }

   private:
    int n_;
    int dph_;
    HilbertSpec spec_;
};

// Carrier Hamiltonian (Omega/2)(|r0><g| e^{-i phi} + h.c.) on ion j.
inline Operator carrier_hamiltonian(const IonRegister &reg, int j, double omega, double phi) {
    CMatrix up = reg.transition(j, r0, g) * std::exp(-kI * phi);
    return Operator(reg.spec(), 0.5 * omega * (up + up.adjoint()), OpTag::hermitian);
}

// Lower-sideband Hamiltonian (eta/sqrt(N))(Omega/2)(|r_q><g| a e^{-i phi} + h.c.)
// on ion j, CM mode.
inline Operator sideband_hamiltonian(const IonRegister &reg, int j, int q, double omega, double eta,
                                     double phi) {
    require(q == 0 || q == 1, "sideband_hamiltonian: q must be 0 or 1");
    const int rq = q == 0 ? r0 : r1;
    CMatrix up = reg.transition(j, rq, g) * reg.annihilation() * std::exp(-kI * phi);
    const double coupling = eta / std::sqrt(static_cast<double>(reg.n_ions())) * omega / 2.0;
    return Operator(reg.spec(), coupling * (up + up.adjoint()), OpTag::hermitian);
}

// V_j^k(phi) = exp[-i k pi/2 (|r0><g| e^{-i phi} + h.c.)]
inline Operator carrier_rotation(const IonRegister &reg, int j, double k, double phi) {
    CMatrix up = reg.transition(j, r0, g) * std::exp(-kI * phi);
    return Operator(reg.spec(), expm_hermitian(up + up.adjoint(), k * kPi / 2.0), OpTag::unitary);
}

// U_j^{k,q}(phi) = exp[-i k pi/2 (|r_q><g| a e^{-i phi} + h.c.)]
inline Operator sideband_pulse(const IonRegister &reg, int j, double k, int q, double phi) {
    require(q == 0 || q == 1, "sideband_pulse: q must be 0 or 1");
    const int rq = q == 0 ? r0 : r1;
    CMatrix up = reg.transition(j, rq, g) * reg.annihilation() * std::exp(-kI * phi);
    return Operator(reg.spec(), expm_hermitian(up + up.adjoint(), k * kPi / 2.0), OpTag::unitary);
}

// U_m^{1,0} U_n^{2,1} U_m^{1,0}
inline Operator cz_gate(const IonRegister &reg, int m, int n) {
    require(m != n, "cz_gate: ions must differ");
    Operator um = sideband_pulse(reg, m, 1.0, 0, 0.0);
    Operator un = sideband_pulse(reg, n, 2.0, 1, 0.0);
    return um * un * um;
}

namespace detail {

inline double phonon_excited_weight(const IonRegister &reg, const CVector &psi) {
    double p = 0.0;
    for (std::size_t i = 0; i < reg.spec().total_dim(); ++i) {
        if (reg.spec().digits(i).back() != 0) p += std::norm(psi(static_cast<Eigen::Index>(i)));
    }
    return p;
}

}  // namespace detail

// Applies the gate to a state whose CM mode must be in the vacuum; also
// enforces the truncation leakage bound on the result.
inline Ket apply_cz(const IonRegister &reg, int m, int n, const Ket &psi) {
    require(psi.spec() == reg.spec(), "apply_cz: spec mismatch");
    if (detail::phonon_excited_weight(reg, psi.amplitudes()) > 1e-12) {
        throw InvalidArgument("apply_cz: phonon mode not in the vacuum");
    }
    Ket out = cz_gate(reg, m, n).apply(psi);
    if (reg.top_phonon_population(out.amplitudes()) > kLeakageThreshold) {
        throw NumericalError("apply_cz: truncation leakage above threshold");
    }
    return out;
}

enum class LaserGeometry { standing_wave_node, travelling_wave };

struct FullHamiltonianPlan {
    double k = 1.0;  // pulse area in units of pi
    double phi = 0.0;
    LaserGeometry geometry = LaserGeometry::standing_wave_node;
    int phonon_dim = 12;
    ode::Tolerances tol{1e-12, 1e-9};
};

struct FullHamiltonianReport {
    double gate_error = 0.0;       // 1 - |Tr(P U_ideal^dag U P)/4|^2 on {g,r} x {0,1}
    double operator_distance = 0.0;  // max column distance on the same subspace
    double validity_ratio = 0.0;   // (eta Omega/nu)^2, plus (alpha_0 Omega/nu)^2
    double top_phonon_population = 0.0;
};

// Single ion on the lower motional sideband with the carrier and the
// opposite sideband retained. Interaction picture, lowest order in eta:
//   H_I = (Omega/2) sigma_+ [alpha a + alpha a^dag e^{2i nu t} + alpha_0 e^{i nu t}] + h.c.
// The pulse lasts k pi/(|alpha| Omega) and is compared with the ideal
// sideband pulse of the same area. Units: nu = 1 unless scaled.
inline FullHamiltonianReport full_hamiltonian_check(double omega, double nu, double eta,
                                                    const FullHamiltonianPlan &plan = {}) {
    require(nu > 0.0 && eta > 0.0 && omega >= 0.0, "full_hamiltonian_check: bad parameters");
    FullHamiltonianReport rep;
    if (omega == 0.0) return rep;

    cplx alpha, alpha0;
    if (plan.geometry == LaserGeometry::standing_wave_node) {
        alpha = eta;
        alpha0 = 0.0;
    } else {
        alpha = kI * eta;
        alpha0 = 1.0;
    }
    const int d = plan.phonon_dim;
    require(d >= 4, "full_hamiltonian_check: phonon truncation must be >= 4");
    const HilbertSpec spec({2, d});
    CMatrix a_ph = CMatrix::Zero(d, d);
    for (int n = 1; n < d; ++n) a_ph(n - 1, n) = std::sqrt(static_cast<double>(n));
    CMatrix sp = CMatrix::Zero(2, 2);
    sp(1, 0) = 1.0;  // |r><g|
    const CMatrix Sa = kron(sp, a_ph) * std::exp(-kI * plan.phi);
    const CMatrix Sad = kron(sp, CMatrix(a_ph.adjoint())) * std::exp(-kI * plan.phi);
    const CMatrix S0 = kron(sp, CMatrix::Identity(d, d)) * std::exp(-kI * plan.phi);

    auto h = [&](double t) {
        CMatrix raise = 0.5 * omega * (alpha * Sa + alpha * std::exp(2.0 * kI * nu * t) * Sad +
                                       alpha0 * std::exp(kI * nu * t) * S0);
        return CMatrix(raise + raise.adjoint());
    };
    const double duration = plan.k * kPi / (std::abs(alpha) * omega);
    // Ideal pulse: same resonant term alone, exponentiated.
    CMatrix gen = alpha / std::abs(alpha) * Sa;
    CMatrix ideal = expm_hermitian(gen + gen.adjoint(), plan.k * kPi / 2.0);

    const int basis[4] = {0 * d + 0, 0 * d + 1, 1 * d + 0, 1 * d + 1};  // g0, g1, r0, r1
    cplx tr = 0.0;
    const double period = 2.0 * kPi / nu;
    for (int c : basis) {
        CVector psi0 = CVector::Zero(2 * d);
        psi0(c) = 1.0;
        CVector out = ode::schrodinger(h, psi0, 0.0, duration, plan.tol, period / 50.0);
        CVector want = ideal * psi0;
        tr += want.dot(out);
        rep.operator_distance = std::max(rep.operator_distance, (out - want).norm());
        double top = std::norm(out(d - 1)) + std::norm(out(2 * d - 1));
        rep.top_phonon_population = std::max(rep.top_phonon_population, top);
    }
    rep.gate_error = 1.0 - std::norm(tr / 4.0);
    rep.validity_ratio = std::pow(std::abs(alpha) * omega / nu, 2) + std::pow(std::abs(alpha0) * omega / nu, 2);
    if (rep.top_phonon_population > kLeakageThreshold) {
        throw NumericalError("full_hamiltonian_check: truncation leakage above threshold");
    }
    return rep;
}

// ---------------------------------------------------------------- push gate

struct PushGateResult {
    double phi = 0.0;  // conditional phase
    // Coulomb phases of the branches |s1 s2>, index 2*s1 + s2. Single-particle
    // kinetic phases are excluded from these.
    double branch[4] = {0, 0, 0, 0};
    bool kinetic_phases_excluded = true;
    double max_displacement_ratio = 0.0;  // max |x_i|/d
};

// Conditional phase in units of e^2/(4 pi eps0 hbar): lengths and times in
// any consistent units, typically d = 1 and T in trap periods. For SI
// inputs (metres, seconds) multiply by kCoulombOverHbar.
inline PushGateResult pushgate_phase(double d, const std::function<double(double)> &x1,
                                     const std::function<double(double)> &x2, double T,
                                     std::size_t check_points = 2001) {
    require(d > 0.0 && T >= 0.0, "pushgate_phase: need d > 0 and T >= 0");
    PushGateResult res;
    for (std::size_t i = 0; i < check_points; ++i) {
        double t = T * static_cast<double>(i) / static_cast<double>(check_points - 1);
        double a = x1(t), b = x2(t);
        if (d + b - a <= 0.0 || d - a <= 0.0 || d + b <= 0.0) {
            throw InvalidArgument("pushgate_phase: trajectories cross the trap separation");
        }
        res.max_displacement_ratio = std::max({res.max_displacement_ratio, std::abs(a) / d, std::abs(b) / d});
    }
    if (T == 0.0) return res;
    using boost::math::quadrature::gauss_kronrod;
    for (int s1 = 0; s1 < 2; ++s1) {
        for (int s2 = 0; s2 < 2; ++s2) {
            auto f = [&](double t) { return 1.0 / (d + s2 * x2(t) - s1 * x1(t)); };
            res.branch[2 * s1 + s2] = -gauss_kronrod<double, 31>::integrate(f, 0.0, T, 15, 1e-13);
        }
    }
    // Evaluate the bracket as one integrand to avoid cancellation.
    auto bracket = [&](double t) {
        double a = x1(t), b = x2(t);
        return 1.0 / (d + b - a) - 1.0 / (d + b) - 1.0 / (d - a) + 1.0 / d;
    };
    res.phi = -gauss_kronrod<double, 31>::integrate(bracket, 0.0, T, 15, 1e-14);
    return res;
}

inline PushGateResult pushgate_phase(double d, const RealPulse &x1, const RealPulse &x2) {
    require(x1.t_begin() == x2.t_begin() && x1.t_end() == x2.t_end(), "pushgate_phase: windows differ");
    require(x1.t_begin() == 0.0, "pushgate_phase: trajectories must start at t = 0");
    return pushgate_phase(
        d, [&](double t) { return x1(t); }, [&](double t) { return x2(t); }, x1.t_end());
}

// e^2/(4 pi eps0 hbar) in m/s.
inline constexpr double kCoulombOverHbar = 2.18769126364e6;

}  // namespace qlab::iontrap
