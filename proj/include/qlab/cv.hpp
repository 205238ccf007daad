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
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qlab/core/error.hpp"
#include "qlab/core/types.hpp"

// Gaussian continuous-variable tools for collective atomic spins and light.
// Quadratures are ordered (X_0, P_0, X_1, P_1, ...) with [X, P] = i, so the
// vacuum covariance is I/2.
namespace qlab::cv {

inline constexpr double kVacuumVariance = 0.5;

inline RMatrix symplectic_form(std::size_t modes) {
    const auto n = static_cast<Eigen::Index>(2 * modes);
    RMatrix w = RMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; k += 2) {
        w(k, k + 1) = 1.0;
        w(k + 1, k) = -1.0;
    }
    return w;
}

class GaussianState {
   public:
    GaussianState() = default;
    GaussianState(RVector means, RMatrix cov) : mu_(std::move(means)), v_(std::move(cov)) { validate(); }

    static GaussianState vacuum(std::size_t modes) {
        const auto n = static_cast<Eigen::Index>(2 * modes);
        return GaussianState(RVector::Zero(n), kVacuumVariance * RMatrix::Identity(n, n));
    }

    static GaussianState coherent(double x, double p) {
        GaussianState s = vacuum(1);
        s.mu_ << x, p;
        return s;
    }

    std::size_t modes() const { return static_cast<std::size_t>(mu_.size() / 2); }
    const RVector &means() const { return mu_; }
    const RMatrix &cov() const { return v_; }

    // Smallest eigenvalue of cov + (i/2) Omega; nonnegative for physical states.
    double uncertainty_margin() const {
        CMatrix h = v_.cast<cplx>() + 0.5 * kI * symplectic_form(modes()).cast<cplx>();
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    bool physical(double tol = 1e-9) const { return uncertainty_margin() >= -tol; }

    // Direct sum with another state; its modes are appended.
    GaussianState append(const GaussianState &o) const {
        const Eigen::Index n = mu_.size(), m = o.mu_.size();
        RVector mu(n + m);
        mu << mu_, o.mu_;
        RMatrix v = RMatrix::Zero(n + m, n + m);
        v.topLeftCorner(n, n) = v_;
        v.bottomRightCorner(m, m) = o.v_;
        return GaussianState(std::move(mu), std::move(v));
    }

    // Affine update x -> A x for a full-size linear map A.
    GaussianState transformed(const RMatrix &a) const {
        require(a.rows() == mu_.size() && a.cols() == mu_.size(), "GaussianState: map size mismatch");
        return GaussianState(a * mu_, a * v_ * a.transpose());
    }

    // Keeps the listed modes in the given order.
    GaussianState reduced(const std::vector<std::size_t> &keep) const {
        const auto k = static_cast<Eigen::Index>(2 * keep.size());
        RMatrix sel = RMatrix::Zero(k, mu_.size());
        for (std::size_t i = 0; i < keep.size(); ++i) {
            require(keep[i] < modes(), "GaussianState: mode index out of range");
            sel(static_cast<Eigen::Index>(2 * i), static_cast<Eigen::Index>(2 * keep[i])) = 1.0;
            sel(static_cast<Eigen::Index>(2 * i + 1), static_cast<Eigen::Index>(2 * keep[i] + 1)) = 1.0;
        }
        return GaussianState(sel * mu_, sel * v_ * sel.transpose());
    }

    // Variance of the observable v . x.
    double variance(const RVector &v) const { return v.dot(v_ * v); }

    // Conditions on a homodyne record of v . x equal to `outcome`.
    GaussianState conditioned(const RVector &v, double outcome) const {
        require(v.size() == mu_.size(), "GaussianState: observable size mismatch");
        const double s = variance(v);
        if (!(s > 1e-300)) throw NumericalError("GaussianState: singular measurement variance");
        const RVector k = v_ * v / s;
        return GaussianState(mu_ + k * (outcome - v.dot(mu_)), v_ - k * (v_ * v).transpose());
    }

   private:
    void validate() const {
        require(mu_.size() % 2 == 0 && mu_.size() > 0, "GaussianState: need an even, nonzero number of quadratures");
        require(v_.rows() == mu_.size() && v_.cols() == mu_.size(), "GaussianState: covariance size mismatch");
        require(max_abs(v_ - v_.transpose()) <= 1e-12 * std::max(1.0, max_abs(v_)), "GaussianState: covariance not symmetric");
    }

    RVector mu_;
    RMatrix v_;
};

inline Eigen::Index X(std::size_t mode) { return static_cast<Eigen::Index>(2 * mode); }
inline Eigen::Index P(std::size_t mode) { return static_cast<Eigen::Index>(2 * mode + 1); }

inline RVector quadrature_vector(std::size_t modes, std::initializer_list<std::pair<Eigen::Index, double>> terms) {
    RVector v = RVector::Zero(static_cast<Eigen::Index>(2 * modes));
    for (auto [i, c] : terms) v(i) += c;
    return v;
}

// kappa_c = 3 rho_n lambda0^2 L_a gamma_s / (8 pi^2 Delta); consistent units.
inline double kappa_c(double rho_n, double lambda0, double L_a, double gamma_s, double delta) {
    require(rho_n > 0.0 && lambda0 > 0.0 && L_a > 0.0 && gamma_s > 0.0 && delta > 0.0, "kappa_c: inputs must be positive");
    return 3.0 * rho_n * lambda0 * lambda0 * L_a * gamma_s / (8.0 * kPi * kPi * delta);
}

// Spontaneous-emission loss for the same pass, eps = kappa_c gamma_s / (2 Delta).
inline double loss_fraction(double kappa, double gamma_s, double delta) {
    require(gamma_s > 0.0 && delta > 0.0, "loss_fraction: inputs must be positive");
    return std::abs(kappa) * gamma_s / (2.0 * delta);
}

// kappa_c^2 / eps = 3 rho_n L_a / k0^2.
inline double signal_to_noise(double rho_n, double lambda0, double L_a) {
    const double k0 = 2.0 * kPi / lambda0;
    return 3.0 * rho_n * L_a / (k0 * k0);
}

struct PassParams {
    double kappa = 0.0;
    double eps_p = 0.0;
    double eps_a = 0.0;

    void validate() const {
        require(std::isfinite(kappa), "PassParams: kappa must be finite");
        require(eps_p >= 0.0 && eps_p < 1.0 && eps_a >= 0.0 && eps_a < 1.0, "PassParams: loss fractions must lie in [0, 1)");
    }
};

// Output rows of the single-pass map over (X^p, P^p, X^a, P^a, X_s^p, P_s^p,
// X_s^a, P_s^a); the last four are fresh vacuum noise quadratures.
inline RMatrix pass_rows(const PassParams &c) {
    c.validate();
    const double tp = std::sqrt(1.0 - c.eps_p), ta = std::sqrt(1.0 - c.eps_a);
    const double np = std::sqrt(c.eps_p), na = std::sqrt(c.eps_a);
    RMatrix r = RMatrix::Zero(4, 8);
    r(0, 0) = tp;
    r(0, 3) = -tp * c.kappa;
    r(0, 4) = np;
    r(1, 1) = tp;
    r(1, 5) = np;
    r(2, 2) = ta;
    r(2, 1) = -ta * c.kappa;
    r(2, 6) = na;
    r(3, 3) = ta;
    r(3, 7) = na;
    return r;
}

// Largest deviation of the output commutators from the canonical ones.
inline double commutator_residual(const PassParams &c) {
    RMatrix r = pass_rows(c);
    return max_abs(r * symplectic_form(4) * r.transpose() - symplectic_form(2));
}

// Light mode `light` passes through atomic mode `atom`.
inline GaussianState pass_through(const GaussianState &s, std::size_t light, std::size_t atom, const PassParams &c) {
    require(light < s.modes() && atom < s.modes() && light != atom, "pass_through: bad mode indices");
    const std::size_t n = s.modes();
    GaussianState big = s.append(GaussianState::vacuum(2));
    RMatrix a = RMatrix::Identity(static_cast<Eigen::Index>(2 * n + 4), static_cast<Eigen::Index>(2 * n + 4));
    const RMatrix rows = pass_rows(c);
    const Eigen::Index cols[8] = {X(light), P(light), X(atom), P(atom), X(n), P(n), X(n + 1), P(n + 1)};
    const Eigen::Index outs[4] = {X(light), P(light), X(atom), P(atom)};
    for (int i = 0; i < 4; ++i) {
        a.row(outs[i]).setZero();
        for (int j = 0; j < 8; ++j) a(outs[i], cols[j]) = rows(i, j);
    }
    std::vector<std::size_t> keep(n);
    for (std::size_t i = 0; i < n; ++i) keep[i] = i;
    return big.transformed(a).reduced(keep);
}

// Mixes `mode` with vacuum: X -> sqrt(1-eta) X + sqrt(eta) X_s, same for P.
inline GaussianState attenuate(const GaussianState &s, std::size_t mode, double eta) {
    require(eta >= 0.0 && eta < 1.0, "attenuate: loss must lie in [0, 1)");
    if (eta == 0.0) return s;
    const std::size_t n = s.modes();
    GaussianState big = s.append(GaussianState::vacuum(1));
    RMatrix a = RMatrix::Identity(static_cast<Eigen::Index>(2 * n + 2), static_cast<Eigen::Index>(2 * n + 2));
    const double t = std::sqrt(1.0 - eta), r = std::sqrt(eta);
    for (int q = 0; q < 2; ++q) {
        const Eigen::Index m = X(mode) + q, e = X(n) + q;
        a(m, m) = t;
        a(m, e) = r;
        a(e, m) = -r;
        a(e, e) = t;
    }
    std::vector<std::size_t> keep(n);
    for (std::size_t i = 0; i < n; ++i) keep[i] = i;
    return big.transformed(a).reduced(keep);
}

// Spin rotations between measurement rounds. First role: X -> -P, P -> X;
// second role: X -> P, P -> -X.
inline GaussianState rotate(const GaussianState &s, std::size_t mode, bool first_role) {
    RMatrix a = RMatrix::Identity(s.means().size(), s.means().size());
    const Eigen::Index x = X(mode), p = P(mode);
    a(x, x) = 0.0;
    a(p, p) = 0.0;
    a(x, p) = first_role ? -1.0 : 1.0;
    a(p, x) = first_role ? 1.0 : -1.0;
    return s.transformed(a);
}

inline double squeezing_parameter(double kappa) { return 0.5 * std::log1p(2.0 * kappa * kappa); }

// Collective measurement with a fresh light pulse through atoms a then b:
// records X^p' which carries sqrt(1-eta_t) P_a + P_b. Returns the joint state
// with the light mode appended last (not yet measured).
inline GaussianState collective_probe(const GaussianState &s, std::size_t a, std::size_t b, double kappa, double eta_t,
                                      double eta_d) {
    GaussianState t = s.append(GaussianState::vacuum(1));
    const std::size_t light = t.modes() - 1;
    t = pass_through(t, light, a, {kappa, 0.0, 0.0});
    t = attenuate(t, light, eta_t);
    t = pass_through(t, light, b, {kappa, 0.0, 0.0});
    return attenuate(t, light, eta_d);
}

struct EprResult {
    GaussianState state;  // ensembles 1 and 2
    double var_x_minus = 0.0;  // Var(X1 - X2)
    double var_p_plus = 0.0;   // Var(P1 + P2)
    double r_analytic = 0.0;
    double r_oracle = 0.0;
};

struct EprConfig {
    double kappa1 = 1.0;  // first round
    double kappa2 = 1.0;  // second round
    double eta_t = 0.0;   // light loss between the two ensembles
    double eta_d = 0.0;   // detector inefficiency
    int rounds = 2;
    bool with_rotation = true;
};

// Nonlocal Bell measurement on two vacuum ensembles with Gaussian conditioning
// on each record (outcome at its mean; other outcomes shift means only).
inline EprResult bell_measure_epr(const EprConfig &c) {
    require(c.rounds == 1 || c.rounds == 2, "bell_measure_epr: rounds must be 1 or 2");
    require(c.eta_t >= 0.0 && c.eta_t < 1.0 && c.eta_d >= 0.0 && c.eta_d < 1.0, "bell_measure_epr: losses must lie in [0, 1)");
    GaussianState s = GaussianState::vacuum(2);
    for (int round = 0; round < c.rounds; ++round) {
        if (round == 1 && c.with_rotation) {
            s = rotate(s, 0, true);
            s = rotate(s, 1, false);
        }
        const double k = round == 0 ? c.kappa1 : c.kappa2;
        GaussianState t = collective_probe(s, 0, 1, k, c.eta_t, c.eta_d);
        RVector v = RVector::Zero(t.means().size());
        v(X(2)) = 1.0;
        s = t.conditioned(v, t.means()(X(2))).reduced({0, 1});
    }
    EprResult r{s};
    r.var_x_minus = s.variance(quadrature_vector(2, {{X(0), 1.0}, {X(1), -1.0}}));
    r.var_p_plus = s.variance(quadrature_vector(2, {{P(0), 1.0}, {P(1), 1.0}}));
    const double keff = c.kappa1 * std::sqrt(1.0 - c.eta_d);
    r.r_analytic = squeezing_parameter(keff);
    r.r_oracle = -0.5 * std::log(r.var_x_minus);
    return r;
}

// Coherent-state overlap fidelity of a one-mode Gaussian state against the
// coherent state with means (x, p).
inline double coherent_fidelity(const GaussianState &out, double x, double p) {
    require(out.modes() == 1, "coherent_fidelity: need a single mode");
    const RMatrix s = out.cov() + 0.5 * RMatrix::Identity(2, 2);
    RVector d(2);
    d << out.means()(0) - x, out.means()(1) - p;
    return std::exp(-0.5 * d.dot(s.ldlt().solve(d))) / std::sqrt(s.determinant());
}

// F = 1/(1 + 1/(1 + 2k^2) + 1/(2k^2)) with k^2 -> k^2 (1 - eta_d).
inline double fidelity_lossless(double kappa, double eta_d = 0.0) {
    require(kappa > 0.0, "fidelity_lossless: kappa must be positive");
    const double k2 = kappa * kappa * (1.0 - eta_d);
    return 1.0 / (1.0 + 1.0 / (1.0 + 2.0 * k2) + 1.0 / (2.0 * k2));
}

// F ~ 2/(2 + 1/k2^2 + k2^2 eta_t), same detector substitution.
inline double fidelity_lossy(double kappa2, double eta_t, double eta_d = 0.0) {
    require(kappa2 > 0.0, "fidelity_lossy: kappa2 must be positive");
    const double k2 = kappa2 * kappa2 * (1.0 - eta_d);
    return 2.0 / (2.0 + 1.0 / k2 + k2 * eta_t);
}

inline double optimal_kappa2(double eta_t) {
    require(eta_t > 0.0 && eta_t < 1.0, "optimal_kappa2: eta_t must lie in (0, 1)");
    return std::pow(eta_t, -0.25);
}

inline double fidelity_bound(double eta_t) { return 1.0 / (1.0 + std::sqrt(eta_t)); }

struct TeleportConfig {
    double kappa1 = 5.0;
    double kappa2 = 5.0;
    double eta_t = 0.0;
    double eta_d = 0.0;

    // Asymmetric two-round configuration for lossy links, kappa1 = ratio * kappa2.
    static TeleportConfig lossy(double kappa2, double eta_t, double eta_d = 0.0, double ratio = 100.0) {
        return {ratio * kappa2, kappa2, eta_t, eta_d};
    }
};

struct TeleportResult {
    double F_analytic = 0.0;
    double F_oracle = 0.0;
    double r = 0.0;
    double noise_x = 0.0;  // added output variance per quadrature
    double noise_p = 0.0;
    GaussianState output;
};

// Full Gaussian protocol: EPR pair (1,2), local Bell measurement on (1,3)
// with the light passing 1 then 3, unit-gain displacement of ensemble 2.
inline TeleportResult teleport_cv(const TeleportConfig &c, double x_in, double p_in) {
    require(c.kappa1 > 0.0 && c.kappa2 > 0.0, "teleport_cv: coupling must be positive");
    require(c.eta_t >= 0.0 && c.eta_t < 1.0 && c.eta_d >= 0.0 && c.eta_d < 1.0, "teleport_cv: losses must lie in [0, 1)");
    EprConfig ec{c.kappa1, c.kappa2, c.eta_t, c.eta_d, 2, true};
    EprResult epr = bell_measure_epr(ec);
    // Modes: 0 = ensemble 1, 1 = ensemble 2, 2 = ensemble 3 (input).
    GaussianState s = epr.state.append(GaussianState::coherent(x_in, p_in));
    s = collective_probe(s, 0, 2, c.kappa2, c.eta_t, c.eta_d);  // record m1 in mode 3
    s = rotate(s, 2, true);
    s = rotate(s, 0, false);
    s = collective_probe(s, 0, 2, c.kappa1, c.eta_t, c.eta_d);  // record m2 in mode 4
    // m = -kappa sqrt(1-eta_d) * observable + noise; unit gain recovers the observable.
    const double gp = -1.0 / (c.kappa2 * std::sqrt(1.0 - c.eta_d));
    const double gx = -1.0 / (c.kappa1 * std::sqrt(1.0 - c.eta_d));
    RMatrix rows = RMatrix::Zero(2, s.means().size());
    rows(0, X(1)) = 1.0;
    rows(0, X(4)) = gx;
    rows(1, P(1)) = 1.0;
    rows(1, X(3)) = gp;
    RVector mu = rows * s.means();
    RMatrix v = rows * s.cov() * rows.transpose();
    TeleportResult r;
    r.output = GaussianState(mu, 0.5 * (v + v.transpose()));
    r.F_oracle = coherent_fidelity(r.output, x_in, p_in);
    r.noise_x = v(0, 0) - kVacuumVariance;
    r.noise_p = v(1, 1) - kVacuumVariance;
    r.r = epr.r_oracle;
    r.F_analytic = (c.eta_t == 0.0 && c.kappa1 == c.kappa2) ? fidelity_lossless(c.kappa2, c.eta_d)
                                                              : fidelity_lossy(c.kappa2, c.eta_t, c.eta_d);
    return r;
}

inline bool classical_benchmark(double F) { return F > 0.5; }

}  // namespace qlab::cv
