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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qlab/qlab.hpp"

namespace qlab::acceptance {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id = 0;
    std::string title;
    double time_limit = 0.0;  // seconds; 0 means none
    std::vector<Check> checks;
    double seconds = 0.0;
    std::string error;

    bool passed() const {
        if (!error.empty()) return false;
        if (time_limit > 0.0 && seconds > time_limit) return false;
        for (const auto &c : checks)
            if (!c.passed) return false;
        return !checks.empty();
    }
};

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Recorder {
    std::vector<Check> &out;
    void near(const std::string &name, double got, double want, double tol) {
        const bool ok = std::abs(got - want) <= tol;
        out.push_back({name, ok, "got " + fmt(got) + ", want " + fmt(want) + " +/- " + fmt(tol)});
    }
    void below(const std::string &name, double got, double bound) {
        out.push_back({name, got < bound, "got " + fmt(got) + ", need < " + fmt(bound)});
    }
    void above(const std::string &name, double got, double bound) {
        out.push_back({name, got > bound, "got " + fmt(got) + ", need > " + fmt(bound)});
    }
    void within(const std::string &name, double got, double lo, double hi) {
        out.push_back({name, got >= lo && got <= hi, "got " + fmt(got) + ", need [" + fmt(lo) + ", " + fmt(hi) + "]"});
    }
    void truth(const std::string &name, bool ok, const std::string &d = {}) { out.push_back({name, ok, d}); }
};

inline double loglog_slope(int lo, int hi, const std::function<double(int)> &f) {
    std::vector<double> x, y;
    for (int n = lo; n <= hi; ++n) {
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(std::log(std::abs(f(n))));
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

inline Ket random_qubit(std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVector v(2);
    v << cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
    return Ket(HilbertSpec({2}), v);
}

}  // namespace detail

inline void purification(Criterion &c) {
    detail::Recorder r{c.checks};
    r.near("F'(0.75)", purify_step_analytic(0.75).F_out, 0.788462, 1e-6);
    double worst = 0.0;
    for (int k = 0; k <= 8; ++k) {
        const double F = 0.55 + 0.05 * k;
        worst = std::max(worst, std::abs(purify_werner_simulated(F).F_out - purify_step_analytic(F).F_out));
    }
    r.below("16x16 simulation vs analytic map", worst, 1e-9);
    r.near("fixed point F = 1/2", purify_step_analytic(0.5).F_out, 0.5, 1e-12);
    r.near("fixed point F = 1", purify_step_analytic(1.0).F_out, 1.0, 1e-12);
}

inline void teleportation(Criterion &c) {
    detail::Recorder r{c.checks};
    std::mt19937_64 rng(2024);
    DensityOp res(bell(BellState::psi_minus));
    double worst_fid = 1.0, worst_p = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        Ket in = detail::random_qubit(rng);
        for (auto &br : teleport_all(DensityOp(in), res)) {
            worst_p = std::max(worst_p, std::abs(br.outcome.probability - 0.25));
            worst_fid = std::min(worst_fid, in.amplitudes().dot(br.corrected * in.amplitudes()).real());
        }
    }
    r.above("pure-input output fidelity on every branch", worst_fid, 1.0 - 1e-10);
    r.below("branch probability deviation from 1/4", worst_p, 1e-10);
    double worst_avg = 0.0;
    for (double F : {0.25, 0.5, 0.8, 0.95}) {
        for (int trial = 0; trial < 10; ++trial) {
            Ket in = detail::random_qubit(rng);
            double avg = 0.0;
            for (auto &br : teleport_all(DensityOp(in), werner(F)))
                avg += br.outcome.probability * in.amplitudes().dot(br.corrected * in.amplitudes()).real();
            worst_avg = std::max(worst_avg, std::abs(avg - (2.0 * F + 1.0) / 3.0));
        }
    }
    r.below("Werner resource average fidelity vs (2F+1)/3", worst_avg, 1e-9);
}

inline void qec(Criterion &c) {
    detail::Recorder r{c.checks};
    const cplx a = 0.6, b = cplx(0.0, 0.8);
    Ket L = logical_qubit(a, b);
    int ok = 0;
    for (int q = 0; q < 3; ++q) {
        auto out = qec3_cycle(L, {{q, PauliKind::x}});
        ok += std::abs(inner(out.state, L)) > 1.0 - 1e-10 ? 1 : 0;
    }
    r.truth("single sigma_x corrections", ok == 3, std::to_string(ok) + "/3");
    const int n = quantum_hamming_min_n(1, 1);
    r.truth("quantum Hamming minimum n for k = 1", n == 5, "got " + std::to_string(n));
    for (int N : {10, 100}) {
        auto mc = classical_repetition_mc(1.0, N, 100000, 5);
        r.above("repetition MC vs bound, N = " + std::to_string(N), mc.success, mc.bound - 3.0 * mc.std_error);
    }
}

inline void ion_gate(Criterion &c) {
    using namespace qlab::iontrap;
    detail::Recorder r{c.checks};
    IonRegister reg(2, 6);
    const struct {
        int a, b;
        double sign;
    } rows[] = {{g, g, 1.0}, {g, r0, 1.0}, {r0, g, 1.0}, {r0, r0, -1.0}};
    double amp = 0.0, phonon = 0.0;
    for (const auto &row : rows) {
        Ket out = apply_cz(reg, 0, 1, reg.basis({row.a, row.b}, 0));
        const auto idx = static_cast<Eigen::Index>(reg.spec().index({row.a, row.b, 0}));
        amp = std::max(amp, std::abs(out[idx] - row.sign));
        CMatrix ph = partial_trace(DensityOp(out), {2}).matrix();
        phonon = std::max(phonon, 1.0 - ph(0, 0).real());
    }
    r.below("cz rows amplitude error", amp, 1e-9);
    r.below("phonon returned to vacuum", phonon, 1e-9);
    auto e1 = full_hamiltonian_check(0.2, 1.0, 0.1);
    auto e2 = full_hamiltonian_check(0.1, 1.0, 0.1);
    r.near("gate error ratio when halving Omega/nu", e1.gate_error / e2.gate_error, 4.0, 0.5);
}

inline void rydberg(Criterion &c) {
    using namespace qlab::neutral;
    detail::Recorder r{c.checks};
    RydbergConfig cfg;
    cfg.u = -100.0;
    cfg.omega2 = 1.0;
    cfg.gamma = 0.0;
    auto res = rydberg_gate_sim(cfg);
    r.below("|ee> invariant", std::abs(res.block(3, 3) - 1.0), 1e-9);
    r.near("|ge> phase", res.phase[1], kPi, 1e-6);
    r.near("|eg> phase", res.phase[2], kPi, 1e-6);
    const double est = kPi * cfg.omega2 / (2.0 * std::abs(cfg.u));
    r.within("small phase / (pi Omega2 / 2u)", res.small_phase / est, 0.9, 1.1);
    const double bound = 2.0 * std::pow(cfg.omega2 / cfg.u, 2);
    double leak = 0.0;
    for (double l : res.leakage) leak = std::max(leak, l);
    r.below("blockade leakage", leak, bound);
}

inline void cavity_transfer(Criterion &c) {
    using namespace qlab::cavity;
    detail::Recorder r{c.checks};
    const double kappa = 1.0, T = 20.0, tau = 1.25;
    auto g1 = symmetric_emitter_pulse(kappa, tau, T, 4001);
    auto rx = receiver_pulse_from_dark_state(g1, kappa);
    auto p = propagate(NodeCouplings(g1, rx.g2, kappa), TransferState{}, 4001);
    const auto fin = p.final_state();
    r.above("|alpha2(T)|^2", std::norm(fin.alpha2), 0.99);
    r.below("jump probability", p.jump_probability, 1e-3);
    double sym = 0.0;
    for (std::size_t i = 0; i < g1.size(); ++i) {
        const double t = g1.time(i);
        if (std::abs(t) > 0.5 * T) continue;
        sym = std::max(sym, std::abs(rx.g2.samples()[i] - g1(-t)));
    }
    r.below("g2(t) vs g1(-t) for |t| <= T/2", sym, 1e-3);
    // The no-jump amplitudes stay normalized along the dark state.
    double book = 0.0;
    for (const auto &s : p.states) book = std::max(book, std::abs(s.norm2() - 1.0));
    r.below("probability bookkeeping", std::abs(fin.norm2() + p.jump_probability - 1.0), 1e-6);
    r.below("conditional norm drift", book, 1e-6);
}

inline void repeater_scaling(Criterion &c) {
    using namespace qlab::repeater;
    using boost::multiprecision::cpp_int;
    using boost::multiprecision::cpp_rational;
    detail::Recorder r{c.checks};
    auto o = optimize_segment_length(2.0 / 3.0, 100.0);
    r.within("log10(T_tot/T_con)", o.log10_ratio, 6.0, 7.0);
    r.within("L0_opt / L_att", o.L0_opt, 5.1, 6.3);
    r.near("direct baseline log10", log10_direct(100.0), 43.4, 0.1);
    const cpp_rational eta(2, 3);
    cpp_rational ci = 0;
    bool exact = true;
    for (int i = 1; i <= 30; ++i) {
        ci = 2 * ci + 1 - eta;
        exact = exact && ci == (cpp_rational(cpp_int(1) << i) - 1) * (1 - eta);
    }
    r.truth("c_i = (2^i - 1)(1 - eta_s) exact, i <= 30", exact);
    RepeaterParams p;
    p.p_c = 0.1;
    p.L0 = 1e-12;
    p.eta_s = 2.0 / 3.0;
    p.n = 3;
    auto mc = monte_carlo_chain(p, 10000, 0);
    for (std::size_t k = 0; k < mc.stages.size(); ++k) {
        const auto &st = mc.stages[k];
        r.near("MC stage " + std::to_string(k) + " success rate", st.rate(), st.p, 3.0 * st.sigma());
    }
}

inline void chsh(Criterion &c) {
    using namespace qlab::repeater;
    detail::Recorder r{c.checks};
    auto res = chsh_value(EMEState(0.3, 0.7));
    r.near("S at the standard settings", res.S, 2.0 * std::sqrt(2.0), 1e-9);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double l = ang(rng), rr = ang(rng);
        worst = std::max(worst, std::abs(correlation(EMEState(0.3, ang(rng)), l, rr).E - std::cos(l - rr)));
    }
    r.below("simulated correlation vs cos(psi_L - psi_R)", worst, 1e-10);
}

inline std::vector<memory::ModeShape> memory_families() {
    using memory::ModeShape;
    auto gauss = [](double t) { return std::exp(-0.5 * std::pow((t - 0.5) / 0.25, 2)); };
    auto sin2 = RealPulse::sample([](double t) { return std::pow(std::sin(kPi * t), 2); }, 0.0, 1.0, 4001);
    return {ModeShape::from_function([](double t) { return std::exp(-t); }, 1.0),
            ModeShape::from_function([](double t) { return std::exp(1.5 * t); }, 1.0),
            ModeShape::from_function(gauss, 1.0),
            ModeShape::from_function([](double t) { return 1.0 / std::cosh(4.0 * (t - 0.3)); }, 1.0),
            ModeShape::from_samples(sin2)};
}

inline void light_memory(Criterion &c) {
    using namespace qlab::memory;
    detail::Recorder r{c.checks};
    auto f = ModeShape::from_semi_infinite([](double t) { return std::exp(-0.5 * t); });
    auto w = impedance_match(f, 1.0);
    auto m = write_map(f, w.schedule, false);
    r.near("M for the exponential example", m.M, 0.5, 1e-6);
    double ratio = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.at(i) > 1e-4) ratio = std::max(ratio, std::abs(m.kernel.samples()[i] / f.at(i) - 1.0 / std::sqrt(2.0)));
    r.below("kernel ratio vs 1/sqrt(2)", ratio, 1e-6);
    double prop = 0.0;
    for (const auto &fam : memory_families())
        for (double k0 : {0.3, 1.0, 20.0}) prop = std::max(prop, write_map(fam, impedance_match(fam, k0).schedule, false).max_proportionality_error);
    r.below("kernel proportionality, 5 families", prop, 1e-6);
    const double k0 = 20.0;
    auto rise = ModeShape::from_function([k0](double t) { return std::exp(0.5 * k0 * t); }, 1.0);
    r.above("write/read round trip at kappa'0 T = 20", round_trip(rise, k0, rise.reversed(), k0).efficiency, 0.999);
}

inline void cv_teleport(Criterion &c) {
    using namespace qlab::cv;
    detail::Recorder r{c.checks};
    r.near("r(kappa_c = 5)", squeezing_parameter(5.0), 1.96591, 1e-4);
    r.near("F(kappa_c = 5)", fidelity_lossless(5.0), 0.96190, 1e-4);
    const double eta = 0.2;
    r.near("eta_t = 0.2 optimal fidelity", fidelity_lossy(optimal_kappa2(eta), eta), 0.69098, 1e-3);
    double worst = 0.0;
    for (double k : {1.0, 2.0, 5.0}) worst = std::max(worst, std::abs(teleport_cv({k, k}, 0.4, -0.9).F_oracle - fidelity_lossless(k)));
    r.below("Gaussian oracle vs analytic, kappa_c in {1,2,5}", worst, 1e-3);
}

inline void properties(Criterion &c) {
    detail::Recorder r{c.checks};
    std::mt19937_64 rng(77);
    // Entanglement entropy under local unitaries.
    double ent = 0.0;
    for (int k = 0; k < 20; ++k) {
        std::normal_distribution<double> g(0.0, 1.0);
        CVector v(6);
        for (auto &x : v) x = cplx(g(rng), g(rng));
        Ket psi(HilbertSpec({2, 3}), v);
        CMatrix u = kron(haar_unitary(2, rng), haar_unitary(3, rng));
        ent = std::max(ent, std::abs(entanglement_entropy(psi) - entanglement_entropy(Ket(psi.spec(), u * psi.amplitudes()))));
    }
    r.below("entropy local-unitary invariance", ent, 1e-10);
    r.truth("PPT: Werner F = 0.5 + 1e-6 entangled", is_entangled_ppt(werner(0.5 + 1e-6), 1e-12) == PptVerdict::entangled);
    r.truth("PPT: Werner F = 0.5 undecided", is_entangled_ppt(werner(0.5), 1e-12) == PptVerdict::ppt_undecided);
    // Single-pass light-atom map.
    double comm = 0.0, sym = 0.0;
    for (double k : {0.3, 1.0, 5.0}) {
        for (double e : {0.0, 0.05, 0.5}) comm = std::max(comm, cv::commutator_residual({k, e, e}));
        RMatrix m = cv::pass_rows({k, 0.0, 0.0}).leftCols(4);
        sym = std::max({sym, std::abs(m.determinant() - 1.0),
                        max_abs(m * cv::symplectic_form(2) * m.transpose() - cv::symplectic_form(2))});
    }
    r.below("pass map commutators", comm, 1e-12);
    r.below("pass map symplectic at eps = 0", sym, 1e-10);
    double eme = 0.0;
    for (double cc : {0.0, 0.3, 2.0})
        eme = std::min(eme, hermitian_eig(repeater::EMEState(cc, 0.4).density().matrix()).values(0));
    r.above("EME positivity (min eigenvalue)", eme, -1e-12);
    // Memory: Bogoliubov identity and splitter inner products.
    double bog = 0.0;
    for (const auto &fam : memory_families())
        bog = std::max(bog, std::abs(memory::write_map(fam, memory::impedance_match(fam, 2.0).schedule, false).bogoliubov() - 1.0));
    r.below("write map M + (1 - M) = 1", bog, 1e-6);
    {
        auto f = memory_families()[2];
        auto w = memory::impedance_match(f, 3.0);
        auto h = RealPulse::sample([](double t) { return (t - 0.5) * std::exp(-12.5 * (t - 0.5) * (t - 0.5)); }, 0.0, 1.0, 4001);
        const double n = memory::norm(h);
        h = h.map([n](double v) { return v / n; });
        r.near("splitter output norm", memory::shape_split(f, h, w.schedule).norm, 1.0, 1e-6);
    }
    // CV teleportation independent of the input mean.
    {
        std::normal_distribution<double> g(0.0, 3.0);
        double lo = 1.0, hi = 0.0;
        for (int k = 0; k < 5; ++k) {
            const double F = cv::teleport_cv(cv::TeleportConfig::lossy(1.5, 0.2), g(rng), g(rng)).F_oracle;
            lo = std::min(lo, F);
            hi = std::max(hi, F);
        }
        r.below("CV fidelity spread over input means", hi - lo, 1e-9);
    }
    // Dipole-dipole interaction scaling as written, over n in [20, 50].
    const double slope = detail::loglog_slope(20, 50, [](int n) { return neutral::rydberg_u(n, 1e4); });
    r.near("u(n) log-log slope over n in [20, 50]", slope, 4.0, 0.05);
}

inline std::vector<Criterion> run_all() {
    struct Spec {
        int id;
        const char *title;
        double limit;
        void (*fn)(Criterion &);
    };
    const Spec specs[] = {
        {1, "purification map", 1.0, purification},
        {2, "teleportation", 1.0, teleportation},
        {3, "quantum error correction", 10.0, qec},
        {4, "ion-trap gate", 30.0, ion_gate},
        {5, "Rydberg gate", 10.0, rydberg},
        {6, "cavity transfer", 30.0, cavity_transfer},
        {7, "repeater scaling", 60.0, repeater_scaling},
        {8, "CHSH", 0.0, chsh},
        {9, "light memory", 10.0, light_memory},
        {10, "CV teleportation", 5.0, cv_teleport},
        {11, "property suites", 0.0, properties},
    };
    std::vector<Criterion> out;
    for (const auto &s : specs) {
        Criterion c;
        c.id = s.id;
        c.title = s.title;
        c.time_limit = s.limit;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            s.fn(c);
        } catch (const std::exception &e) {
            c.error = e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace qlab::acceptance
