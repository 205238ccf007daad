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
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qlab/core/error.hpp"
#include "qlab/core/ode.hpp"
#include "qlab/core/pulse.hpp"

// Ensemble light memory in the Heisenberg picture. Mode operators are carried
// by their real shape functions on [0, T]; every map below is linear.
namespace qlab::memory {

using ShapeFn = std::function<double(double)>;

inline constexpr double kEdgeFloor = 1e-8;
inline constexpr double kTailMass = 1e-10;

// Normalized pulse shape on [0, T]. Keeps the analytic callable when one was
// supplied so the nonlinear schedule oracle can use an exact derivative.
class ModeShape {
   public:
    ModeShape() = default;

    // Samples fn on n points of [0, T] and normalizes. Samples must be
    // nonnegative; zeros are allowed only as leading/trailing runs and are
    // raised to kEdgeFloor * max|f|.
    static ModeShape from_function(ShapeFn fn, double T, std::size_t n = 4001, ShapeFn dfn = {}) {
        require(T > 0.0 && std::isfinite(T), "ModeShape: T must be positive and finite");
        require(n >= 4, "ModeShape: need at least four samples");
        require(static_cast<bool>(fn), "ModeShape: empty shape function");
        using boost::math::quadrature::gauss_kronrod;
        auto sq = [&](double t) { return fn(t) * fn(t); };
        const double norm2 = gauss_kronrod<double, 61>::integrate(sq, 0.0, T, 12, 1e-14);
        require(norm2 > 0.0 && std::isfinite(norm2), "ModeShape: shape has zero norm");
        ModeShape m;
        m.fn_ = std::move(fn);
        m.dfn_ = std::move(dfn);
        m.scale_ = 1.0 / std::sqrt(norm2);
        auto raw = RealPulse::sample([&](double t) { return m.fn_(t) * m.scale_; }, 0.0, T, n);
        m.profile_ = window(raw);
        return m;
    }

    // Sampled shape with no analytic form; normalized by quadrature of the samples.
    static ModeShape from_samples(const RealPulse &p) {
        require(p.t_begin() == 0.0, "ModeShape: window must start at 0");
        require(p.size() >= 4, "ModeShape: need at least four samples");
        RealPulse w = window(p);
        const double norm2 = w.map([](double v) { return v * v; }).integral();
        require(norm2 > 0.0 && std::isfinite(norm2), "ModeShape: shape has zero norm");
        ModeShape m;
        m.scale_ = 1.0;
        m.profile_ = w.map([s = 1.0 / std::sqrt(norm2)](double v) { return v * s; });
        return m;
    }

    // Shape on [0, inf) truncated where the remaining tail mass drops below
    // kTailMass of the total.
    static ModeShape from_semi_infinite(ShapeFn fn, std::size_t n = 4001, ShapeFn dfn = {}) {
        using boost::math::quadrature::gauss_kronrod;
        auto sq = [&](double t) { return fn(t) * fn(t); };
        const double total = gauss_kronrod<double, 61>::integrate(sq, 0.0, std::numeric_limits<double>::infinity(), 10, 1e-12);
        require(total > 0.0 && std::isfinite(total), "ModeShape: shape is not square integrable");
        double T = 1.0;
        for (int k = 0; k < 200; ++k, T *= 1.25) {
            const double tail = gauss_kronrod<double, 61>::integrate(sq, T, std::numeric_limits<double>::infinity(), 10, 1e-12);
            if (tail < kTailMass * total) return from_function(std::move(fn), T, n, std::move(dfn));
        }
        throw NumericalError("ModeShape: tail does not decay");
    }

    const RealPulse &profile() const { return profile_; }
    double T() const { return profile_.t_end(); }
    std::size_t size() const { return profile_.size(); }
    double operator()(double t) const { return fn_ ? scale_ * fn_(t) : profile_(t); }
    double derivative(double t) const {
        if (dfn_) return scale_ * dfn_(t);
        return profile_.derivative(t);
    }
    double at(std::size_t i) const { return profile_.samples()[i]; }

    ModeShape reversed() const {
        ModeShape m;
        m.scale_ = scale_;
        m.profile_ = profile_.reversed();
        if (fn_) {
            const double T_ = T();
            m.fn_ = [f = fn_, T_](double t) { return f(T_ - t); };
            if (dfn_) m.dfn_ = [d = dfn_, T_](double t) { return -d(T_ - t); };
        }
        return m;
    }

   private:
    static RealPulse window(const RealPulse &p) {
        std::vector<double> s = p.samples();
        double peak = 0.0;
        for (double v : s) {
            require(std::isfinite(v), "ModeShape: non-finite sample");
            require(v >= 0.0, "ModeShape: shape must be nonnegative (interior zero or sign change)");
            peak = std::max(peak, v);
        }
        require(peak > 0.0, "ModeShape: shape vanishes identically");
        std::size_t first = 0;
        while (s[first] == 0.0) ++first;
        std::size_t last = s.size() - 1;
        while (s[last] == 0.0) --last;
        for (std::size_t i = first; i <= last; ++i)
            require(s[i] > 0.0, "ModeShape: interior zero makes f'/f singular");
        for (double &v : s) v = std::max(v, kEdgeFloor * peak);
        return RealPulse(p.t_begin(), p.dt(), std::move(s), p.rule());
    }

    RealPulse profile_;
    ShapeFn fn_;
    ShapeFn dfn_;
    double scale_ = 1.0;
};

inline double overlap(const RealPulse &a, const RealPulse &b) {
    require(a.size() == b.size() && a.t_begin() == b.t_begin() && a.dt() == b.dt(), "overlap: grids differ");
    std::vector<double> p(a.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = a.samples()[i] * b.samples()[i];
    return cumulative_integral(p, a.dt()).back();
}

inline double norm(const RealPulse &a) { return std::sqrt(overlap(a, a)); }

struct CouplingSchedule {
    RealPulse kappa;   // kappa'(t) >= 0
    RealPulse R;       // running integral of kappa'
    double M = 1.0;    // exp(-R(T)) from the sampled schedule

    static CouplingSchedule from_rate(RealPulse k) {
        for (double v : k.samples()) require(v >= 0.0 && std::isfinite(v), "CouplingSchedule: rate must be finite and nonnegative");
        CouplingSchedule s;
        auto r = k.cumulative();
        for (std::size_t i = 1; i < r.size(); ++i) r[i] = std::max(r[i], r[i - 1]);
        s.R = RealPulse(k.t_begin(), k.dt(), std::move(r), k.rule());
        s.M = std::exp(-s.R.samples().back());
        s.kappa = std::move(k);
        return s;
    }
};

struct WriteSchedule {
    CouplingSchedule schedule;
    double a = 0.0;            // f(0)^2 / kappa'(0); infinite when kappa'(0) = 0
    double M_closed = 1.0;     // a / (a + 1)
};

// Write-in schedule matched to f: kappa' = f^2 / (a + F(t)), F the running
// integral of f^2. This is the Bernoulli solution of
// kappa'' = (2 f'/f) kappa' - kappa'^2 with kappa'(0) = kappa0.
inline WriteSchedule impedance_match(const ModeShape &f, double kappa0) {
    require(kappa0 >= 0.0 && std::isfinite(kappa0), "impedance_match: kappa'(0) must be finite and nonnegative");
    const auto &fp = f.profile();
    WriteSchedule w;
    if (kappa0 == 0.0) {
        w.a = std::numeric_limits<double>::infinity();
        w.M_closed = 1.0;
        w.schedule = CouplingSchedule::from_rate(fp.map([](double) { return 0.0; }));
        return w;
    }
    auto f2 = fp.map([](double v) { return v * v; });
    auto F = f2.cumulative();
    w.a = f2.samples()[0] / kappa0;
    w.M_closed = w.a / (w.a + F.back());
    std::vector<double> k(F.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = f2.samples()[i] / (w.a + F[i]);
    w.schedule = CouplingSchedule::from_rate(RealPulse(fp.t_begin(), fp.dt(), std::move(k), fp.rule()));
    return w;
}

// Oracle: integrates the nonlinear matching condition directly and returns
// the largest deviation from the closed-form schedule on the grid, relative
// to the schedule's peak.
inline double impedance_match_oracle_deviation(const ModeShape &f, const WriteSchedule &w,
                                               ode::Tolerances tol = {1e-13, 1e-11}) {
    const auto &k = w.schedule.kappa;
    if (!(w.a < std::numeric_limits<double>::infinity())) return 0.0;
    std::vector<double> times(k.size());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = k.time(i);
    auto rhs = [&](const std::vector<double> &y, std::vector<double> &dy, double t) {
        dy[0] = 2.0 * f.derivative(t) / f(t) * y[0] - y[0] * y[0];
    };
    auto traj = ode::integrate_on_grid<double>(rhs, {k.samples()[0]}, times, tol, k.dt() * 1e-3);
    const double peak = *std::max_element(k.samples().begin(), k.samples().end());
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) worst = std::max(worst, std::abs(traj[i][0] - k.samples()[i]));
    return peak > 0.0 ? worst / peak : 0.0;
}

struct WriteMap {
    RealPulse kernel;        // K(t) = exp(-(R(T)-R(t))/2) sqrt(kappa'(t))
    double M = 1.0;          // coefficient of s(0) in s_T is sqrt(M)
    double absorbed = 0.0;   // integral of K f; coefficient of c_in is -absorbed
    double kernel_norm2 = 0.0;
    double max_proportionality_error = 0.0;  // max |K - sqrt(1-M) f|
    double bogoliubov() const { return M + kernel_norm2; }
};

// Coefficients of s_T = sqrt(M) s(0) - integral K(t) a_in(t) dt for any
// schedule on the shape's grid. With check set, a matched schedule must give
// K = sqrt(1-M) f pointwise within tol.
inline WriteMap write_map(const ModeShape &f, const CouplingSchedule &s, bool check = true, double tol = 1e-6) {
    const auto &fp = f.profile();
    require(s.kappa.size() == fp.size() && s.kappa.dt() == fp.dt(), "write_map: schedule grid differs from shape grid");
    const auto &R = s.R.samples();
    const auto &k = s.kappa.samples();
    const double RT = R.back();
    std::vector<double> K(k.size());
    for (std::size_t i = 0; i < K.size(); ++i) K[i] = std::exp(-0.5 * (RT - R[i])) * std::sqrt(k[i]);
    WriteMap m;
    m.kernel = RealPulse(fp.t_begin(), fp.dt(), std::move(K), fp.rule());
    m.M = s.M;
    m.absorbed = overlap(m.kernel, fp);
    m.kernel_norm2 = overlap(m.kernel, m.kernel);
    const double c = std::sqrt(std::max(0.0, 1.0 - m.M));
    for (std::size_t i = 0; i < fp.size(); ++i)
        m.max_proportionality_error = std::max(m.max_proportionality_error, std::abs(m.kernel.samples()[i] - c * fp.samples()[i]));
    if (check && m.max_proportionality_error > tol)
        throw NumericalError("write_map: kernel is not proportional to the input shape (broken schedule)");
    return m;
}

struct ReadSchedule {
    CouplingSchedule schedule;
    double C = std::numeric_limits<double>::infinity();  // 1 + f(T)^2 / kappa'(T)
    double M_closed = 1.0;                              // (C - 1) / C
};

// Read-out schedule for output shape f: kappa' = f^2 / (C - F(t)), the time
// reverse of the write-in condition; kappa_T is the rate at the window end.
inline ReadSchedule read_out(const ModeShape &f, double kappa_T) {
    require(kappa_T >= 0.0 && std::isfinite(kappa_T), "read_out: kappa'(T) must be finite and nonnegative");
    const auto &fp = f.profile();
    ReadSchedule r;
    if (kappa_T == 0.0) {
        r.schedule = CouplingSchedule::from_rate(fp.map([](double) { return 0.0; }));
        return r;
    }
    auto f2 = fp.map([](double v) { return v * v; });
    // C - F(t) is formed from the tail integral to avoid cancellation near T.
    auto tail = f2.reversed().cumulative();
    std::reverse(tail.begin(), tail.end());
    const double b = f2.samples().back() / kappa_T;
    r.C = tail.front() + b;
    r.M_closed = b / r.C;
    std::vector<double> k(tail.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = f2.samples()[i] / (tail[i] + b);
    r.schedule = CouplingSchedule::from_rate(RealPulse(fp.t_begin(), fp.dt(), std::move(k), fp.rule()));
    return r;
}

struct ReadMap {
    double M = 1.0;
    double from_spin = 0.0;   // coefficient of s_T in c_out, -sqrt(1-M) when matched
    double from_input = -1.0; // coefficient of the reflected input mode, -sqrt(M)
};

// c_out = integral f_out a_out dt with a_out = -a_in - sqrt(kappa') s(t).
inline ReadMap read_map(const ModeShape &f, const CouplingSchedule &s) {
    const auto &fp = f.profile();
    require(s.kappa.size() == fp.size() && s.kappa.dt() == fp.dt(), "read_map: schedule grid differs from shape grid");
    std::vector<double> g(fp.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = fp.samples()[i] * std::sqrt(s.kappa.samples()[i]) * std::exp(-0.5 * s.R.samples()[i]);
    ReadMap m;
    m.M = s.M;
    m.from_spin = -cumulative_integral(g, fp.dt()).back();
    m.from_input = -std::sqrt(m.M);
    return m;
}

struct RoundTrip {
    double M_write = 1.0;
    double M_read = 1.0;
    double efficiency = 0.0;  // coefficient of c_in in c_out
};

inline RoundTrip round_trip(const ModeShape &f_in, double kappa0, const ModeShape &f_out, double kappa_T) {
    auto w = impedance_match(f_in, kappa0);
    auto wm = write_map(f_in, w.schedule, false);
    auto r = read_out(f_out, kappa_T);
    auto rm = read_map(f_out, r.schedule);
    return {wm.M, rm.M, -wm.absorbed * rm.from_spin};
}

struct SplitResult {
    RealPulse h_out;
    double norm = 0.0;
    double input_overlap = 0.0;     // integral f_in h_in
    double kernel_overlap = 0.0;    // <h_in, K>, zero for orthogonal inputs
    double emission_overlap = 0.0;  // <h_out, e>, e the normalized output mode of s(0)
};

// Output shape of a mode orthogonal to the stored one, for a schedule matched
// to f_in:
// h_out = h_in - (e^{R(T)} - 1) e^{-R(t)} f_in(t) integral_0^t f_in h_in.
inline SplitResult shape_split(const ModeShape &f, const RealPulse &h, const CouplingSchedule &s, double tol = 1e-6) {
    const auto &fp = f.profile();
    require(h.size() == fp.size() && h.dt() == fp.dt() && h.t_begin() == fp.t_begin(), "shape_split: grids differ");
    require(s.kappa.size() == fp.size(), "shape_split: schedule grid differs");
    SplitResult out;
    out.input_overlap = overlap(fp, h);
    require(std::abs(out.input_overlap) <= tol, "shape_split: input shapes are not orthogonal");
    std::vector<double> fh(fp.size());
    for (std::size_t i = 0; i < fh.size(); ++i) fh[i] = fp.samples()[i] * h.samples()[i];
    const auto G = cumulative_integral(fh, fp.dt());
    const auto &R = s.R.samples();
    const double eRT = std::expm1(R.back());
    std::vector<double> ho(fp.size()), e(fp.size());
    for (std::size_t i = 0; i < ho.size(); ++i) {
        ho[i] = h.samples()[i] - eRT * std::exp(-R[i]) * fp.samples()[i] * G[i];
        e[i] = std::sqrt(s.kappa.samples()[i]) * std::exp(-0.5 * R[i]);
    }
    out.h_out = RealPulse(fp.t_begin(), fp.dt(), std::move(ho), fp.rule());
    out.norm = norm(out.h_out);
    RealPulse ep(fp.t_begin(), fp.dt(), std::move(e), fp.rule());
    const double en = norm(ep);
    out.emission_overlap = en > 0.0 ? overlap(out.h_out, ep) / en : 0.0;
    auto K = write_map(f, s, false).kernel;
    out.kernel_overlap = overlap(h, K);
    return out;
}

// Bookkeeping for phase-kick multimode storage over levels s_0, s_1, ...
// A mode is written into s_0; a kick moves every level up by one. After k
// store+kick rounds mode j (0-based) sits in s_{k-j}. Release undoes one kick
// and reads s_0, so modes come back in reverse storage order.
class MultimodeLedger {
   public:
    explicit MultimodeLedger(std::size_t cap = 16) : cap_(cap) { require(cap >= 1, "MultimodeLedger: cap must be positive"); }

    void store(int mode) {
        require(!at(0).has_value(), "MultimodeLedger: s_0 already holds a mode");
        require(level_of(mode) < 0, "MultimodeLedger: mode already stored");
        if (slots_.empty()) slots_.push_back(std::nullopt);
        slots_.front() = mode;
    }

    void kick() {
        if (slots_.empty()) return;
        require(slots_.size() < cap_, "MultimodeLedger: overflow");
        slots_.insert(slots_.begin(), std::nullopt);
    }

    void unkick() {
        require(!at(0).has_value(), "MultimodeLedger: s_0 occupied, cannot reverse kick");
        if (!slots_.empty()) slots_.erase(slots_.begin());
    }

    // Reads out s_0, reversing one kick first when s_0 is empty.
    std::optional<int> release() {
        if (!at(0).has_value()) unkick();
        if (slots_.empty()) return std::nullopt;
        auto m = slots_.front();
        slots_.front().reset();
        trim();
        return m;
    }

    // Level holding `mode`, or -1.
    int level_of(int mode) const {
        for (std::size_t i = 0; i < slots_.size(); ++i)
            if (slots_[i] == mode) return static_cast<int>(i);
        return -1;
    }

    std::optional<int> at(std::size_t level) const { return level < slots_.size() ? slots_[level] : std::nullopt; }
    std::size_t occupied() const {
        return static_cast<std::size_t>(std::count_if(slots_.begin(), slots_.end(), [](const auto &s) { return s.has_value(); }));
    }
    std::size_t cap() const { return cap_; }

   private:
    void trim() {
        while (!slots_.empty() && !slots_.back().has_value()) slots_.pop_back();
    }

    std::size_t cap_;
    std::vector<std::optional<int>> slots_;
};

struct FidelityCriterion {
    double eta = 0.0;
    double lambda = 1.0;
    double F_tec = 0.0;
    double x_eta = 0.0;
    double F_cal = 1.0;
    double F_cri = 0.0;
    double lambda_opt = 0.0;
    double F_tec_max = 0.0;
    bool verdict = false;
};

inline FidelityCriterion memory_fidelity_criterion(double eta, double lambda, double F_tec) {
    require(eta >= 0.0 && eta < 1.0, "memory_fidelity_criterion: eta must lie in [0, 1)");
    require(lambda > 0.0 && std::isfinite(lambda), "memory_fidelity_criterion: lambda must be positive");
    require(F_tec >= 0.0 && std::isfinite(F_tec), "memory_fidelity_criterion: F_tec must be nonnegative");
    FidelityCriterion c{eta, lambda, F_tec};
    const double r = 1.0 - std::sqrt(1.0 - eta);
    c.x_eta = r * r;
    c.F_cal = lambda / (lambda + c.x_eta);
    c.F_cri = (1.0 + lambda) / (2.0 + lambda);
    c.lambda_opt = F_tec > 0.0 ? (1.0 - c.x_eta) / (2.0 * F_tec) - 1.0 - 0.5 * c.x_eta : std::numeric_limits<double>::infinity();
    c.F_tec_max = (1.0 - c.x_eta) * (1.0 - c.x_eta) / 4.0;
    c.verdict = c.F_cal - c.F_tec > c.F_cri;
    return c;
}

}  // namespace qlab::memory
