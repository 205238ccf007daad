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
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "qlab/core/error.hpp"
#include "qlab/core/hilbert.hpp"
#include "qlab/core/linalg.hpp"
#include "qlab/core/state.hpp"
#include "qlab/core/types.hpp"

namespace qlab::repeater {

// ---- signal-to-noise ratio of the collective mode ----

enum class SnrConfig { lambda_one, lambda_two, free_space };

struct SnrInputs {
    double N_a = 1.0;
    double g = 0.0;        // single-atom coupling to the signal mode
    double kappa = 1.0;    // cavity decay rate
    double gamma_s = 1.0;  // resonant spontaneous emission rate
    double rho_n = 0.0;    // number density
    double L_a = 0.0;      // ensemble length
    double k_s = 0.0;      // signal wave number
};

inline double snr(SnrConfig config, const SnrInputs &in) {
    if (config == SnrConfig::free_space) {
        require(in.rho_n > 0.0 && in.L_a > 0.0 && in.k_s > 0.0, "snr: free space needs rho_n, L_a, k_s > 0");
        return 3.0 * in.rho_n * in.L_a / (in.k_s * in.k_s);
    }
    require(in.N_a > 0.0 && in.g > 0.0 && in.kappa > 0.0 && in.gamma_s > 0.0,
            "snr: N_a, g, kappa, gamma_s must be positive");
    // Both Lambda configurations give kappa'/gamma' = 4 N_a |g|^2/(kappa gamma_s),
    // with g the coupling of the respective signal transition.
    return 4.0 * in.N_a * in.g * in.g / (in.kappa * in.gamma_s);
}

// Single atom in a cavity, |g|^2/(kappa gamma_s), without the factor 4.
inline double single_atom_snr(double g, double kappa, double gamma_s) { return g * g / (kappa * gamma_s); }

// ---- two-mode squeezed state of the collective mode and the signal ----

inline double excitation_probability(double r) { return std::tanh(r) * std::tanh(r); }

// Ket on (atomic mode, signal mode), each truncated at d levels; d = 0 picks
// the smallest d whose neglected tail tanh^{2d} r is below tail_tol.
inline Ket two_mode_squeezed(double r, int d = 0, double tail_tol = 1e-10) {
    require(r >= 0.0, "two_mode_squeezed: r must be non-negative");
    const double t = std::tanh(r);
    if (d <= 0) {
        d = 1;
        while (std::pow(t, 2.0 * d) >= tail_tol) {
            ++d;
            if (d > 64) throw NumericalError("two_mode_squeezed: truncation needs more than 64 levels");
        }
        d = std::max(d, 2);
    }
    if (std::pow(t, 2.0 * d) >= tail_tol) throw NumericalError("two_mode_squeezed: truncation tail too large");
    HilbertSpec spec({d, d});
    CVector v = CVector::Zero(d * d);
    const double sech = 1.0 / std::cosh(r);
    for (int n = 0; n < d; ++n) v(n * d + n) = sech * std::pow(t, n);
    return Ket(spec, v, true);
}

// ---- EME states ----

struct EMEState {
    double c = 0.0;
    double phi = 0.0;

    EMEState() = default;
    EMEState(double c_, double phi_ = 0.0) : c(c_), phi(phi_) {
        require(c >= 0.0 && std::isfinite(c), "EMEState: vacuum coefficient must be finite and >= 0");
    }

    double entanglement_fraction() const { return 1.0 / (c + 1.0); }

    // Density operator on the occupation qubits of (L, R).
    DensityOp density() const {
        CMatrix m = CMatrix::Zero(4, 4);
        m(0, 0) = c;
        CVector psi = CVector::Zero(4);
        psi(2) = 1.0 / std::sqrt(2.0);                       // L excited
        psi(1) = std::exp(kI * phi) / std::sqrt(2.0);        // R excited
        m += psi * psi.adjoint();
        return DensityOp(HilbertSpec::qubits(2), m / (c + 1.0));
    }
};

// ---- chain parameters ----

struct RepeaterParams {
    double p_c = 0.01;
    double t_delta = 1.0;
    double eta_p_prime = 1.0;
    double L_att = 1.0;
    double L0 = 1.0;
    double eta_s = 1.0;
    double eta_a = 1.0;
    double p_dc = 0.0;
    int n = 0;

    void validate() const {
        auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
        require(prob(p_c) && prob(eta_p_prime) && prob(eta_s) && prob(eta_a) && prob(p_dc),
                "RepeaterParams: probabilities and efficiencies must lie in [0, 1]");
        require(L0 > 0.0 && L_att > 0.0, "RepeaterParams: L0 and L_att must be positive");
        require(t_delta > 0.0, "RepeaterParams: t_delta must be positive");
        require(n >= 0 && n <= 60, "RepeaterParams: nesting depth must lie in [0, 60]");
    }

    double eta_p() const { return eta_p_prime * std::exp(-L0 / L_att); }
    double total_length() const { return std::ldexp(L0, n); }
};

struct Segment {
    EMEState state;
    double T0 = 0.0;
    double delta_F0 = 0.0;
    double success_probability = 0.0;
};

inline Segment generate_segment(const RepeaterParams &p, double phi = 0.0) {
    p.validate();
    const double rate = p.eta_p() * p.p_c;
    if (!(rate > 0.0)) throw InvalidArgument("generate_segment: zero success rate (eta_p p_c = 0)");
    return {EMEState(p.p_dc / rate, phi), p.t_delta / rate, p.p_c, rate};
}

// ---- entanglement swapping ----

struct SwapResult {
    double p = 0.0;
    double c = 0.0;
};

inline SwapResult swap(double c_prev, double eta_s) {
    require(c_prev >= 0.0, "swap: c must be non-negative");
    require(eta_s > 0.0 && eta_s <= 1.0, "swap: eta_s must lie in (0, 1]");
    const double k = c_prev + 1.0;
    return {eta_s * (1.0 - eta_s / (2.0 * k)) / k, 2.0 * c_prev + 1.0 - eta_s};
}

struct SwappedPair {
    EMEState state;
    double p = 0.0;
};

inline SwappedPair swap(const EMEState &a, const EMEState &b, double eta_s) {
    require(a.c == b.c, "swap: both pairs must carry the same vacuum coefficient");
    auto r = swap(a.c, eta_s);
    return {EMEState(r.c, a.phi + b.phi), r.p};
}

inline double vacuum_coefficient_closed_form(int i, double c0, double eta_s) {
    const double two_i = std::ldexp(1.0, i);
    return (two_i - 1.0) * (1.0 - eta_s) + two_i * c0;
}

// Coincidence probability on both sides when projecting two EME pairs onto
// the PME state; eta_a = 1 gives the ideal value.
inline double application_probability(double c_n, double eta_a = 1.0) {
    return eta_a / (2.0 * (c_n + 1.0) * (c_n + 1.0));
}

// ---- chain analysis ----

struct ChainAnalysis {
    std::vector<double> p;  // p[i-1] = p_i
    std::vector<double> c;  // c[i] = c_i, c[0] = c0
    double T0 = 0.0;
    double T_n = 0.0;
    double c_n = 0.0;
    double delta_F_n = 0.0;
    double p_a = 0.0;        // with eta_a
    double p_a_ideal = 0.0;  // eta_a = 1
    double T_tot = 0.0;
    double T_con = 0.0;
    double log10_ratio = 0.0;          // log10(T_tot / T_con) from the products
    double log10_ideal_swap = 0.0;     // (L/L0)^2 e^{L0/Latt}
    double log10_lossy_swap = 0.0;     // large swap inefficiency limit
    double log10_direct = 0.0;         // e^{L/Latt}
};

// log10(T_tot/T_con) in the two limiting laws.
inline double log10_ideal_swap_law(double L_over_Latt, double L0_over_Latt) {
    return 2.0 * std::log10(L_over_Latt / L0_over_Latt) + L0_over_Latt / std::log(10.0);
}

inline double log10_lossy_swap_law(double L_over_Latt, double L0_over_Latt, double eta_s) {
    require(eta_s > 0.0 && eta_s < 1.0, "log10_lossy_swap_law: needs 0 < eta_s < 1");
    const double x = L_over_Latt / L0_over_Latt;
    const double power = (std::log2(x) + 1.0) / 2.0 + std::log2(1.0 / eta_s - 1.0) + 2.0;
    return power * std::log10(x) + L0_over_Latt / std::log(10.0);
}

inline double log10_direct(double L_over_Latt) { return L_over_Latt / std::log(10.0); }

// T_tot = T_n / p_a with T0 = t_delta/(eta_p p_c), T_n = T0 prod 1/p_i and the
// final imperfection Delta F_n = 2^n p_c; T_con = 2 t_delta/(eta_p' eta_a Delta F_n).
inline ChainAnalysis chain_analysis(const RepeaterParams &params) {
    auto seg = generate_segment(params);
    ChainAnalysis a;
    a.T0 = seg.T0;
    a.c.push_back(seg.state.c);
    double T = seg.T0;
    for (int i = 1; i <= params.n; ++i) {
        require(params.eta_s > 0.0, "chain_analysis: eta_s must be positive for n > 0");
        auto s = swap(a.c.back(), params.eta_s);
        a.p.push_back(s.p);
        a.c.push_back(s.c);
        T /= s.p;
    }
    a.T_n = T;
    a.c_n = a.c.back();
    a.delta_F_n = std::ldexp(seg.delta_F0, params.n);
    a.p_a = application_probability(a.c_n, params.eta_a);
    a.p_a_ideal = application_probability(a.c_n);
    a.T_tot = a.p_a > 0.0 ? a.T_n / a.p_a : std::numeric_limits<double>::infinity();
    a.T_con = 2.0 * params.t_delta / (params.eta_p_prime * params.eta_a * a.delta_F_n);
    a.log10_ratio = std::log10(a.T_tot / a.T_con);
    const double L = params.total_length() / params.L_att, L0 = params.L0 / params.L_att;
    a.log10_ideal_swap = log10_ideal_swap_law(L, L0);
    a.log10_lossy_swap = params.eta_s < 1.0 ? log10_lossy_swap_law(L, L0, params.eta_s)
                                            : std::numeric_limits<double>::quiet_NaN();
    a.log10_direct = log10_direct(L);
    return a;
}

// Product path for a dyadic split L = 2^n L0:
// T_tot/T_con = 2^n e^{L0/Latt} (c_n + 1)^2 / prod p_i.
inline double log10_ratio_exact(int n, double L0_over_Latt, double eta_s, double c0 = 0.0) {
    require(n >= 0, "log10_ratio_exact: n must be non-negative");
    double c = c0, log_prod = 0.0;
    for (int i = 0; i < n; ++i) {
        auto s = swap(c, eta_s);
        log_prod += std::log10(s.p);
        c = s.c;
    }
    return n * std::log10(2.0) + L0_over_Latt / std::log(10.0) + 2.0 * std::log10(c + 1.0) - log_prod;
}

enum class ScalingLaw { automatic, ideal_swap, lossy_swap };

struct SegmentOptimum {
    double L0_opt = 0.0;             // in units of L_att
    double log10_ratio = 0.0;        // law value at the optimum
    double fitted_power = 0.0;       // d log T_tot / d log L at the optimum
    bool unimodal = true;
    ScalingLaw law = ScalingLaw::ideal_swap;
    // Best dyadic split evaluated with the product path.
    int exact_n = 0;
    double exact_L0 = 0.0;
    double exact_log10_ratio = 0.0;
};

inline double scaling_law_value(ScalingLaw law, double L, double L0, double eta_s) {
    return law == ScalingLaw::ideal_swap ? log10_ideal_swap_law(L, L0) : log10_lossy_swap_law(L, L0, eta_s);
}

// Minimizes the limiting law over L0 in (L0_min, L] with Brent's method.
inline SegmentOptimum optimize_segment_length(double eta_s, double L_over_Latt, ScalingLaw law = ScalingLaw::automatic,
                                              double L0_min = 1e-3) {
    require(L_over_Latt > L0_min, "optimize_segment_length: L must exceed L0_min");
    require(eta_s > 0.0 && eta_s <= 1.0, "optimize_segment_length: eta_s must lie in (0, 1]");
    if (law == ScalingLaw::automatic) law = eta_s >= 1.0 ? ScalingLaw::ideal_swap : ScalingLaw::lossy_swap;
    if (law == ScalingLaw::lossy_swap) require(eta_s < 1.0, "optimize_segment_length: lossy law needs eta_s < 1");
    SegmentOptimum o;
    o.law = law;
    auto f = [&](double L0) { return scaling_law_value(law, L_over_Latt, L0, eta_s); };
    // Unimodality check on a log grid.
    const int grid = 400;
    std::vector<double> vals(grid);
    for (int i = 0; i < grid; ++i) {
        double L0 = L0_min * std::pow(L_over_Latt / L0_min, static_cast<double>(i) / (grid - 1));
        vals[i] = f(L0);
    }
    int minima = 0;
    for (int i = 1; i + 1 < grid; ++i)
        if (vals[i] < vals[i - 1] && vals[i] <= vals[i + 1]) ++minima;
    o.unimodal = minima <= 1;
    auto r = boost::math::tools::brent_find_minima(f, L0_min, L_over_Latt, std::numeric_limits<double>::digits / 2);
    o.L0_opt = r.first;
    o.log10_ratio = r.second;
    // Local power of T_tot in L at fixed L0.
    const double h = 1e-5;
    auto g = [&](double lnL) { return scaling_law_value(law, std::exp(lnL), o.L0_opt, eta_s) * std::log(10.0); };
    o.fitted_power = (g(std::log(L_over_Latt) + h) - g(std::log(L_over_Latt) - h)) / (2.0 * h);
    o.exact_log10_ratio = std::numeric_limits<double>::infinity();
    for (int n = 0; std::ldexp(L0_min, n) < L_over_Latt && n <= 40; ++n) {
        double L0 = std::ldexp(L_over_Latt, -n);
        double v = log10_ratio_exact(n, L0, eta_s);
        if (v < o.exact_log10_ratio) {
            o.exact_log10_ratio = v;
            o.exact_n = n;
            o.exact_L0 = L0;
        }
    }
    return o;
}

// ---- applications: CHSH from two EME pairs ----

struct ChshSettings {
    double a1 = 0.0;
    double a2 = kPi / 2.0;
    double b1 = kPi / 4.0;
    double b2 = 3.0 * kPi / 4.0;
};

struct Correlation {
    double E = 0.0;
    double E_cos = 0.0;
    // Probability of one click on each side.
    double coincidence = 0.0;
};

// Modes ordered (L1, R1, L2, R2), occupation 0/1 each. Each side combines
// its two modes after a phase psi on mode 2 on a 50/50 beam splitter.
inline Correlation correlation(const EMEState &pair, double psi_L, double psi_R) {
    CMatrix rho12 = kron(pair.density().matrix(), pair.density().matrix());
    auto idx = [](int l1, int r1, int l2, int r2) { return 8 * l1 + 4 * r1 + 2 * l2 + r2; };
    // Detector k on a side projects its single excitation onto
    // (|mode1> + s e^{-i psi}|mode2>)/sqrt2 with s = +1 (D1) or -1 (D2).
    auto detector = [&](bool left, int k, double psi) {
        CVector v = CVector::Zero(16);
        const double s = k == 0 ? 1.0 : -1.0;
        const cplx ph = s * std::exp(-kI * psi) / std::sqrt(2.0);
        if (left) {
            v(idx(1, 0, 0, 0)) = 1.0 / std::sqrt(2.0);
            v(idx(0, 0, 1, 0)) = ph;
        } else {
            v(idx(0, 1, 0, 0)) = 1.0 / std::sqrt(2.0);
            v(idx(0, 0, 0, 1)) = ph;
        }
        return v;
    };
    double P[2][2];
    double total = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CVector dl = detector(true, i, psi_L), dr = detector(false, j, psi_R);
            // Joint projector onto one excitation per side: combine amplitudes
            // of the product basis states.
            CVector joint = CVector::Zero(16);
            for (int a = 0; a < 16; ++a) {
                if (dl(a) == cplx(0.0)) continue;
                for (int b = 0; b < 16; ++b) {
                    if (dr(b) == cplx(0.0)) continue;
                    joint(a | b) += dl(a) * dr(b);
                }
            }
            P[i][j] = std::real(joint.dot(rho12 * joint));
            total += P[i][j];
        }
    }
    Correlation c;
    c.coincidence = total;
    c.E = (P[0][0] + P[1][1] - P[0][1] - P[1][0]) / total;
    c.E_cos = std::cos(psi_L - psi_R);
    return c;
}

struct ChshResult {
    std::array<Correlation, 4> E;  // (a1,b1), (a2,b1), (a2,b2), (a1,b2)
    double S = 0.0;
    double S_cos = 0.0;
    double p_a = 0.0;
};

inline ChshResult chsh_value(const EMEState &pair, const ChshSettings &s = {}, double eta_a = 1.0) {
    ChshResult r;
    r.E = {correlation(pair, s.a1, s.b1), correlation(pair, s.a2, s.b1), correlation(pair, s.a2, s.b2),
           correlation(pair, s.a1, s.b2)};
    r.S = std::abs(r.E[0].E + r.E[1].E + r.E[2].E - r.E[3].E);
    r.S_cos = std::abs(r.E[0].E_cos + r.E[1].E_cos + r.E[2].E_cos - r.E[3].E_cos);
    r.p_a = eta_a * r.E[0].coincidence;
    return r;
}

// ---- uncorrectable noise reporters ----

// Dark-count probability per connection window: dark rate / emission rate.
inline double dark_count_probability(double dark_rate, double emission_rate) {
    require(dark_rate >= 0.0 && emission_rate > 0.0, "dark_count_probability: bad rates");
    return dark_rate / emission_rate;
}

// Grows linearly with the number of segments.
inline double dark_count_imperfection(double segments, double p_dc_connection) { return segments * p_dc_connection; }

// Grows as a random walk, sqrt(segments).
inline double nonstationary_imperfection(double segments, double per_segment) {
    return std::sqrt(segments) * per_segment;
}

// ---- Monte Carlo realization of the retry protocol ----

enum class ChainModel {
    sequential,     // each connection attempt waits for one fresh lower-level pair
    parallel_tree,  // both lower-level pairs are regenerated independently; wait for the slower
    no_memory       // all segments and swaps must succeed in the same attempt
};

struct StageStats {
    double p = 0.0;
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;

    double rate() const { return attempts ? static_cast<double>(successes) / static_cast<double>(attempts) : 0.0; }
    double sigma() const { return attempts ? std::sqrt(p * (1.0 - p) / static_cast<double>(attempts)) : 0.0; }
};

struct MonteCarloResult {
    std::size_t trials = 0;
    double mean_time = 0.0;  // in units of t_delta
    double std_error = 0.0;
    double closed_form = 0.0;  // T_n / t_delta from the product formula (no_memory: 1/P)
    std::vector<StageStats> stages;  // stage 0 = segment generation
    std::vector<double> times;
};

namespace detail {

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t trial, std::uint64_t level, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(level), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

// One node of the connection tree with its own random stream, so results do
// not depend on evaluation order.
class Node {
public:
    Node(const std::vector<double> &p, ChainModel model, std::uint64_t seed, std::uint64_t trial, int level,
         std::uint64_t index, std::vector<StageStats> &stats)
        : p_(p), model_(model), level_(level), rng_(substream(seed, trial, level, index)), stats_(stats) {
        if (level_ > 0) {
            left_ = std::make_unique<Node>(p, model, seed, trial, level - 1, 2 * index, stats);
            if (model_ == ChainModel::parallel_tree)
                right_ = std::make_unique<Node>(p, model, seed, trial, level - 1, 2 * index + 1, stats);
        }
    }

    // Time (in t_delta) until this node next holds an entangled pair.
    double next() {
        auto &st = stats_[level_];
        if (level_ == 0) {
            std::geometric_distribution<std::uint64_t> geo(p_[0]);
            std::uint64_t failures = geo(rng_);
            st.attempts += failures + 1;
            st.successes += 1;
            return static_cast<double>(failures + 1);
        }
        std::bernoulli_distribution swap_ok(p_[level_]);
        double t = 0.0;
        while (true) {
            double tl = left_->next();
            t += right_ ? std::max(tl, right_->next()) : tl;
            ++st.attempts;
            if (swap_ok(rng_)) {
                ++st.successes;
                return t;
            }
        }
    }

private:
    const std::vector<double> &p_;
    ChainModel model_;
    int level_;
    std::mt19937_64 rng_;
    std::vector<StageStats> &stats_;
    std::unique_ptr<Node> left_, right_;
};

}  // namespace detail

// Stage probabilities: stage 0 = eta_p p_c per window, stage i = p_i.
inline std::vector<double> stage_probabilities(const RepeaterParams &params) {
    auto a = chain_analysis(params);
    std::vector<double> p{generate_segment(params).success_probability};
    p.insert(p.end(), a.p.begin(), a.p.end());
    return p;
}

inline MonteCarloResult monte_carlo_chain(const RepeaterParams &params, std::size_t trials, std::uint64_t seed,
                                          ChainModel model = ChainModel::sequential) {
    require(trials >= 1, "monte_carlo_chain: need at least one trial");
    auto p = stage_probabilities(params);
    MonteCarloResult r;
    r.trials = trials;
    r.stages.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r.stages[i].p = p[i];
    r.times.reserve(trials);
    if (model == ChainModel::no_memory) {
        // All 2^n segments in one window, then every swap at once.
        double log_P = std::ldexp(std::log(p[0]), params.n);
        for (int i = 1; i <= params.n; ++i) log_P += std::ldexp(std::log(p[i]), params.n - i);
        r.closed_form = std::exp(-log_P);
        const double log_q = std::log1p(-std::exp(log_P));
        for (std::size_t t = 0; t < trials; ++t) {
            auto rng = detail::substream(seed, t, 0, 0);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            double draw = 1.0 - u(rng);
            // Inverse transform of the geometric law, kept in floating point.
            double attempts = log_q < 0.0 ? std::floor(std::log(draw) / log_q) + 1.0 : 1.0;
            r.times.push_back(attempts);
            r.stages[0].attempts += 1;
        }
    } else {
        r.closed_form = 1.0 / p[0];
        for (std::size_t i = 1; i < p.size(); ++i) r.closed_form /= p[i];
        for (std::size_t t = 0; t < trials; ++t) {
            detail::Node root(p, model, seed, t, params.n, 0, r.stages);
            r.times.push_back(root.next());
        }
    }
    double sum = 0.0, sum2 = 0.0;
    for (double v : r.times) {
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(trials);
    r.mean_time = sum / n;
    double var = trials > 1 ? (sum2 - n * r.mean_time * r.mean_time) / (n - 1.0) : 0.0;
    r.std_error = std::sqrt(std::max(var, 0.0) / n);
    return r;
}

}  // namespace qlab::repeater
