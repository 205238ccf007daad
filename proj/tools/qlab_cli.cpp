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

// qlab command-line front end. One subcommand per protocol; parameters come
// from defaults, then an optional JSON config file, then flags.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "acceptance.hpp"
#include "qlab/qlab.hpp"

#ifndef QLAB_VERSION
#define QLAB_VERSION "0.0.0"
#endif

namespace {

using nlohmann::json;
using namespace qlab;

enum Exit { kOk = 0, kFailed = 1, kBadConfig = 2, kModule = 3, kIo = 4 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------------ tables

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string to_csv(const Table &t) {
    if (t.rows.empty()) throw ConfigError("emit_curve: no rows to write");
    std::ostringstream os;
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    char buf[64];
    for (const auto &row : t.rows) {
        if (row.size() != t.header.size()) throw std::logic_error("emit_curve: ragged row");
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.6f", row[i]);
            os << (i ? "," : "") << buf;
        }
        os << '\n';
    }
    return os.str();
}

std::vector<double> grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("grid: need step > 0 and max >= min");
    std::vector<double> g;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) g.push_back(lo + step * static_cast<double>(i));
    return g;
}

// -------------------------------------------------------------- parameters

struct Param {
    std::string key;
    json def;  // number, string or boolean
    std::string help;
};

class Params {
   public:
    explicit Params(json values) : v_(std::move(values)) {}
    double num(const std::string &k) const { return v_.at(k).get<double>(); }
    int integer(const std::string &k) const {
        const double d = num(k);
        if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(k + ": expected an integer");
        return static_cast<int>(d);
    }
    std::string str(const std::string &k) const { return v_.at(k).get<std::string>(); }
    bool flag(const std::string &k) const { return v_.at(k).get<bool>(); }
    const json &raw() const { return v_; }

   private:
    json v_;
};

struct Output {
    json results;
    std::optional<Table> table;
};

struct Command {
    std::string name;
    std::string help;
    std::vector<Param> params;
    std::function<Output(const Params &, std::uint64_t)> run;
};

json coerce(const Param &p, const json &given) {
    if (p.def.is_boolean()) {
        if (given.is_boolean()) return given;
        if (given.is_string()) {
            const auto s = given.get<std::string>();
            if (s == "true" || s == "1") return true;
            if (s == "false" || s == "0") return false;
        }
    } else if (p.def.is_number()) {
        std::optional<double> v;
        if (given.is_number()) v = given.get<double>();
        if (given.is_string()) {
            const auto s = given.get<std::string>();
            char *end = nullptr;
            const double d = std::strtod(s.c_str(), &end);
            if (!s.empty() && end == s.c_str() + s.size()) v = d;
        }
        if (v && std::isfinite(*v)) {
            if (!p.def.is_number_integer()) return *v;
            if (*v == std::floor(*v) && std::abs(*v) < 1e15) return static_cast<std::int64_t>(*v);
            throw ConfigError("parameter '" + p.key + "': expected an integer");
        }
    } else if (given.is_string()) {
        return given;
    }
    throw ConfigError("parameter '" + p.key + "': cannot use value " + given.dump());
}

// ---------------------------------------------------------------- commands

Output cmd_purify(const Params &p, std::uint64_t) {
    Output o;
    auto trace = purification_iterate(p.num("f0"), p.integer("rounds"));
    json rounds = json::array();
    for (const auto &r : trace.rounds) rounds.push_back({{"F", r.F_in}, {"F_prime", r.F_out}, {"p_success", r.p_success}});
    o.results = {{"rounds", rounds}, {"F_final", trace.rounds.empty() ? p.num("f0") : trace.rounds.back().F_out}};
    auto curve = purification_curve(grid(p.num("grid-min"), p.num("grid-max"), p.num("grid-step")));
    Table t{{"F", "F_prime", "p_success"}, {}};
    for (const auto &r : curve.rounds) t.rows.push_back({r.F_in, r.F_out, r.p_success});
    o.table = std::move(t);
    return o;
}

Output cmd_teleport(const Params &p, std::uint64_t seed) {
    const std::string kind = p.str("resource");
    DensityOp res = kind == "psi_minus" ? DensityOp(bell(BellState::psi_minus))
                    : kind == "werner"  ? werner(p.num("F"))
                                        : throw ConfigError("resource: expected psi_minus or werner");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    const int n = p.integer("samples");
    if (n < 1) throw ConfigError("samples must be positive");
    double mean = 0.0, worst = 1.0;
    std::map<std::string, double> prob;
    for (int k = 0; k < n; ++k) {
        CVector v(2);
        v << cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
        Ket in(HilbertSpec({2}), v);
        double avg = 0.0;
        for (const auto &br : teleport_all(DensityOp(in), res)) {
            const double f = in.amplitudes().dot(br.corrected * in.amplitudes()).real();
            avg += br.outcome.probability * f;
            worst = std::min(worst, f);
            prob[to_string(br.outcome.which)] += br.outcome.probability / n;
        }
        mean += avg / n;
    }
    Output o;
    o.results = {{"mean_fidelity", mean}, {"min_branch_fidelity", worst}, {"branch_probability", prob}};
    if (kind == "werner") o.results["werner_prediction"] = (2.0 * p.num("F") + 1.0) / 3.0;
    return o;
}

Output cmd_qec(const Params &p, std::uint64_t seed) {
    Ket L = logical_qubit(std::sqrt(p.num("p0")), std::sqrt(1.0 - p.num("p0")));
    json flips = json::array();
    for (int q = 0; q < 3; ++q) {
        auto out = qec3_cycle(L, {{q, PauliKind::x}});
        flips.push_back({{"qubit", q}, {"syndrome", out.syndrome}, {"overlap", std::abs(inner(out.state, L))}});
    }
    const double gt = p.num("gamma-t");
    Output o;
    o.results = {{"single_flip", flips},
                 {"hamming_min_n", quantum_hamming_min_n(p.integer("k"), p.integer("t"))}};
    Table t{{"N", "success", "std_error", "bound"}, {}};
    for (int N : {1, 2, 5, 10, 20, 50, 100}) {
        auto mc = classical_repetition_mc(gt, N, p.integer("trials"), seed);
        t.rows.push_back({static_cast<double>(N), mc.success, mc.std_error, mc.bound});
    }
    o.results["repetition"] = json::array();
    for (const auto &r : t.rows) o.results["repetition"].push_back({{"N", r[0]}, {"success", r[1]}, {"std_error", r[2]}, {"bound", r[3]}});
    o.table = std::move(t);
    return o;
}

Output cmd_iontrap_gate(const Params &p, std::uint64_t) {
    using namespace qlab::iontrap;
    IonRegister reg(2, 6);
    json table = json::array();
    for (int a : {g, r0})
        for (int b : {g, r0}) {
            Ket out = apply_cz(reg, 0, 1, reg.basis({a, b}, 0));
            const cplx amp = out[static_cast<Eigen::Index>(reg.spec().index({a, b, 0}))];
            table.push_back({{"input", std::string(a == g ? "g" : "r") + (b == g ? "g" : "r")}, {"phase", std::arg(amp)}, {"magnitude", std::abs(amp)}});
        }
    Table t{{"omega_over_nu", "gate_error"}, {}};
    for (double w : grid(p.num("omega-min"), p.num("omega-max"), p.num("omega-step")))
        t.rows.push_back({w, full_hamiltonian_check(w * p.num("nu"), p.num("nu"), p.num("eta")).gate_error});
    Output o;
    o.results = {{"truth_table", table}, {"error_scaling", json::array()}};
    for (const auto &r : t.rows) o.results["error_scaling"].push_back({{"omega_over_nu", r[0]}, {"gate_error", r[1]}});
    o.table = std::move(t);
    return o;
}

Output cmd_pushgate(const Params &p, std::uint64_t) {
    const double A = p.num("amplitude"), T = p.num("T");
    auto bump = [A, T](double t) { return A * std::pow(std::sin(kPi * t / T), 2); };
    auto r = iontrap::pushgate_phase(p.num("d"), bump, [&](double t) { return -bump(t); }, T);
    Output o;
    o.results = {{"phi", r.phi},
                 {"branch", {r.branch[0], r.branch[1], r.branch[2], r.branch[3]}},
                 {"max_displacement_ratio", r.max_displacement_ratio}};
    return o;
}

Output cmd_neutral_gate(const Params &p, std::uint64_t) {
    using namespace qlab::neutral;
    const double T = p.num("T"), x0 = p.num("x0");
    CollisionConfig c;
    c.a_s = p.num("a-s");
    c.mass = p.num("mass");
    c.a0 = p.num("a0");
    c.nu = p.num("nu");
    c.xa = [=](double t) { double s = std::sin(kPi * t / T); return -x0 + x0 * s * s; };
    c.xb = [=](double t) { double s = std::sin(kPi * t / T); return x0 - x0 * s * s; };
    c.t1 = T;
    auto r = collisional_phase(c);
    auto table = collision_gate_table(0.0, 0.0, r.phi);
    Output o;
    o.results = {{"phi", r.phi},
                 {"phi_crosscheck", r.phi_crosscheck},
                 {"adiabaticity_ratio", r.adiabaticity_ratio},
                 {"valid", r.valid},
                 {"gate_phases", table},
                 {"entangling_phase", entangling_phase(table)}};
    return o;
}

Output cmd_rydberg(const Params &p, std::uint64_t) {
    using namespace qlab::neutral;
    RydbergConfig c;
    c.u = p.integer("n") > 0 ? rydberg_u(p.integer("n"), p.num("R")) : p.num("u");
    c.omega1 = p.num("omega1");
    c.omega2 = p.num("omega2");
    c.gamma = p.num("gamma");
    auto r = rydberg_gate_sim(c);
    Output o;
    o.results = {{"u", c.u},
                 {"phase", {r.phase[0], r.phase[1], r.phase[2], r.phase[3]}},
                 {"leakage", {r.leakage[0], r.leakage[1], r.leakage[2], r.leakage[3]}},
                 {"small_phase", r.small_phase},
                 {"small_phase_estimate", kPi * c.omega2 / (2.0 * std::abs(c.u))},
                 {"max_rr_population", r.max_rr_population},
                 {"regime", to_string(r.regime)},
                 {"regime_ok", r.regime_ok}};
    return o;
}

Output cmd_cavity(const Params &p, std::uint64_t) {
    using namespace qlab::cavity;
    const double kappa = p.num("kappa");
    const auto n = static_cast<std::size_t>(p.integer("points"));
    auto g1 = symmetric_emitter_pulse(kappa, p.num("tau"), p.num("T"), n);
    auto rx = receiver_pulse_from_dark_state(g1, kappa);
    auto prop = propagate(NodeCouplings(g1, rx.g2, kappa), TransferState{}, n);
    Output o;
    o.results = {{"transfer_probability", std::norm(prop.final_state().alpha2)},
                 {"jump_probability", prop.jump_probability},
                 {"max_dark_residual", prop.max_dark_residual()}};
    Table t{{"t", "g1", "g2", "alpha1_sq", "alpha2_sq"}, {}};
    for (std::size_t i = 0; i < prop.t.size(); ++i) {
        const double ti = prop.t[i];
        t.rows.push_back({ti, g1(ti), rx.g2(ti), std::norm(prop.states[i].alpha1), std::norm(prop.states[i].alpha2)});
    }
    o.table = std::move(t);
    return o;
}

Output cmd_repeater(const Params &p, std::uint64_t) {
    using namespace qlab::repeater;
    const double L = p.num("L"), eta_s = p.num("eta-s");
    RepeaterParams rp;
    rp.p_c = p.num("p-c");
    rp.eta_s = eta_s;
    rp.eta_a = p.num("eta-a");
    rp.eta_p_prime = p.num("eta-p-prime");
    Output o;
    if (p.flag("optimize-L0")) {
        auto opt = optimize_segment_length(eta_s, L);
        rp.n = opt.exact_n;
        o.results["L0_opt_over_Latt"] = opt.L0_opt;
        o.results["T_tot_over_Tcon_log10"] = opt.log10_ratio;
        o.results["law"] = opt.law == ScalingLaw::ideal_swap ? "ideal_swap" : "lossy_swap";
        o.results["dyadic"] = {{"n", opt.exact_n}, {"L0_over_Latt", opt.exact_L0}, {"T_tot_over_Tcon_log10", opt.exact_log10_ratio}};
    } else {
        rp.n = p.integer("n");
        o.results["L0_opt_over_Latt"] = nullptr;
    }
    rp.L0 = std::ldexp(L, -rp.n);
    rp.validate();
    auto a = chain_analysis(rp);
    o.results["c_n"] = a.c_n;
    o.results["T_n_over_T0"] = a.T_n / a.T0;
    o.results["p_a"] = a.p_a;
    if (!p.flag("optimize-L0")) o.results["T_tot_over_Tcon_log10"] = a.log10_ratio;
    o.results["direct_log10"] = log10_direct(L);
    Table t{{"L_over_Latt", "log10_Ttot_repeater", "log10_Ttot_direct"}, {}};
    for (double l : grid(10.0, 100.0, 10.0)) t.rows.push_back({l, optimize_segment_length(eta_s, l).log10_ratio, log10_direct(l)});
    o.table = std::move(t);
    return o;
}

memory::ModeShape memory_shape(const std::string &name, double T) {
    using memory::ModeShape;
    if (name == "exp-decay") return ModeShape::from_function([](double t) { return std::exp(-t); }, T);
    if (name == "exp-rise") return ModeShape::from_function([](double t) { return std::exp(1.5 * t); }, T);
    if (name == "gaussian")
        return ModeShape::from_function([T](double t) { return std::exp(-0.5 * std::pow((t - 0.5 * T) / (0.25 * T), 2)); }, T);
    if (name == "sech") return ModeShape::from_function([T](double t) { return 1.0 / std::cosh(4.0 * (t - 0.3 * T) / T); }, T);
    if (name == "sin2")
        return ModeShape::from_samples(RealPulse::sample([T](double t) { return std::pow(std::sin(kPi * t / T), 2); }, 0.0, T, 4001));
    throw ConfigError("shape: expected exp-decay, exp-rise, gaussian, sech or sin2");
}

Output cmd_memory(const Params &p, std::uint64_t) {
    auto f = memory_shape(p.str("shape"), p.num("T"));
    const double k0 = p.num("kappa0");
    auto w = memory::impedance_match(f, k0);
    auto m = memory::write_map(f, w.schedule, false);
    const double kT = p.num("kappa-T") < 0.0 ? k0 : p.num("kappa-T");
    auto rt = memory::round_trip(f, k0, f.reversed(), kT);
    Output o;
    o.results = {{"M", m.M},
                 {"M_closed", w.M_closed},
                 {"absorbed", m.absorbed},
                 {"max_proportionality_error", m.max_proportionality_error},
                 {"ode_oracle_deviation", memory::impedance_match_oracle_deviation(f, w)},
                 {"round_trip_efficiency", rt.efficiency}};
    Table t{{"t", "f_in", "kappa_prime", "K_over_fin"}, {}};
    const auto &fp = f.profile();
    for (std::size_t i = 0; i < fp.size(); ++i)
        t.rows.push_back({fp.time(i), f.at(i), w.schedule.kappa.samples()[i], m.kernel.samples()[i] / f.at(i)});
    o.table = std::move(t);
    return o;
}

Output cmd_cv_teleport(const Params &p, std::uint64_t) {
    double kc = p.num("kappa-c");
    if (p.num("rho-n") > 0.0) kc = cv::kappa_c(p.num("rho-n"), p.num("lambda0"), p.num("L-a"), p.num("gamma-s"), p.num("delta"));
    const double eta = p.num("eta-t"), eta_d = p.num("eta-d");
    auto cfg = eta > 0.0 ? cv::TeleportConfig::lossy(kc, eta, eta_d) : cv::TeleportConfig{kc, kc, 0.0, eta_d};
    auto r = cv::teleport_cv(cfg, p.num("x"), p.num("p"));
    Output o;
    o.results = {{"kappa_c", kc},
                 {"r", r.r},
                 {"F_analytic", r.F_analytic},
                 {"F_oracle", r.F_oracle},
                 {"eta_t", eta},
                 {"kappa_c2_opt", eta > 0.0 ? json(cv::optimal_kappa2(eta)) : json(nullptr)},
                 {"beats_classical", cv::classical_benchmark(r.F_oracle)}};
    return o;
}

Output cmd_snr(const Params &p, std::uint64_t) {
    using namespace qlab::repeater;
    const std::string mode = p.str("geometry");
    SnrConfig c = mode == "lambda_one"   ? SnrConfig::lambda_one
                  : mode == "lambda_two" ? SnrConfig::lambda_two
                  : mode == "free_space" ? SnrConfig::free_space
                                         : throw ConfigError("geometry: expected lambda_one, lambda_two or free_space");
    SnrInputs in;
    in.N_a = p.num("N-a");
    in.g = p.num("g");
    in.kappa = p.num("kappa");
    in.gamma_s = p.num("gamma-s");
    in.rho_n = p.num("rho-n");
    in.L_a = p.num("L-a");
    in.k_s = p.num("k-s");
    Output o;
    o.results = {{"R_sn", snr(c, in)}};
    return o;
}

Output cmd_acceptance(const Params &, std::uint64_t) {
    Output o;
    o.results["criteria"] = json::array();
    bool all = true;
    for (const auto &c : acceptance::run_all()) {
        json checks = json::array();
        for (const auto &k : c.checks) checks.push_back({{"name", k.name}, {"passed", k.passed}, {"detail", k.detail}});
        o.results["criteria"].push_back(
            {{"id", c.id}, {"title", c.title}, {"passed", c.passed()}, {"seconds", c.seconds}, {"error", c.error}, {"checks", checks}});
        all = all && c.passed();
    }
    o.results["all_passed"] = all;
    return o;
}

std::vector<Command> commands() {
    return {
        {"purify", "entanglement purification map", {{"f0", 0.75, "initial Werner fidelity"}, {"rounds", 1, "purification rounds"}, {"grid-min", 0.5, "curve start"}, {"grid-max", 1.0, "curve end"}, {"grid-step", 0.01, "curve step"}}, cmd_purify},
        {"teleport", "qubit teleportation over random inputs", {{"resource", "psi_minus", "psi_minus or werner"}, {"F", 1.0, "Werner fidelity"}, {"samples", 200, "random inputs"}}, cmd_teleport},
        {"qec", "three-qubit code and repetition memory", {{"p0", 0.36, "|0_L> weight of the logical state"}, {"k", 1, "logical qubits"}, {"t", 1, "correctable errors"}, {"gamma-t", 1.0, "total decay exponent"}, {"trials", 100000, "Monte Carlo trials"}}, cmd_qec},
        {"iontrap-gate", "ion-trap controlled phase gate", {{"omega-min", 0.05, "smallest Omega/nu"}, {"omega-max", 0.2, "largest Omega/nu"}, {"omega-step", 0.05, "Omega/nu step"}, {"nu", 1.0, "trap frequency"}, {"eta", 0.1, "Lamb-Dicke parameter"}}, cmd_iontrap_gate},
        {"pushgate", "state-dependent push gate phase", {{"d", 1.0, "ion separation"}, {"amplitude", 0.05, "peak push"}, {"T", 4.0, "push duration"}}, cmd_pushgate},
        {"neutral-gate", "collisional gate with moving lattice wells", {{"a-s", 0.05, "scattering length"}, {"mass", 1.0, "atom mass"}, {"a0", 1.0, "ground-state width"}, {"nu", 10.0, "trap frequency"}, {"x0", 3.0, "initial half separation"}, {"T", 20.0, "sweep duration"}}, cmd_neutral_gate},
        {"rydberg", "dipole-blockade gate", {{"u", -100.0, "interaction shift (used when n = 0)"}, {"n", 0, "principal quantum number"}, {"R", 1e4, "separation in Bohr radii"}, {"omega1", 1.0, "Rabi frequency, atom 1"}, {"omega2", 1.0, "Rabi frequency, atom 2"}, {"gamma", 0.0, "Rydberg decay rate"}}, cmd_rydberg},
        {"cavity-transfer", "state transfer between cavity nodes", {{"kappa", 1.0, "cavity decay"}, {"tau", 1.25, "pulse width"}, {"T", 20.0, "half window"}, {"points", 4001, "time grid points"}}, cmd_cavity},
        {"repeater", "ensemble repeater scaling", {{"eta-s", 2.0 / 3.0, "swap efficiency"}, {"L", 100.0, "distance in attenuation lengths"}, {"optimize-L0", false, "optimize the segment length"}, {"n", 4, "nesting depth without optimization"}, {"p-c", 0.01, "excitation probability"}, {"eta-a", 1.0, "application detection efficiency"}, {"eta-p-prime", 1.0, "collection efficiency"}}, cmd_repeater},
        {"memory", "shaped light storage and retrieval", {{"shape", "gaussian", "exp-decay, exp-rise, gaussian, sech or sin2"}, {"T", 1.0, "window"}, {"kappa0", 1.0, "initial write rate"}, {"kappa-T", -1.0, "terminal read rate, negative reuses kappa0"}}, cmd_memory},
        {"cv-teleport", "continuous-variable teleportation of atomic ensembles", {{"kappa-c", 5.0, "coupling"}, {"eta-t", 0.0, "transmission loss"}, {"eta-d", 0.0, "detection loss"}, {"x", 0.0, "input mean x"}, {"p", 0.0, "input mean p"}, {"rho-n", 0.0, "density, m^-3; positive overrides kappa-c"}, {"lambda0", 8e-7, "wavelength, m"}, {"L-a", 0.02, "sample length, m"}, {"gamma-s", 1.0, "spontaneous rate"}, {"delta", 1.0, "detuning"}}, cmd_cv_teleport},
        {"snr", "signal-to-noise ratio", {{"geometry", "lambda_two", "lambda_one, lambda_two or free_space"}, {"N-a", 1.0, "atom number"}, {"g", 1.0, "coupling"}, {"kappa", 1.0, "cavity decay"}, {"gamma-s", 1.0, "spontaneous rate"}, {"rho-n", 0.0, "density"}, {"L-a", 0.0, "length"}, {"k-s", 0.0, "wave number"}}, cmd_snr},
        {"acceptance", "run the acceptance suite", {}, cmd_acceptance},
    };
}

// ------------------------------------------------------------------ output

void write_atomic(const std::filesystem::path &path, const std::string &body) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string());
        out << body;
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("rename to " + path.string() + ": " + ec.message());
    }
}

json load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto &[k, v] : j.items())
        if (k != "command" && k != "parameters" && k != "seed") throw ConfigError("config: unknown key '" + k + "'");
    return j;
}

struct Invocation {
    std::string config_path;
    std::string output;
    std::string format = "json";
    std::optional<std::uint64_t> seed;
    bool omit_wall_time = false;
    std::map<std::string, std::string> flags;
    std::map<std::string, bool> switches;
};

int execute(const Command &cmd, const Invocation &inv) {
    const auto t0 = std::chrono::steady_clock::now();
    json resolved = json::object();
    for (const auto &p : cmd.params) resolved[p.key] = p.def;
    std::uint64_t seed = 0;
    if (!inv.config_path.empty()) {
        json file = load_config_file(inv.config_path);
        if (file.contains("command") && file["command"] != cmd.name)
            throw ConfigError("config: command " + file["command"].dump() + " does not match " + cmd.name);
        if (file.contains("seed")) {
            if (!file["seed"].is_number_unsigned()) throw ConfigError("config: seed must be a non-negative integer");
            seed = file["seed"].get<std::uint64_t>();
        }
        if (file.contains("parameters")) {
            if (!file["parameters"].is_object()) throw ConfigError("config: parameters must be an object");
            for (const auto &[k, v] : file["parameters"].items()) {
                auto it = std::find_if(cmd.params.begin(), cmd.params.end(), [&](const Param &p) { return p.key == k; });
                if (it == cmd.params.end()) throw ConfigError("config: unknown parameter '" + k + "' for " + cmd.name);
                resolved[k] = coerce(*it, v);
            }
        }
    }
    for (const auto &p : cmd.params) {
        if (auto f = inv.flags.find(p.key); f != inv.flags.end()) resolved[p.key] = coerce(p, f->second);
        if (auto s = inv.switches.find(p.key); s != inv.switches.end() && s->second) resolved[p.key] = true;
    }
    if (inv.seed) seed = *inv.seed;
    if (inv.format != "json" && inv.format != "csv") throw ConfigError("format: expected json or csv");

    Output out;
    try {
        out = cmd.run(Params(resolved), seed);
    } catch (const ConfigError &) {
        throw;
    } catch (const InvalidArgument &e) {
        throw ConfigError(e.what());
    }

    std::string body;
    if (inv.format == "csv") {
        if (!out.table) throw ConfigError(cmd.name + " has no CSV output");
        body = to_csv(*out.table);
    } else {
        json record;
        record["config"] = {{"command", cmd.name}, {"parameters", resolved}, {"seed", seed}};
        record["results"] = out.results;
        record["provenance"] = {{"version", QLAB_VERSION}};
        if (!inv.omit_wall_time)
            record["provenance"]["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        body = record.dump(2) + "\n";
    }

    std::string target = inv.output;
    if (target.empty()) {
        const char *dir = std::getenv("QLAB_OUTPUT_DIR");
        target = dir && *dir ? (std::filesystem::path(dir) / (cmd.name + "." + inv.format)).string() : "-";
    }
    if (target == "-") {
        std::cout << body << std::flush;
        if (!std::cout) throw IoError("write to standard output failed");
    } else {
        write_atomic(target, body);
    }
    if (cmd.name == "acceptance" && !out.results.value("all_passed", false)) return kFailed;
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qlab: quantum communication and computation models"};
    app.set_version_flag("--version", QLAB_VERSION);
    app.require_subcommand(1);

    const auto cmds = commands();
    std::vector<Invocation> invs(cmds.size());
    std::vector<CLI::App *> subs;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        auto *sub = app.add_subcommand(cmds[i].name, cmds[i].help);
        auto &inv = invs[i];
        sub->add_option("--config", inv.config_path, "JSON file with command, parameters and seed");
        sub->add_option("-o,--output", inv.output, "output path, '-' for standard output");
        sub->add_option("--format", inv.format, "json or csv");
        sub->add_option("--seed", inv.seed, "random seed (default 0)");
        sub->add_flag("--omit-wall-time", inv.omit_wall_time, "leave wall time out of the record");
        for (const auto &p : cmds[i].params) {
            if (p.def.is_boolean()) {
                sub->add_flag_callback("--" + p.key, [&inv, key = p.key] { inv.switches[key] = true; }, p.help);
            } else {
                sub->add_option_function<std::string>("--" + p.key, [&inv, key = p.key](const std::string &v) { inv.flags[key] = v; },
                                                      p.help + " (default " + p.def.dump() + ")");
            }
        }
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kBadConfig;
    }

    for (std::size_t i = 0; i < cmds.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        try {
            return execute(cmds[i], invs[i]);
        } catch (const ConfigError &e) {
            std::cerr << "invalid config: " << e.what() << "\n";
            return kBadConfig;
        } catch (const IoError &e) {
            std::cerr << "I/O error: " << e.what() << "\n";
            return kIo;
        } catch (const std::exception &e) {
            std::cerr << cmds[i].name << " failed: " << e.what() << "\n";
            return kModule;
        }
    }
    return kBadConfig;
}
