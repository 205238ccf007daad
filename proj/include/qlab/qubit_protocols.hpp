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

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "qlab/core/error.hpp"
#include "qlab/core/linalg.hpp"
#include "qlab/core/state.hpp"
#include "qlab/entanglement.hpp"

namespace qlab {

// ---------------------------------------------------------------- teleport

struct BellOutcome {
    BellState which = BellState::psi_minus;
    double probability = 0.0;
};

// Correction Bob applies for each of Alice's outcomes, given a singlet
// resource: psi- -> 1, psi+ -> sigma_z, phi- -> sigma_x, phi+ -> sigma_z sigma_x.
inline CMatrix teleport_correction(BellState b) {
    switch (b) {
        case BellState::psi_minus: return pauli::I();
        case BellState::psi_plus: return pauli::Z();
        case BellState::phi_minus: return pauli::X();
        case BellState::phi_plus: return pauli::Z() * pauli::X();
    }
    return pauli::I();
}

struct TeleportBranch {
    BellOutcome outcome;
    CMatrix uncorrected;  // normalized state on (reference..., particle 3)
    CMatrix corrected;
};

struct TeleportResult {
    BellOutcome outcome;
    DensityOp output;  // on (reference..., particle 3)
};

namespace detail {

// Input may carry reference systems; particle 1 is its last subsystem.
inline std::vector<TeleportBranch> teleport_branches(const DensityOp &input, const DensityOp &resource) {
    const auto &in_dims = input.spec().dims();
    require(in_dims.back() == 2, "teleport: particle 1 must be a qubit");
    if (resource.spec().dims() != std::vector<int>{2, 2}) throw InvalidArgument("teleport: malformed resource");
    const Eigen::Index r = static_cast<Eigen::Index>(input.spec().total_dim() / 2);

    CMatrix full = kron(input.matrix(), resource.matrix());  // (ref, 1, 2, 3)
    std::vector<TeleportBranch> out;
    for (BellState b : kBellStates) {
        const CVector bv = bell(b).amplitudes();
        // P = 1_ref x <b|_{12} x 1_3 : (r*8) -> (r*2)
        CMatrix p = CMatrix::Zero(r * 2, r * 8);
        for (Eigen::Index s = 0; s < r; ++s) {
            for (int ij = 0; ij < 4; ++ij) {
                for (int k = 0; k < 2; ++k) p(s * 2 + k, s * 8 + ij * 2 + k) = std::conj(bv(ij));
            }
        }
        CMatrix proj = p * full * p.adjoint();
        double prob = proj.trace().real();
        TeleportBranch br;
        br.outcome = {b, prob};
        br.uncorrected = prob > 0 ? CMatrix(proj / prob) : proj;
        CMatrix c = kron(CMatrix::Identity(r, r), teleport_correction(b));
        br.corrected = c * br.uncorrected * c.adjoint();
        out.push_back(std::move(br));
    }
    return out;
}

}  // namespace detail

inline std::vector<TeleportBranch> teleport_all(const DensityOp &input, const DensityOp &resource) {
    return detail::teleport_branches(input, resource);
}

// Forced branch when `outcome` is given, otherwise sampled with `seed`.
inline TeleportResult teleport(const DensityOp &input, const DensityOp &resource,
                               std::optional<BellState> outcome = std::nullopt, std::uint64_t seed = 0) {
    auto branches = detail::teleport_branches(input, resource);
    std::size_t pick = 0;
    if (outcome) {
        for (std::size_t k = 0; k < branches.size(); ++k) {
            if (branches[k].outcome.which == *outcome) pick = k;
        }
    } else {
        std::mt19937_64 rng(seed);
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng), acc = 0.0;
        pick = branches.size() - 1;
        for (std::size_t k = 0; k < branches.size(); ++k) {
            acc += branches[k].outcome.probability;
            if (u < acc) {
                pick = k;
                break;
            }
        }
    }
    const auto &b = branches[pick];
    if (b.outcome.probability <= 0.0) throw InvalidArgument("teleport: requested outcome has zero probability");
    CMatrix m = 0.5 * (b.corrected + b.corrected.adjoint());
    return {b.outcome, DensityOp(input.spec(), m)};
}

inline TeleportResult teleport(const Ket &input, const DensityOp &resource,
                               std::optional<BellState> outcome = std::nullopt, std::uint64_t seed = 0) {
    return teleport(DensityOp(input), resource, outcome, seed);
}

// Outcome-averaged state of particle 3 before Bob learns the result.
inline CMatrix teleport_unconditioned(const DensityOp &input, const DensityOp &resource) {
    auto branches = detail::teleport_branches(input, resource);
    CMatrix acc = CMatrix::Zero(branches[0].uncorrected.rows(), branches[0].uncorrected.cols());
    for (const auto &b : branches) acc += b.outcome.probability * b.uncorrected;
    return acc;
}

// ---------------------------------------------------------- purification

struct PurifyStep {
    double F_in = 0.0;
    double F_out = 0.0;
    double p_success = 0.0;
};

struct PurificationTrace {
    std::vector<PurifyStep> rounds;
};

struct NoisyGateModel {
    double p_gate = 0.0;
    double p_meas = 0.0;

    NoisyGateModel(double pg = 0.0, double pm = 0.0) : p_gate(pg), p_meas(pm) {
        require(p_gate >= 0.0 && p_gate <= 1.0, "NoisyGateModel: p_gate outside [0,1]");
        require(p_meas >= 0.0 && p_meas <= 1.0, "NoisyGateModel: p_meas outside [0,1]");
    }
};

inline double purify_success_probability(double F) {
    return F * F + 2.0 * F * (1.0 - F) / 3.0 + 5.0 * (1.0 - F) * (1.0 - F) / 9.0;
}

inline PurifyStep purify_step_analytic(double F) {
    require(F >= 0.0 && F <= 1.0, "purify_step_analytic: F outside [0,1]");
    double p = purify_success_probability(F);
    double num = F * F + (1.0 - F) * (1.0 - F) / 9.0;
    return {F, num / p, p};
}

namespace detail {

// Operator on 4 qubits applying `local` to qubit q.
inline CMatrix on_qubit(int q, const CMatrix &local, int n = 4) {
    return embed(HilbertSpec::qubits(static_cast<std::size_t>(n)), static_cast<std::size_t>(q), local);
}

inline CMatrix cnot(int control, int target, int n = 4) {
    const Eigen::Index dim = Eigen::Index(1) << n;
    CMatrix u = CMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        Eigen::Index j = i;
        if ((i >> (n - 1 - control)) & 1) j ^= Eigen::Index(1) << (n - 1 - target);
        u(j, i) = 1.0;
    }
    return u;
}

inline CMatrix two_qubit_depolarize(const CMatrix &rho, int a, int b, double p, int n = 4) {
    if (p == 0.0) return rho;
    const CMatrix paulis[4] = {pauli::I(), pauli::X(), pauli::Y(), pauli::Z()};
    CMatrix acc = CMatrix::Zero(rho.rows(), rho.cols());
    for (const auto &pa : paulis) {
        for (const auto &pb : paulis) {
            CMatrix u = on_qubit(a, pa, n) * on_qubit(b, pb, n);
            acc += u * rho * u.adjoint();
        }
    }
    return (1.0 - p) * rho + p * acc / 16.0;
}

}  // namespace detail

struct PurifyResult {
    DensityOp kept;  // pair A1 B1
    double p_success = 0.0;
};

// Two pairs ordered A1 B1 A2 B2. Alice rotates with sigma_y, both sides
// apply CNOT (pair 1 controls pair 2), the target pair is measured in z and
// the source pair kept on equal results; Alice's sigma_y is undone and the
// kept pair depolarized onto the Werner family when `twirl` is set.
inline PurifyResult purify_step_simulated(const DensityOp &rho, std::optional<NoisyGateModel> noise = std::nullopt,
                                          bool twirl = true) {
    if (rho.spec().dims() != std::vector<int>{2, 2, 2, 2}) {
        throw InvalidArgument("purify_step_simulated: expected two qubit pairs (4 qubits)");
    }
    NoisyGateModel nm = noise.value_or(NoisyGateModel{});
    CMatrix r = rho.matrix();
    CMatrix ya = detail::on_qubit(0, pauli::Y()) * detail::on_qubit(2, pauli::Y());
    r = ya * r * ya.adjoint();
    CMatrix c1 = detail::cnot(0, 2);
    r = c1 * r * c1.adjoint();
    r = detail::two_qubit_depolarize(r, 0, 2, nm.p_gate);
    CMatrix c2 = detail::cnot(1, 3);
    r = c2 * r * c2.adjoint();
    r = detail::two_qubit_depolarize(r, 1, 3, nm.p_gate);

    const double pm = nm.p_meas;
    CMatrix kept = CMatrix::Zero(4, 4);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            double w = a == b ? (1 - pm) * (1 - pm) + pm * pm : 2 * pm * (1 - pm);
            if (w == 0.0) continue;
            CMatrix proj = CMatrix::Zero(4, 16);
            for (int s = 0; s < 4; ++s) proj(s, s * 4 + a * 2 + b) = 1.0;
            kept += w * proj * r * proj.adjoint();
        }
    }
    double p = kept.trace().real();
    if (p <= 0.0) throw NumericalError("purify_step_simulated: zero success probability");
    kept /= p;
    CMatrix y1 = kron(pauli::Y(), pauli::I());
    kept = y1 * kept * y1.adjoint();
    DensityOp out(HilbertSpec::qubits(2), 0.5 * (kept + kept.adjoint()));
    if (twirl) out = twirl_exact(out);
    return {out, p};
}

inline PurifyStep purify_werner_simulated(double F, std::optional<NoisyGateModel> noise = std::nullopt) {
    DensityOp w = werner(F);
    auto res = purify_step_simulated(tensor(std::vector<DensityOp>{w, w}), noise);
    return {F, fidelity(res.kept, bell(BellState::psi_minus)), res.p_success};
}

inline PurificationTrace purification_curve(const std::vector<double> &grid) {
    require(!grid.empty(), "purification_curve: empty grid");
    PurificationTrace t;
    for (double F : grid) {
        require(F > 0.0 && F <= 1.0, "purification_curve: grid point outside (0,1]");
        t.rounds.push_back(purify_step_analytic(F));
    }
    return t;
}

// Cobweb iteration F -> F' -> F'' ...
inline PurificationTrace purification_iterate(double F0, int rounds,
                                              std::optional<NoisyGateModel> noise = std::nullopt) {
    require(rounds >= 0, "purification_iterate: negative round count");
    PurificationTrace t;
    double F = F0;
    for (int k = 0; k < rounds; ++k) {
        PurifyStep s = noise ? purify_werner_simulated(F, noise) : purify_step_analytic(F);
        t.rounds.push_back(s);
        F = s.F_out;
    }
    return t;
}

struct FixedPoints {
    double F_min = 0.0;
    double F_max = 0.0;
};

// Fixed points of the noisy map inside (1/2, 1): F_min is the purification
// threshold, F_max the reachable limit. Empty when noise closes the window.
inline std::optional<FixedPoints> noisy_fixed_points(const NoisyGateModel &noise, double tol = 1e-8) {
    auto g = [&](double F) { return purify_werner_simulated(F, noise).F_out - F; };
    double best = 0.5, gbest = -1.0;
    const int n = 200;
    for (int i = 1; i < n; ++i) {
        double F = 0.5 + 0.5 * i / n;
        double v = g(F);
        if (v > gbest) {
            gbest = v;
            best = F;
        }
    }
    if (gbest <= 0.0) return std::nullopt;
    auto stop = [tol](double a, double b) { return std::abs(b - a) < tol; };
    FixedPoints fp;
    if (g(0.5) < 0.0) {
        auto lo = boost::math::tools::bisect(g, 0.5, best, stop);
        fp.F_min = 0.5 * (lo.first + lo.second);
    } else {
        fp.F_min = 0.5;
    }
    auto hi = boost::math::tools::bisect(g, best, 1.0, stop);
    fp.F_max = 0.5 * (hi.first + hi.second);
    return fp;
}

// ------------------------------------------------------ error correction

enum class PauliKind { x, y, z };

struct QecError {
    int qubit = 0;  // 0, 1, 2
    PauliKind kind = PauliKind::x;
};

struct QecOutcome {
    Ket state;
    int syndrome = 0;  // 0: none detected, k: flip on qubit k-1 corrected
};

inline Ket logical_qubit(cplx alpha, cplx beta) {
    CVector v = CVector::Zero(8);
    v(0) = alpha;
    v(7) = beta;
    return Ket(HilbertSpec::qubits(3), v);
}

// Encode, apply errors, run the projector cascade P, P1, P2 and correct.
inline QecOutcome qec3_cycle(const Ket &logical, const std::vector<QecError> &errors) {
    require(logical.spec() == HilbertSpec::qubits(3), "qec3_cycle: expected a 3-qubit state");
    CVector psi = logical.amplitudes();
    for (const auto &e : errors) {
        require(e.qubit >= 0 && e.qubit < 3, "qec3_cycle: qubit index out of range");
        if (e.kind != PauliKind::x) throw InvalidArgument("qec3_cycle: only sigma_x errors are corrected by this code");
        psi = detail::on_qubit(e.qubit, pauli::X(), 3) * psi;
    }
    auto projector = [](int a, int b) {
        CMatrix p = CMatrix::Zero(8, 8);
        p(a, a) = 1.0;
        p(b, b) = 1.0;
        return p;
    };
    const CMatrix P = projector(0b000, 0b111);
    const CMatrix P1 = projector(0b100, 0b011);
    const CMatrix P2 = projector(0b010, 0b101);
    int syndrome = 0;
    // The corrupted state lies in exactly one of the four subspaces, so the
    // cascade is deterministic.
    if ((P * psi).norm() > 0.5) {
        syndrome = 0;
    } else if ((P1 * psi).norm() > 0.5) {
        syndrome = 1;
    } else if ((P2 * psi).norm() > 0.5) {
        syndrome = 2;
    } else {
        syndrome = 3;
    }
    if (syndrome > 0) psi = detail::on_qubit(syndrome - 1, pauli::X(), 3) * psi;
    return {Ket(HilbertSpec::qubits(3), psi), syndrome};
}

// Smallest n with 2^k sum_{l<=t} 3^l C(n,l) <= 2^n.
inline int quantum_hamming_min_n(int k, int t) {
    require(k >= 1, "quantum_hamming_min_n: k must be >= 1");
    require(t >= 1, "quantum_hamming_min_n: t must be >= 1");
    using boost::multiprecision::cpp_int;
    for (int n = 1; n < 4096; ++n) {
        cpp_int lhs = 0, binom = 1, pow3 = 1;
        for (int l = 0; l <= t && l <= n; ++l) {
            if (l > 0) {
                binom = binom * (n - l + 1) / l;
                pow3 *= 3;
            }
            lhs += pow3 * binom;
        }
        lhs <<= k;
        cpp_int rhs = cpp_int(1) << n;
        if (lhs <= rhs) return n;
    }
    throw NumericalError("quantum_hamming_min_n: no n found");
}

inline bool quantum_hamming_holds(int k, int t, int n) {
    using boost::multiprecision::cpp_int;
    cpp_int lhs = 0, binom = 1, pow3 = 1;
    for (int l = 0; l <= t && l <= n; ++l) {
        if (l > 0) {
            binom = binom * (n - l + 1) / l;
            pow3 *= 3;
        }
        lhs += pow3 * binom;
    }
    lhs <<= k;
    return lhs <= (cpp_int(1) << n);
}

// Three-bit majority vote survives one flip per interval: 1 - 3P^2 + 2P^3.
inline double repetition_interval_success(double P) { return 1.0 - 3.0 * P * P + 2.0 * P * P * P; }

inline double repetition_bound(double gamma_t, int N) {
    require(N >= 1, "repetition_bound: N must be >= 1");
    double x = gamma_t / N;
    return std::pow(1.0 - 3.0 * x * x, N);
}

struct RepetitionMc {
    double success = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    std::size_t trials = 0;
};

// Each of N intervals flips every bit with probability 1 - exp(-gamma t/N),
// then a majority vote resets the three bits. Success means the final
// logical value is the initial one.
inline RepetitionMc classical_repetition_mc(double gamma_t, int N, std::size_t trials, std::uint64_t seed = 0) {
    require(trials >= 1, "classical_repetition_mc: trials must be >= 1");
    require(N >= 1, "classical_repetition_mc: N must be >= 1");
    require(gamma_t >= 0.0, "classical_repetition_mc: negative gamma t");
    const double P = 1.0 - std::exp(-gamma_t / N);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t ok = 0;
    for (std::size_t tr = 0; tr < trials; ++tr) {
        bool logical = false;
        for (int k = 0; k < N; ++k) {
            int flips = (u(rng) < P) + (u(rng) < P) + (u(rng) < P);
            if (flips >= 2) logical = !logical;
        }
        ok += logical ? 0 : 1;
    }
    RepetitionMc r;
    r.trials = trials;
    r.success = static_cast<double>(ok) / static_cast<double>(trials);
    r.std_error = std::sqrt(std::max(r.success * (1.0 - r.success), 1.0 / trials) / static_cast<double>(trials));
    r.bound = repetition_bound(gamma_t, N);
    return r;
}

}  // namespace qlab
