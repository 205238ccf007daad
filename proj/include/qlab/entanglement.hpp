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
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/QR>

#include "qlab/core/error.hpp"
#include "qlab/core/linalg.hpp"
#include "qlab/core/state.hpp"

namespace qlab {

enum class BellState { psi_minus, psi_plus, phi_minus, phi_plus };

inline Ket bell(BellState which) {
    const double s = 1.0 / std::sqrt(2.0);
    CVector v = CVector::Zero(4);
    switch (which) {
        case BellState::psi_minus: v(1) = s; v(2) = -s; break;
        case BellState::psi_plus: v(1) = s; v(2) = s; break;
        case BellState::phi_minus: v(0) = s; v(3) = -s; break;
        case BellState::phi_plus: v(0) = s; v(3) = s; break;
    }
    return Ket(HilbertSpec::qubits(2), v, false);
}

inline const char *to_string(BellState b) {
    switch (b) {
        case BellState::psi_minus: return "psi-";
        case BellState::psi_plus: return "psi+";
        case BellState::phi_minus: return "phi-";
        case BellState::phi_plus: return "phi+";
    }
    return "?";
}

inline constexpr BellState kBellStates[] = {BellState::psi_minus, BellState::psi_plus, BellState::phi_minus,
                                            BellState::phi_plus};

// (|000> - |111>)/sqrt(2)
inline Ket ghz() {
    CVector v = CVector::Zero(8);
    v(0) = 1.0;
    v(7) = -1.0;
    return Ket(HilbertSpec::qubits(3), v);
}

// (|001> + |010> + |100>)/sqrt(3)
inline Ket w_state() {
    CVector v = CVector::Zero(8);
    v(1) = v(2) = v(4) = 1.0;
    return Ket(HilbertSpec::qubits(3), v);
}

// pi_AB |i,j> = |j,i> on C^d x C^d.
inline CMatrix swap_operator(int d) {
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    CMatrix p = CMatrix::Zero(n, n);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) p(j * d + i, i * d + j) = 1.0;
    }
    return p;
}

struct WernerParams {
    double F = 1.0;
    int d = 2;

    WernerParams(double f, int dim = 2) : F(f), d(dim) {
        require(F >= 0.0 && F <= 1.0, "WernerParams: F outside [0,1]");
        require(d >= 2, "WernerParams: d must be >= 2");
    }
};

// rho_F = F P_a/d_a + (1-F) P_s/d_s. For qubits P_a = |psi-><psi-|, so F is
// also the singlet overlap.
inline DensityOp werner(const WernerParams &w) {
    const int d = w.d;
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    CMatrix id = CMatrix::Identity(n, n);
    CMatrix pi = swap_operator(d);
    CMatrix ps = 0.5 * (id + pi);
    CMatrix pa = 0.5 * (id - pi);
    const double ds = d * (d + 1) / 2.0;
    const double da = d * (d - 1) / 2.0;
    CMatrix rho = w.F * pa / da + (1.0 - w.F) * ps / ds;
    return DensityOp(HilbertSpec({d, d}), rho);
}

inline DensityOp werner(double F, int d = 2) { return werner(WernerParams(F, d)); }

// F = tr(P_a rho) for a state on C^d x C^d.
inline double werner_parameter(const DensityOp &rho) {
    const auto &dims = rho.spec().dims();
    require(dims.size() == 2 && dims[0] == dims[1], "werner_parameter: need C^d x C^d");
    const int d = dims[0];
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    CMatrix pa = 0.5 * (CMatrix::Identity(n, n) - swap_operator(d));
    return (pa * rho.matrix()).trace().real();
}

inline double fidelity(const DensityOp &rho, const Ket &phi) {
    require(rho.spec() == phi.spec(), "fidelity: spec mismatch");
    double f = phi.amplitudes().dot(rho.matrix() * phi.amplitudes()).real();
    return std::clamp(f, 0.0, 1.0);
}

struct SchmidtDecomposition {
    std::vector<double> coefficients;  // descending
    std::vector<Ket> basisA;
    std::vector<Ket> basisB;

    Ket reconstruct() const {
        HilbertSpec spec = basisA.at(0).spec().concat(basisB.at(0).spec());
        CVector v = CVector::Zero(static_cast<Eigen::Index>(spec.total_dim()));
        for (std::size_t k = 0; k < coefficients.size(); ++k) {
            v += coefficients[k] * kron(basisA[k].amplitudes(), basisB[k].amplitudes());
        }
        return Ket(spec, v);
    }
};

namespace detail {

inline Eigen::Index first_nonzero(const CVector &v, double tol = 1e-12) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > tol) return i;
    }
    return v.size();
}

}  // namespace detail

inline SchmidtDecomposition schmidt(const Ket &psi, double drop_tol = 1e-12) {
    const auto &dims = psi.spec().dims();
    if (dims.size() != 2) throw InvalidArgument("schmidt: state is not bipartite");
    const Eigen::Index da = dims[0], db = dims[1];
    CMatrix c(da, db);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < db; ++j) c(i, j) = psi[i * db + j];
    }
    auto s = svd(c);

    struct Term {
        double d;
        CVector u, v;
    };
    std::vector<Term> terms;
    for (Eigen::Index k = 0; k < s.singular.size(); ++k) {
        if (s.singular(k) <= drop_tol) continue;
        CVector u = s.U.col(k);
        CVector v = s.V.row(k).transpose();
        // Phase fix: first nonzero amplitude of u real positive.
        Eigen::Index i0 = detail::first_nonzero(u);
        cplx ph = u(i0) / std::abs(u(i0));
        u /= ph;
        v *= ph;
        terms.push_back({s.singular(k), u, v});
    }
    std::stable_sort(terms.begin(), terms.end(), [](const Term &a, const Term &b) {
        if (std::abs(a.d - b.d) > 1e-12) return a.d > b.d;
        Eigen::Index ia = detail::first_nonzero(a.u), ib = detail::first_nonzero(b.u);
        if (ia != ib) return ia < ib;
        return std::abs(a.u(ia)) > std::abs(b.u(ib));
    });

    SchmidtDecomposition out;
    HilbertSpec sa({dims[0]}), sb({dims[1]});
    for (auto &t : terms) {
        out.coefficients.push_back(t.d);
        out.basisA.emplace_back(sa, t.u);
        out.basisB.emplace_back(sb, t.v);
    }
    return out;
}

// -sum p log2 p with 0 log 0 = 0.
inline double shannon_bits(const std::vector<double> &p) {
    double s = 0.0;
    for (double x : p) {
        if (x > 0.0) s -= x * std::log2(x);
    }
    return s;
}

inline double entanglement_entropy(const Ket &psi) {
    auto sd = schmidt(psi, 0.0);
    std::vector<double> p;
    for (double d : sd.coefficients) p.push_back(d * d);
    return shannon_bits(p);
}

enum class PptVerdict { entangled, ppt_undecided };

inline double min_partial_transpose_eigenvalue(const DensityOp &rho) {
    require(rho.spec().num_subsystems() == 2, "is_entangled_ppt: state is not bipartite");
    return hermitian_eig(partial_transpose(rho, 0).matrix()).values(0);
}

// For d_A d_B <= 6 the undecided branch means separable.
inline PptVerdict is_entangled_ppt(const DensityOp &rho, double tol = 1e-9) {
    return min_partial_transpose_eigenvalue(rho) < -tol ? PptVerdict::entangled : PptVerdict::ppt_undecided;
}

inline bool ppt_is_conclusive(const HilbertSpec &spec) { return spec.total_dim() <= 6; }

// Haar-random unitary: QR of a complex Ginibre matrix with R's diagonal
// phases moved into Q.
template <class Rng>
CMatrix haar_unitary(int d, Rng &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix z(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) z(i, j) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
    }
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < d; ++k) {
        cplx rk = r(k, k);
        q.col(k) *= rk / std::abs(rk);
    }
    return q;
}

// Finite-sample local depolarization: average of (U x U) rho (U x U)^dag
// over Haar-random U.
inline DensityOp twirl(const DensityOp &rho, std::size_t samples, std::uint64_t seed) {
    const auto &dims = rho.spec().dims();
    require(dims.size() == 2 && dims[0] == dims[1], "twirl: need C^d x C^d");
    require(samples >= 1, "twirl: samples must be >= 1");
    std::mt19937_64 rng(seed);
    const Eigen::Index n = rho.matrix().rows();
    CMatrix acc = CMatrix::Zero(n, n);
    for (std::size_t s = 0; s < samples; ++s) {
        CMatrix u = haar_unitary(dims[0], rng);
        CMatrix uu = kron(u, u);
        acc += uu * rho.matrix() * uu.adjoint();
    }
    acc /= static_cast<double>(samples);
    return DensityOp(rho.spec(), 0.5 * (acc + acc.adjoint()));
}

// Infinite-sample limit of twirl: projection onto the Werner family.
inline DensityOp twirl_exact(const DensityOp &rho) {
    return werner(std::clamp(werner_parameter(rho), 0.0, 1.0), rho.spec().dim(0));
}

using NamedState = std::variant<Ket, DensityOp>;

// Names: psi-, psi+, phi-, phi+, ghz, w, werner (uses F).
inline NamedState make_state(const std::string &name, double F = 1.0) {
    if (name == "psi-") return bell(BellState::psi_minus);
    if (name == "psi+") return bell(BellState::psi_plus);
    if (name == "phi-") return bell(BellState::phi_minus);
    if (name == "phi+") return bell(BellState::phi_plus);
    if (name == "ghz") return ghz();
    if (name == "w") return w_state();
    if (name == "werner") return werner(F);
    throw InvalidArgument("make_state: unknown state name '" + name + "'");
}

}  // namespace qlab
