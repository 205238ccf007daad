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
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qlab/core/error.hpp"
#include "qlab/core/state.hpp"
#include "qlab/core/types.hpp"

namespace qlab {

struct EigResult {
    RVector values;  // ascending
    CMatrix vectors;  // columns, orthonormal
};

inline EigResult hermitian_eig(const CMatrix &a) {
    require(a.rows() == a.cols(), "hermitian_eig: matrix not square");
    require(a.allFinite(), "hermitian_eig: non-finite entries");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    if (es.info() != Eigen::Success) throw NumericalError("hermitian_eig: solver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

// M = U * diag(s) * V, s descending. V is returned already adjointed.
struct SvdResult {
    CMatrix U;
    RVector singular;
    CMatrix V;
};

inline SvdResult svd(const CMatrix &m) {
    require(m.allFinite(), "svd: non-finite entries");
    Eigen::JacobiSVD<CMatrix> s(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {s.matrixU(), s.singularValues(), s.matrixV().adjoint()};
}

// exp(-i H t) for Hermitian H.
inline CMatrix expm_hermitian(const CMatrix &h, double t) {
    auto e = hermitian_eig(h);
    CVector phases(e.values.size());
    for (Eigen::Index k = 0; k < e.values.size(); ++k) phases(k) = std::exp(-kI * e.values(k) * t);
    return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

inline CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline CVector kron(const CVector &a, const CVector &b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

inline Ket tensor(const std::vector<Ket> &parts) {
    require(!parts.empty(), "tensor: no parts");
    HilbertSpec spec = parts[0].spec();
    CVector v = parts[0].amplitudes();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        spec = spec.concat(parts[k].spec());
        v = kron(v, parts[k].amplitudes());
    }
    return Ket(spec, v, false);
}

inline Operator tensor(const std::vector<Operator> &parts) {
    require(!parts.empty(), "tensor: no parts");
    HilbertSpec spec = parts[0].spec();
    CMatrix m = parts[0].matrix();
    bool unitary = parts[0].tag() == OpTag::unitary;
    bool hermitian = parts[0].tag() == OpTag::hermitian;
    for (std::size_t k = 1; k < parts.size(); ++k) {
        spec = spec.concat(parts[k].spec());
        m = kron(m, parts[k].matrix());
        unitary = unitary && parts[k].tag() == OpTag::unitary;
        hermitian = hermitian && parts[k].tag() == OpTag::hermitian;
    }
    OpTag tag = unitary ? OpTag::unitary : (hermitian ? OpTag::hermitian : OpTag::general);
    return Operator(spec, m, tag);
}

inline DensityOp tensor(const std::vector<DensityOp> &parts) {
    require(!parts.empty(), "tensor: no parts");
    HilbertSpec spec = parts[0].spec();
    CMatrix m = parts[0].matrix();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        spec = spec.concat(parts[k].spec());
        m = kron(m, parts[k].matrix());
    }
    return DensityOp(spec, m);
}

using TensorFactor = std::variant<Ket, Operator>;
using TensorResult = std::variant<Ket, Operator>;

// Runtime-typed entry point; all parts must be of one kind.
inline TensorResult tensor_any(const std::vector<TensorFactor> &parts) {
    require(!parts.empty(), "tensor: no parts");
    std::size_t kind = parts[0].index();
    for (const auto &p : parts) {
        if (p.index() != kind) throw InvalidArgument("tensor: mixed kinds");
    }
    if (kind == 0) {
        std::vector<Ket> ks;
        for (const auto &p : parts) ks.push_back(std::get<Ket>(p));
        return tensor(ks);
    }
    std::vector<Operator> os;
    for (const auto &p : parts) os.push_back(std::get<Operator>(p));
    return tensor(os);
}

namespace detail {

inline std::vector<std::size_t> checked_sorted(const HilbertSpec &spec, std::vector<std::size_t> keep) {
    require(!keep.empty(), "partial_trace: keep set is empty");
    std::sort(keep.begin(), keep.end());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        require(keep[k] < spec.num_subsystems(), "partial_trace: subsystem index out of range");
        require(k == 0 || keep[k] != keep[k - 1], "partial_trace: duplicate subsystem index");
    }
    return keep;
}

}  // namespace detail

// Reduced matrix on the kept subsystems (sorted ascending).
inline CMatrix partial_trace_matrix(const HilbertSpec &spec, const CMatrix &m, std::vector<std::size_t> keep) {
    keep = detail::checked_sorted(spec, keep);
    HilbertSpec kept = spec.subset(keep);
    std::vector<bool> is_kept(spec.num_subsystems(), false);
    for (auto k : keep) is_kept[k] = true;

    const auto n = static_cast<Eigen::Index>(spec.total_dim());
    std::vector<std::size_t> kidx(static_cast<std::size_t>(n)), tidx(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        auto dg = spec.digits(static_cast<std::size_t>(i));
        std::size_t ki = 0, ti = 0;
        for (std::size_t s = 0; s < dg.size(); ++s) {
            auto d = static_cast<std::size_t>(spec.dim(s));
            if (is_kept[s]) {
                ki = ki * d + static_cast<std::size_t>(dg[s]);
            } else {
                ti = ti * d + static_cast<std::size_t>(dg[s]);
            }
        }
        kidx[static_cast<std::size_t>(i)] = ki;
        tidx[static_cast<std::size_t>(i)] = ti;
    }
    const auto nk = static_cast<Eigen::Index>(kept.total_dim());
    CMatrix out = CMatrix::Zero(nk, nk);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (tidx[static_cast<std::size_t>(i)] == tidx[static_cast<std::size_t>(j)]) {
                out(static_cast<Eigen::Index>(kidx[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(kidx[static_cast<std::size_t>(j)])) += m(i, j);
            }
        }
    }
    return out;
}

inline DensityOp partial_trace(const DensityOp &rho, const std::vector<std::size_t> &keep) {
    auto sorted = detail::checked_sorted(rho.spec(), keep);
    CMatrix r = partial_trace_matrix(rho.spec(), rho.matrix(), sorted);
    return DensityOp(rho.spec().subset(sorted), 0.5 * (r + r.adjoint()));
}

inline CMatrix partial_transpose_matrix(const HilbertSpec &spec, const CMatrix &m, std::size_t subsystem) {
    require(subsystem < spec.num_subsystems(), "partial_transpose: subsystem index out of range");
    const auto n = static_cast<Eigen::Index>(spec.total_dim());
    const auto stride = static_cast<Eigen::Index>(spec.stride(subsystem));
    const auto d = static_cast<Eigen::Index>(spec.dim(subsystem));
    CMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index di = (i / stride) % d;
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::Index dj = (j / stride) % d;
            // swap the named digit between row and column
            out(i + (dj - di) * stride, j + (di - dj) * stride) = m(i, j);
        }
    }
    return out;
}

inline Operator partial_transpose(const DensityOp &rho, std::size_t subsystem) {
    return Operator(rho.spec(), partial_transpose_matrix(rho.spec(), rho.matrix(), subsystem), OpTag::hermitian);
}

inline Ket evolve(const Operator &h, double t, const Ket &psi) {
    if (h.tag() != OpTag::hermitian && !is_hermitian(h.matrix())) {
        throw InvalidArgument("evolve: Hamiltonian is not Hermitian");
    }
    require(std::isfinite(t), "evolve: non-finite duration");
    require(h.spec() == psi.spec(), "evolve: spec mismatch");
    CVector out = expm_hermitian(h.matrix(), t) * psi.amplitudes();
    return Ket(psi.spec(), out, false);
}

// von Neumann entropy in bits.
inline double von_neumann_entropy(const CMatrix &rho) {
    auto e = hermitian_eig(rho);
    double s = 0.0;
    for (Eigen::Index k = 0; k < e.values.size(); ++k) {
        double p = e.values(k);
        if (p > 1e-300) s -= p * std::log2(p);
    }
    return s;
}

inline double von_neumann_entropy(const DensityOp &rho) { return von_neumann_entropy(rho.matrix()); }

// Embeds a single-subsystem operator at position k.
inline CMatrix embed(const HilbertSpec &spec, std::size_t k, const CMatrix &local) {
    require(k < spec.num_subsystems(), "embed: subsystem index out of range");
    require(local.rows() == spec.dim(k), "embed: local dimension mismatch");
    CMatrix out = CMatrix::Identity(1, 1);
    for (std::size_t s = 0; s < spec.num_subsystems(); ++s) {
        out = kron(out, s == k ? local : CMatrix::Identity(spec.dim(s), spec.dim(s)));
    }
    return out;
}

}  // namespace qlab
