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

#include <string>
#include <utility>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/hilbert.hpp"
#include "qlab/core/types.hpp"

namespace qlab {

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = -1e-10;
inline constexpr double kUnitaryTol = 1e-9;
inline constexpr double kNormTol = 1e-10;

inline bool is_hermitian(const CMatrix &m, double tol = kHermitianTol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) < tol;
}

inline bool is_unitary(const CMatrix &m, double tol = kUnitaryTol) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())) < tol;
}

class Ket {
   public:
    Ket() = default;

    // Normalizes the amplitudes unless normalize is false, in which case the
    // norm must already be 1.
    Ket(HilbertSpec spec, CVector amps, bool normalize = true)
        : spec_(std::move(spec)), amps_(std::move(amps)) {
        require(static_cast<std::size_t>(amps_.size()) == spec_.total_dim(),
                "Ket: amplitude count does not match total dimension");
        double n = amps_.norm();
        if (normalize) {
            if (n == 0.0) throw InvalidArgument("Ket: zero vector cannot be normalized");
            amps_ /= n;
        } else if (std::abs(n - 1.0) > kNormTol) {
            throw InvalidArgument("Ket: amplitudes not normalized");
        }
    }

    static Ket basis(const HilbertSpec &spec, const std::vector<int> &digits) {
        CVector v = CVector::Zero(static_cast<Eigen::Index>(spec.total_dim()));
        v(static_cast<Eigen::Index>(spec.index(digits))) = 1.0;
        return Ket(spec, std::move(v), false);
    }

    static Ket qubit(cplx a, cplx b) {
        CVector v(2);
        v << a, b;
        return Ket(HilbertSpec({2}), std::move(v));
    }

    const HilbertSpec &spec() const { return spec_; }
    const CVector &amplitudes() const { return amps_; }
    cplx operator[](Eigen::Index i) const { return amps_(i); }
    Eigen::Index size() const { return amps_.size(); }

    CMatrix projector() const { return amps_ * amps_.adjoint(); }

   private:
    HilbertSpec spec_;
    CVector amps_;
};

inline cplx inner(const Ket &a, const Ket &b) { return a.amplitudes().dot(b.amplitudes()); }

class DensityOp {
   public:
    DensityOp() = default;

    DensityOp(HilbertSpec spec, CMatrix m) : spec_(std::move(spec)), m_(std::move(m)) {
        auto n = static_cast<Eigen::Index>(spec_.total_dim());
        require(m_.rows() == n && m_.cols() == n, "DensityOp: matrix size does not match spec");
        if (!is_hermitian(m_)) throw InvalidArgument("DensityOp: matrix not Hermitian");
        if (std::abs(m_.trace() - cplx(1.0)) > kTraceTol) throw InvalidArgument("DensityOp: trace not 1");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < kPositivityTol) {
            throw InvalidArgument("DensityOp: negative eigenvalue");
        }
    }

    explicit DensityOp(const Ket &k) : spec_(k.spec()), m_(k.projector()) {}

    static DensityOp maximally_mixed(const HilbertSpec &spec) {
        auto n = static_cast<Eigen::Index>(spec.total_dim());
        return DensityOp(spec, CMatrix::Identity(n, n) / static_cast<double>(n));
    }

    const HilbertSpec &spec() const { return spec_; }
    const CMatrix &matrix() const { return m_; }
    cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

   private:
    HilbertSpec spec_;
    CMatrix m_;
};

enum class OpTag { unitary, hermitian, general };

class Operator {
   public:
    Operator() = default;

    Operator(HilbertSpec spec, CMatrix m, OpTag tag = OpTag::general)
        : spec_(std::move(spec)), m_(std::move(m)), tag_(tag) {
        auto n = static_cast<Eigen::Index>(spec_.total_dim());
        require(m_.rows() == n && m_.cols() == n, "Operator: matrix size does not match spec");
        if (tag_ == OpTag::unitary && !is_unitary(m_)) throw InvalidArgument("Operator: matrix not unitary");
        if (tag_ == OpTag::hermitian && !is_hermitian(m_)) {
            throw InvalidArgument("Operator: matrix not Hermitian");
        }
    }

    static Operator identity(const HilbertSpec &spec) {
        auto n = static_cast<Eigen::Index>(spec.total_dim());
        return Operator(spec, CMatrix::Identity(n, n), OpTag::unitary);
    }

    const HilbertSpec &spec() const { return spec_; }
    const CMatrix &matrix() const { return m_; }
    OpTag tag() const { return tag_; }

    Ket apply(const Ket &k) const {
        require(k.spec() == spec_, "Operator::apply: spec mismatch");
        return Ket(spec_, m_ * k.amplitudes(), tag_ != OpTag::unitary);
    }

    DensityOp conjugate(const DensityOp &rho) const {
        require(rho.spec() == spec_, "Operator::conjugate: spec mismatch");
        CMatrix out = m_ * rho.matrix() * m_.adjoint();
        return DensityOp(spec_, 0.5 * (out + out.adjoint()));
    }

    Operator operator*(const Operator &o) const {
        require(o.spec_ == spec_, "Operator product: spec mismatch");
        OpTag t = (tag_ == OpTag::unitary && o.tag_ == OpTag::unitary) ? OpTag::unitary : OpTag::general;
        return Operator(spec_, m_ * o.m_, t);
    }

    Operator adjoint() const { return Operator(spec_, m_.adjoint(), tag_); }

   private:
    HilbertSpec spec_;
    CMatrix m_;
    OpTag tag_ = OpTag::general;
};

namespace pauli {

inline CMatrix I() { return CMatrix::Identity(2, 2); }

inline CMatrix X() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

// Sign convention: sigma_z = |1><1| - |0><0| and
// sigma_y = -i(|1><0| - |0><1|), so both differ from the textbook
// matrices by an overall sign.
inline CMatrix Y() {
    CMatrix m(2, 2);
    m << 0, kI, -kI, 0;
    return m;
}

inline CMatrix Z() {
    CMatrix m(2, 2);
    m << -1, 0, 0, 1;
    return m;
}

}  // namespace pauli

inline Operator qubit_op(const CMatrix &m, OpTag tag = OpTag::unitary) {
    return Operator(HilbertSpec({2}), m, tag);
}

}  // namespace qlab
