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

#include <cstddef>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "qlab/core/error.hpp"
#include "qlab/core/types.hpp"

namespace qlab::ode {

struct Tolerances {
    double abs = 1e-12;
    double rel = 1e-10;
};

// Adaptive Dormand-Prince integration of y' = f(y, t) for a state held as
// std::vector<T>, T being double or std::complex<double>. Rhs signature:
// void(const std::vector<T>& y, std::vector<T>& dydt, double t).
// Returns y at every point of `times` (times[0] is the initial time).
template <class T, class Rhs>
std::vector<std::vector<T>> integrate_on_grid(Rhs rhs, std::vector<T> y0, const std::vector<double> &times,
                                              Tolerances tol = {}, double dt0 = 0.0) {
    namespace odeint = boost::numeric::odeint;
    require(times.size() >= 2, "ode: need at least two output times");
    using State = std::vector<T>;
    std::vector<State> out;
    out.reserve(times.size());
    if (dt0 <= 0.0) dt0 = (times[1] - times[0]) * 0.1;
    auto stepper = odeint::make_dense_output(tol.abs, tol.rel, odeint::runge_kutta_dopri5<State>());
    auto obs = [&](const State &y, double) { out.push_back(y); };
    try {
        odeint::integrate_times(stepper, rhs, y0, times.begin(), times.end(), dt0, obs);
    } catch (const std::exception &e) {
        throw NumericalError(std::string("ode: integration failed: ") + e.what());
    }
    if (out.size() != times.size()) throw NumericalError("ode: integrator returned an incomplete trajectory");
    return out;
}

template <class T, class Rhs>
std::vector<T> integrate(Rhs rhs, std::vector<T> y0, double t0, double t1, Tolerances tol = {}, double dt0 = 0.0) {
    auto traj = integrate_on_grid<T>(rhs, std::move(y0), {t0, t1}, tol, dt0);
    return traj.back();
}

inline std::vector<cplx> to_std(const CVector &v) { return {v.data(), v.data() + v.size()}; }

inline CVector to_eigen(const std::vector<cplx> &v) {
    return Eigen::Map<const CVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// i dpsi/dt = H(t) psi, H given as a callable t -> CMatrix.
template <class HFn>
CVector schrodinger(HFn hamiltonian, const CVector &psi0, double t0, double t1, Tolerances tol = {},
                    double dt0 = 0.0) {
    auto rhs = [&](const std::vector<cplx> &y, std::vector<cplx> &dy, double t) {
        Eigen::Map<const CVector> ym(y.data(), static_cast<Eigen::Index>(y.size()));
        Eigen::Map<CVector> dym(dy.data(), static_cast<Eigen::Index>(dy.size()));
        dym.noalias() = -kI * (hamiltonian(t) * ym);
    };
    return to_eigen(integrate<cplx>(rhs, to_std(psi0), t0, t1, tol, dt0));
}

}  // namespace qlab::ode
