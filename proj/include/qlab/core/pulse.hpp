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
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/types.hpp"

namespace qlab {

// Running integral of uniformly sampled data, fourth-order accurate.
// Interior panels use h/24 (-f[i-1] + 13 f[i] + 13 f[i+1] - f[i+2]);
// the first and last panels use the one-sided variant.
template <class T>
std::vector<T> cumulative_integral(const std::vector<T> &f, double h) {
    const std::size_t n = f.size();
    std::vector<T> out(n, T(0));
    if (n < 2) return out;
    if (n < 4) {
        for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        return out;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        T panel;
        if (i == 0) {
            panel = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
        } else if (i + 2 == n) {
            panel = h / 24.0 * (9.0 * f[i + 1] + 19.0 * f[i] - 5.0 * f[i - 1] + f[i - 2]);
        } else {
            panel = h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
        }
        out[i + 1] = out[i] + panel;
    }
    return out;
}

enum class Interp { linear, cubic };

// Sampled function of time on a uniform grid. Evaluates to zero outside
// [t_begin, t_end].
template <class T>
class PulseProfile {
   public:
    PulseProfile() = default;

    PulseProfile(double t0, double dt, std::vector<T> samples, Interp rule = Interp::cubic)
        : t0_(t0), dt_(dt), s_(std::move(samples)), rule_(rule) {
        require(dt_ > 0.0, "PulseProfile: grid step must be positive");
        require(s_.size() >= 2, "PulseProfile: need at least two samples");
        if (rule_ == Interp::cubic) require(s_.size() >= 4, "PulseProfile: cubic rule needs four samples");
    }

    template <class F>
    static PulseProfile sample(F f, double t0, double t1, std::size_t n, Interp rule = Interp::cubic) {
        require(n >= 2 && t1 > t0, "PulseProfile::sample: bad grid");
        double dt = (t1 - t0) / static_cast<double>(n - 1);
        std::vector<T> s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<T>(f(t0 + dt * static_cast<double>(i)));
        return PulseProfile(t0, dt, std::move(s), rule);
    }

    double t_begin() const { return t0_; }
    double t_end() const { return t0_ + dt_ * static_cast<double>(s_.size() - 1); }
    double dt() const { return dt_; }
    std::size_t size() const { return s_.size(); }
    double time(std::size_t i) const { return t0_ + dt_ * static_cast<double>(i); }
    const std::vector<T> &samples() const { return s_; }
    Interp rule() const { return rule_; }

    T operator()(double t) const { return eval(t, false); }
    T derivative(double t) const { return eval(t, true); }

    // g(t) = f(t_begin + t_end - t) on the same window.
    PulseProfile reversed() const {
        std::vector<T> r(s_.rbegin(), s_.rend());
        return PulseProfile(t0_, dt_, std::move(r), rule_);
    }

    std::vector<T> cumulative() const { return cumulative_integral(s_, dt_); }
    T integral() const { return cumulative().back(); }

    template <class F>
    auto map(F f) const {
        using U = decltype(f(s_[0]));
        std::vector<U> out;
        out.reserve(s_.size());
        for (const auto &v : s_) out.push_back(f(v));
        return PulseProfile<U>(t0_, dt_, std::move(out), rule_);
    }

   private:
    T eval(double t, bool deriv) const {
        const double te = t_end();
        const double slack = 1e-12 * std::max(1.0, std::abs(te - t0_));
        if (t < t0_ - slack || t > te + slack) return T(0);
        const double x = std::clamp((t - t0_) / dt_, 0.0, static_cast<double>(s_.size() - 1));
        const auto last = static_cast<std::ptrdiff_t>(s_.size()) - 1;
        auto i = std::min(static_cast<std::ptrdiff_t>(x), last - 1);
        if (rule_ == Interp::linear) {
            const double u = x - static_cast<double>(i);
            const T a = s_[static_cast<std::size_t>(i)];
            const T b = s_[static_cast<std::size_t>(i + 1)];
            return deriv ? (b - a) / dt_ : a + u * (b - a);
        }
        // Lagrange cubic through four neighbouring samples.
        std::ptrdiff_t j0 = std::clamp<std::ptrdiff_t>(i - 1, 0, last - 3);
        const double u = x - static_cast<double>(j0);
        T out(0);
        for (int a = 0; a < 4; ++a) {
            double w = 0.0;
            if (!deriv) {
                w = 1.0;
                for (int b = 0; b < 4; ++b) {
                    if (b != a) w *= (u - b) / static_cast<double>(a - b);
                }
            } else {
                for (int c = 0; c < 4; ++c) {
                    if (c == a) continue;
                    double term = 1.0 / static_cast<double>(a - c);
                    for (int b = 0; b < 4; ++b) {
                        if (b != a && b != c) term *= (u - b) / static_cast<double>(a - b);
                    }
                    w += term;
                }
                w /= dt_;
            }
            out += w * s_[static_cast<std::size_t>(j0 + a)];
        }
        return out;
    }

    double t0_ = 0.0;
    double dt_ = 1.0;
    std::vector<T> s_;
    Interp rule_ = Interp::cubic;
};

using RealPulse = PulseProfile<double>;
using ComplexPulse = PulseProfile<cplx>;

}  // namespace qlab
