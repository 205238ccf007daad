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
#include <cstddef>
#include <string>
#include <vector>

#include "qlab/core/error.hpp"

namespace qlab {

// Ordered list of subsystem dimensions. Flattened indices are
// most-significant-first: index = sum_k i_k * stride_k, with the last
// subsystem varying fastest.
class HilbertSpec {
   public:
    static constexpr std::size_t kDefaultCap = 4096;

    HilbertSpec() = default;

    explicit HilbertSpec(std::vector<int> dims, std::size_t cap = kDefaultCap)
        : dims_(std::move(dims)), cap_(cap) {
        require(!dims_.empty(), "HilbertSpec: empty dimension list");
        total_ = 1;
        for (int d : dims_) {
            require(d >= 2, "HilbertSpec: subsystem dimension must be >= 2, got " + std::to_string(d));
            total_ *= static_cast<std::size_t>(d);
            require(total_ <= cap_, "HilbertSpec: total dimension exceeds cap " + std::to_string(cap_));
        }
        strides_.assign(dims_.size(), 1);
        for (std::size_t k = dims_.size() - 1; k > 0; --k) {
            strides_[k - 1] = strides_[k] * static_cast<std::size_t>(dims_[k]);
        }
    }

    static HilbertSpec qubits(std::size_t n, std::size_t cap = kDefaultCap) {
        return HilbertSpec(std::vector<int>(n, 2), cap);
    }

    const std::vector<int> &dims() const { return dims_; }
    std::size_t num_subsystems() const { return dims_.size(); }
    std::size_t total_dim() const { return total_; }
    std::size_t cap() const { return cap_; }
    int dim(std::size_t k) const { return dims_.at(k); }
    std::size_t stride(std::size_t k) const { return strides_.at(k); }

    std::vector<int> digits(std::size_t index) const {
        std::vector<int> out(dims_.size());
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            out[k] = static_cast<int>((index / strides_[k]) % static_cast<std::size_t>(dims_[k]));
        }
        return out;
    }

    std::size_t index(const std::vector<int> &digits) const {
        require(digits.size() == dims_.size(), "HilbertSpec: digit count mismatch");
        std::size_t idx = 0;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            require(digits[k] >= 0 && digits[k] < dims_[k], "HilbertSpec: digit out of range");
            idx += static_cast<std::size_t>(digits[k]) * strides_[k];
        }
        return idx;
    }

    // Spec of the concatenated system; the cap is the smaller of the two.
    HilbertSpec concat(const HilbertSpec &other) const {
        std::vector<int> d = dims_;
        d.insert(d.end(), other.dims_.begin(), other.dims_.end());
        return HilbertSpec(std::move(d), std::min(cap_, other.cap_));
    }

    HilbertSpec subset(const std::vector<std::size_t> &keep) const {
        std::vector<int> d;
        for (std::size_t k : keep) {
            require(k < dims_.size(), "HilbertSpec: subsystem index out of range");
            d.push_back(dims_[k]);
        }
        return HilbertSpec(std::move(d), cap_);
    }

    bool operator==(const HilbertSpec &o) const { return dims_ == o.dims_; }

   private:
    std::vector<int> dims_;
    std::vector<std::size_t> strides_;
    std::size_t total_ = 0;
    std::size_t cap_ = kDefaultCap;
};

}  // namespace qlab
