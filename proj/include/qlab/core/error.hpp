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

#include <stdexcept>
#include <string>

namespace qlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input: wrong dimensions, out-of-range parameters, unknown names.
struct InvalidArgument : Error {
    using Error::Error;
};

// Integrator failure, truncation leakage, singular solves.
struct NumericalError : Error {
    using Error::Error;
};

inline void require(bool cond, const std::string &msg) {
    if (!cond) {
        throw InvalidArgument(msg);
    }
}

}  // namespace qlab
