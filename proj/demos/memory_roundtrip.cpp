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

// Stores a Gaussian pulse in an ensemble memory and reads it back
// time-reversed, for a range of initial write rates.

#include <cmath>
#include <cstdio>

#include "qlab/light_memory.hpp"

int main() {
    using namespace qlab::memory;
    auto f = ModeShape::from_function([](double t) { return std::exp(-0.5 * std::pow((t - 0.5) / 0.15, 2)); }, 1.0);
    std::printf("kappa0   M (left in input)  round trip\n");
    for (double k0 : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
        auto w = impedance_match(f, k0);
        auto rt = round_trip(f, k0, f.reversed(), k0);
        std::printf("%7.1f  %.6e       %.6f\n", k0, w.M_closed, rt.efficiency);
    }
}
