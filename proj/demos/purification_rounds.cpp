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

// Iterated purification from a noisy Werner pair, with the yield per round.

#include <cstdio>

#include "qlab/qubit_protocols.hpp"

int main() {
    const double F0 = 0.6;
    auto trace = qlab::purification_iterate(F0, 12);
    double yield = 1.0;
    std::printf("round  F          p_success  pairs_left\n");
    std::printf("%5d  %.6f   -          1\n", 0, F0);
    int k = 1;
    for (const auto &r : trace.rounds) {
        yield *= 0.5 * r.p_success;
        std::printf("%5d  %.6f   %.6f   %.3e\n", k++, r.F_out, r.p_success, yield);
    }
}
