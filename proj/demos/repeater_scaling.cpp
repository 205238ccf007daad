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

// Entanglement distribution time versus distance for an ensemble repeater
// chain and for direct transmission.

#include <cstdio>

#include "qlab/repeater.hpp"

int main() {
    using namespace qlab::repeater;
    std::printf("L/Latt  L0_opt  log10(T/Tcon)  direct  law\n");
    for (double eta_s : {1.0, 2.0 / 3.0}) {
        for (double L = 20.0; L <= 100.0; L += 20.0) {
            auto o = optimize_segment_length(eta_s, L);
            std::printf("%6.0f  %6.3f  %13.3f  %6.2f  %s\n", L, o.L0_opt, o.log10_ratio, log10_direct(L),
                        o.law == ScalingLaw::ideal_swap ? "ideal swap" : "lossy swap");
        }
    }
}
