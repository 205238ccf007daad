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

// Teleportation fidelity between atomic ensembles, lossless and with
// transmission loss at the optimal second-round coupling.

#include <cstdio>

#include "qlab/cv.hpp"

int main() {
    using namespace qlab::cv;
    std::printf("kappa  r        F        F_gaussian\n");
    for (double k : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        auto res = teleport_cv({k, k}, 1.0, -0.5);
        std::printf("%5.1f  %.5f  %.5f  %.5f\n", k, squeezing_parameter(k), res.F_analytic, res.F_oracle);
    }
    std::printf("\neta_t  kappa2_opt  F        bound\n");
    for (double eta : {0.05, 0.1, 0.2, 0.5}) {
        const double k2 = optimal_kappa2(eta);
        std::printf("%5.2f  %10.4f  %.5f  %.5f\n", eta, k2, teleport_cv(TeleportConfig::lossy(k2, eta), 0, 0).F_oracle,
                    fidelity_bound(eta));
    }
}
