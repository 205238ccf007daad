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

#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>

#include "acceptance.hpp"

// Usage: qlab_acceptance [-v] [--known-failure ID]...
// With known failures listed, the exit status is zero only when exactly that
// set of criteria fails; every criterion is still printed as PASS or FAIL.
int main(int argc, char **argv) {
    bool verbose = false;
    std::set<int> known, failing;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "-v") {
            verbose = true;
        } else if (a == "--known-failure" && i + 1 < argc) {
            known.insert(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [-v] [--known-failure ID]...\n", argv[0]);
            return 2;
        }
    }
    int failed = 0;
    for (const auto &c : qlab::acceptance::run_all()) {
        std::printf("%s criterion %d: %s (%.2f s)\n", c.passed() ? "PASS" : "FAIL", c.id, c.title.c_str(), c.seconds);
        if (!c.error.empty()) std::printf("    error: %s\n", c.error.c_str());
        if (c.time_limit > 0.0 && c.seconds > c.time_limit) std::printf("    over time limit of %.0f s\n", c.time_limit);
        for (const auto &k : c.checks)
            if (verbose || !k.passed) std::printf("    [%s] %s: %s\n", k.passed ? "ok" : "FAIL", k.name.c_str(), k.detail.c_str());
        if (!c.passed()) {
            ++failed;
            failing.insert(c.id);
        }
    }
    std::printf("%d of 11 criteria failed\n", failed);
    if (!known.empty()) {
        if (failing != known) std::printf("failing set differs from the known failures\n");
        return failing == known ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
