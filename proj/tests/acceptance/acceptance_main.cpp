/*
   Copyright 2026 the stablelab authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// Acceptance gate: runs every criterion at its pinned tolerance with seed 42,
// re-runs with a different thread count, and prints one line per criterion.

#include <cstdio>
#include <cstdlib>

#include "stablelab/harness.hpp"

int main(int argc, char** argv) {
  const char* out_dir = argc > 1 ? argv[1] : "acceptance-out";
  try {
    auto outcome =
        stablelab::harness::run_all_acceptance(42, 8, out_dir, true);
    bool all = true;
    for (const auto& v : outcome.verdicts) {
      std::printf("%s criterion %2d: %s (%s)\n", v.pass ? "PASS" : "FAIL",
                  v.criterion, v.name.c_str(), v.details.c_str());
      all = all && v.pass;
    }
    std::printf("acceptance total: %.1f s, outputs in %s\n",
                outcome.runtime_seconds, out_dir);
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
    return EXIT_FAILURE;
  }
}
