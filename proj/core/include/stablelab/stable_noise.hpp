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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stablelab::noise {

/// Lévy-exponent constant c_alpha = 2 int_0^inf (1 - cos u) u^{-1-alpha} du.
///
/// With this constant the 1-d symmetric stable process with Lévy measure
/// dz/|z|^{1+alpha} has characteristic function exp(-t c_alpha |xi|^alpha),
/// so an increment over dt equals (c_alpha dt)^{1/alpha} times a standard
/// draw.  Computed by series below u=1 plus an integration-by-parts tail;
/// relative error <= 1e-10.  Throws std::domain_error outside (0,2).
double levy_constant(double alpha);

/// Stability index, dimension, and the derived exponent constant.
struct StableSpec {
  double alpha;
  int dim;
  double c_alpha;

  /// Validates alpha in (0,2), dim >= 1, and computes c_alpha.
  static StableSpec make(double alpha, int dim);

  /// Recomputes the exponent constant from scratch (invariant check).
  double recompute_constant() const { return levy_constant(alpha); }
};

/// A batch of increments: entry (k, i) = coordinate i of path k's increment.
struct NoiseMatrix {
  std::size_t n_paths = 0;
  int dim = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> values;  // row-major, n_paths x dim

  double operator()(std::size_t path, int coord) const {
    return values[path * std::size_t(dim) + std::size_t(coord)];
  }
};

/// One standard symmetric alpha-stable draw (cf exp(-|xi|^alpha)) indexed by
/// counter coordinates; the Chambers-Mallows-Stuck transform in the symmetric
/// parameterization, with the exact tan(U) branch at alpha = 1.
double standard_stable_at(double alpha, std::uint64_t seed, std::uint64_t path,
                          std::uint32_t step, std::uint32_t coord);

/// n i.i.d. standard draws; pure function of (alpha, n, seed).
std::vector<double> sample_standard_stable(double alpha, std::size_t n,
                                           std::uint64_t seed);

/// Increment matrix over a step dt: (c_alpha dt)^{1/alpha} times standard
/// draws, coordinates independent.  dt <= 0 throws std::domain_error.
NoiseMatrix sample_increments(const StableSpec& spec, double dt,
                              std::size_t n_paths, std::uint64_t seed);

}  // namespace stablelab::noise
