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
#include <vector>

#include "stablelab/fft.hpp"
#include "stablelab/grid_function.hpp"

namespace stablelab::spectral {

/// Dyadic Littlewood-Paley profiles on the integer frequency lattice.
///
/// The cutoff phi_0 is radial and C-infinity: identically 1 for |k| <= 1 and 0
/// for |k| >= 2, built from the exp(-1/x) smooth step.  Ring profiles
/// phi_j(k) = phi_0(2^-j k) - phi_0(2^{1-j} k) for j >= 1, so partial sums
/// telescope exactly and supp phi_j sits in the annulus 2^{j-1} <= |k| <= 2^{j+1}.
/// Frequencies are indexed in lattice units (k = xi L / pi); the highest
/// resolvable ring is j_max = log2(n) - 2.
class DyadicDecomposition {
 public:
  DyadicDecomposition(int dim, std::size_t n);

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  int j_max() const { return j_max_; }

  /// phi_0 scaled to level k: phi_0(2^{-level} kappa).
  static double cutoff(double kappa, int level = 0);

  /// Ring profile phi_j at lattice radius kappa (j = 0 gives the ball).
  static double ring(int j, double kappa);

 private:
  int dim_;
  std::size_t n_;
  int j_max_;
};

/// Block operator R_j f: multiply the spectrum by phi_j and synthesize.
/// Throws std::out_of_range for j outside [0, j_max].
GridFunction block(int j, const GridFunction& f, const DyadicDecomposition& dec);

/// All blocks 0..j_max in one spectral pass (one forward FFT).
std::vector<GridFunction> all_blocks(const GridFunction& f,
                                     const DyadicDecomposition& dec);

/// Besov norm (sum_j 2^{sqj} ||R_j f||_p^q)^{1/q}, truncated at j_max;
/// L^p volume-normalized over the box, q = inf takes the max over j.
double besov_norm(const GridFunction& f, double s, double p, double q,
                  const DyadicDecomposition& dec);

/// Grid Hoelder norm: sup-norm plus the seminorm over dyadic axis lags
/// sup |f(x+h)-f(x)| / |h|^gamma; for gamma in (1,2) the gradient sup-norm
/// plus the (gamma-1)-seminorm of the gradient.
double holder_norm(const GridFunction& f, double gamma);

/// Seminorm part only (no zeroth-order term).
double holder_seminorm(const GridFunction& f, double gamma);

/// Mollification by a smooth bump of radius eps (unit mass on the grid, so
/// the mean is preserved exactly).  Requires 0 < eps < box.
GridFunction mollify(const GridFunction& f, double eps);

/// Measured commutator norm ||R_j(f g) - f R_j g||_p (volume-normalized).
double commutator_decay(const GridFunction& f, const GridFunction& g, int j,
                        double p, const DyadicDecomposition& dec);

/// Synthetic function with exact Hoelder regularity s: lacunary cosine sum
/// sum_k 2^{-s k} cos(2^k pi x_a / L + theta_k) over all axes, normalized to
/// sup-norm ~1.  Phases derive deterministically from `seed`.
GridFunction make_weierstrass(const GridSpec& g, double s, int levels,
                              std::uint64_t seed);

/// Uniform random values in [-1,1] per node, counter-seeded (rough test data).
GridFunction make_rough_noise(const GridSpec& g, std::uint64_t seed);

/// Square wave sign(sin(freq pi x_1 / L)): bounded and rough but with
/// uniformly bounded frequency blocks (a B^0 test function).
GridFunction make_square_wave(const GridSpec& g, int freq);

}  // namespace stablelab::spectral
