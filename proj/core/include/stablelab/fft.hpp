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

#include <complex>
#include <vector>

#include "stablelab/grid_function.hpp"

namespace stablelab::spectral {

/// In-place d-dimensional complex DFT on an n^dim cube (sign -1 forward,
/// +1 backward, both unnormalized).  Thread-safe; plans are cached.
void fft_inplace(int dim, std::size_t n, std::complex<double>* data, int sign);

/// Signed frequency index for FFT bin k of an n-point axis: k <= n/2 ? k : k-n.
inline long signed_index(std::size_t k, std::size_t n) {
  return k <= n / 2 ? long(k) : long(k) - long(n);
}

/// Trigonometric-polynomial view of a real grid function.
///
/// Coefficients c_k = DFT(f)_k / n^d, so f(x_j) = sum_k c_k e^{i xi_k (x_j + L)}
/// with xi_k = (pi/L) k_signed; the interpolant extends f off the grid.
class SpectralField {
 public:
  static SpectralField analyze(const GridFunction& f);

  GridFunction synthesize() const;

  /// Band-limited evaluation at an arbitrary point (O(n^dim) per call).
  double eval(const double* x) const;

  /// Shifted function u(. + v), computed by phase modulation (exact for the
  /// trig interpolant).
  GridFunction shifted(const double* v) const;

  /// Applies a real multiplier m(xi) given per FFT bin and synthesizes.
  GridFunction apply_multiplier(const std::vector<double>& m) const;

  /// Gradient components by spectral differentiation (Nyquist mode zeroed).
  std::vector<GridFunction> gradient() const;

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  double box() const { return box_; }
  const std::vector<std::complex<double>>& coeff() const { return coeff_; }
  std::vector<std::complex<double>>& coeff() { return coeff_; }

  /// Fills `xi` (dim doubles) with the physical frequency of flat bin `idx`.
  void frequency(std::size_t idx, double* xi) const;

 private:
  int dim_ = 1;
  std::size_t n_ = 0;
  double box_ = 0.0;
  std::vector<std::complex<double>> coeff_;
};

}  // namespace stablelab::spectral
