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

#include <array>
#include <cmath>
#include <cstddef>

namespace stablelab {

/// C-infinity step built from exp(-1/x): 0 at s<=0, 1 at s>=1, monotone between.
inline double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

/// 8-point Gauss-Legendre nodes/weights on [-1,1].
struct GaussLegendre8 {
  static constexpr std::array<double, 8> nodes = {
      -0.9602898564975362, -0.7966664774136267, -0.5255324099163290,
      -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
      0.7966664774136267,  0.9602898564975362};
  static constexpr std::array<double, 8> weights = {
      0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
      0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
      0.2223810344533745, 0.1012285362903763};
};

/// Integrates f over [a,b] with composite 8-point Gauss-Legendre panels.
template <class F>
double integrate_panels(F&& f, double a, double b, std::size_t panels) {
  const double h = (b - a) / double(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * double(p);
    const double mid = lo + 0.5 * h;
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
      acc += GaussLegendre8::weights[i] * f(mid + 0.5 * h * GaussLegendre8::nodes[i]);
    }
    total += 0.5 * h * acc;
  }
  return total;
}

/// Oscillatory tails int_y^inf cos(w) w^{-m-alpha} dw and the sine companion,
/// by repeated integration by parts until the power decays fast enough for a
/// plain panel rule to finish the job.
///
/// cos recursion: I_c(m) = -sin(y) y^{-m-alpha} + (m+alpha) I_s(m+1)
/// sin recursion: I_s(m) =  cos(y) y^{-m-alpha} - (m+alpha) I_c(m+1)
double cosine_tail(double y, double alpha, int m = 1);
double sine_tail(double y, double alpha, int m = 1);

/// int_y^inf (cos(w) - 1) w^{-1-alpha} dw for any y > 0, alpha in (0,2):
/// boundary recursion for y >= 1, series around 0 otherwise (cancellation-free).
double stable_tail_integral(double y, double alpha);

}  // namespace stablelab
