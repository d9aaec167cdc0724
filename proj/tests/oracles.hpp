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

// Test-side oracles: brute-force quadratures, closed forms, and naive
// transforms kept deliberately independent of the library code paths they
// check.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracles {

/// Brute-force int_0^inf (1 - cos u) u^{-1-alpha} du by midpoint sums on a
/// fine geometric-then-uniform mesh with an analytic remainder bound.
/// `refine` scales the node counts (10 = the reference resolution).
double one_minus_cos_integral(double alpha, int refine = 10);

/// Cauchy density with scale gamma.
inline double cauchy_pdf(double x, double gamma) {
  return gamma / (M_PI * (x * x + gamma * gamma));
}

/// Cauchy CDF with scale gamma.
inline double cauchy_cdf(double x, double gamma) {
  return 0.5 + std::atan(x / gamma) / M_PI;
}

/// Empirical characteristic function (real part) of a sample at frequency xi.
double empirical_cf(const std::vector<double>& sample, double xi);

/// Sample quantile (sorted copy, linear interpolation).
double quantile(std::vector<double> sample, double p);

/// Naive O(N^2) 1-d DFT of real data; bin k holds sum_j f_j e^{-2 pi i jk/N}.
std::vector<std::complex<double>> naive_dft_1d(const std::vector<double>& f);

/// Direct quadrature of the 1-d jump-symbol integral
/// int_R (cos(xi z) - 1) |z|^{-1-alpha} dz (negative).
double symbol_quadrature_1d(double xi, double alpha);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace oracles
