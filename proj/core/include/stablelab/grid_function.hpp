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
#include <string>
#include <vector>

namespace stablelab::spectral {

/// Grid geometry: the periodic box [-L, L)^d sampled with n nodes per axis.
struct GridSpec {
  int dim = 1;
  std::size_t n = 0;
  double box = 0.0;
};

/// Real values on a uniform periodic grid over [-L, L)^d; the common currency
/// of all FFT-based analysis.  n must be a power of two.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(int dim, std::size_t n, double box);
  explicit GridFunction(const GridSpec& g) : GridFunction(g.dim, g.n, g.box) {}

  /// Takes ownership of `values` (size n^dim); rejects non-finite entries.
  static GridFunction from_values(int dim, std::size_t n, double box,
                                  std::vector<double> values);

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  double box() const { return box_; }
  GridSpec grid() const { return {dim_, n_, box_}; }
  std::size_t size() const { return values_.size(); }
  double dx() const { return 2.0 * box_ / double(n_); }
  double cell_volume() const;

  /// Node coordinate along one axis: x_i = -L + i * dx.
  double coord(std::size_t i) const { return -box_ + dx() * double(i); }

  /// Fills `x` (dim doubles) with the coordinates of flat index `idx`.
  void point(std::size_t idx, double* x) const;

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double mean() const;
  double max_abs() const;
  double min_value() const;

  /// Volume-normalized L^p norm ((2L)^{-d} int |f|^p)^{1/p}; p = inf -> max.
  double lp_norm(double p) const;

  /// Plain Riemann integral sum(f) * dx^d.
  double integral() const;

  /// Flat binary: 32-byte header (magic "SLGRIDFN", u32 version, u32 dim,
  /// u64 n, f64 box) followed by n^dim little-endian f64 values.
  void write_binary(const std::string& path) const;
  static GridFunction read_binary(const std::string& path);

  /// CSV export: one row per node, columns x1..xd,value.
  void write_csv(const std::string& path) const;

 private:
  int dim_ = 1;
  std::size_t n_ = 0;
  double box_ = 0.0;
  std::vector<double> values_;
};

/// Pointwise a*f + b*g on matching grids.
GridFunction lin_comb(double a, const GridFunction& f, double b,
                      const GridFunction& g);

/// Smooth radial window: identically 1 inside r0_frac*L, 0 outside r1_frac*L.
/// Returns the windowed function and the removed fraction of the L1 mass.
struct WindowedFunction {
  GridFunction values;
  double removed_fraction;
};
WindowedFunction apply_radial_window(const GridFunction& f,
                                     double r0_frac = 0.8,
                                     double r1_frac = 0.9);

}  // namespace stablelab::spectral
