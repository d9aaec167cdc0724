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
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "stablelab/grid_function.hpp"
#include "stablelab/sde_engine.hpp"
#include "stablelab/spectral.hpp"

namespace stablelab::semigroup {

struct McConfig {
  std::size_t n_paths = 100000;
  std::size_t steps = 256;
  std::uint64_t seed = 0;
  std::size_t chunk_paths = 8192;
  int threads = 1;
  double stderr_ceiling = std::numeric_limits<double>::infinity();
};

/// Bounded test function with its declared sup-norm.
struct TestFunction {
  std::function<double(const double* x, int dim)> eval;
  double sup_norm = 1.0;
  std::string name = "phi";
};

TestFunction make_constant(double c);
TestFunction make_cos_mode(const std::vector<double>& xi);
/// Periodized square bump: +1 on [-width, width] (mod 2 period), -1 outside;
/// its semigroup image saturates the gradient and Hoelder rates.
TestFunction make_step_bump(double width, double period);

/// Pointwise Monte Carlo estimate of P_{s,t} phi over a set of evaluation
/// points with common random numbers across points (spatial differences are
/// low-variance).  Censored paths are dropped per point.
struct SemigroupEstimate {
  std::vector<std::vector<double>> x_grid;
  std::vector<double> value;
  std::vector<double> stderr_;
  double s = 0.0, t = 0.0;
  double phi_sup = 1.0;
  std::size_t n_paths = 0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  std::size_t censored = 0;
  bool flagged = false;  // some stderr exceeded the configured ceiling

  double max_stderr() const;
  double max_abs_value() const;
};

SemigroupEstimate estimate_semigroup(const sde::CoefficientModel& model,
                                     const noise::StableSpec& spec,
                                     const TestFunction& phi, double s, double t,
                                     const std::vector<std::vector<double>>& x_grid,
                                     const McConfig& mc);

/// Sup over probe points of the central-difference gradient magnitude of the
/// common-random-number estimate; h should resolve the kernel scale
/// (h <= 0.1 (t-s)^{1/alpha}, else h_warning is set).
struct GradientEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double h = 0.0;
  bool h_warning = false;
};
GradientEstimate gradient_sup(const sde::CoefficientModel& model,
                              const noise::StableSpec& spec,
                              const TestFunction& phi, double s, double t,
                              const std::vector<std::vector<double>>& probes,
                              double h, const McConfig& mc);

/// Grid Hoelder seminorm of an estimate taken on the full uniform grid of
/// `grid` (the estimate is periodic when coefficients and phi share the box
/// period).  For partial 1-d grids the values are windowed into the box first.
double holder_seminorm_probe(const SemigroupEstimate& est, double gamma,
                             const spectral::GridSpec& grid);

/// Jump-quadrature configuration for apply_generator.
struct QuadConfig {
  double r_split = 1.0;       // inner/tail split radius
  double panel_width = 0.5;   // log-space Gauss panel width
  double z_floor_tol = 1e-12; // truncation target for the z -> 0 cutoff
  std::size_t max_panels = 1024;
};

/// Applies the time-frozen generator to a grid function by real-space
/// quadrature: per coordinate direction, the symmetrized second difference
/// (u(x + sigma^{.i} z) + u(x - sigma^{.i} z) - 2 u(x)) integrated against
/// dz / z^{1+alpha} on (0, r_split] with log-space Gauss panels, an exact
/// per-mode tail term on (r_split, inf), plus b . grad u with the gradient
/// taken spectrally.  Never evaluates the Fourier multiplier of the symbol.
spectral::GridFunction apply_generator(const sde::CoefficientModel& model,
                                       double s, double alpha,
                                       const spectral::GridFunction& u,
                                       const QuadConfig& quad = {});

/// Backward-equation residual sup_x |P_{t0,t}phi - P_{t1,t}phi -
/// int_{t0}^{t1} L_s P_{s,t} phi ds| over the probe grid, with the integral
/// by the trapezoid rule on s_nodes+1 nodes and P_{s,t} phi estimated by MC.
struct KolmogorovResult {
  double residual = 0.0;
  double noise_floor = 0.0;   // group-splitting estimate of the MC noise
  double trapz_bound = 0.0;   // second-difference estimate of the rule error
};
KolmogorovResult kolmogorov_residual(const sde::CoefficientModel& model,
                                     const noise::StableSpec& spec,
                                     const TestFunction& phi, double t0,
                                     double t1, double t,
                                     const spectral::GridSpec& probe_grid,
                                     const McConfig& mc, const QuadConfig& quad,
                                     std::size_t s_nodes);

/// Gaussian-product kernel density estimate of a path batch's terminal law.
struct DensityEstimate {
  spectral::GridFunction density;
  double out_of_box_fraction = 0.0;
  double bandwidth = 0.0;
};

/// Bandwidth by the interquartile-range rule (heavy-tail robust):
/// 0.9 * (IQR/1.34) * n^{-1/(d+4)}, maximized over axes.
double silverman_bandwidth(const sde::PathBatch& batch, std::size_t point);

DensityEstimate density_estimate(const sde::PathBatch& batch, std::size_t point,
                                 double bandwidth,
                                 const spectral::GridSpec& grid);

}  // namespace stablelab::semigroup
