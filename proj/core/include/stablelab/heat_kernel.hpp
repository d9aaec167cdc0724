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
#include <string>
#include <vector>

#include "stablelab/grid_function.hpp"
#include "stablelab/spectral.hpp"

namespace stablelab::heat {

/// Characteristic exponent of the frozen-coefficient operator: for constant
/// sigma the jump generator acts in Fourier space as multiplication by
/// psi(xi) = -c_alpha * sum_i |(sigma^T xi)_i|^alpha.
struct FrozenSymbol {
  double alpha = 1.0;
  double c_alpha = 0.0;
  int dim = 1;
  std::vector<double> sigma;  // d x d row-major
  double s_min = 1.0;         // smallest singular value of sigma
  double s_max = 1.0;

  double psi(const double* xi) const;

  /// Scalar convenience for d = 1.
  double psi1(double xi) const { return psi(&xi); }
};

/// Builds the symbol, rejecting matrices that are numerically singular
/// (no uniform ellipticity).  alpha must lie in (0,2).
FrozenSymbol frozen_symbol(const std::vector<double>& sigma, int dim,
                           double alpha);

struct KernelOptions {
  double decay_tol = 1e-14;     // required symbol decay at the Nyquist sphere
  double alias_rel_tol = 3e-7;  // periodization alias target relative to peak
  std::size_t max_oversample = 64;
};

/// Heat-kernel slice p_{s,t} on a requested grid.
///
/// Synthesis samples exp((t-s) psi) on an internally enlarged box (same node
/// spacing, power-of-two oversample factor) and restricts, so periodization
/// alias is pushed below alias_rel_tol * peak; the achieved estimate is
/// reported.  Throws if the symbol has not decayed below decay_tol at the
/// Nyquist sphere (the error suggests a sufficient n).
class KernelSlice {
 public:
  double s = 0.0, t = 0.0;
  FrozenSymbol sym;
  spectral::GridFunction density;  // restriction to the requested grid
  double tail_mass = 0.0;          // 1 - mass inside the requested box
  double alias_estimate = 0.0;     // estimated folded tail density
  std::size_t oversample = 1;

  /// |grad^n p| on the requested grid (n = 0,1,2): Euclidean magnitude of the
  /// gradient, Frobenius magnitude of the Hessian; derivatives are spectral.
  spectral::GridFunction derivative_magnitude(int order) const;

  /// Binary grid dump plus a JSON metadata sidecar (<path>.json).
  void save(const std::string& path) const;

  // synthesis state (symbol samples on the oversampled grid)
  std::size_t n_syn = 0;
  double box_syn = 0.0;
  std::vector<double> symbol_exp;  // exp((t-s) psi(xi_k)) per synthesis bin
};

KernelSlice kernel(const FrozenSymbol& sym, double s, double t,
                   const spectral::GridSpec& grid,
                   const KernelOptions& opts = {});

/// Windowed moment m_beta(|grad^n p|) = int |x|^beta |grad^n p| over the box
/// with the smooth radial window; beta must lie in [0, alpha) or the moment
/// diverges.  tail_bound collects the windowed-out part plus (for n = 0) a
/// heavy-tail estimate of the out-of-box mass.
struct MomentValue {
  double value = 0.0;
  double tail_bound = 0.0;
};
MomentValue moment_integral(const KernelSlice& slice, int n, double beta);

/// m_beta(|grad^n R_j p|) over the box for dyadic block j.
double block_kernel_decay(const KernelSlice& slice, int j, int n, double beta,
                          const spectral::DyadicDecomposition& dec);

/// Fitted lower bound for -psi: min over a log-spaced xi-grid of
/// -psi(xi) / (|xi|^2 ^ |xi|^alpha), with the minimizing xi reported.
struct StarFit {
  double c2 = 0.0;
  std::vector<double> argmin_xi;
};
StarFit star_constant(const FrozenSymbol& sym, double rho_min = 1e-2,
                      double rho_max = 1e3, std::size_t n_rho = 49,
                      std::size_t n_dir = 128, std::uint64_t dir_seed = 7);

/// Duhamel evolution u(t) = P_{0,t} phi + int_0^t P_{s,t} f(s) ds on a time
/// grid starting at 0; the time integral is the composite trapezoid rule and
/// the propagator acts spectrally.  `forcing` is either empty (f = 0) or one
/// grid function per time node.
std::vector<spectral::GridFunction> duhamel_solve(
    const FrozenSymbol& sym, const spectral::GridFunction& phi,
    const std::vector<spectral::GridFunction>& forcing,
    const std::vector<double>& t_grid);

/// Piecewise-constant-in-time symbols: syms[k] drives interval
/// [t_grid[k], t_grid[k+1]); the propagator is the per-mode product of
/// interval exponentials.
std::vector<spectral::GridFunction> duhamel_solve(
    const std::vector<FrozenSymbol>& syms, const spectral::GridFunction& phi,
    const std::vector<spectral::GridFunction>& forcing,
    const std::vector<double>& t_grid);

/// Weak-form residual of the evolution against a test function:
/// |<u(T),psi> - <phi,psi> - int <u(s), L psi> ds - int <f(s), psi> ds|
/// with L applied spectrally and trapezoid time integrals.
double duhamel_weak_residual(const FrozenSymbol& sym,
                             const std::vector<spectral::GridFunction>& u,
                             const spectral::GridFunction& phi,
                             const std::vector<spectral::GridFunction>& forcing,
                             const spectral::GridFunction& test,
                             const std::vector<double>& t_grid);

}  // namespace stablelab::heat
