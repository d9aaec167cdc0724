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
#include <string>
#include <vector>

#include "stablelab/stable_noise.hpp"

namespace stablelab::sde {

/// Evaluable coefficients sigma(t,x), b(t,x) with their declared constants:
/// c0 ellipticity band [1/c0, c0] for the singular values of sigma, c1 the
/// Lipschitz bound of sigma in x, (beta, c3) the Hoelder data of b.
struct CoefficientModel {
  int dim = 1;
  /// Writes sigma(t,x): d*d row-major, or just the d diagonal entries when
  /// sigma_diagonal is set.
  std::function<void(double t, const double* x, double* out)> sigma;
  /// Writes b(t,x) (d entries); empty function means b == 0.
  std::function<void(double t, const double* x, double* out)> drift;
  bool sigma_diagonal = false;

  double c0 = 1.0;
  double c1 = 0.0;
  double beta = 1.0;
  double c3 = 0.0;
  std::string name = "custom";

  bool has_drift() const { return bool(drift); }
};

/// Built-in presets: "identity", "diag-sine", "rotation-mix", "holder-drift".
/// Parameters (all optional):
///   diag-sine:    amp (default 0.3), freq (default 1)
///   rotation-mix: amp (0.3), twist (0.5); needs dim >= 2
///   holder-drift: base sigma amp (0.3), drift_beta (0.7), drift_amp (0.5),
///                 levels (10), seed (1)
struct PresetParams {
  double amp = 0.3;
  double freq = 1.0;
  double twist = 0.5;
  double drift_beta = 0.7;
  double drift_amp = 0.5;
  int levels = 10;
  std::uint64_t seed = 1;
};
CoefficientModel make_preset(const std::string& name, int dim,
                             const PresetParams& params = {});

/// Tabulated coefficients on a uniform periodic grid over [-L,L)^d with
/// multilinear interpolation; `sigma_tables` holds d*d (or d, when diagonal)
/// tables of size n^d, `drift_tables` holds d or none.
CoefficientModel make_tabulated(int dim, std::size_t n, double box,
                                std::vector<std::vector<double>> sigma_tables,
                                std::vector<std::vector<double>> drift_tables,
                                bool diagonal, double c0, double c1,
                                double beta, double c3);

/// Numerical check of the standing assumptions over a probe set.
struct AssumptionReport {
  double min_singular = 0.0;
  double max_singular = 0.0;
  double max_sigma_quotient = 0.0;  // |sigma(t,x)-sigma(t,y)| / |x-y|
  double max_drift_quotient = 0.0;  // |b(t,x)-b(t,y)| / |x-y|^beta
  double max_drift_abs = 0.0;
  bool ellipticity_ok = false;
  bool sigma_lipschitz_ok = false;
  bool drift_holder_ok = false;
  bool drift_bound_ok = false;
  bool pass = false;
  std::string message;  // names the offending probe point on failure
};
AssumptionReport validate_assumptions(
    const CoefficientModel& model,
    const std::vector<std::pair<double, std::vector<double>>>& probes);

/// Terminal values of an Euler ensemble started from each initial point.
struct PathBatch {
  double s = 0.0, t = 0.0;
  std::size_t steps = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  int dim = 1;
  std::vector<std::vector<double>> x0s;
  /// layout [point][path][coordinate]; censored paths carry NaN
  std::vector<double> terminal;
  std::size_t censored = 0;

  double value(std::size_t point, std::size_t path, int coord) const {
    return terminal[(point * n_paths + path) * std::size_t(dim) +
                    std::size_t(coord)];
  }
};

/// Explicit Euler: X_{k+1} = X_k + b(t_k, X_k) dt + sigma(t_k, X_k) dZ_k with
/// exact stable increments; sigma is evaluated at the pre-jump state.  Noise
/// is indexed by (path, step, coordinate), so results are bit-identical for
/// any thread count.  Non-finite or overflowing states censor the path.
PathBatch simulate(const CoefficientModel& model, const noise::StableSpec& spec,
                   double s, double t, const std::vector<std::vector<double>>& x0s,
                   std::size_t steps, std::size_t n_paths, std::uint64_t seed,
                   int threads = 1);

/// Same scheme with one initial state per path (flow composition).
PathBatch simulate_from(const CoefficientModel& model,
                        const noise::StableSpec& spec, double s, double t,
                        const std::vector<double>& states, std::size_t steps,
                        std::uint64_t seed, int threads = 1);

/// Streaming runner for large ensembles: paths are processed in fixed-size
/// chunks (the chunk grid never depends on the thread count) and the sink is
/// called once per (chunk, point) with the terminal states of that chunk.
/// The sink may run concurrently for different chunks.
using ChunkSink = std::function<void(std::size_t chunk, std::size_t point,
                                     const double* terminals,
                                     std::size_t paths_in_chunk,
                                     std::size_t censored_in_chunk)>;
void run_chunked(const CoefficientModel& model, const noise::StableSpec& spec,
                 double s, double t, const std::vector<std::vector<double>>& x0s,
                 std::size_t steps, std::size_t n_paths, std::uint64_t seed,
                 std::size_t chunk_paths, int threads, const ChunkSink& sink);

}  // namespace stablelab::sde
