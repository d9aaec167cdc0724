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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stablelab/scaling_fit.hpp"

namespace stablelab::harness {

inline constexpr const char* kVersion = "stablelab 0.1.0";

/// Parsed experiment configuration.  The JSON schema is documented in
/// FORMATS.md; unknown keys anywhere are errors.
struct ExperimentConfig {
  std::string experiment;  // simulate|kernel|besov|semigroup-scaling|kolmogorov|density

  double alpha = 1.0;
  int dim = 1;

  std::string preset = "identity";
  // tabulated coefficients (model.tabulated): grid binaries, declared constants
  std::string tabulated_dir;
  std::vector<std::string> sigma_files;
  std::vector<std::string> drift_files;
  bool tabulated_diagonal = true;
  double tab_c0 = 1.0, tab_c1 = 0.0, tab_c3 = 0.0;
  double preset_amp = 0.3;
  double preset_freq = 1.0;
  double preset_twist = 0.5;
  double drift_beta = 1.0;   // beta of the drift (1 when b == 0)
  double drift_amp = 0.5;
  int drift_levels = 10;
  std::uint64_t preset_seed = 1;

  std::size_t grid_n = 1024;
  double grid_box = 3.141592653589793;

  std::size_t mc_paths = 100000;
  std::size_t mc_steps = 256;
  std::uint64_t seed = 42;
  std::size_t mc_chunk = 8192;

  std::vector<double> t_ladder;
  double gamma = 0.5;
  double eta = 0.0;

  std::vector<std::string> checks;  // empty = all applicable to the kind
  std::map<std::string, double> tolerances;

  /// Parses strict JSON text (unknown keys are errors) and validates.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  /// Rejects parameter sets outside the verifiable regime:
  /// alpha + beta must exceed 1, gamma must stay below alpha + min(alpha, beta),
  /// eta must stay above -min(alpha + beta - 1, 1), and a nonzero drift
  /// requires alpha > 1/2.
  void validate() const;

  bool is_tabulated() const { return !sigma_files.empty(); }

  /// Drift present for this model?
  bool has_drift() const {
    return is_tabulated() ? !drift_files.empty() : preset == "holder-drift";
  }

  std::string json_echo() const;
};

/// One measured number: series/kind identify what it is, abscissa orders it.
struct MetricRow {
  std::string series;
  std::string kind;
  double abscissa = 0.0;
  double value = 0.0;
  double stderr_ = 0.0;
};

struct FitRow {
  std::string name;
  ScalingFit fit;
};

/// One pass/fail decision; always carries the raw numbers it came from.
struct Verdict {
  int criterion = 0;  // acceptance criterion id (0 = not an acceptance line)
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string comparator;  // "<=", ">=", ">", "observational"
  bool pass = false;
  std::string details;
};

struct Report {
  std::string experiment;
  std::string preset;
  double alpha = 1.0;
  std::string config_echo;
  std::vector<MetricRow> metrics;
  std::vector<FitRow> fits;
  std::vector<Verdict> verdicts;
  double runtime_seconds = 0.0;  // never written to CSV
  std::string version = kVersion;

  bool all_pass() const;
};

/// Executes the configured experiment end to end.
Report run(const ExperimentConfig& config, int threads);

/// Canonical metric CSV ({experiment}-{preset}-{alpha}.csv in out_dir);
/// byte-deterministic for fixed (config, seed, version).  Returns the path.
std::string write_metrics_csv(const Report& report, const std::string& out_dir);

/// Human-readable summary (echoes config, verdicts, runtime).
std::string write_report_txt(const Report& report, const std::string& out_dir);

/// Machine-readable report (includes runtime; not byte-canonical).
std::string write_report_json(const Report& report, const std::string& out_dir);

/// Static SVG line chart of a log-log fit.
std::string write_fit_svg(const Report& report, const FitRow& fit,
                          const std::string& out_dir);

/// Least-squares exponent fit re-exported for harness callers.
using stablelab::fit_exponent;

/// Acceptance runner: executes every acceptance criterion at its pinned
/// tolerance, writes the canonical CSVs, and (optionally) re-runs with one
/// thread to verify byte-identical output.
struct AcceptanceOutcome {
  std::vector<Verdict> verdicts;          // one per criterion, in order
  std::vector<std::string> csv_paths;
  double runtime_seconds = 0.0;
};
AcceptanceOutcome run_all_acceptance(std::uint64_t seed, int threads,
                                     const std::string& out_dir,
                                     bool verify_determinism);

}  // namespace stablelab::harness
