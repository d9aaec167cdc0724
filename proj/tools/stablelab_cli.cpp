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

#include <cstdio>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "stablelab/harness.hpp"

namespace {

using stablelab::harness::ExperimentConfig;
using stablelab::harness::Report;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = int(std::thread::hardware_concurrency());
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts* opts, bool needs_config) {
  auto* cfg = cmd->add_option("--config", opts->config_path,
                              "experiment configuration file (JSON)");
  if (needs_config) cfg->required();
  cmd->add_option("--seed", opts->seed, "master seed override")
      ->each([opts](const std::string&) { opts->seed_set = true; });
  cmd->add_option("--out", opts->out_dir, "output directory");
  cmd->add_option("--threads", opts->threads, "worker thread count");
  cmd->add_option("--format", opts->format, "report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

int run_experiment(const std::string& kind, const CommonOpts& opts) {
  ExperimentConfig config = ExperimentConfig::from_file(opts.config_path);
  if (config.experiment != kind) {
    std::fprintf(stderr, "error: config declares experiment '%s', not '%s'\n",
                 config.experiment.c_str(), kind.c_str());
    return 2;
  }
  if (opts.seed_set) config.seed = opts.seed;
  Report rep = stablelab::harness::run(config, opts.threads);
  const std::string csv = stablelab::harness::write_metrics_csv(rep, opts.out_dir);
  stablelab::harness::write_report_txt(rep, opts.out_dir);
  if (opts.format == "json") {
    stablelab::harness::write_report_json(rep, opts.out_dir);
  }
  for (const auto& f : rep.fits) {
    stablelab::harness::write_fit_svg(rep, f, opts.out_dir);
  }
  for (const auto& v : rep.verdicts) {
    std::printf("%s  %s: %.6g %s %.6g (%s)\n", v.pass ? "PASS" : "FAIL",
                v.name.c_str(), v.measured, v.comparator.c_str(), v.threshold,
                v.details.c_str());
  }
  std::printf("wrote %s (%.2f s)\n", csv.c_str(), rep.runtime_seconds);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for cylindrical alpha-stable SDEs"};
  app.require_subcommand(1);

  const std::vector<std::string> kinds = {"simulate", "kernel", "besov",
                                          "semigroup-scaling", "kolmogorov",
                                          "density"};
  std::map<std::string, CommonOpts> opts;
  for (const auto& kind : kinds) {
    auto* cmd = app.add_subcommand(kind, "run a '" + kind + "' experiment");
    add_common(cmd, &opts[kind], true);
  }
  CommonOpts accept_opts;
  accept_opts.seed = 42;
  bool verify_determinism = false;
  auto* accept = app.add_subcommand(
      "all-acceptance", "run every acceptance criterion at pinned tolerances");
  add_common(accept, &accept_opts, false);
  accept->add_flag("--verify-determinism", verify_determinism,
                   "re-run with a different thread count and compare CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& kind : kinds) {
      if (app.got_subcommand(kind)) return run_experiment(kind, opts[kind]);
    }
    if (app.got_subcommand("all-acceptance")) {
      const std::uint64_t seed = accept_opts.seed_set ? accept_opts.seed : 42;
      auto outcome = stablelab::harness::run_all_acceptance(
          seed, accept_opts.threads, accept_opts.out_dir, verify_determinism);
      bool all = true;
      for (const auto& v : outcome.verdicts) {
        std::printf("%s criterion %d: %s (%s)\n", v.pass ? "PASS" : "FAIL",
                    v.criterion, v.name.c_str(), v.details.c_str());
        all = all && v.pass;
      }
      std::printf("total runtime %.1f s\n", outcome.runtime_seconds);
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
