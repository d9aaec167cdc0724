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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "stablelab/grid_function.hpp"
#include "stablelab/harness.hpp"
#include "stablelab/philox.hpp"

using namespace stablelab;
using namespace stablelab::harness;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("config: strict parsing rejects unknown keys") {
  CHECK_THROWS_WITH_AS(
      (void)ExperimentConfig::from_json_text(R"({"experiment":"kernel","bogus":1})"),
      doctest::Contains("unknown key"), std::invalid_argument);
  CHECK_THROWS_WITH_AS((void)ExperimentConfig::from_json_text(
                           R"({"experiment":"kernel","spec":{"alpha":1,"d":2}})"),
                       doctest::Contains("unknown key"), std::invalid_argument);
  CHECK_THROWS_AS((void)ExperimentConfig::from_json_text(R"({"spec":{}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      (void)ExperimentConfig::from_json_text(R"({"experiment":"warp"})"),
      std::invalid_argument);
}

TEST_CASE("config: hypothesis gate names the violated requirement") {
  // alpha + beta <= 1
  CHECK_THROWS_WITH_AS(
      (void)ExperimentConfig::from_json_text(
          R"({"experiment":"semigroup-scaling","spec":{"alpha":0.6},
              "model":{"preset":"holder-drift","params":{"drift_beta":0.3}}})"),
      doctest::Contains("alpha + beta > 1"), std::invalid_argument);
  // gamma >= alpha + min(alpha, beta)
  CHECK_THROWS_WITH_AS(
      (void)ExperimentConfig::from_json_text(
          R"({"experiment":"semigroup-scaling","spec":{"alpha":1.5},
              "exponents":{"gamma":3.0}})"),
      doctest::Contains("gamma"), std::invalid_argument);
  // eta at or below the floor
  CHECK_THROWS_WITH_AS(
      (void)ExperimentConfig::from_json_text(
          R"({"experiment":"kernel","spec":{"alpha":1.0},
              "exponents":{"eta":-1.0}})"),
      doctest::Contains("eta"), std::invalid_argument);
  // drift requires alpha > 1/2
  CHECK_THROWS_WITH_AS(
      (void)ExperimentConfig::from_json_text(
          R"({"experiment":"simulate","spec":{"alpha":0.45},
              "model":{"preset":"holder-drift","params":{"drift_beta":0.9}}})"),
      doctest::Contains("alpha > 1/2"), std::invalid_argument);
  // a valid config passes
  auto c = ExperimentConfig::from_json_text(
      R"({"experiment":"kernel","spec":{"alpha":1.5,"dim":1}})");
  CHECK(c.alpha == 1.5);
}

TEST_CASE("fit_exponent: exact, noisy, constant, and error paths") {
  std::vector<double> xs, ys;
  for (int k = 0; k < 5; ++k) {
    const double x = std::pow(2.0, k);
    xs.push_back(x);
    ys.push_back(1.0 / (x * x));
  }
  auto fit = fit_exponent(xs, ys);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit.residual_rms < 1e-12);

  std::vector<double> noisy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto u = uniforms_at(9, i, 0, 0);
    noisy.push_back(1.0 / xs[i] * (1.0 + 0.01 * (2.0 * u.u0 - 1.0)));
  }
  auto nf = fit_exponent(xs, noisy);
  CHECK(nf.slope > -1.05);
  CHECK(nf.slope < -0.95);

  std::vector<double> flat(xs.size(), 3.0);
  CHECK(fit_exponent(xs, flat).slope == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)fit_exponent({1.0, 2.0, 4.0}, {1.0, 2.0, 4.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)fit_exponent(xs, {1.0, -1.0, 1.0, 1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("run: kernel cauchy config reports the oracle verdicts") {
  auto c = ExperimentConfig::from_json_text(
      R"({"experiment":"kernel","spec":{"alpha":1.0,"dim":1},
          "grid":{"n":4096,"box":64.0},"checks":["cauchy","scaling"],
          "t_ladder":[0.5,1.0,2.0]})");
  auto rep = run(c, 1);
  CHECK(rep.all_pass());
  bool has_cauchy = false, has_scaling = false;
  for (const auto& v : rep.verdicts) {
    if (v.name == "cauchy-closed-form") has_cauchy = v.pass;
    if (v.name == "scaling-identity") has_scaling = v.pass;
  }
  CHECK(has_cauchy);
  CHECK(has_scaling);
}

TEST_CASE("run: simulate with zero paths reports and passes vacuously") {
  auto c = ExperimentConfig::from_json_text(
      R"({"experiment":"simulate","spec":{"alpha":1.2,"dim":1},
          "model":{"preset":"diag-sine"},"mc":{"paths":0}})");
  auto rep = run(c, 1);
  CHECK(rep.verdicts.empty());
  CHECK(rep.all_pass());
  CHECK(!rep.metrics.empty());  // assumption report still present
}

TEST_CASE("report files: csv bytes reproducible, naming scheme stable") {
  auto c = ExperimentConfig::from_json_text(
      R"({"experiment":"besov","grid":{"n":256},
          "checks":["telescoping"],"mc":{"seed":7}})");
  auto rep1 = run(c, 1);
  auto rep2 = run(c, 4);
  const std::string dir1 = "harness_out_a", dir2 = "harness_out_b";
  const std::string p1 = write_metrics_csv(rep1, dir1);
  const std::string p2 = write_metrics_csv(rep2, dir2);
  CHECK(p1.find("besov-identity-1-telescoping.csv") != std::string::npos);
  CHECK(slurp(p1) == slurp(p2));
  write_report_txt(rep1, dir1);
  write_report_json(rep1, dir1);
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("config: tabulated coefficient tables drive a simulate run") {
  // tabulate the diag-sine coefficients, reference them from a config
  const std::string dir = "harness_tab";
  std::filesystem::create_directories(dir);
  const std::size_t n = 512;
  const double box = 3.141592653589793;
  spectral::GridFunction sig(1, n, box);
  for (std::size_t i = 0; i < sig.size(); ++i) {
    sig[i] = 1.0 + 0.3 * std::sin(sig.coord(i));
  }
  sig.write_binary(dir + "/sigma0.bin");
  auto c = ExperimentConfig::from_json_text(R"({
    "experiment":"simulate","spec":{"alpha":1.5,"dim":1},
    "model":{"tabulated":{"dir":"harness_tab","sigma":["sigma0.bin"],
             "diagonal":true,"c0":2.0,"c1":0.31}},
    "mc":{"paths":2000,"steps":8,"seed":3}})");
  CHECK(c.is_tabulated());
  auto rep = run(c, 1);
  CHECK(rep.all_pass());
  bool saw_singular = false;
  for (const auto& m : rep.metrics) {
    if (m.series == "assumptions" && m.kind == "min_singular") {
      saw_singular = true;
      CHECK(m.value > 0.69);
    }
  }
  CHECK(saw_singular);
  std::filesystem::remove_all(dir);
}

TEST_CASE("report files: fits get svg charts") {
  auto c = ExperimentConfig::from_json_text(
      R"({"experiment":"besov","grid":{"n":1024},"checks":["commutator"]})");
  auto rep = run(c, 1);
  REQUIRE(!rep.fits.empty());
  const std::string dir = "harness_out_svg";
  const std::string svg = write_fit_svg(rep, rep.fits[0], dir);
  CHECK(std::filesystem::file_size(svg) > 100);
  CHECK(slurp(svg).find("<svg") == 0);
  std::filesystem::remove_all(dir);
}
