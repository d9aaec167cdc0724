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

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "stablelab/sde_engine.hpp"

using namespace stablelab;
using namespace stablelab::sde;
using noise::StableSpec;

namespace {

std::vector<std::pair<double, std::vector<double>>> probe_grid_1d(double lo,
                                                                  double hi,
                                                                  int count) {
  std::vector<std::pair<double, std::vector<double>>> probes;
  for (int i = 0; i < count; ++i) {
    const double x = lo + (hi - lo) * double(i) / double(count - 1);
    probes.push_back({0.0, {x}});
  }
  return probes;
}

}  // namespace

TEST_CASE("validate_assumptions: identity passes with unit constants") {
  auto model = make_preset("identity", 2);
  std::vector<std::pair<double, std::vector<double>>> probes;
  for (int i = 0; i < 5; ++i) {
    probes.push_back({0.0, {double(i) - 2.0, 0.5 * double(i)}});
  }
  auto rep = validate_assumptions(model, probes);
  CHECK(rep.pass);
  CHECK(rep.min_singular == doctest::Approx(1.0));
  CHECK(rep.max_singular == doctest::Approx(1.0));
  CHECK(rep.max_sigma_quotient == 0.0);
}

TEST_CASE("validate_assumptions: diag-sine within declared band") {
  auto model = make_preset("diag-sine", 1);
  auto rep = validate_assumptions(model, probe_grid_1d(-3.0, 3.0, 41));
  CHECK(rep.pass);
  CHECK(rep.min_singular >= 0.7 - 1e-12);
  CHECK(rep.max_singular <= 1.3 + 1e-12);
  CHECK(rep.max_sigma_quotient <= 0.3 + 1e-9);
}

TEST_CASE("validate_assumptions: degenerate sigma fails with offending point") {
  CoefficientModel model;
  model.dim = 1;
  model.sigma_diagonal = true;
  model.sigma = [](double, const double* x, double* out) { out[0] = x[0]; };
  model.c0 = 4.0;
  auto probes = probe_grid_1d(-1.0, 1.0, 21);  // includes x = 0
  auto rep = validate_assumptions(model, probes);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.ellipticity_ok);
  CHECK(rep.message.find("ellipticity") != std::string::npos);
}

TEST_CASE("validate_assumptions: holder-drift quotients within declared c3") {
  auto model = make_preset("holder-drift", 1);
  auto rep = validate_assumptions(model, probe_grid_1d(-3.0, 3.0, 81));
  CHECK(rep.pass);
  CHECK(rep.max_drift_quotient > 0.0);
  CHECK(rep.max_drift_abs <= model.c3);
}

TEST_CASE("simulate: driving noise law for identity coefficients") {
  auto model = make_preset("identity", 1);
  auto spec = StableSpec::make(1.2, 1);
  const double t = 0.7;
  auto batch = simulate(model, spec, 0.0, t, {{0.4}}, 16, 200000, 77);
  CHECK(batch.censored == 0);
  std::vector<double> xs(batch.n_paths);
  for (std::size_t k = 0; k < batch.n_paths; ++k) {
    xs[k] = batch.value(0, k, 0) - 0.4;
  }
  for (double xi : {0.5, 1.0, 2.0}) {
    const double expected = std::exp(-spec.c_alpha * t * std::pow(xi, spec.alpha));
    CHECK(std::abs(oracles::empirical_cf(xs, xi) - expected) <
          3.0 / std::sqrt(double(xs.size())));
  }
}

TEST_CASE("simulate: constant drift shifts the noise-only run") {
  CoefficientModel model;
  model.dim = 1;
  model.sigma_diagonal = true;
  model.sigma = [](double, const double*, double* out) { out[0] = 1.0; };
  model.drift = [](double, const double*, double* out) { out[0] = 2.5; };
  model.c3 = 2.5;
  model.beta = 1.0;
  auto base = make_preset("identity", 1);
  auto spec = StableSpec::make(1.5, 1);
  auto with_drift = simulate(model, spec, 0.0, 0.5, {{0.0}}, 32, 2000, 5);
  auto no_drift = simulate(base, spec, 0.0, 0.5, {{0.0}}, 32, 2000, 5);
  for (std::size_t k = 0; k < 2000; ++k) {
    CHECK(with_drift.value(0, k, 0) ==
          doctest::Approx(no_drift.value(0, k, 0) + 2.5 * 0.5).epsilon(1e-12));
  }
}

TEST_CASE("simulate: constant coefficients are step-count exact in law") {
  auto model = make_preset("identity", 1);
  auto spec = StableSpec::make(1.0, 1);
  const std::size_t n = 100000;
  auto a = simulate(model, spec, 0.0, 1.0, {{0.0}}, 8, n, 1);
  auto b = simulate(model, spec, 0.0, 1.0, {{0.0}}, 16, n, 2);
  std::vector<double> xa(n), xb(n);
  for (std::size_t k = 0; k < n; ++k) {
    xa[k] = a.value(0, k, 0);
    xb[k] = b.value(0, k, 0);
  }
  // two-sample KS below the 1% critical value
  CHECK(oracles::ks_distance(xa, xb) < 1.63 * std::sqrt(2.0 / double(n)));
}

TEST_CASE("simulate: bit-identical replay and thread independence") {
  auto model = make_preset("diag-sine", 2);
  auto spec = StableSpec::make(0.9, 2);
  auto a = simulate(model, spec, 0.0, 0.25, {{0.1, -0.2}}, 16, 40000, 3, 1);
  auto b = simulate(model, spec, 0.0, 0.25, {{0.1, -0.2}}, 16, 40000, 3, 8);
  CHECK(a.terminal == b.terminal);
  auto c = simulate(model, spec, 0.0, 0.25, {{0.1, -0.2}}, 16, 40000, 4, 1);
  CHECK(a.terminal != c.terminal);
}

TEST_CASE("simulate: Chapman-Kolmogorov composition in law (all presets)") {
  for (const char* name : {"identity", "diag-sine", "rotation-mix", "holder-drift"}) {
    const int dim = std::string(name) == "rotation-mix" ? 2 : 1;
    auto model = make_preset(name, dim);
    auto spec = StableSpec::make(1.5, dim);
    const std::size_t n = 60000;
    const double s = 0.0, r = 0.25, t = 0.5;
    auto one_shot = simulate(model, spec, s, t,
                             {std::vector<double>(std::size_t(dim), 0.3)}, 32,
                             n, 211);
    auto leg1 = simulate(model, spec, s, r,
                         {std::vector<double>(std::size_t(dim), 0.3)}, 16, n,
                         212);
    std::vector<double> mid(n * std::size_t(dim));
    for (std::size_t k = 0; k < n; ++k) {
      for (int a = 0; a < dim; ++a) {
        mid[k * std::size_t(dim) + std::size_t(a)] = leg1.value(0, k, a);
      }
    }
    auto leg2 = simulate_from(model, spec, r, t, mid, 16, 213);
    double m1 = 0.0, m2 = 0.0, v1 = 0.0, v2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double f1 = std::cos(one_shot.value(0, k, 0));
      const double f2 = std::cos(leg2.terminal[k * std::size_t(dim)]);
      m1 += f1;
      m2 += f2;
      v1 += f1 * f1;
      v2 += f2 * f2;
    }
    m1 /= double(n);
    m2 /= double(n);
    v1 = v1 / double(n) - m1 * m1;
    v2 = v2 / double(n) - m2 * m2;
    const double se = std::sqrt((v1 + v2) / double(n));
    INFO(name);
    CHECK(std::abs(m1 - m2) < 3.5 * se);
  }
}

TEST_CASE("simulate: Chapman-Kolmogorov composition in law") {
  auto model = make_preset("diag-sine", 1);
  auto spec = StableSpec::make(1.5, 1);
  const std::size_t n = 200000;
  const double s = 0.0, r = 0.25, t = 0.5;
  auto one_shot = simulate(model, spec, s, t, {{0.3}}, 64, n, 11);
  auto leg1 = simulate(model, spec, s, r, {{0.3}}, 32, n, 12);
  std::vector<double> mid(n);
  for (std::size_t k = 0; k < n; ++k) mid[k] = leg1.value(0, k, 0);
  auto leg2 = simulate_from(model, spec, r, t, mid, 32, 13);
  // bounded test functionals agree within 3 combined standard errors
  for (double xi : {0.5, 1.0}) {
    double m1 = 0.0, m2 = 0.0, v1 = 0.0, v2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double f1 = std::cos(xi * one_shot.value(0, k, 0));
      const double f2 = std::cos(xi * leg2.terminal[k]);
      m1 += f1;
      m2 += f2;
      v1 += f1 * f1;
      v2 += f2 * f2;
    }
    m1 /= double(n);
    m2 /= double(n);
    v1 = v1 / double(n) - m1 * m1;
    v2 = v2 / double(n) - m2 * m2;
    const double se = std::sqrt((v1 + v2) / double(n));
    CHECK(std::abs(m1 - m2) < 3.0 * se);
  }
}

TEST_CASE("simulate: censoring is zero for validated presets") {
  auto model = make_preset("holder-drift", 1);
  auto spec = StableSpec::make(1.5, 1);
  auto batch = simulate(model, spec, 0.0, 1.0, {{0.0}}, 64, 100000, 21);
  CHECK(double(batch.censored) / double(batch.n_paths) < 1e-6);
}

TEST_CASE("simulate: empty ensemble and error paths") {
  auto model = make_preset("identity", 1);
  auto spec = StableSpec::make(1.0, 1);
  auto batch = simulate(model, spec, 0.0, 1.0, {{0.0}}, 4, 0, 1);
  CHECK(batch.terminal.empty());
  CHECK(batch.censored == 0);
  CHECK_THROWS_AS(
      (void)simulate(model, spec, 1.0, 0.5, {{0.0}}, 4, 10, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)simulate(model, spec, 0.0, 1.0, {{0.0}}, 0, 10, 1),
      std::invalid_argument);
}

TEST_CASE("run_chunked: chunk grid is independent of the thread count") {
  auto model = make_preset("rotation-mix", 2);
  auto spec = StableSpec::make(1.1, 2);
  auto collect = [&](int threads) {
    std::vector<double> sums(4, 0.0);
    std::vector<std::vector<double>> slots(64);
    run_chunked(model, spec, 0.0, 0.5, {{0.0, 0.0}, {1.0, 1.0}}, 8, 30000, 9,
                4096, threads,
                [&](std::size_t chunk, std::size_t point, const double* term,
                    std::size_t paths, std::size_t) {
                  double s = 0.0;
                  for (std::size_t i = 0; i < paths; ++i) {
                    s += std::cos(term[2 * i]) + std::sin(term[2 * i + 1]);
                  }
                  slots[chunk * 2 + point].push_back(s);
                });
    std::vector<double> flat;
    for (auto& v : slots) {
      for (double s : v) flat.push_back(s);
    }
    return flat;
  };
  auto a = collect(1);
  auto b = collect(8);
  CHECK(a == b);
}

TEST_CASE("tabulated model reproduces its source preset") {
  // tabulate diag-sine on a fine grid; multilinear interpolation error small
  const int dim = 1;
  const std::size_t n = 1024;
  const double box = std::numbers::pi;
  std::vector<double> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -box + 2.0 * box * double(i) / double(n);
    table[i] = 1.0 + 0.3 * std::sin(x);
  }
  auto model = make_tabulated(dim, n, box, {table}, {}, true, 2.0, 0.3, 1.0, 0.0);
  auto ref = make_preset("diag-sine", 1);
  double sig_tab, sig_ref;
  for (double x : {-2.0, -0.3, 0.0, 0.9, 3.0}) {
    model.sigma(0.0, &x, &sig_tab);
    ref.sigma(0.0, &x, &sig_ref);
    CHECK(sig_tab == doctest::Approx(sig_ref).epsilon(1e-4));
  }
  auto rep = validate_assumptions(model, probe_grid_1d(-3.0, 3.0, 41));
  CHECK(rep.pass);
}

TEST_CASE("preset catalog rejects unknown names and bad dims") {
  CHECK_THROWS_AS((void)make_preset("nope", 1), std::invalid_argument);
  CHECK_THROWS_AS((void)make_preset("rotation-mix", 1), std::invalid_argument);
}
