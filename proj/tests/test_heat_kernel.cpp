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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "oracles.hpp"
#include "stablelab/heat_kernel.hpp"
#include "stablelab/philox.hpp"
#include "stablelab/scaling_fit.hpp"
#include "stablelab/spectral.hpp"

using namespace stablelab;
using namespace stablelab::heat;
using stablelab::spectral::GridFunction;
using stablelab::spectral::GridSpec;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("frozen_symbol: identity sigma matches direct quadrature oracle") {
  for (double alpha : {0.7, 1.0, 1.5}) {
    auto sym = frozen_symbol({1.0, 0.0, 0.0, 1.0}, 2, alpha);
    for (int trial = 0; trial < 5; ++trial) {
      const auto u = uniforms_at(33, std::uint64_t(trial), 0, 0);
      const double xi[2] = {4.0 * u.u0 - 2.0, 4.0 * u.u1 - 2.0};
      const double oracle = oracles::symbol_quadrature_1d(xi[0], alpha) +
                            oracles::symbol_quadrature_1d(xi[1], alpha);
      if (oracle == 0.0) continue;
      CHECK(sym.psi(xi) == doctest::Approx(oracle).epsilon(1e-6));
    }
  }
}

TEST_CASE("frozen_symbol: homogeneity in the sigma scale and at xi=0") {
  auto sym1 = frozen_symbol({1.0}, 1, 1.3);
  auto sym2 = frozen_symbol({2.0}, 1, 1.3);
  for (double xi : {0.3, 1.0, 7.5}) {
    CHECK(sym2.psi1(xi) ==
          doctest::Approx(std::pow(2.0, 1.3) * sym1.psi1(xi)).epsilon(1e-12));
  }
  CHECK(sym1.psi1(0.0) == 0.0);
  CHECK(sym1.psi1(2.0 * 0.7) ==
        doctest::Approx(std::pow(2.0, 1.3) * sym1.psi1(0.7)).epsilon(1e-12));
}

TEST_CASE("frozen_symbol: singular sigma is rejected") {
  CHECK_THROWS_AS((void)frozen_symbol({1.0, 0.0, 0.0, 0.0}, 2, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)frozen_symbol({1.0}, 1, 2.0), std::domain_error);
}

TEST_CASE("kernel: Cauchy closed form at alpha=1") {
  auto sym = frozen_symbol({1.0}, 1, 1.0);
  const GridSpec g{1, 4096, 64.0};
  auto slice = kernel(sym, 0.0, 1.0, g);
  const double gamma = kPi;  // c_1 (t-s) = pi
  double max_err = 0.0;
  for (std::size_t i = 0; i < slice.density.size(); ++i) {
    const double x = slice.density.coord(i % slice.density.n());
    max_err = std::max(max_err,
                       std::abs(slice.density[i] - oracles::cauchy_pdf(x, gamma)));
  }
  CHECK(max_err < 1e-6);
  CHECK(slice.density.min_value() >= -1e-8 * slice.density.max_abs());
  const double analytic_tail = 1.0 - (oracles::cauchy_cdf(64.0, gamma) -
                                      oracles::cauchy_cdf(-64.0, gamma));
  CHECK(slice.tail_mass == doctest::Approx(analytic_tail).epsilon(0.01));
}

TEST_CASE("kernel: exact scaling identity across t") {
  for (double alpha : {0.7, 1.0, 1.5}) {
    auto sym = frozen_symbol({1.0}, 1, alpha);
    for (double t : {0.25, 4.0}) {
      const GridSpec g_t{1, 4096, 16.0};
      const GridSpec g_1{1, 4096, 16.0 * std::pow(t, -1.0 / alpha)};
      auto slice_t = kernel(sym, 0.0, t, g_t);
      auto slice_1 = kernel(sym, 0.0, 1.0, g_1);
      REQUIRE(slice_t.oversample == slice_1.oversample);
      const double pref = std::pow(t, -1.0 / alpha);
      double rel = 0.0;
      const double peak = slice_t.density.max_abs();
      for (std::size_t i = 0; i < slice_t.density.size(); ++i) {
        rel = std::max(rel,
                       std::abs(slice_t.density[i] - pref * slice_1.density[i]) / peak);
      }
      CHECK(rel < 1e-8);
    }
  }
}

TEST_CASE("kernel: spreading mass leaves the box as t grows") {
  auto sym = frozen_symbol({1.0}, 1, 0.8);
  const GridSpec g{1, 1024, 16.0};
  auto s1 = kernel(sym, 0.0, 1.0, g);
  auto s2 = kernel(sym, 0.0, 4.0, g);
  CHECK(s2.tail_mass > s1.tail_mass);
  CHECK(s1.tail_mass > 0.0);
}

TEST_CASE("kernel: resolution error demands higher n") {
  auto sym = frozen_symbol({1.0}, 1, 0.7);
  const GridSpec g{1, 256, 64.0};
  CHECK_THROWS_WITH_AS((void)kernel(sym, 0.0, 0.01, g),
                       doctest::Contains("increase resolution"),
                       std::runtime_error);
}

TEST_CASE("moment_integral: normalization, domain error, odd gradient") {
  auto sym = frozen_symbol({1.0}, 1, 1.5);
  // box large enough that the heavy tail beyond the window is < 1e-3
  const GridSpec g{1, 16384, 256.0};
  auto slice = kernel(sym, 0.0, 1.0, g);
  auto m0 = moment_integral(slice, 0, 0.0);
  CHECK(m0.value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(m0.value + m0.tail_bound == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS((void)moment_integral(slice, 0, 1.5), std::domain_error);
  CHECK_THROWS_AS((void)moment_integral(slice, 0, 1.7), std::domain_error);

  auto grad = slice.derivative_magnitude(1);
  CHECK(grad.integral() > 0.1);
  spectral::SpectralField f = spectral::SpectralField::analyze(slice.density);
  auto comps = f.gradient();
  CHECK(std::abs(comps[0].integral()) < 1e-10);
}

TEST_CASE("moment_integral: dyadic-t slopes match (beta-n)/alpha") {
  // boxes scale with the kernel so the windowing bias cancels in the slope
  for (double alpha : {0.7, 1.5}) {
    auto sym = frozen_symbol({1.0}, 1, alpha);
    struct Case {
      int n;
      double beta;
    };
    for (const Case c : {Case{0, alpha / 2.0}, Case{1, 0.0}, Case{2, 0.0}}) {
      std::vector<double> ts, vals;
      for (int k = -4; k <= 0; ++k) {
        const double t = std::pow(2.0, k);
        const GridSpec g{1, 8192, 64.0 * std::pow(t, 1.0 / alpha)};
        auto slice = kernel(sym, 0.0, t, g);
        ts.push_back(t);
        vals.push_back(moment_integral(slice, c.n, c.beta).value);
      }
      auto fit = fit_exponent(ts, vals);
      const double expected = (c.beta - double(c.n)) / alpha;
      CHECK(std::abs(fit.slope - expected) < 0.05);
    }
  }
}

TEST_CASE("block_kernel_decay: j-slopes near n and bounded j=0 over t") {
  const double alpha = 1.5;
  auto sym = frozen_symbol({1.0}, 1, alpha);
  const GridSpec g{1, 4096, kPi};
  spectral::DyadicDecomposition dec(1, 4096);
  // t chosen so the symbol decays right at the Nyquist sphere; rings in the
  // fitted range then carry weight ~1
  const double xi_nyq = kPi * 4096.0 / (2.0 * kPi);
  const double t = 34.0 / (sym.c_alpha * std::pow(xi_nyq, alpha));
  auto slice = kernel(sym, 0.0, t, g);
  for (int n : {0, 1}) {
    std::vector<double> js, vals;
    for (int j = 2; j <= dec.j_max() - 4; ++j) {
      js.push_back(std::pow(2.0, j));
      vals.push_back(block_kernel_decay(slice, j, n, 0.0, dec));
    }
    auto fit = fit_exponent(js, vals);
    CHECK(std::abs(fit.slope - double(n)) < 0.15);
  }

  // j=0 norms stay uniformly bounded as t -> 0: the ladder supremum sits at
  // the small-t end where it saturates at a fixed constant of the cutoff
  const GridSpec g2{1, 512, kPi};
  spectral::DyadicDecomposition dec2(1, 512);
  for (int n : {0, 1}) {
    std::vector<double> vals;
    for (int k = -6; k <= -1; ++k) {
      auto s = kernel(sym, 0.0, std::pow(2.0, k), g2);
      vals.push_back(block_kernel_decay(s, 0, n, 0.0, dec2));
    }
    const double hi = *std::max_element(vals.begin(), vals.end());
    CHECK(hi <= 1.25 * std::max(vals[0], vals[1]));
    CHECK(hi < 10.0);
  }
}

TEST_CASE("star fit: positive constant with reported minimizer") {
  auto sym = frozen_symbol({1.2, 0.3, -0.1, 0.9}, 2, 1.0);
  auto fit = star_constant(sym);
  CHECK(fit.c2 > 0.0);
  CHECK(fit.argmin_xi.size() == 2);
  const double rho = std::sqrt(fit.argmin_xi[0] * fit.argmin_xi[0] +
                               fit.argmin_xi[1] * fit.argmin_xi[1]);
  const double denom = std::min(rho * rho, std::pow(rho, sym.alpha));
  CHECK(-sym.psi(fit.argmin_xi.data()) / denom == doctest::Approx(fit.c2));
}

TEST_CASE("duhamel: homogeneous composition equals one-shot multiplier") {
  auto sym = frozen_symbol({1.0}, 1, 1.2);
  const GridSpec g{1, 256, kPi};
  GridFunction phi(g);
  std::vector<double> x(1);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi.point(i, x.data());
    phi[i] = std::cos(3.0 * x[0]) + 0.5 * std::sin(x[0]);
  }
  auto u = duhamel_solve(sym, phi, {}, {0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(u.size() == 5);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    CHECK(u[0][i] == doctest::Approx(phi[i]).epsilon(1e-12));
  }
  const double d3 = std::exp(sym.psi1(3.0));
  const double d1 = std::exp(sym.psi1(1.0));
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi.point(i, x.data());
    const double expected = d3 * std::cos(3.0 * x[0]) + 0.5 * d1 * std::sin(x[0]);
    CHECK(u[4][i] == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("duhamel: constant forcing matches the per-mode closed form") {
  auto sym = frozen_symbol({1.0}, 1, 1.5);
  const GridSpec g{1, 128, kPi};
  GridFunction zero(g);
  GridFunction force(g);
  std::vector<double> x(1);
  for (std::size_t i = 0; i < force.size(); ++i) {
    force.point(i, x.data());
    force[i] = std::cos(2.0 * x[0]);
  }
  auto run = [&](std::size_t steps) {
    std::vector<double> t_grid(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) t_grid[k] = double(k) / double(steps);
    std::vector<GridFunction> f(t_grid.size(), force);
    return duhamel_solve(sym, zero, f, t_grid).back();
  };
  const double psi = sym.psi1(2.0);
  const double closed = (std::exp(psi) - 1.0) / psi;
  auto coarse = run(16);
  auto fine = run(32);
  double err_c = 0.0, err_f = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    force.point(i, x.data());
    const double expected = closed * std::cos(2.0 * x[0]);
    err_c = std::max(err_c, std::abs(coarse[i] - expected));
    err_f = std::max(err_f, std::abs(fine[i] - expected));
  }
  CHECK(err_c < 1e-2);
  CHECK(err_c / err_f == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("duhamel: linearity to near machine precision") {
  auto sym = frozen_symbol({1.0}, 1, 0.9);
  const GridSpec g{1, 128, kPi};
  GridFunction phi1 = spectral::make_weierstrass(g, 0.8, 5, 1);
  GridFunction phi2 = spectral::make_weierstrass(g, 0.5, 5, 2);
  GridFunction force = spectral::make_weierstrass(g, 0.9, 4, 3);
  const std::vector<double> t_grid = {0.0, 0.5, 1.0};
  std::vector<GridFunction> f(t_grid.size(), force);
  GridFunction both = spectral::lin_comb(1.0, phi1, 1.0, phi2);
  auto u_both = duhamel_solve(sym, both, f, t_grid).back();
  auto u_1 = duhamel_solve(sym, phi1, f, t_grid).back();
  auto u_2 = duhamel_solve(sym, phi2, {}, t_grid).back();
  for (std::size_t i = 0; i < u_both.size(); ++i) {
    CHECK(std::abs(u_both[i] - u_1[i] - u_2[i]) < 1e-12);
  }
}

TEST_CASE("duhamel: piecewise-constant symbols compose per interval") {
  auto sym_a = frozen_symbol({1.0}, 1, 1.1);
  auto sym_b = frozen_symbol({2.0}, 1, 1.1);
  const GridSpec g{1, 64, kPi};
  GridFunction phi(g);
  std::vector<double> x(1);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi.point(i, x.data());
    phi[i] = std::cos(4.0 * x[0]);
  }
  auto u = duhamel_solve({sym_a, sym_b}, phi, {}, {0.0, 0.5, 1.0}).back();
  const double factor =
      std::exp(0.5 * sym_a.psi1(4.0)) * std::exp(0.5 * sym_b.psi1(4.0));
  for (std::size_t i = 0; i < phi.size(); ++i) {
    CHECK(u[i] == doctest::Approx(factor * phi[i]).epsilon(1e-10));
  }
}

TEST_CASE("duhamel weak residual: order >= 1.8 in the time step") {
  auto sym = frozen_symbol({1.0}, 1, 1.5);
  const GridSpec g{1, 128, kPi};
  GridFunction zero(g);
  std::vector<double> x(1);
  auto force_at = [&](double s) {
    GridFunction f(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f.point(i, x.data());
      f[i] = std::cos(2.0 * x[0]) * std::cos(3.0 * s);
    }
    return f;
  };
  GridFunction test(g);
  for (std::size_t i = 0; i < test.size(); ++i) {
    test.point(i, x.data());
    test[i] = std::exp(std::cos(x[0]));
  }
  std::vector<double> hs, errs;
  for (std::size_t steps : {8, 16, 32, 64}) {
    std::vector<double> t_grid(steps + 1);
    std::vector<GridFunction> f;
    for (std::size_t k = 0; k <= steps; ++k) {
      t_grid[k] = double(k) / double(steps);
      f.push_back(force_at(t_grid[k]));
    }
    auto u = duhamel_solve(sym, zero, f, t_grid);
    hs.push_back(1.0 / double(steps));
    errs.push_back(duhamel_weak_residual(sym, u, zero, f, test, t_grid));
  }
  auto fit = fit_exponent(hs, errs);
  CHECK(fit.slope >= 1.8);
}

TEST_CASE("kernel slice export writes grid and sidecar") {
  auto sym = frozen_symbol({1.0}, 1, 1.0);
  const GridSpec g{1, 512, 32.0};
  auto slice = kernel(sym, 0.0, 1.0, g);
  slice.save("test_slice.bin");
  CHECK(std::filesystem::exists("test_slice.bin"));
  CHECK(std::filesystem::exists("test_slice.bin.json"));
  auto back = GridFunction::read_binary("test_slice.bin");
  CHECK(back.values() == slice.density.values());
  std::filesystem::remove("test_slice.bin");
  std::filesystem::remove("test_slice.bin.json");
}
