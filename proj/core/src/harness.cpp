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

#include "stablelab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "stablelab/fft.hpp"
#include "stablelab/heat_kernel.hpp"
#include "stablelab/philox.hpp"
#include "stablelab/sde_engine.hpp"
#include "stablelab/semigroup_lab.hpp"
#include "stablelab/spectral.hpp"
#include "stablelab/stable_noise.hpp"

namespace stablelab::harness {

namespace {

constexpr double kPi = std::numbers::pi;
using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " +
                                  where);
    }
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  reject_unknown_keys(j,
                      {"experiment", "spec", "model", "grid", "mc", "t_ladder",
                       "exponents", "checks", "tolerances"},
                      "top level");
  if (!j.contains("experiment")) {
    throw std::invalid_argument("config: missing 'experiment'");
  }
  c.experiment = j.at("experiment").get<std::string>();
  static const std::set<std::string> kinds = {
      "simulate", "kernel", "besov", "semigroup-scaling", "kolmogorov",
      "density"};
  if (!kinds.count(c.experiment)) {
    throw std::invalid_argument("config: unknown experiment '" + c.experiment +
                                "'");
  }
  if (j.contains("spec")) {
    const json& s = j.at("spec");
    reject_unknown_keys(s, {"alpha", "dim"}, "spec");
    if (s.contains("alpha")) c.alpha = s.at("alpha").get<double>();
    if (s.contains("dim")) c.dim = s.at("dim").get<int>();
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    reject_unknown_keys(m, {"preset", "params", "tabulated"}, "model");
    if (m.contains("tabulated")) {
      const json& t = m.at("tabulated");
      reject_unknown_keys(t,
                          {"dir", "sigma", "drift", "diagonal", "c0", "c1",
                           "beta", "c3"},
                          "model.tabulated");
      c.preset = "tabulated";
      if (t.contains("dir")) c.tabulated_dir = t.at("dir").get<std::string>();
      c.sigma_files = t.at("sigma").get<std::vector<std::string>>();
      if (t.contains("drift")) {
        c.drift_files = t.at("drift").get<std::vector<std::string>>();
      }
      if (t.contains("diagonal")) c.tabulated_diagonal = t.at("diagonal").get<bool>();
      if (t.contains("c0")) c.tab_c0 = t.at("c0").get<double>();
      if (t.contains("c1")) c.tab_c1 = t.at("c1").get<double>();
      if (t.contains("beta")) c.drift_beta = t.at("beta").get<double>();
      if (t.contains("c3")) c.tab_c3 = t.at("c3").get<double>();
    }
    if (m.contains("preset")) c.preset = m.at("preset").get<std::string>();
    if (m.contains("params")) {
      const json& p = m.at("params");
      reject_unknown_keys(p,
                          {"amp", "freq", "twist", "drift_beta", "drift_amp",
                           "levels", "seed"},
                          "model.params");
      if (p.contains("amp")) c.preset_amp = p.at("amp").get<double>();
      if (p.contains("freq")) c.preset_freq = p.at("freq").get<double>();
      if (p.contains("twist")) c.preset_twist = p.at("twist").get<double>();
      if (p.contains("drift_beta")) c.drift_beta = p.at("drift_beta").get<double>();
      if (p.contains("drift_amp")) c.drift_amp = p.at("drift_amp").get<double>();
      if (p.contains("levels")) c.drift_levels = p.at("levels").get<int>();
      if (p.contains("seed")) c.preset_seed = p.at("seed").get<std::uint64_t>();
    }
  }
  if (!c.has_drift()) c.drift_beta = 1.0;  // b == 0 counts as beta = 1
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown_keys(g, {"n", "box"}, "grid");
    if (g.contains("n")) c.grid_n = g.at("n").get<std::size_t>();
    if (g.contains("box")) c.grid_box = g.at("box").get<double>();
  }
  if (j.contains("mc")) {
    const json& m = j.at("mc");
    reject_unknown_keys(m, {"paths", "steps", "seed", "chunk"}, "mc");
    if (m.contains("paths")) c.mc_paths = m.at("paths").get<std::size_t>();
    if (m.contains("steps")) c.mc_steps = m.at("steps").get<std::size_t>();
    if (m.contains("seed")) c.seed = m.at("seed").get<std::uint64_t>();
    if (m.contains("chunk")) c.mc_chunk = m.at("chunk").get<std::size_t>();
  }
  if (j.contains("t_ladder")) {
    c.t_ladder = j.at("t_ladder").get<std::vector<double>>();
  }
  if (j.contains("exponents")) {
    const json& e = j.at("exponents");
    reject_unknown_keys(e, {"gamma", "eta", "beta"}, "exponents");
    if (e.contains("gamma")) c.gamma = e.at("gamma").get<double>();
    if (e.contains("eta")) c.eta = e.at("eta").get<double>();
    if (e.contains("beta")) c.drift_beta = e.at("beta").get<double>();
  }
  if (j.contains("checks")) {
    c.checks = j.at("checks").get<std::vector<std::string>>();
  }
  if (j.contains("tolerances")) {
    for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end();
         ++it) {
      c.tolerances[it.key()] = it.value().get<double>();
    }
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

void ExperimentConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("config: alpha must lie in (0,2)");
  }
  if (dim < 1 || dim > 4) {
    throw std::invalid_argument("config: dim must lie in 1..4");
  }
  const double beta = drift_beta;
  if (!(alpha + beta > 1.0)) {
    throw std::invalid_argument(
        "config: hypothesis gate rejected: requires alpha + beta > 1 "
        "(got alpha=" + format_short(alpha) + ", beta=" + format_short(beta) + ")");
  }
  const double gamma_cap = alpha + std::min(alpha, beta);
  if (experiment == "semigroup-scaling" && gamma >= gamma_cap) {
    throw std::invalid_argument(
        "config: hypothesis gate rejected: requires gamma < alpha + min(alpha, "
        "beta) (got gamma=" + format_short(gamma) + ", cap=" +
        format_short(gamma_cap) + ")");
  }
  const double eta_floor = -std::min(alpha + beta - 1.0, 1.0);
  if (eta <= eta_floor) {
    throw std::invalid_argument(
        "config: hypothesis gate rejected: requires eta > -min(alpha + beta - "
        "1, 1) (got eta=" + format_short(eta) + ", floor=" +
        format_short(eta_floor) + ")");
  }
  if (has_drift() && !(alpha > 0.5)) {
    throw std::invalid_argument(
        "config: hypothesis gate rejected: a nonzero drift requires alpha > "
        "1/2 (got alpha=" + format_short(alpha) + ")");
  }
}

std::string ExperimentConfig::json_echo() const {
  json j;
  j["experiment"] = experiment;
  j["spec"] = {{"alpha", alpha}, {"dim", dim}};
  j["model"] = {{"preset", preset},
                {"params",
                 {{"amp", preset_amp},
                  {"freq", preset_freq},
                  {"twist", preset_twist},
                  {"drift_beta", drift_beta},
                  {"drift_amp", drift_amp},
                  {"levels", drift_levels},
                  {"seed", preset_seed}}}};
  j["grid"] = {{"n", grid_n}, {"box", grid_box}};
  j["mc"] = {{"paths", mc_paths},
             {"steps", mc_steps},
             {"seed", seed},
             {"chunk", mc_chunk}};
  j["t_ladder"] = t_ladder;
  j["exponents"] = {{"gamma", gamma}, {"eta", eta}, {"beta", drift_beta}};
  j["checks"] = checks;
  j["tolerances"] = tolerances;
  return j.dump();
}

bool Report::all_pass() const {
  for (const auto& v : verdicts) {
    if (!v.pass) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// experiment implementations

namespace {

double tol_or(const ExperimentConfig& c, const std::string& key, double dflt) {
  auto it = c.tolerances.find(key);
  return it == c.tolerances.end() ? dflt : it->second;
}

bool check_enabled(const ExperimentConfig& c, const std::string& name,
                   bool applicable = true) {
  if (!applicable) return false;
  if (c.checks.empty()) return true;
  return std::find(c.checks.begin(), c.checks.end(), name) != c.checks.end();
}

sde::CoefficientModel build_model(const ExperimentConfig& c) {
  if (c.is_tabulated()) {
    auto load = [&](const std::string& name) {
      const std::string path =
          c.tabulated_dir.empty() ? name : c.tabulated_dir + "/" + name;
      return spectral::GridFunction::read_binary(path);
    };
    std::vector<std::vector<double>> sigma_tables, drift_tables;
    std::size_t n = 0;
    double box = 0.0;
    for (const auto& f : c.sigma_files) {
      auto g = load(f);
      n = g.n();
      box = g.box();
      if (g.dim() != c.dim) {
        throw std::invalid_argument("tabulated: table dim mismatch in " + f);
      }
      sigma_tables.push_back(g.values());
    }
    for (const auto& f : c.drift_files) {
      drift_tables.push_back(load(f).values());
    }
    return sde::make_tabulated(c.dim, n, box, std::move(sigma_tables),
                               std::move(drift_tables), c.tabulated_diagonal,
                               c.tab_c0, c.tab_c1, c.drift_beta, c.tab_c3);
  }
  sde::PresetParams p;
  p.amp = c.preset_amp;
  p.freq = c.preset_freq;
  p.twist = c.preset_twist;
  p.drift_beta = c.drift_beta;
  p.drift_amp = c.drift_amp;
  p.levels = c.drift_levels;
  p.seed = c.preset_seed;
  return sde::make_preset(c.preset, c.dim, p);
}

std::vector<double> default_dyadic_ladder(int lo, int hi) {
  std::vector<double> t;
  for (int k = lo; k <= hi; ++k) t.push_back(std::pow(2.0, k));
  return t;
}

/// H-sigma-valid random matrix: rotation * diag(s in [1/c0, c0]) * rotation.
std::vector<double> random_valid_sigma(int dim, double c0, std::uint64_t seed,
                                       std::size_t index) {
  std::vector<double> diag(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    const auto u = uniforms_at(seed, index, 0, std::uint32_t(i));
    diag[std::size_t(i)] = 1.0 / c0 + (c0 - 1.0 / c0) * u.u0;
  }
  auto rot = [&](std::uint32_t tag) {
    std::vector<double> r(std::size_t(dim) * std::size_t(dim), 0.0);
    for (int i = 0; i < dim; ++i) r[std::size_t(i * dim + i)] = 1.0;
    if (dim >= 2) {
      const auto u = uniforms_at(seed, index, 1, tag);
      const double th = 2.0 * kPi * u.u0;
      r[0] = std::cos(th);
      r[1] = -std::sin(th);
      r[std::size_t(dim)] = std::sin(th);
      r[std::size_t(dim) + 1] = std::cos(th);
    }
    return r;
  };
  const auto r1 = rot(7);
  const auto r2 = rot(13);
  std::vector<double> out(std::size_t(dim) * std::size_t(dim), 0.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      double acc = 0.0;
      for (int k = 0; k < dim; ++k) {
        acc += r1[std::size_t(i * dim + k)] * diag[std::size_t(k)] *
               r2[std::size_t(k * dim + j)];
      }
      out[std::size_t(i * dim + j)] = acc;
    }
  }
  return out;
}

void run_kernel_experiment(const ExperimentConfig& c, int threads, Report* rep);
void run_besov_experiment(const ExperimentConfig& c, Report* rep);
void run_simulate_experiment(const ExperimentConfig& c, int threads, Report* rep);
void run_semigroup_experiment(const ExperimentConfig& c, int threads, Report* rep);
void run_kolmogorov_experiment(const ExperimentConfig& c, int threads, Report* rep);
void run_density_experiment(const ExperimentConfig& c, int threads, Report* rep);

// ----------------------------------------------------------------- kernel --

void run_kernel_experiment(const ExperimentConfig& c, int threads, Report* rep) {
  (void)threads;
  const double alpha = c.alpha;
  auto identity_sigma = [&] {
    std::vector<double> s(std::size_t(c.dim) * std::size_t(c.dim), 0.0);
    for (int i = 0; i < c.dim; ++i) s[std::size_t(i * c.dim + i)] = 1.0;
    return s;
  };

  if (check_enabled(c, "cauchy", alpha == 1.0 && c.dim == 1 &&
                                     c.preset == "identity")) {
    auto sym = heat::frozen_symbol({1.0}, 1, 1.0);
    const spectral::GridSpec g{1, c.grid_n, c.grid_box};
    auto slice = heat::kernel(sym, 0.0, 1.0, g);
    const double gamma = sym.c_alpha;  // c_1 * (t-s) with t-s = 1
    double max_err = 0.0;
    for (std::size_t i = 0; i < slice.density.size(); ++i) {
      const double x = slice.density.coord(i % slice.density.n());
      const double cauchy = gamma / (kPi * (x * x + gamma * gamma));
      max_err = std::max(max_err, std::abs(slice.density[i] - cauchy));
    }
    rep->metrics.push_back({"cauchy", "max_abs_err", 1.0, max_err, 0.0});
    rep->metrics.push_back({"cauchy", "tail_mass", 1.0, slice.tail_mass, 0.0});
    const double tol = tol_or(c, "cauchy_max_abs", 1e-6);
    rep->verdicts.push_back({1, "cauchy-closed-form", max_err, tol, "<=",
                             max_err <= tol, "max abs grid error vs gamma/(pi(x^2+gamma^2))"});
  }

  if (check_enabled(c, "scaling")) {
    auto sym = heat::frozen_symbol(identity_sigma(), c.dim, alpha);
    std::vector<double> ladder =
        c.t_ladder.empty() ? std::vector<double>{0.25, 1.0, 4.0} : c.t_ladder;
    double worst = 0.0;
    for (double t : ladder) {
      const spectral::GridSpec g_t{c.dim, c.grid_n, c.grid_box};
      const spectral::GridSpec g_1{c.dim, c.grid_n,
                                   c.grid_box * std::pow(t, -1.0 / alpha)};
      auto slice_t = heat::kernel(sym, 0.0, t, g_t);
      auto slice_1 = heat::kernel(sym, 0.0, 1.0, g_1);
      const double pref = std::pow(t, -double(c.dim) / alpha);
      const double peak = slice_t.density.max_abs();
      double rel = 0.0;
      for (std::size_t i = 0; i < slice_t.density.size(); ++i) {
        rel = std::max(rel, std::abs(slice_t.density[i] -
                                     pref * slice_1.density[i]) / peak);
      }
      rep->metrics.push_back({"scaling", "rel_err", t, rel, 0.0});
      worst = std::max(worst, rel);
    }
    const double tol = tol_or(c, "scaling_rel", 1e-8);
    rep->verdicts.push_back({2, "scaling-identity", worst, tol, "<=",
                             worst <= tol,
                             "max normalized node error of p_t vs rescaled p_1"});
  }

  if (check_enabled(c, "star")) {
    const std::size_t draws = std::size_t(tol_or(c, "star_draws", 20));
    double min_c2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < draws; ++i) {
      auto sigma = random_valid_sigma(c.dim, 2.0, c.seed, i);
      auto sym = heat::frozen_symbol(sigma, c.dim, alpha);
      auto fit = heat::star_constant(sym);
      rep->metrics.push_back({"star", "c2", double(i), fit.c2, 0.0});
      min_c2 = std::min(min_c2, fit.c2);
    }
    rep->verdicts.push_back({4, "symbol-lower-bound", min_c2, 0.0, ">",
                             min_c2 > 0.0,
                             "min over sigma draws of the fitted lower-bound constant"});
  }

  if (check_enabled(c, "moments")) {
    auto sym = heat::frozen_symbol(identity_sigma(), c.dim, alpha);
    std::vector<double> ladder =
        c.t_ladder.empty() ? default_dyadic_ladder(-4, 0) : c.t_ladder;
    struct Case {
      int n;
      double beta;
    };
    const Case cases[] = {{0, alpha / 2.0}, {1, 0.0}, {2, 0.0}};
    double worst_dev = 0.0;
    for (const Case& cs : cases) {
      std::vector<double> vals;
      for (double t : ladder) {
        const spectral::GridSpec g{c.dim, c.grid_n,
                                   c.grid_box * std::pow(t, 1.0 / alpha)};
        auto slice = heat::kernel(sym, 0.0, t, g);
        auto m = heat::moment_integral(slice, cs.n, cs.beta);
        vals.push_back(m.value);
        rep->metrics.push_back({"moment-n" + std::to_string(cs.n) + "-b" +
                                    format_short(cs.beta),
                                "value", t, m.value, m.tail_bound});
      }
      auto fit = fit_exponent(ladder, vals);
      const double expected = (cs.beta - double(cs.n)) / alpha;
      rep->fits.push_back({"moment-n" + std::to_string(cs.n) + "-b" +
                               format_short(cs.beta),
                           fit});
      worst_dev = std::max(worst_dev, std::abs(fit.slope - expected));
    }
    const double tol = tol_or(c, "moment_slope_tol", 0.05);
    rep->verdicts.push_back({3, "moment-exponents", worst_dev, tol, "<=",
                             worst_dev <= tol,
                             "max |fitted slope - (beta-n)/alpha| over cases"});
  }

  if (check_enabled(c, "blocks")) {
    auto sym = heat::frozen_symbol(identity_sigma(), c.dim, alpha);
    const spectral::GridSpec g{c.dim, c.grid_n, kPi};
    spectral::DyadicDecomposition dec(c.dim, c.grid_n);
    const double xi_nyq = kPi * double(c.grid_n) / (2.0 * kPi);
    const double t = 34.0 / (sym.c_alpha * std::pow(xi_nyq, alpha));
    auto slice = heat::kernel(sym, 0.0, t, g);
    double worst_dev = 0.0;
    for (int n : {0, 1}) {
      std::vector<double> js, vals;
      for (int j = 2; j <= dec.j_max() - 4; ++j) {
        js.push_back(std::pow(2.0, j));
        const double v = heat::block_kernel_decay(slice, j, n, 0.0, dec);
        vals.push_back(v);
        rep->metrics.push_back(
            {"block-n" + std::to_string(n), "m0", double(j), v, 0.0});
      }
      auto fit = fit_exponent(js, vals);
      rep->fits.push_back({"block-n" + std::to_string(n), fit});
      worst_dev = std::max(worst_dev, std::abs(fit.slope - double(n)));
    }
    const double tol = tol_or(c, "block_slope_tol", 0.15);
    rep->verdicts.push_back({5, "block-kernel-decay-slopes", worst_dev, tol,
                             "<=", worst_dev <= tol,
                             "max |fitted j-slope - n| for n in {0,1}"});

    // j = 0 boundedness over a dyadic t-ladder on a smaller grid
    const spectral::GridSpec g2{c.dim, 512, kPi};
    spectral::DyadicDecomposition dec2(c.dim, 512);
    double gauge = 0.0;
    for (int n : {0, 1}) {
      std::vector<double> vals;
      for (int k = -6; k <= -1; ++k) {
        auto s2 = heat::kernel(sym, 0.0, std::pow(2.0, k), g2);
        const double v = heat::block_kernel_decay(s2, 0, n, 0.0, dec2);
        vals.push_back(v);
        rep->metrics.push_back(
            {"block-j0-n" + std::to_string(n), "m0", std::pow(2.0, k), v, 0.0});
      }
      const double hi = *std::max_element(vals.begin(), vals.end());
      gauge = std::max(gauge, hi / std::max(vals[0], vals[1]));
    }
    rep->verdicts.push_back({5, "block-kernel-j0-bounded", gauge, 1.25, "<=",
                             gauge <= 1.25,
                             "ladder sup over small-t saturation value"});
  }

  if (check_enabled(c, "duhamel")) {
    auto sym = heat::frozen_symbol(identity_sigma(), c.dim, alpha);
    const spectral::GridSpec g{c.dim, c.grid_n, kPi};
    spectral::GridFunction zero(g);
    spectral::GridFunction test(g);
    std::vector<double> x(static_cast<std::size_t>(c.dim));
    for (std::size_t i = 0; i < test.size(); ++i) {
      test.point(i, x.data());
      test[i] = std::exp(std::cos(x[0]));
    }
    auto force_at = [&](double s) {
      spectral::GridFunction f(g);
      for (std::size_t i = 0; i < f.size(); ++i) {
        f.point(i, x.data());
        f[i] = std::cos(2.0 * x[0]) * std::cos(3.0 * s);
      }
      return f;
    };
    std::vector<double> hs, errs;
    for (std::size_t steps : {8, 16, 32, 64}) {
      std::vector<double> t_grid(steps + 1);
      std::vector<spectral::GridFunction> f;
      for (std::size_t k = 0; k <= steps; ++k) {
        t_grid[k] = double(k) / double(steps);
        f.push_back(force_at(t_grid[k]));
      }
      auto u = heat::duhamel_solve(sym, zero, f, t_grid);
      const double r = heat::duhamel_weak_residual(sym, u, zero, f, test, t_grid);
      hs.push_back(1.0 / double(steps));
      errs.push_back(r);
      rep->metrics.push_back({"duhamel", "weak_residual", double(steps), r, 0.0});
    }
    auto fit = fit_exponent(hs, errs);
    rep->fits.push_back({"duhamel-residual", fit});
    const double tol = tol_or(c, "duhamel_order_min", 1.8);
    rep->verdicts.push_back({8, "duhamel-residual-order", fit.slope, tol, ">=",
                             fit.slope >= tol,
                             "observed order of the weak residual in dt"});
  }
}

// ------------------------------------------------------------------ besov --

void run_besov_experiment(const ExperimentConfig& c, Report* rep) {
  const double inf = std::numeric_limits<double>::infinity();
  // truncation level of every Besov sum on this grid
  rep->metrics.push_back({"decomposition", "j_max", double(c.grid_n),
                          double(spectral::DyadicDecomposition(1, c.grid_n).j_max()),
                          0.0});

  if (check_enabled(c, "telescoping")) {
    spectral::DyadicDecomposition dec(1, c.grid_n);
    double worst = 0.0;
    for (double kappa :
         {0.0, 0.3, 0.7, 1.0, 1.5, 2.0, 3.3, 5.0, 9.7, 33.0, 100.0, 200.0}) {
      for (int level = 1; level <= dec.j_max(); ++level) {
        double sum = 0.0;
        for (int j = 0; j <= level; ++j) {
          sum += spectral::DyadicDecomposition::ring(j, kappa);
        }
        worst = std::max(
            worst, std::abs(sum - spectral::DyadicDecomposition::cutoff(kappa, level)));
      }
    }
    rep->metrics.push_back({"telescoping", "max_err", 0.0, worst, 0.0});
    const double tol = tol_or(c, "telescoping_tol", 1e-12);
    rep->verdicts.push_back({6, "telescoping-partition", worst, tol, "<=",
                             worst <= tol, "pointwise partition error"});
  }

  if (check_enabled(c, "reproduction")) {
    const spectral::GridSpec g{c.dim, c.grid_n, c.grid_box};
    spectral::DyadicDecomposition dec(c.dim, c.grid_n);
    double worst = 0.0;
    const std::size_t draws = std::size_t(tol_or(c, "reproduction_draws", 50));
    for (std::size_t seed = 0; seed < draws; ++seed) {
      spectral::GridFunction f = spectral::make_rough_noise(g, seed);
      const double scale = f.max_abs();
      for (int j = 1; j + 1 <= dec.j_max(); j += 2) {
        spectral::GridFunction sum = spectral::lin_comb(
            1.0, spectral::block(j - 1, f, dec), 1.0, spectral::block(j, f, dec));
        sum = spectral::lin_comb(1.0, sum, 1.0, spectral::block(j + 1, f, dec));
        spectral::GridFunction lhs = spectral::block(j, sum, dec);
        spectral::GridFunction rhs = spectral::block(j, f, dec);
        double err = 0.0;
        for (std::size_t i = 0; i < lhs.size(); ++i) {
          err = std::max(err, std::abs(lhs[i] - rhs[i]));
        }
        worst = std::max(worst, err / scale);
      }
    }
    rep->metrics.push_back({"reproduction", "max_rel_err", 0.0, worst, 0.0});
    const double tol = tol_or(c, "reproduction_tol", 1e-12);
    rep->verdicts.push_back({6, "block-reproduction", worst, tol, "<=",
                             worst <= tol,
                             "max relative error of R_j applied to its ring sum"});
  }

  if (check_enabled(c, "equivalence")) {
    bool ok = true;
    double worst_drift = 0.0;
    for (double s : {0.3, 0.5, 0.7}) {
      double prev = 0.0;
      for (std::size_t n : {c.grid_n, 2 * c.grid_n}) {
        const spectral::GridSpec g{1, n, kPi};
        spectral::DyadicDecomposition dec(1, n);
        spectral::GridFunction f = spectral::make_weierstrass(g, s, 9, 42);
        const double ratio = spectral::besov_norm(f, s, inf, inf, dec) /
                             spectral::holder_norm(f, s);
        rep->metrics.push_back({"equivalence-s" + format_short(s), "ratio",
                                double(n), ratio, 0.0});
        ok = ok && ratio > 0.1 && ratio < 10.0;
        if (prev > 0.0) {
          const double drift = std::max(ratio / prev, prev / ratio);
          worst_drift = std::max(worst_drift, drift);
        }
        prev = ratio;
      }
    }
    const double tol = tol_or(c, "equivalence_drift_max", 2.0);
    rep->verdicts.push_back({6, "besov-holder-band", worst_drift, tol, "<=",
                             ok && worst_drift <= tol,
                             "band [0.1,10] plus ratio drift under n doubling"});
  }

  if (check_enabled(c, "commutator")) {
    const spectral::GridSpec g{1, c.grid_n, kPi};
    spectral::DyadicDecomposition dec(1, c.grid_n);
    const double beta = tol_or(c, "commutator_beta", 0.6);
    spectral::GridFunction f = spectral::make_weierstrass(g, beta, 11, 17);
    spectral::GridFunction gw = spectral::make_square_wave(g, 3);
    std::vector<double> js, vals;
    for (int j = 3; j <= dec.j_max() - 2; ++j) {
      const double v = spectral::commutator_decay(f, gw, j, inf, dec);
      js.push_back(std::pow(2.0, j));
      vals.push_back(v);
      rep->metrics.push_back({"commutator", "norm", double(j), v, 0.0});
    }
    auto fit = fit_exponent(js, vals);
    rep->fits.push_back({"commutator-decay", fit});
    const double tol = -beta + tol_or(c, "commutator_slack", 0.1);
    rep->verdicts.push_back({7, "commutator-decay", fit.slope, tol, "<=",
                             fit.slope <= tol,
                             "fitted log2 slope vs -beta + slack"});
  }
}

// --------------------------------------------------------------- simulate --

void run_simulate_experiment(const ExperimentConfig& c, int threads, Report* rep) {
  auto model = build_model(c);
  auto spec = noise::StableSpec::make(c.alpha, c.dim);

  // assumption validation on a probe grid over the box
  std::vector<std::pair<double, std::vector<double>>> probes;
  for (int i = 0; i < 33; ++i) {
    std::vector<double> x(static_cast<std::size_t>(c.dim));
    for (int a = 0; a < c.dim; ++a) {
      x[std::size_t(a)] =
          -c.grid_box + 2.0 * c.grid_box * double(i * (a + 1) % 33) / 32.0;
    }
    probes.push_back({0.0, x});
  }
  auto report = sde::validate_assumptions(model, probes);
  rep->metrics.push_back({"assumptions", "min_singular", 0.0, report.min_singular, 0.0});
  rep->metrics.push_back({"assumptions", "max_singular", 0.0, report.max_singular, 0.0});
  rep->metrics.push_back(
      {"assumptions", "max_sigma_quotient", 0.0, report.max_sigma_quotient, 0.0});
  rep->metrics.push_back(
      {"assumptions", "max_drift_quotient", 0.0, report.max_drift_quotient, 0.0});
  if (!report.pass) {
    throw std::runtime_error("simulate: model failed validation: " + report.message);
  }
  if (c.mc_paths == 0) return;  // empty ensemble: report with zero verdicts

  const double t = c.t_ladder.empty() ? 1.0 : c.t_ladder.back();
  auto batch = sde::simulate(model, spec, 0.0, t, {{std::vector<double>(
                                 static_cast<std::size_t>(c.dim), 0.0)}},
                             c.mc_steps, c.mc_paths, c.seed, threads);
  rep->metrics.push_back({"simulate", "censored", t, double(batch.censored), 0.0});
  rep->metrics.push_back(
      {"simulate", "censor_rate", t,
       double(batch.censored) / double(std::max<std::size_t>(1, batch.n_paths)),
       0.0});
  // bounded functionals of the terminal law
  for (double xi : {0.5, 1.0, 2.0}) {
    double m = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < batch.n_paths; ++k) {
      const double v = batch.value(0, k, 0);
      if (std::isnan(v)) continue;
      m += std::cos(xi * v);
      ++count;
    }
    rep->metrics.push_back({"simulate", "ecf", xi, m / double(count),
                            1.0 / std::sqrt(double(count))});
  }
}

// -------------------------------------------------- semigroup experiments --

void run_semigroup_experiment(const ExperimentConfig& c, int threads, Report* rep) {
  auto model = build_model(c);
  auto spec = noise::StableSpec::make(c.alpha, c.dim);
  semigroup::McConfig mc;
  mc.n_paths = c.mc_paths;
  mc.steps = c.mc_steps;
  mc.seed = c.seed;
  mc.chunk_paths = c.mc_chunk;
  mc.threads = threads;

  if (check_enabled(c, "oracle", c.preset == "identity")) {
    auto sym = heat::frozen_symbol({1.0}, 1, c.alpha);
    const double t = c.t_ladder.empty() ? 0.5 : c.t_ladder.back();
    auto phi = semigroup::make_cos_mode({1.0});
    semigroup::McConfig omc = mc;
    omc.steps = 1;  // constant coefficients: exact one-step law
    auto est = semigroup::estimate_semigroup(model, spec, phi, 0.0, t,
                                             {{0.0}, {0.7}, {2.1}}, omc);
    const double decay = std::exp(t * sym.psi1(1.0));
    double worst_z = 0.0;
    for (std::size_t q = 0; q < est.x_grid.size(); ++q) {
      const double expected = decay * std::cos(est.x_grid[q][0]);
      const double z =
          std::abs(est.value[q] - expected) / std::max(est.stderr_[q], 1e-300);
      worst_z = std::max(worst_z, z);
      rep->metrics.push_back({"oracle", "estimate", est.x_grid[q][0],
                              est.value[q], est.stderr_[q]});
    }
    rep->verdicts.push_back({9, "semigroup-oracle", worst_z, 3.0, "<=",
                             worst_z <= 3.0,
                             "max |estimate - e^{t psi} cos| in stderr units"});
    // contraction property
    const bool contraction =
        est.max_abs_value() <= est.phi_sup + 3.0 * est.max_stderr();
    rep->verdicts.push_back({0, "contraction", est.max_abs_value(),
                             est.phi_sup + 3.0 * est.max_stderr(), "<=",
                             contraction, "sup of estimate vs phi sup + noise"});
  }

  if (check_enabled(c, "envelopes", c.preset != "identity")) {
    std::vector<double> ladder =
        c.t_ladder.empty() ? default_dyadic_ladder(-6, -1) : c.t_ladder;
    const spectral::GridSpec probe_g{1, 64, kPi};
    spectral::GridFunction proto(probe_g);
    std::vector<std::vector<double>> holder_grid(proto.size());
    for (std::size_t i = 0; i < proto.size(); ++i) {
      holder_grid[i] = {proto.coord(i)};
    }
    // gradient probes around the bump edges
    const double bump_w = 1.5;
    auto phi = semigroup::make_step_bump(bump_w, 2.0 * kPi);
    const std::vector<double> edge = {-bump_w, bump_w};
    std::vector<double> grad_vals, grad_ses, holder_a, holder_b;
    const double gamma_a = 0.5;
    const double gamma_b = c.alpha - 0.1;
    for (double t : ladder) {
      semigroup::McConfig tmc = mc;
      tmc.steps = std::max<std::size_t>(
          8, std::size_t(std::llround(double(c.mc_steps) * t)));
      tmc.seed = mix64(c.seed ^ std::uint64_t(std::llround(t * 1e9)));
      const double h = 0.1 * std::pow(t, 1.0 / c.alpha);
      std::vector<std::vector<double>> probes;
      for (double e : edge) {
        probes.push_back({e});
        probes.push_back({e - 0.2});
        probes.push_back({e + 0.2});
      }
      auto grad = semigroup::gradient_sup(model, spec, phi, 0.0, t, probes, h, tmc);
      grad_vals.push_back(grad.value);
      grad_ses.push_back(grad.stderr_);
      rep->metrics.push_back({"gradient-sup", "value", t, grad.value, grad.stderr_});

      semigroup::McConfig hmc = tmc;
      hmc.seed = mix64(tmc.seed + 1);
      auto est = semigroup::estimate_semigroup(model, spec, phi, 0.0, t,
                                               holder_grid, hmc);
      const double sem_a = semigroup::holder_seminorm_probe(est, gamma_a, probe_g);
      const double sem_b = semigroup::holder_seminorm_probe(est, gamma_b, probe_g);
      holder_a.push_back(sem_a);
      holder_b.push_back(sem_b);
      rep->metrics.push_back({"holder-" + format_short(gamma_a), "seminorm", t,
                              sem_a, est.max_stderr()});
      rep->metrics.push_back({"holder-" + format_short(gamma_b), "seminorm", t,
                              sem_b, est.max_stderr()});
    }
    auto gfit = fit_exponent(ladder, grad_vals);
    rep->fits.push_back({"gradient-envelope", gfit});
    const double slope_floor = -1.0 / c.alpha - tol_or(c, "envelope_slack", 0.15);
    const double rms_cap = tol_or(c, "envelope_rms", 0.1);
    rep->verdicts.push_back({10, "gradient-envelope-slope", gfit.slope,
                             slope_floor, ">=", gfit.slope >= slope_floor,
                             "fitted slope of log gradient-sup vs log t"});
    rep->verdicts.push_back({10, "gradient-envelope-rms", gfit.residual_rms,
                             rms_cap, "<=", gfit.residual_rms <= rms_cap,
                             "residual RMS of the gradient fit"});
    auto hfit_a = fit_exponent(ladder, holder_a);
    auto hfit_b = fit_exponent(ladder, holder_b);
    rep->fits.push_back({"holder-envelope-" + format_short(gamma_a), hfit_a});
    rep->fits.push_back({"holder-envelope-" + format_short(gamma_b), hfit_b});
    const double floor_a = -gamma_a / c.alpha - tol_or(c, "envelope_slack", 0.15);
    const double floor_b = -gamma_b / c.alpha - tol_or(c, "envelope_slack", 0.15);
    rep->verdicts.push_back({11, "holder-envelope-" + format_short(gamma_a),
                             hfit_a.slope, floor_a, ">=",
                             hfit_a.slope >= floor_a,
                             "fitted slope of the C^gamma seminorm"});
    rep->verdicts.push_back({11, "holder-envelope-" + format_short(gamma_b),
                             hfit_b.slope, floor_b, ">=",
                             hfit_b.slope >= floor_b,
                             "fitted slope of the C^gamma seminorm"});
  }
}

// ------------------------------------------------------------- kolmogorov --

void run_kolmogorov_experiment(const ExperimentConfig& c, int threads, Report* rep) {
  auto model = build_model(c);
  auto spec = noise::StableSpec::make(c.alpha, c.dim);
  semigroup::McConfig mc;
  mc.n_paths = c.mc_paths;
  mc.steps = c.mc_steps;
  mc.seed = c.seed;
  mc.chunk_paths = c.mc_chunk;
  mc.threads = threads;
  const spectral::GridSpec g{1, c.grid_n, c.grid_box};
  const double t0 = 0.1, t1 = 0.5, t = 0.9;
  const std::size_t s_nodes = std::size_t(tol_or(c, "s_nodes", 8));

  auto res = semigroup::kolmogorov_residual(model, spec,
                                            semigroup::make_cos_mode({1.0}), t0,
                                            t1, t, g, mc, {}, s_nodes);
  rep->metrics.push_back({"kolmogorov", "residual", double(s_nodes), res.residual, 0.0});
  rep->metrics.push_back(
      {"kolmogorov", "noise_floor", double(s_nodes), res.noise_floor, 0.0});
  rep->metrics.push_back(
      {"kolmogorov", "trapz_bound", double(s_nodes), res.trapz_bound, 0.0});
  const double budget = 3.0 * (res.noise_floor + res.trapz_bound);
  rep->verdicts.push_back({12, "kolmogorov-residual", res.residual, budget, "<=",
                           res.residual <= budget,
                           "sup residual vs 3 (noise + trapezoid bound)"});

  // deterministic trapezoid-order replica on the closed-form evolution
  auto sym = heat::frozen_symbol({1.0}, 1, c.alpha);
  auto residual_det = [&](std::size_t nodes) {
    const double ds = (t1 - t0) / double(nodes);
    spectral::GridFunction proto(g);
    std::vector<double> integral(proto.size(), 0.0);
    std::vector<double> x(1);
    for (std::size_t j = 0; j <= nodes; ++j) {
      const double s = t0 + ds * double(j);
      spectral::GridFunction u(g);
      for (std::size_t i = 0; i < u.size(); ++i) {
        u.point(i, x.data());
        u[i] = std::exp((t - s) * sym.psi1(1.0)) * std::cos(x[0]);
      }
      auto lu = semigroup::apply_generator(model, s, c.alpha, u, {});
      const double w = (j == 0 || j == nodes) ? 0.5 * ds : ds;
      for (std::size_t i = 0; i < lu.size(); ++i) integral[i] += w * lu[i];
    }
    double sup = 0.0;
    for (std::size_t i = 0; i < proto.size(); ++i) {
      proto.point(i, x.data());
      const double p0 = std::exp((t - t0) * sym.psi1(1.0)) * std::cos(x[0]);
      const double p1 = std::exp((t - t1) * sym.psi1(1.0)) * std::cos(x[0]);
      sup = std::max(sup, std::abs(p0 - p1 - integral[i]));
    }
    return sup;
  };
  const double coarse = residual_det(s_nodes / 2);
  const double fine = residual_det(s_nodes);
  const double ratio = coarse / fine;
  rep->metrics.push_back({"kolmogorov", "det_residual", double(s_nodes / 2), coarse, 0.0});
  rep->metrics.push_back({"kolmogorov", "det_residual", double(s_nodes), fine, 0.0});
  rep->verdicts.push_back({12, "kolmogorov-trapezoid-contraction", ratio, 4.0,
                           "~=", ratio > 3.4 && ratio < 4.6,
                           "deterministic residual contraction under ds halving"});
}

// ---------------------------------------------------------------- density --

void run_density_experiment(const ExperimentConfig& c, int threads, Report* rep) {
  auto model = build_model(c);
  auto spec = noise::StableSpec::make(c.alpha, c.dim);
  const double t = c.t_ladder.empty() ? 1.0 : c.t_ladder.back();
  auto batch = sde::simulate(
      model, spec, 0.0, t,
      {std::vector<double>(static_cast<std::size_t>(c.dim), 0.0)}, c.mc_steps,
      c.mc_paths, c.seed, threads);
  const spectral::GridSpec g{c.dim, c.grid_n, c.grid_box};
  const double h0 = semigroup::silverman_bandwidth(batch, 0);
  rep->metrics.push_back({"density", "bandwidth", 0.0, h0, 0.0});

  const bool oracle_case =
      c.preset == "identity" && c.alpha == 1.0 && c.dim == 1;
  for (double mult : {0.5, 1.0, 2.0}) {
    auto kde = semigroup::density_estimate(batch, 0, h0 * mult, g);
    const double mass = kde.density.integral() + kde.out_of_box_fraction;
    rep->metrics.push_back({"density", "mass", mult, mass, 0.0});
    rep->metrics.push_back(
        {"density", "out_fraction", mult, kde.out_of_box_fraction, 0.0});
    if (oracle_case) {
      const double gamma = spec.c_alpha * t;
      double l1 = 0.0;
      for (std::size_t i = 0; i < kde.density.size(); ++i) {
        const double x = kde.density.coord(i);
        l1 += std::abs(kde.density[i] - gamma / (kPi * (x * x + gamma * gamma))) *
              kde.density.dx();
      }
      rep->metrics.push_back({"density", "l1_vs_cauchy", mult, l1, 0.0});
      if (mult == 1.0) {
        const double tol = tol_or(c, "kde_l1_tol", 0.02);
        rep->verdicts.push_back({13, "kde-cauchy-l1", l1, tol, "<=", l1 <= tol,
                                 "L1 distance of the KDE to the Cauchy law"});
        const double mass_tol = tol_or(c, "kde_mass_tol", 1e-3);
        rep->verdicts.push_back({13, "kde-mass", std::abs(mass - 1.0), mass_tol,
                                 "<=", std::abs(mass - 1.0) <= mass_tol,
                                 "in-box mass plus out-of-box fraction vs 1"});
      }
    }
  }

  // Besov probe of the KDE across the bandwidth sweep (observational)
  spectral::DyadicDecomposition dec(c.dim, c.grid_n);
  rep->metrics.push_back(
      {"decomposition", "j_max", double(c.grid_n), double(dec.j_max()), 0.0});
  const double threshold = std::min(c.alpha + model.beta - 1.0, 1.0);
  std::vector<double> etas = {0.1, 0.5 * threshold, 0.9 * threshold,
                              threshold + 0.5};
  for (double eta : etas) {
    double prev = 0.0;
    for (double mult : {0.5, 1.0, 2.0}) {
      auto kde = semigroup::density_estimate(batch, 0, h0 * mult, g);
      auto windowed = spectral::apply_radial_window(kde.density);
      const double bn = spectral::besov_norm(windowed.values, eta, 1.0, 1.0, dec);
      rep->metrics.push_back(
          {"besov-probe-eta" + format_short(eta), "norm", mult, bn, 0.0});
      if (prev > 0.0) {
        rep->metrics.push_back({"besov-probe-eta" + format_short(eta),
                                "ratio_to_prev", mult, bn / prev, 0.0});
      }
      prev = bn;
    }
  }
  rep->verdicts.push_back({13, "besov-probe-recorded", double(etas.size()), 0.0,
                           "observational", true,
                           "KDE Besov norms recorded across bandwidth sweep"});
}

}  // namespace

Report run(const ExperimentConfig& config, int threads) {
  config.validate();
  Report rep;
  rep.experiment = config.experiment;
  rep.preset = config.preset;
  rep.alpha = config.alpha;
  rep.config_echo = config.json_echo();
  const auto start = std::chrono::steady_clock::now();
  if (config.experiment == "kernel") {
    run_kernel_experiment(config, threads, &rep);
  } else if (config.experiment == "besov") {
    run_besov_experiment(config, &rep);
  } else if (config.experiment == "simulate") {
    run_simulate_experiment(config, threads, &rep);
  } else if (config.experiment == "semigroup-scaling") {
    run_semigroup_experiment(config, threads, &rep);
  } else if (config.experiment == "kolmogorov") {
    run_kolmogorov_experiment(config, threads, &rep);
  } else if (config.experiment == "density") {
    run_density_experiment(config, threads, &rep);
  } else {
    throw std::invalid_argument("run: unknown experiment " + config.experiment);
  }
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return rep;
}

// ---------------------------------------------------------------- writers --

namespace {

std::string report_stem(const Report& rep) {
  std::string stem = rep.experiment + "-" + rep.preset + "-" +
                     format_short(rep.alpha);
  // disambiguate single-check runs sharing (experiment, preset, alpha)
  const auto echo = json::parse(rep.config_echo);
  const auto checks = echo.at("checks").get<std::vector<std::string>>();
  if (checks.size() == 1) stem += "-" + checks[0];
  return stem;
}

}  // namespace

std::string write_metrics_csv(const Report& rep, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + report_stem(rep) + ".csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "experiment,preset,alpha,series,kind,abscissa,value,stderr\n";
  auto row = [&](const std::string& series, const std::string& kind,
                 double abscissa, double value, double se) {
    out << rep.experiment << "," << rep.preset << "," << format_short(rep.alpha)
        << "," << series << "," << kind << "," << format_double(abscissa) << ","
        << format_double(value) << "," << format_double(se) << "\n";
  };
  for (const auto& m : rep.metrics) {
    row(m.series, m.kind, m.abscissa, m.value, m.stderr_);
  }
  for (const auto& f : rep.fits) {
    row(f.name, "fit-slope", 0.0, f.fit.slope, f.fit.confidence_halfwidth);
    row(f.name, "fit-intercept", 0.0, f.fit.intercept, 0.0);
    row(f.name, "fit-residual-rms", 0.0, f.fit.residual_rms, 0.0);
    row(f.name, "fit-points", 0.0, double(f.fit.abscissae.size()), 0.0);
  }
  for (const auto& v : rep.verdicts) {
    out << rep.experiment << "," << rep.preset << "," << format_short(rep.alpha)
        << "," << v.name << ",verdict-" << (v.pass ? "pass" : "fail") << ","
        << double(v.criterion) << "," << format_double(v.measured) << ","
        << format_double(v.threshold) << "\n";
  }
  return path;
}

std::string write_report_txt(const Report& rep, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + report_stem(rep) + ".txt";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << rep.version << "\n";
  out << "experiment: " << rep.experiment << "  preset: " << rep.preset
      << "  alpha: " << format_short(rep.alpha) << "\n";
  out << "config: " << rep.config_echo << "\n";
  out << "runtime_seconds: " << rep.runtime_seconds << "\n\n";
  for (const auto& v : rep.verdicts) {
    out << (v.pass ? "PASS" : "FAIL") << "  [criterion "
        << (v.criterion ? std::to_string(v.criterion) : std::string("-"))
        << "] " << v.name << ": measured " << format_double(v.measured) << " "
        << v.comparator << " " << format_double(v.threshold) << "  (" << v.details
        << ")\n";
  }
  for (const auto& f : rep.fits) {
    out << "fit " << f.name << ": slope " << format_double(f.fit.slope)
        << " +- " << format_double(f.fit.confidence_halfwidth)
        << ", residual rms " << format_double(f.fit.residual_rms) << "\n";
  }
  return path;
}

std::string write_report_json(const Report& rep, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + report_stem(rep) + ".json";
  json j;
  j["version"] = rep.version;
  j["experiment"] = rep.experiment;
  j["preset"] = rep.preset;
  j["alpha"] = rep.alpha;
  j["config"] = json::parse(rep.config_echo);
  j["runtime_seconds"] = rep.runtime_seconds;
  j["metrics"] = json::array();
  for (const auto& m : rep.metrics) {
    j["metrics"].push_back({{"series", m.series},
                            {"kind", m.kind},
                            {"abscissa", m.abscissa},
                            {"value", m.value},
                            {"stderr", m.stderr_}});
  }
  j["fits"] = json::array();
  for (const auto& f : rep.fits) {
    j["fits"].push_back({{"name", f.name},
                         {"slope", f.fit.slope},
                         {"intercept", f.fit.intercept},
                         {"residual_rms", f.fit.residual_rms},
                         {"confidence_halfwidth", f.fit.confidence_halfwidth}});
  }
  j["verdicts"] = json::array();
  for (const auto& v : rep.verdicts) {
    j["verdicts"].push_back({{"criterion", v.criterion},
                             {"name", v.name},
                             {"measured", v.measured},
                             {"threshold", v.threshold},
                             {"comparator", v.comparator},
                             {"pass", v.pass},
                             {"details", v.details}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
  return path;
}

std::string write_fit_svg(const Report& rep, const FitRow& fit,
                          const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + report_stem(rep) + "-" + fit.name + ".svg";
  const auto& xs = fit.fit.abscissae;
  const auto& ys = fit.fit.ordinates;
  const int w = 480, h = 320, margin = 40;
  double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lx_min = std::min(lx_min, std::log(xs[i]));
    lx_max = std::max(lx_max, std::log(xs[i]));
    ly_min = std::min(ly_min, std::log(ys[i]));
    ly_max = std::max(ly_max, std::log(ys[i]));
  }
  if (ly_max - ly_min < 1e-12) ly_max = ly_min + 1.0;
  auto px = [&](double lx) {
    return margin + (lx - lx_min) / (lx_max - lx_min) * (w - 2 * margin);
  };
  auto py = [&](double ly) {
    return h - margin - (ly - ly_min) / (ly_max - ly_min) * (h - 2 * margin);
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"10\" y=\"20\" font-size=\"12\">" << fit.name << " slope "
      << format_short(fit.fit.slope) << "</text>\n";
  // fitted line
  out << "<line x1=\"" << px(lx_min) << "\" y1=\""
      << py(fit.fit.intercept + fit.fit.slope * lx_min) << "\" x2=\""
      << px(lx_max) << "\" y2=\""
      << py(fit.fit.intercept + fit.fit.slope * lx_max)
      << "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << "<circle cx=\"" << px(std::log(xs[i])) << "\" cy=\""
        << py(std::log(ys[i])) << "\" r=\"3\" fill=\"crimson\"/>\n";
  }
  out << "</svg>\n";
  return path;
}

}  // namespace stablelab::harness
