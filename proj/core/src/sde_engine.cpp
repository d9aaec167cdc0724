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

#include "stablelab/sde_engine.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "stablelab/parallel.hpp"
#include "stablelab/philox.hpp"

namespace stablelab::sde {

namespace {

constexpr double kOverflow = 1e12;
constexpr double kPi = std::numbers::pi;

/// Deterministic phases for the lacunary drift preset.
double preset_phase(std::uint64_t seed, int level, int axis) {
  const std::uint64_t h =
      mix64(seed ^ (std::uint64_t(level) << 32) ^ std::uint64_t(axis));
  return 2.0 * kPi * (double(h >> 11) / 9007199254740992.0);
}

}  // namespace

CoefficientModel make_preset(const std::string& name, int dim,
                             const PresetParams& p) {
  if (dim < 1) throw std::invalid_argument("make_preset: dim must be >= 1");
  CoefficientModel m;
  m.dim = dim;
  m.name = name;

  if (name == "identity") {
    m.sigma_diagonal = true;
    m.sigma = [dim](double, const double*, double* out) {
      for (int i = 0; i < dim; ++i) out[i] = 1.0;
    };
    m.c0 = 1.0;
    m.c1 = 0.0;
    m.beta = 1.0;
    m.c3 = 0.0;
    return m;
  }

  if (name == "diag-sine") {
    const double amp = p.amp;
    const double freq = p.freq;
    if (!(amp > 0.0 && amp < 1.0)) {
      throw std::invalid_argument("diag-sine: amp must lie in (0,1)");
    }
    m.sigma_diagonal = true;
    m.sigma = [dim, amp, freq](double, const double* x, double* out) {
      for (int i = 0; i < dim; ++i) out[i] = 1.0 + amp * std::sin(freq * x[i]);
    };
    m.c0 = std::max(1.0 / (1.0 - amp), 1.0 + amp);
    m.c1 = amp * freq;
    m.beta = 1.0;
    m.c3 = 0.0;
    return m;
  }

  if (name == "rotation-mix") {
    if (dim < 2) throw std::invalid_argument("rotation-mix: needs dim >= 2");
    const double amp = p.amp;
    const double twist = p.twist;
    m.sigma_diagonal = false;
    m.sigma = [dim, amp, twist](double, const double* x, double* out) {
      // rotation in the (0,1) plane by twist*sin(sum x_i), then diagonal sine
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += x[i];
      const double th = twist * std::sin(s);
      const double c = std::cos(th), sn = std::sin(th);
      for (int r = 0; r < dim; ++r) {
        for (int cidx = 0; cidx < dim; ++cidx) {
          double rot = (r == cidx) ? 1.0 : 0.0;
          if (r == 0 && cidx == 0) rot = c;
          if (r == 0 && cidx == 1) rot = -sn;
          if (r == 1 && cidx == 0) rot = sn;
          if (r == 1 && cidx == 1) rot = c;
          out[r * dim + cidx] = rot * (1.0 + amp * std::sin(x[cidx]));
        }
      }
    };
    m.c0 = std::max(1.0 / (1.0 - amp), 1.0 + amp);
    m.c1 = amp + twist * (1.0 + amp);
    m.beta = 1.0;
    m.c3 = 0.0;
    return m;
  }

  if (name == "holder-drift") {
    const double amp = p.amp;
    const double beta = p.drift_beta;
    const double damp = p.drift_amp;
    const int levels = p.levels;
    const std::uint64_t seed = p.seed;
    if (!(beta > 0.0 && beta <= 1.0)) {
      throw std::invalid_argument("holder-drift: drift_beta must lie in (0,1]");
    }
    m.sigma_diagonal = true;
    m.sigma = [dim, amp](double, const double* x, double* out) {
      for (int i = 0; i < dim; ++i) out[i] = 1.0 + amp * std::sin(x[i]);
    };
    double norm = 0.0;
    for (int k = 0; k <= levels; ++k) norm += std::pow(2.0, -beta * k);
    // level tables are fixed per preset; the drift sits in the Euler hot loop,
    // so cos(2^k x + phi_k) is evaluated by repeated complex squaring of e^{ix}
    std::vector<double> amps(std::size_t(levels) + 1);
    std::vector<double> cph(std::size_t(levels + 1) * std::size_t(dim));
    std::vector<double> sph(std::size_t(levels + 1) * std::size_t(dim));
    for (int k = 0; k <= levels; ++k) {
      amps[std::size_t(k)] = damp * std::pow(2.0, -beta * k) / norm;
      for (int i = 0; i < dim; ++i) {
        const double ph = preset_phase(seed, k, i);
        cph[std::size_t(k) * std::size_t(dim) + std::size_t(i)] = std::cos(ph);
        sph[std::size_t(k) * std::size_t(dim) + std::size_t(i)] = std::sin(ph);
      }
    }
    m.drift = [dim, levels, amps = std::move(amps), cph = std::move(cph),
               sph = std::move(sph)](double, const double* x, double* out) {
      for (int i = 0; i < dim; ++i) {
        double zr = std::cos(x[i]);
        double zi = std::sin(x[i]);
        double v = 0.0;
        for (int k = 0; k <= levels; ++k) {
          const std::size_t e = std::size_t(k) * std::size_t(dim) + std::size_t(i);
          // cos(2^k x + phi) = Re(z_k e^{i phi}), z_{k+1} = z_k^2
          v += amps[std::size_t(k)] * (zr * cph[e] - zi * sph[e]);
          const double nr = zr * zr - zi * zi;
          zi = 2.0 * zr * zi;
          zr = nr;
        }
        out[i] = v;
      }
    };
    m.c0 = std::max(1.0 / (1.0 - amp), 1.0 + amp);
    m.c1 = amp;
    m.beta = beta;
    // |cos(a)-cos(b)| <= min(2^k|h|, 2) <= 2^{1-beta} (2^k |h|)^beta per level
    m.c3 = damp * std::max(1.0, std::pow(2.0, 1.0 - beta) * double(levels + 1) / norm);
    return m;
  }

  throw std::invalid_argument("make_preset: unknown preset '" + name + "'");
}

CoefficientModel make_tabulated(int dim, std::size_t n, double box,
                                std::vector<std::vector<double>> sigma_tables,
                                std::vector<std::vector<double>> drift_tables,
                                bool diagonal, double c0, double c1, double beta,
                                double c3) {
  const std::size_t entries = diagonal ? std::size_t(dim)
                                       : std::size_t(dim) * std::size_t(dim);
  if (sigma_tables.size() != entries) {
    throw std::invalid_argument("make_tabulated: wrong number of sigma tables");
  }
  if (!drift_tables.empty() && drift_tables.size() != std::size_t(dim)) {
    throw std::invalid_argument("make_tabulated: wrong number of drift tables");
  }
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= n;
  for (const auto& tb : sigma_tables) {
    if (tb.size() != total) throw std::invalid_argument("make_tabulated: table size");
  }
  for (const auto& tb : drift_tables) {
    if (tb.size() != total) throw std::invalid_argument("make_tabulated: table size");
  }

  // multilinear periodic interpolation on [-box, box)^d
  auto interp = [dim, n, box](const std::vector<double>& table, const double* x) {
    const double dx = 2.0 * box / double(n);
    std::size_t base_idx[4];
    double frac[4];
    for (int a = 0; a < dim; ++a) {
      double u = (x[a] + box) / dx;
      u -= std::floor(u / double(n)) * double(n);  // periodic wrap
      const double fl = std::floor(u);
      base_idx[a] = std::size_t(fl) % n;
      frac[a] = u - fl;
    }
    double acc = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t(1) << dim); ++corner) {
      double w = 1.0;
      std::size_t idx = 0;
      for (int a = 0; a < dim; ++a) {
        const bool hi = (corner >> a) & 1;
        w *= hi ? frac[a] : 1.0 - frac[a];
        const std::size_t ia = hi ? (base_idx[a] + 1) % n : base_idx[a];
        idx = idx * n + ia;
      }
      acc += w * table[idx];
    }
    return acc;
  };

  CoefficientModel m;
  m.dim = dim;
  m.name = "tabulated";
  m.sigma_diagonal = diagonal;
  m.sigma = [interp, tables = std::move(sigma_tables), entries](
                double, const double* x, double* out) {
    for (std::size_t e = 0; e < entries; ++e) out[e] = interp(tables[e], x);
  };
  if (!drift_tables.empty()) {
    m.drift = [interp, tables = std::move(drift_tables), dim](
                  double, const double* x, double* out) {
      for (int i = 0; i < dim; ++i) out[i] = interp(tables[std::size_t(i)], x);
    };
  }
  m.c0 = c0;
  m.c1 = c1;
  m.beta = beta;
  m.c3 = c3;
  return m;
}

namespace {

void eval_sigma_full(const CoefficientModel& m, double t, const double* x,
                     double* full) {
  const int d = m.dim;
  if (m.sigma_diagonal) {
    double diag[4];
    m.sigma(t, x, diag);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) full[r * d + c] = r == c ? diag[r] : 0.0;
    }
  } else {
    m.sigma(t, x, full);
  }
}

std::string format_point(double t, const std::vector<double>& x) {
  std::string s = "(t=" + std::to_string(t) + ", x=[";
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += std::to_string(x[i]);
    if (i + 1 < x.size()) s += ", ";
  }
  return s + "])";
}

}  // namespace

AssumptionReport validate_assumptions(
    const CoefficientModel& model,
    const std::vector<std::pair<double, std::vector<double>>>& probes) {
  if (probes.empty()) {
    throw std::invalid_argument("validate_assumptions: probe set is empty");
  }
  const int d = model.dim;
  AssumptionReport rep;
  rep.min_singular = std::numeric_limits<double>::infinity();
  rep.max_singular = 0.0;

  std::vector<double> sig(std::size_t(d) * std::size_t(d));
  Eigen::MatrixXd mat(d, d);
  for (const auto& [t, x] : probes) {
    if (x.size() != std::size_t(d)) {
      throw std::invalid_argument("validate_assumptions: probe dim mismatch");
    }
    eval_sigma_full(model, t, x.data(), sig.data());
    for (double v : sig) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("validate_assumptions: sigma evaluation failed at " +
                                 format_point(t, x));
      }
    }
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) mat(r, c) = sig[std::size_t(r * d + c)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
    const double lo = svd.singularValues().minCoeff();
    const double hi = svd.singularValues().maxCoeff();
    if (lo < rep.min_singular) {
      rep.min_singular = lo;
      if (!(lo >= 1.0 / model.c0 - 1e-9)) {
        rep.message = "ellipticity violated at " + format_point(t, x);
      }
    }
    rep.max_singular = std::max(rep.max_singular, hi);
  }

  // difference quotients over all probe pairs sharing a time
  std::vector<double> sig2(std::size_t(d) * std::size_t(d));
  std::vector<double> b1(static_cast<std::size_t>(d)), b2(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < probes.size(); ++i) {
    for (std::size_t j = i + 1; j < probes.size(); ++j) {
      if (probes[i].first != probes[j].first) continue;
      const double t = probes[i].first;
      const auto& xi = probes[i].second;
      const auto& xj = probes[j].second;
      double dist2 = 0.0;
      for (int a = 0; a < d; ++a) dist2 += (xi[a] - xj[a]) * (xi[a] - xj[a]);
      const double dist = std::sqrt(dist2);
      if (dist == 0.0) continue;
      eval_sigma_full(model, t, xi.data(), sig.data());
      eval_sigma_full(model, t, xj.data(), sig2.data());
      double fro = 0.0;
      for (std::size_t e = 0; e < sig.size(); ++e) {
        fro += (sig[e] - sig2[e]) * (sig[e] - sig2[e]);
      }
      rep.max_sigma_quotient =
          std::max(rep.max_sigma_quotient, std::sqrt(fro) / dist);
      if (model.has_drift()) {
        model.drift(t, xi.data(), b1.data());
        model.drift(t, xj.data(), b2.data());
        double bd = 0.0;
        for (int a = 0; a < d; ++a) bd += (b1[a] - b2[a]) * (b1[a] - b2[a]);
        rep.max_drift_quotient = std::max(
            rep.max_drift_quotient, std::sqrt(bd) / std::pow(dist, model.beta));
      }
    }
  }
  if (model.has_drift()) {
    for (const auto& [t, x] : probes) {
      model.drift(t, x.data(), b1.data());
      double norm = 0.0;
      for (int a = 0; a < d; ++a) norm += b1[a] * b1[a];
      rep.max_drift_abs = std::max(rep.max_drift_abs, std::sqrt(norm));
    }
  }

  rep.ellipticity_ok = rep.min_singular >= 1.0 / model.c0 - 1e-9 &&
                       rep.max_singular <= model.c0 + 1e-9;
  rep.sigma_lipschitz_ok = rep.max_sigma_quotient <= model.c1 + 1e-9;
  rep.drift_holder_ok = rep.max_drift_quotient <= model.c3 + 1e-9;
  rep.drift_bound_ok = rep.max_drift_abs <= model.c3 + 1e-9;
  rep.pass = rep.ellipticity_ok && rep.sigma_lipschitz_ok &&
             rep.drift_holder_ok && rep.drift_bound_ok;
  if (!rep.pass && rep.message.empty()) {
    rep.message = "declared constants exceeded (see quotients)";
  }
  return rep;
}

namespace {

/// Euler evolution of all points of one path chunk.  Noise is drawn per
/// (global path, step, coordinate); every point of a path shares its noise.
struct ChunkJob {
  const CoefficientModel* model;
  const noise::StableSpec* spec;
  double s, t;
  const std::vector<std::vector<double>>* x0s;  // either this...
  const double* per_path_states;                // ...or one state per path
  std::size_t steps;
  std::uint64_t seed;

  void run(std::size_t path_begin, std::size_t path_count, double* terminals,
           std::size_t* censored_out) const {
    const int d = model->dim;
    const std::size_t n_points = x0s ? x0s->size() : 1;
    const double dt = (t - s) / double(steps);
    const double scale = std::pow(spec->c_alpha * dt, 1.0 / spec->alpha);
    const bool diag = model->sigma_diagonal;
    const bool has_b = model->has_drift();

    std::vector<double> state(n_points * std::size_t(d));
    std::vector<double> dz(static_cast<std::size_t>(d));
    std::vector<double> sig(diag ? std::size_t(d)
                                 : std::size_t(d) * std::size_t(d));
    std::vector<double> b(static_cast<std::size_t>(d));
    std::vector<bool> dead(n_points);
    std::size_t censored = 0;

    for (std::size_t pi = 0; pi < path_count; ++pi) {
      const std::size_t path = path_begin + pi;
      for (std::size_t q = 0; q < n_points; ++q) {
        const double* x0 = x0s ? (*x0s)[q].data() : per_path_states + path * d;
        for (int a = 0; a < d; ++a) state[q * d + a] = x0[a];
        dead[q] = false;
      }
      for (std::size_t k = 0; k < steps; ++k) {
        const double tk = s + dt * double(k);
        for (int a = 0; a < d; ++a) {
          dz[std::size_t(a)] =
              scale * noise::standard_stable_at(spec->alpha, seed, path,
                                                std::uint32_t(k), std::uint32_t(a));
        }
        for (std::size_t q = 0; q < n_points; ++q) {
          if (dead[q]) continue;
          double* x = state.data() + q * std::size_t(d);
          if (has_b) {
            model->drift(tk, x, b.data());
          }
          model->sigma(tk, x, sig.data());
          bool ok = true;
          if (diag) {
            for (int a = 0; a < d; ++a) {
              x[a] += (has_b ? b[std::size_t(a)] * dt : 0.0) +
                      sig[std::size_t(a)] * dz[std::size_t(a)];
              if (!(std::abs(x[a]) < kOverflow)) ok = false;
            }
          } else {
            double upd[4];
            for (int r = 0; r < d; ++r) {
              double acc = has_b ? b[std::size_t(r)] * dt : 0.0;
              for (int c = 0; c < d; ++c) {
                acc += sig[std::size_t(r * d + c)] * dz[std::size_t(c)];
              }
              upd[r] = x[r] + acc;
            }
            for (int r = 0; r < d; ++r) {
              x[r] = upd[r];
              if (!(std::abs(x[r]) < kOverflow)) ok = false;
            }
          }
          if (!ok) {
            dead[q] = true;
            ++censored;
            for (int a = 0; a < d; ++a) {
              x[a] = std::numeric_limits<double>::quiet_NaN();
            }
          }
        }
      }
      for (std::size_t q = 0; q < n_points; ++q) {
        for (int a = 0; a < d; ++a) {
          terminals[(q * path_count + pi) * std::size_t(d) + std::size_t(a)] =
              state[q * std::size_t(d) + std::size_t(a)];
        }
      }
    }
    *censored_out = censored;
  }
};

}  // namespace

void run_chunked(const CoefficientModel& model, const noise::StableSpec& spec,
                 double s, double t, const std::vector<std::vector<double>>& x0s,
                 std::size_t steps, std::size_t n_paths, std::uint64_t seed,
                 std::size_t chunk_paths, int threads, const ChunkSink& sink) {
  if (!(t > s)) throw std::invalid_argument("run_chunked: need t > s");
  if (steps < 1) throw std::invalid_argument("run_chunked: steps must be >= 1");
  if (model.dim != spec.dim) throw std::invalid_argument("run_chunked: dim mismatch");
  if (model.dim > 4) throw std::invalid_argument("run_chunked: dim must be <= 4");
  for (const auto& x0 : x0s) {
    if (x0.size() != std::size_t(model.dim)) {
      throw std::invalid_argument("run_chunked: initial point dim mismatch");
    }
  }
  if (n_paths == 0 || x0s.empty()) return;
  if (chunk_paths == 0) chunk_paths = 16384;
  const std::size_t n_chunks = (n_paths + chunk_paths - 1) / chunk_paths;
  const int d = model.dim;

  ChunkJob job{&model, &spec, s, t, &x0s, nullptr, steps, seed};
  parallel_for(n_chunks, threads, [&](std::size_t chunk) {
    const std::size_t begin = chunk * chunk_paths;
    const std::size_t count = std::min(chunk_paths, n_paths - begin);
    std::vector<double> terminals(x0s.size() * count * std::size_t(d));
    std::size_t censored = 0;
    job.run(begin, count, terminals.data(), &censored);
    for (std::size_t q = 0; q < x0s.size(); ++q) {
      // per-point censor count: recount NaNs in this point's slab
      std::size_t point_censored = 0;
      const double* slab = terminals.data() + q * count * std::size_t(d);
      for (std::size_t i = 0; i < count; ++i) {
        if (std::isnan(slab[i * std::size_t(d)])) ++point_censored;
      }
      sink(chunk, q, slab, count, point_censored);
    }
  });
}

PathBatch simulate(const CoefficientModel& model, const noise::StableSpec& spec,
                   double s, double t, const std::vector<std::vector<double>>& x0s,
                   std::size_t steps, std::size_t n_paths, std::uint64_t seed,
                   int threads) {
  PathBatch batch;
  batch.s = s;
  batch.t = t;
  batch.steps = steps;
  batch.n_paths = n_paths;
  batch.seed = seed;
  batch.dim = model.dim;
  batch.x0s = x0s;
  const std::size_t total =
      x0s.size() * n_paths * std::size_t(model.dim) * sizeof(double);
  if (total > std::size_t(2) << 30) {
    throw std::invalid_argument(
        "simulate: batch exceeds 2 GiB; use run_chunked for streaming access");
  }
  batch.terminal.assign(x0s.size() * n_paths * std::size_t(model.dim), 0.0);
  if (n_paths == 0 || x0s.empty()) return batch;

  std::vector<std::size_t> censored_per_chunk;
  const std::size_t chunk_paths = 16384;
  const std::size_t n_chunks = (n_paths + chunk_paths - 1) / chunk_paths;
  censored_per_chunk.assign(n_chunks * x0s.size(), 0);
  run_chunked(model, spec, s, t, x0s, steps, n_paths, seed, chunk_paths, threads,
              [&](std::size_t chunk, std::size_t point, const double* terms,
                  std::size_t count, std::size_t censored) {
                const std::size_t begin = chunk * chunk_paths;
                censored_per_chunk[chunk * x0s.size() + point] = censored;
                double* dst = batch.terminal.data() +
                              (point * n_paths + begin) * std::size_t(model.dim);
                std::copy(terms, terms + count * std::size_t(model.dim), dst);
              });
  for (std::size_t c : censored_per_chunk) batch.censored += c;
  return batch;
}

PathBatch simulate_from(const CoefficientModel& model,
                        const noise::StableSpec& spec, double s, double t,
                        const std::vector<double>& states, std::size_t steps,
                        std::uint64_t seed, int threads) {
  if (!(t > s)) throw std::invalid_argument("simulate_from: need t > s");
  if (steps < 1) throw std::invalid_argument("simulate_from: steps must be >= 1");
  const int d = model.dim;
  if (states.size() % std::size_t(d) != 0) {
    throw std::invalid_argument("simulate_from: states size not a multiple of dim");
  }
  const std::size_t n_paths = states.size() / std::size_t(d);

  PathBatch batch;
  batch.s = s;
  batch.t = t;
  batch.steps = steps;
  batch.n_paths = n_paths;
  batch.seed = seed;
  batch.dim = d;
  batch.terminal.assign(states.size(), 0.0);
  if (n_paths == 0) return batch;

  const std::size_t chunk_paths = 16384;
  const std::size_t n_chunks = (n_paths + chunk_paths - 1) / chunk_paths;
  std::vector<std::size_t> censored_per_chunk(n_chunks, 0);
  ChunkJob job{&model, &spec, s, t, nullptr, states.data(), steps, seed};
  parallel_for(n_chunks, threads, [&](std::size_t chunk) {
    const std::size_t begin = chunk * chunk_paths;
    const std::size_t count = std::min(chunk_paths, n_paths - begin);
    job.run(begin, count, batch.terminal.data() + begin * std::size_t(d),
            &censored_per_chunk[chunk]);
  });
  for (std::size_t c : censored_per_chunk) batch.censored += c;
  return batch;
}

}  // namespace stablelab::sde
