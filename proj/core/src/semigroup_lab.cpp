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

#include "stablelab/semigroup_lab.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "stablelab/fft.hpp"
#include "stablelab/philox.hpp"
#include "stablelab/quadrature.hpp"

namespace stablelab::semigroup {

namespace {



double wrap_periodic(double x, double period) {
  return x - std::floor(x / period) * period;
}

}  // namespace

TestFunction make_constant(double c) {
  TestFunction f;
  f.eval = [c](const double*, int) { return c; };
  f.sup_norm = std::abs(c);
  f.name = "const";
  return f;
}

TestFunction make_cos_mode(const std::vector<double>& xi) {
  TestFunction f;
  f.eval = [xi](const double* x, int dim) {
    double phase = 0.0;
    for (int a = 0; a < dim; ++a) phase += xi[std::size_t(a)] * x[a];
    return std::cos(phase);
  };
  f.sup_norm = 1.0;
  f.name = "cos";
  return f;
}

TestFunction make_step_bump(double width, double period) {
  TestFunction f;
  f.eval = [width, period](const double* x, int) {
    const double u = wrap_periodic(x[0] + period / 2.0, period) - period / 2.0;
    return std::abs(u) <= width ? 1.0 : -1.0;
  };
  f.sup_norm = 1.0;
  f.name = "step";
  return f;
}

double SemigroupEstimate::max_stderr() const {
  double m = 0.0;
  for (double s : stderr_) m = std::max(m, s);
  return m;
}

double SemigroupEstimate::max_abs_value() const {
  double m = 0.0;
  for (double v : value) m = std::max(m, std::abs(v));
  return m;
}

namespace {

/// Per-(chunk, point) partial sums; reduced sequentially over the fixed chunk
/// grid so results never depend on the thread schedule.
struct PartialSums {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
  std::size_t censored = 0;
};

std::vector<PartialSums> accumulate_phi(
    const sde::CoefficientModel& model, const noise::StableSpec& spec,
    const TestFunction& phi, double s, double t,
    const std::vector<std::vector<double>>& x_grid, const McConfig& mc,
    std::size_t* n_chunks_out) {
  const std::size_t n_chunks =
      (mc.n_paths + mc.chunk_paths - 1) / mc.chunk_paths;
  *n_chunks_out = n_chunks;
  std::vector<PartialSums> slots(n_chunks * x_grid.size());
  const int dim = model.dim;
  sde::run_chunked(
      model, spec, s, t, x_grid, mc.steps, mc.n_paths, mc.seed, mc.chunk_paths,
      mc.threads,
      [&](std::size_t chunk, std::size_t point, const double* term,
          std::size_t paths, std::size_t censored) {
        PartialSums& ps = slots[chunk * x_grid.size() + point];
        ps.censored = censored;
        for (std::size_t i = 0; i < paths; ++i) {
          const double* x = term + i * std::size_t(dim);
          if (std::isnan(x[0])) continue;
          const double v = phi.eval(x, dim);
          ps.sum += v;
          ps.sum_sq += v * v;
          ++ps.count;
        }
      });
  return slots;
}

}  // namespace

SemigroupEstimate estimate_semigroup(const sde::CoefficientModel& model,
                                     const noise::StableSpec& spec,
                                     const TestFunction& phi, double s, double t,
                                     const std::vector<std::vector<double>>& x_grid,
                                     const McConfig& mc) {
  if (x_grid.empty()) {
    throw std::invalid_argument("estimate_semigroup: empty evaluation grid");
  }
  SemigroupEstimate est;
  est.x_grid = x_grid;
  est.s = s;
  est.t = t;
  est.phi_sup = phi.sup_norm;
  est.n_paths = mc.n_paths;
  est.steps = mc.steps;
  est.seed = mc.seed;
  est.value.assign(x_grid.size(), 0.0);
  est.stderr_.assign(x_grid.size(), 0.0);
  if (mc.n_paths == 0) return est;

  std::size_t n_chunks = 0;
  auto slots = accumulate_phi(model, spec, phi, s, t, x_grid, mc, &n_chunks);
  for (std::size_t q = 0; q < x_grid.size(); ++q) {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0, censored = 0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
      const PartialSums& ps = slots[c * x_grid.size() + q];
      sum += ps.sum;
      sum_sq += ps.sum_sq;
      count += ps.count;
      censored += ps.censored;
    }
    est.censored += censored;
    if (count == 0) continue;
    const double mean = sum / double(count);
    const double var = std::max(0.0, sum_sq / double(count) - mean * mean);
    est.value[q] = mean;
    est.stderr_[q] = std::sqrt(var / double(count));
  }
  if (est.max_stderr() > mc.stderr_ceiling) est.flagged = true;
  return est;
}

GradientEstimate gradient_sup(const sde::CoefficientModel& model,
                              const noise::StableSpec& spec,
                              const TestFunction& phi, double s, double t,
                              const std::vector<std::vector<double>>& probes,
                              double h, const McConfig& mc) {
  if (probes.empty()) {
    throw std::invalid_argument("gradient_sup: empty probe set");
  }
  if (!(h > 0.0)) throw std::invalid_argument("gradient_sup: h must be positive");
  GradientEstimate out;
  out.h = h;
  out.h_warning = h > 0.1 * std::pow(t - s, 1.0 / spec.alpha) + 1e-15;

  const int dim = model.dim;
  // paired points: for each probe and axis, x + h e_a then x - h e_a
  std::vector<std::vector<double>> points;
  points.reserve(probes.size() * std::size_t(2 * dim));
  for (const auto& p : probes) {
    for (int a = 0; a < dim; ++a) {
      auto plus = p, minus = p;
      plus[std::size_t(a)] += h;
      minus[std::size_t(a)] -= h;
      points.push_back(plus);
      points.push_back(minus);
    }
  }

  // statistics of the per-path central difference (common random numbers);
  // run_chunked visits the points of a chunk in order, so the "+" slab can be
  // buffered until its "-" partner arrives
  const std::size_t n_chunks =
      (mc.n_paths + mc.chunk_paths - 1) / mc.chunk_paths;
  const std::size_t pairs = probes.size() * std::size_t(dim);
  std::vector<PartialSums> slots(n_chunks * pairs);
  std::vector<std::vector<double>> buffers(n_chunks);

  sde::run_chunked(
      model, spec, s, t, points, mc.steps, mc.n_paths, mc.seed, mc.chunk_paths,
      mc.threads,
      [&](std::size_t chunk, std::size_t point, const double* term,
          std::size_t paths, std::size_t) {
        std::vector<double>& plus = buffers[chunk];
        if (point % 2 == 0) {
          plus.assign(term, term + paths * std::size_t(dim));
          return;
        }
        const std::size_t pair = point / 2;
        PartialSums& ps = slots[chunk * pairs + pair];
        for (std::size_t i = 0; i < paths; ++i) {
          const double* xp = plus.data() + i * std::size_t(dim);
          const double* xm = term + i * std::size_t(dim);
          if (std::isnan(xp[0]) || std::isnan(xm[0])) continue;
          const double d = (phi.eval(xp, dim) - phi.eval(xm, dim)) / (2.0 * h);
          ps.sum += d;
          ps.sum_sq += d * d;
          ++ps.count;
        }
      });

  double best = -1.0, best_se = 0.0;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    double mag2 = 0.0, var_sum = 0.0;
    std::vector<double> comp(static_cast<std::size_t>(dim));
    std::vector<double> comp_se(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) {
      const std::size_t pair = p * std::size_t(dim) + std::size_t(a);
      double sum = 0.0, sum_sq = 0.0;
      std::size_t count = 0;
      for (std::size_t c = 0; c < n_chunks; ++c) {
        const PartialSums& ps = slots[c * pairs + pair];
        sum += ps.sum;
        sum_sq += ps.sum_sq;
        count += ps.count;
      }
      const double mean = count ? sum / double(count) : 0.0;
      const double var =
          count ? std::max(0.0, sum_sq / double(count) - mean * mean) : 0.0;
      comp[std::size_t(a)] = mean;
      comp_se[std::size_t(a)] = count ? std::sqrt(var / double(count)) : 0.0;
      mag2 += mean * mean;
    }
    const double mag = std::sqrt(mag2);
    // delta-method error of the magnitude
    if (mag > 0.0) {
      for (int a = 0; a < dim; ++a) {
        const double w = comp[std::size_t(a)] / mag;
        var_sum += w * w * comp_se[std::size_t(a)] * comp_se[std::size_t(a)];
      }
    } else {
      for (int a = 0; a < dim; ++a) {
        var_sum += comp_se[std::size_t(a)] * comp_se[std::size_t(a)];
      }
    }
    if (mag > best) {
      best = mag;
      best_se = std::sqrt(var_sum);
    }
  }
  out.value = best;
  out.stderr_ = best_se;
  return out;
}

namespace {

bool grids_match(const SemigroupEstimate& est, const spectral::GridSpec& grid) {
  std::size_t total = 1;
  for (int a = 0; a < grid.dim; ++a) total *= grid.n;
  if (est.x_grid.size() != total) return false;
  spectral::GridFunction probe(grid);
  std::vector<double> x(static_cast<std::size_t>(grid.dim));
  for (std::size_t i = 0; i < total; ++i) {
    probe.point(i, x.data());
    for (int a = 0; a < grid.dim; ++a) {
      if (std::abs(est.x_grid[i][std::size_t(a)] - x[std::size_t(a)]) >
          1e-9 * grid.box) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

double holder_seminorm_probe(const SemigroupEstimate& est, double gamma,
                             const spectral::GridSpec& grid) {
  if (grids_match(est, grid)) {
    spectral::GridFunction f = spectral::GridFunction::from_values(
        grid.dim, grid.n, grid.box, est.value);
    return spectral::holder_seminorm(f, gamma);
  }
  // windowed embedding of a 1-d partial grid into the periodic box
  if (grid.dim != 1) {
    throw std::invalid_argument(
        "holder_seminorm_probe: estimate grid does not match, and windowed "
        "embedding is only available in one dimension");
  }
  spectral::GridFunction f(grid);
  double mean = 0.0;
  for (double v : est.value) mean += v;
  mean /= double(est.value.size());
  const double lo = est.x_grid.front()[0];
  const double hi = est.x_grid.back()[0];
  const double span = hi - lo;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.coord(i);
    if (x < lo || x > hi) continue;
    const double u = (x - lo) / span;
    const double pos = u * double(est.value.size() - 1);
    const std::size_t k = std::min(std::size_t(pos), est.value.size() - 2);
    const double frac = pos - double(k);
    const double v =
        est.value[k] * (1.0 - frac) + est.value[k + 1] * frac - mean;
    // taper the outer 10% of the span on each side
    const double edge = std::min(u, 1.0 - u) / 0.1;
    f[i] = v * smooth_step(std::min(1.0, edge));
  }
  return spectral::holder_seminorm(f, gamma);
}

namespace {

/// Numeric jump transform of one frequency: the symmetrized second-difference
/// integral 2 int_0^inf (cos(w z) - 1) z^{-1-alpha} dz as log-space Gauss
/// panels on (z_floor, r] plus the exact tail beyond r.  In closed form this
/// equals -c_alpha |w|^alpha, which is what the multiplier cross-check pins.
class JumpQuadrature {
 public:
  JumpQuadrature(double alpha, double r_split, double omega_max,
                 double coeff_scale, const QuadConfig& quad,
                 double forced_z_floor = -1.0)
      : alpha_(alpha) {
    // keep the phase w z below ~1 on the panels for every active mode
    r_ = std::min(r_split, 1.0 / std::max(omega_max, 1e-30));
    const double m2 = std::max(coeff_scale, 1e-30);
    double z_floor =
        forced_z_floor > 0.0
            ? forced_z_floor
            : std::pow(quad.z_floor_tol * (2.0 - alpha) / m2,
                       1.0 / (2.0 - alpha));
    z_floor = std::min(z_floor, 0.5 * r_);
    z_floor_ = z_floor;
    std::size_t panels =
        std::size_t(std::ceil(std::log(r_ / z_floor) / quad.panel_width));
    panels = std::min(std::max<std::size_t>(panels, 8), quad.max_panels);
    const double s_hi = std::log(r_);
    nodes_.reserve(panels * 8);
    weights_.reserve(panels * 8);
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = s_hi - (double(p) + 0.5) * quad.panel_width;
      for (int i = 0; i < 8; ++i) {
        const double s = mid + 0.5 * quad.panel_width * GaussLegendre8::nodes[i];
        const double z = std::exp(s);
        nodes_.push_back(z);
        // substitution z = e^s: dz z^{-1-alpha} = z^{-alpha} ds
        weights_.push_back(0.5 * quad.panel_width *
                           GaussLegendre8::weights[i] * std::pow(z, -alpha));
      }
    }
  }

  double r_split() const { return r_; }

  double operator()(double omega) const {
    const double w = std::abs(omega);
    if (w == 0.0) return 0.0;
    double inner = 0.0;
    for (std::size_t q = 0; q < nodes_.size(); ++q) {
      const double sh = std::sin(0.5 * w * nodes_[q]);
      inner += weights_[q] * (-4.0 * sh * sh);
    }
    const double tail =
        2.0 * std::pow(w, alpha_) * stable_tail_integral(w * r_, alpha_);
    return inner + tail;
  }

  /// Refinement check: the coefficient-weighted transform must be stable
  /// under halving the panels (the weights are the active mode amplitudes, so
  /// inert frequencies cannot trigger false alarms).  Throws on failure.
  void verify_converged(const std::vector<double>& omegas,
                        const std::vector<double>& weights,
                        const QuadConfig& quad) const {
    QuadConfig finer = quad;
    finer.panel_width = 0.5 * quad.panel_width;
    finer.max_panels = 2 * quad.max_panels;
    const JumpQuadrature twin(alpha_, r_, 1.0 / r_, 0.0, finer, z_floor_);
    double coarse = 0.0, refined = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      const double a = (*this)(omegas[i]);
      const double b = twin(omegas[i]);
      coarse += weights[i] * a;
      refined += weights[i] * b;
      scale += weights[i] * std::abs(a);
    }
    if (std::abs(coarse - refined) > 1e-7 * scale + 1e-14) {
      throw std::runtime_error(
          "apply_generator: jump quadrature did not converge under panel "
          "refinement (weighted coarse " + std::to_string(coarse) +
          ", refined " + std::to_string(refined) +
          "); widen max_panels or shrink panel_width");
    }
  }

 private:
  double alpha_;
  double r_;
  double z_floor_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

bool sigma_is_constant(const sde::CoefficientModel& model, double s) {
  const int d = model.dim;
  const std::size_t entries = model.sigma_diagonal
                                  ? std::size_t(d)
                                  : std::size_t(d) * std::size_t(d);
  std::vector<double> ref(entries), cur(entries);
  std::vector<double> x(static_cast<std::size_t>(d), 0.0);
  model.sigma(s, x.data(), ref.data());
  for (int trial = 0; trial < 6; ++trial) {
    for (int a = 0; a < d; ++a) {
      const CounterUniforms u =
          uniforms_at(0xC0FFEEu, std::uint64_t(trial), std::uint32_t(a), 1);
      x[std::size_t(a)] = 20.0 * (u.u0 - 0.5);
    }
    model.sigma(s, x.data(), cur.data());
    for (std::size_t e = 0; e < entries; ++e) {
      if (std::abs(cur[e] - ref[e]) > 1e-14 * (1.0 + std::abs(ref[e]))) {
        return false;
      }
    }
  }
  return true;
}

void sigma_column(const sde::CoefficientModel& model, double s, const double* x,
                  int col, double* out) {
  const int d = model.dim;
  if (model.sigma_diagonal) {
    double diag[4];
    model.sigma(s, x, diag);
    for (int r = 0; r < d; ++r) out[r] = r == col ? diag[r] : 0.0;
  } else {
    double full[16];
    model.sigma(s, x, full);
    for (int r = 0; r < d; ++r) out[r] = full[r * d + col];
  }
}

}  // namespace

spectral::GridFunction apply_generator(const sde::CoefficientModel& model,
                                       double s, double alpha,
                                       const spectral::GridFunction& u,
                                       const QuadConfig& quad) {
  if (model.dim != u.dim()) {
    throw std::invalid_argument("apply_generator: dimension mismatch");
  }
  const int d = u.dim();
  const std::size_t n = u.n();
  spectral::SpectralField su = spectral::SpectralField::analyze(u);
  const std::size_t total = su.coeff().size();

  // coefficient-weighted curvature scale (sets the z-floor) and the largest
  // active frequency (sets the oscillation-free panel range)
  std::vector<double> xi(static_cast<std::size_t>(d));
  double m2 = 0.0;
  double xi_max = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    su.frequency(idx, xi.data());
    double norm2 = 0.0;
    for (int a = 0; a < d; ++a) norm2 += xi[std::size_t(a)] * xi[std::size_t(a)];
    m2 += std::abs(su.coeff()[idx]) * norm2;
    xi_max = std::max(xi_max, std::sqrt(norm2));
  }

  const bool constant_sigma = sigma_is_constant(model, s);
  double sig_scale = 0.0;
  {
    std::vector<double> x0(static_cast<std::size_t>(d), 0.0);
    std::vector<double> col(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      sigma_column(model, s, x0.data(), i, col.data());
      double nrm = 0.0;
      for (int r = 0; r < d; ++r) nrm += col[r] * col[r];
      sig_scale = std::max(sig_scale, std::sqrt(nrm));
    }
    sig_scale = std::max(sig_scale, 2.0 * model.c0);
  }
  const JumpQuadrature jump(alpha, quad.r_split, xi_max * sig_scale,
                            m2 * sig_scale * sig_scale, quad);
  {
    // convergence gauge over the active modes, weighted by |c_k|
    std::vector<double> omegas, weights;
    const double base_scale = sig_scale;
    for (std::size_t idx = 0; idx < total; ++idx) {
      const double w = std::abs(su.coeff()[idx]);
      if (w < 1e-14) continue;
      su.frequency(idx, xi.data());
      double norm2 = 0.0;
      for (int a = 0; a < d; ++a) norm2 += xi[std::size_t(a)] * xi[std::size_t(a)];
      omegas.push_back(std::sqrt(norm2) * base_scale);
      weights.push_back(w);
    }
    jump.verify_converged(omegas, weights, quad);
  }

  spectral::GridFunction acc(d, n, u.box());
  std::vector<double> col(static_cast<std::size_t>(d));

  if (constant_sigma) {
    std::vector<double> x0(static_cast<std::size_t>(d), 0.0);
    std::vector<double> m(total);
    for (int i = 0; i < d; ++i) {
      sigma_column(model, s, x0.data(), i, col.data());
      for (std::size_t idx = 0; idx < total; ++idx) {
        su.frequency(idx, xi.data());
        double omega = 0.0;
        for (int r = 0; r < d; ++r) {
          omega += xi[std::size_t(r)] * col[std::size_t(r)];
        }
        m[idx] = jump(omega);
      }
      spectral::GridFunction part = su.apply_multiplier(m);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += part[k];
    }
  } else {
    // variable sigma: direct mode sum per grid point
    if (double(total) * double(acc.size()) > 5e8) {
      throw std::invalid_argument(
          "apply_generator: grid too large for the variable-sigma path");
    }
    std::vector<double> x(static_cast<std::size_t>(d));
    for (std::size_t k = 0; k < acc.size(); ++k) {
      acc.point(k, x.data());
      double val = 0.0;
      for (int i = 0; i < d; ++i) {
        sigma_column(model, s, x.data(), i, col.data());
        std::complex<double> sum = 0.0;
        for (std::size_t idx = 0; idx < total; ++idx) {
          su.frequency(idx, xi.data());
          double omega = 0.0, phase = 0.0;
          for (int r = 0; r < d; ++r) {
            omega += xi[std::size_t(r)] * col[std::size_t(r)];
            phase += xi[std::size_t(r)] * (x[std::size_t(r)] + u.box());
          }
          sum += su.coeff()[idx] * jump(omega) * std::polar(1.0, phase);
        }
        val += sum.real();
      }
      acc[k] += val;
    }
  }

  if (model.has_drift()) {
    const std::vector<spectral::GridFunction> grad = su.gradient();
    std::vector<double> x(static_cast<std::size_t>(d));
    std::vector<double> b(static_cast<std::size_t>(d));
    for (std::size_t k = 0; k < acc.size(); ++k) {
      acc.point(k, x.data());
      model.drift(s, x.data(), b.data());
      for (int a = 0; a < d; ++a) {
        acc[k] += b[std::size_t(a)] * grad[std::size_t(a)][k];
      }
    }
  }
  return acc;
}

namespace {

/// Group-resolved estimate: chunks distribute round-robin over groups, every
/// reduction runs in fixed chunk order.
struct GroupedEstimate {
  std::vector<double> mean;
  std::vector<std::vector<double>> group;
};

GroupedEstimate grouped_estimate(const sde::CoefficientModel& model,
                                 const noise::StableSpec& spec,
                                 const TestFunction& phi, double s, double t,
                                 const std::vector<std::vector<double>>& x_grid,
                                 const McConfig& mc, std::size_t groups) {
  std::size_t n_chunks = 0;
  auto slots = accumulate_phi(model, spec, phi, s, t, x_grid, mc, &n_chunks);
  GroupedEstimate out;
  out.mean.assign(x_grid.size(), 0.0);
  out.group.assign(groups, std::vector<double>(x_grid.size(), 0.0));
  std::vector<std::vector<double>> gsum(groups,
                                        std::vector<double>(x_grid.size(), 0.0));
  std::vector<std::vector<std::size_t>> gcount(
      groups, std::vector<std::size_t>(x_grid.size(), 0));
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t g = c % groups;
    for (std::size_t q = 0; q < x_grid.size(); ++q) {
      const PartialSums& ps = slots[c * x_grid.size() + q];
      gsum[g][q] += ps.sum;
      gcount[g][q] += ps.count;
    }
  }
  for (std::size_t q = 0; q < x_grid.size(); ++q) {
    double tsum = 0.0;
    std::size_t count = 0;
    for (std::size_t g = 0; g < groups; ++g) {
      out.group[g][q] = gcount[g][q] ? gsum[g][q] / double(gcount[g][q]) : 0.0;
      tsum += gsum[g][q];
      count += gcount[g][q];
    }
    out.mean[q] = count ? tsum / double(count) : 0.0;
  }
  return out;
}

}  // namespace

KolmogorovResult kolmogorov_residual(const sde::CoefficientModel& model,
                                     const noise::StableSpec& spec,
                                     const TestFunction& phi, double t0,
                                     double t1, double t,
                                     const spectral::GridSpec& probe_grid,
                                     const McConfig& mc, const QuadConfig& quad,
                                     std::size_t s_nodes) {
  if (!(t0 < t1 && t1 < t)) {
    throw std::invalid_argument("kolmogorov_residual: need t0 < t1 < t");
  }
  if (s_nodes < 2) {
    throw std::invalid_argument("kolmogorov_residual: need >= 2 s-intervals");
  }
  const std::size_t groups = 8;
  spectral::GridFunction proto(probe_grid);
  std::vector<std::vector<double>> x_grid(proto.size());
  std::vector<double> x(static_cast<std::size_t>(probe_grid.dim));
  for (std::size_t i = 0; i < proto.size(); ++i) {
    proto.point(i, x.data());
    x_grid[i] = x;
  }

  const double ds = (t1 - t0) / double(s_nodes);
  std::vector<double> svals(s_nodes + 1);
  for (std::size_t j = 0; j <= s_nodes; ++j) svals[j] = t0 + ds * double(j);

  std::vector<std::vector<double>> integrand_full(s_nodes + 1);
  std::vector<std::vector<std::vector<double>>> integrand_group(
      s_nodes + 1, std::vector<std::vector<double>>(groups));
  std::vector<std::vector<double>> p_full(s_nodes + 1);
  std::vector<std::vector<std::vector<double>>> p_group(
      s_nodes + 1, std::vector<std::vector<double>>(groups));

  for (std::size_t j = 0; j <= s_nodes; ++j) {
    McConfig node_mc = mc;
    node_mc.seed = mix64(mc.seed ^ (0x517CC1B7ull + j));
    // mc.steps acts as the per-unit-time step density here
    node_mc.steps = std::max<std::size_t>(
        1, std::size_t(std::ceil(double(mc.steps) * (t - svals[j]))));
    auto est =
        grouped_estimate(model, spec, phi, svals[j], t, x_grid, node_mc, groups);
    p_full[j] = est.mean;
    auto apply = [&](const std::vector<double>& vals) {
      spectral::GridFunction f = spectral::GridFunction::from_values(
          probe_grid.dim, probe_grid.n, probe_grid.box, vals);
      return apply_generator(model, svals[j], spec.alpha, f, quad).values();
    };
    integrand_full[j] = apply(est.mean);
    for (std::size_t g = 0; g < groups; ++g) {
      p_group[j][g] = est.group[g];
      integrand_group[j][g] = apply(est.group[g]);
    }
  }

  auto residual_field = [&](const std::vector<std::vector<double>>& p,
                            const std::vector<std::vector<double>>& integ) {
    std::vector<double> r(x_grid.size());
    for (std::size_t q = 0; q < x_grid.size(); ++q) {
      double integral = 0.0;
      for (std::size_t j = 0; j <= s_nodes; ++j) {
        const double w = (j == 0 || j == s_nodes) ? 0.5 * ds : ds;
        integral += w * integ[j][q];
      }
      r[q] = p[0][q] - p[s_nodes][q] - integral;
    }
    return r;
  };

  const std::vector<double> r_full = residual_field(p_full, integrand_full);
  std::size_t argmax = 0;
  double sup = 0.0;
  for (std::size_t q = 0; q < r_full.size(); ++q) {
    if (std::abs(r_full[q]) > sup) {
      sup = std::abs(r_full[q]);
      argmax = q;
    }
  }

  std::vector<double> rg(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<std::vector<double>> p(s_nodes + 1), in(s_nodes + 1);
    for (std::size_t j = 0; j <= s_nodes; ++j) {
      p[j] = p_group[j][g];
      in[j] = integrand_group[j][g];
    }
    rg[g] = residual_field(p, in)[argmax];
  }
  double gmean = 0.0;
  for (double v : rg) gmean += v;
  gmean /= double(groups);
  double gvar = 0.0;
  for (double v : rg) gvar += (v - gmean) * (v - gmean);
  gvar /= double(groups - 1);

  double curvature = 0.0;
  for (std::size_t j = 1; j < s_nodes; ++j) {
    for (std::size_t q = 0; q < x_grid.size(); ++q) {
      const double d2 = (integrand_full[j + 1][q] - 2.0 * integrand_full[j][q] +
                         integrand_full[j - 1][q]) /
                        (ds * ds);
      curvature = std::max(curvature, std::abs(d2));
    }
  }

  KolmogorovResult out;
  out.residual = sup;
  out.noise_floor = std::sqrt(gvar / double(groups));
  out.trapz_bound = (t1 - t0) * ds * ds * curvature / 12.0;
  return out;
}

double silverman_bandwidth(const sde::PathBatch& batch, std::size_t point) {
  const int d = batch.dim;
  double best = 0.0;
  for (int a = 0; a < d; ++a) {
    std::vector<double> xs;
    xs.reserve(batch.n_paths);
    for (std::size_t k = 0; k < batch.n_paths; ++k) {
      const double v = batch.value(point, k, a);
      if (!std::isnan(v)) xs.push_back(v);
    }
    if (xs.size() < 2) continue;
    std::sort(xs.begin(), xs.end());
    auto quant = [&](double p) {
      const double pos = p * double(xs.size() - 1);
      const std::size_t lo = std::size_t(pos);
      const std::size_t hi = std::min(lo + 1, xs.size() - 1);
      const double frac = pos - double(lo);
      return xs[lo] * (1.0 - frac) + xs[hi] * frac;
    };
    const double iqr = quant(0.75) - quant(0.25);
    const double h = 0.9 * (iqr / 1.34) *
                     std::pow(double(xs.size()), -1.0 / (double(d) + 4.0));
    best = std::max(best, h);
  }
  return best;
}

DensityEstimate density_estimate(const sde::PathBatch& batch, std::size_t point,
                                 double bandwidth,
                                 const spectral::GridSpec& grid) {
  if (!(bandwidth > 0.0)) {
    throw std::domain_error("density_estimate: bandwidth must be positive");
  }
  if (grid.dim != batch.dim) {
    throw std::invalid_argument("density_estimate: dimension mismatch");
  }
  if (grid.dim > 2) {
    throw std::invalid_argument("density_estimate: kde supports dim <= 2");
  }
  const int d = grid.dim;
  const std::size_t n = grid.n;
  spectral::GridFunction hist(grid);
  const double dx = hist.dx();
  std::size_t inside = 0, total = 0;

  std::vector<double> xv(static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < batch.n_paths; ++k) {
    bool ok = true, in_box = true;
    for (int a = 0; a < d; ++a) {
      xv[std::size_t(a)] = batch.value(point, k, a);
      if (std::isnan(xv[std::size_t(a)])) ok = false;
      if (!(xv[std::size_t(a)] >= -grid.box && xv[std::size_t(a)] < grid.box)) {
        in_box = false;
      }
    }
    if (!ok) continue;
    ++total;
    if (!in_box) continue;
    ++inside;
    // unit mass split multilinearly between the surrounding nodes
    std::size_t base_idx[2];
    double frac[2];
    for (int a = 0; a < d; ++a) {
      const double u = (xv[std::size_t(a)] + grid.box) / dx;
      const double fl = std::floor(u);
      base_idx[a] = std::size_t(fl) % n;
      frac[a] = u - fl;
    }
    for (std::size_t corner = 0; corner < (std::size_t(1) << d); ++corner) {
      double w = 1.0;
      std::size_t idx = 0;
      for (int a = 0; a < d; ++a) {
        const bool hi = (corner >> a) & 1;
        w *= hi ? frac[a] : 1.0 - frac[a];
        idx = idx * n + (hi ? (base_idx[a] + 1) % n : base_idx[a]);
      }
      hist[idx] += w;
    }
  }
  if (total == 0) {
    throw std::invalid_argument("density_estimate: no usable paths");
  }
  const double norm = 1.0 / (double(total) * hist.cell_volume());
  for (std::size_t i = 0; i < hist.size(); ++i) hist[i] *= norm;

  // Gaussian smoothing, exact in Fourier space (periodic, mass-conserving)
  spectral::SpectralField sf = spectral::SpectralField::analyze(hist);
  std::vector<double> xi(static_cast<std::size_t>(d));
  std::vector<double> m(sf.coeff().size());
  for (std::size_t idx = 0; idx < m.size(); ++idx) {
    sf.frequency(idx, xi.data());
    double e = 0.0;
    for (int a = 0; a < d; ++a) e += xi[std::size_t(a)] * xi[std::size_t(a)];
    m[idx] = std::exp(-0.5 * bandwidth * bandwidth * e);
  }
  DensityEstimate out{sf.apply_multiplier(m),
                      1.0 - double(inside) / double(total), bandwidth};

  return out;
}

}  // namespace stablelab::semigroup
