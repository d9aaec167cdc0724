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

#include "stablelab/heat_kernel.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "stablelab/fft.hpp"
#include "stablelab/philox.hpp"
#include "stablelab/quadrature.hpp"
#include "stablelab/stable_noise.hpp"

namespace stablelab::heat {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t pow_size(std::size_t n, int d) {
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= n;
  return s;
}

/// Deterministic unit direction #i of m in R^d (axes first, then scrambled).
std::vector<double> unit_direction(int dim, std::size_t i, std::uint64_t seed) {
  std::vector<double> u(std::size_t(dim), 0.0);
  if (i < std::size_t(dim)) {
    u[i] = 1.0;
    return u;
  }
  double norm2 = 0.0;
  for (int a = 0; a < dim; ++a) {
    const CounterUniforms c = uniforms_at(seed, i, std::uint32_t(a), 0x5EEDu);
    // Box-Muller for an isotropic direction
    const double g = std::sqrt(-2.0 * std::log(c.u0)) * std::cos(2.0 * kPi * c.u1);
    u[std::size_t(a)] = g;
    norm2 += g * g;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& v : u) v *= inv;
  return u;
}

}  // namespace

double FrozenSymbol::psi(const double* xi) const {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) {
    double vi = 0.0;
    for (int r = 0; r < dim; ++r) {
      vi += sigma[std::size_t(r) * std::size_t(dim) + std::size_t(i)] * xi[r];
    }
    acc += std::pow(std::abs(vi), alpha);
  }
  return -c_alpha * acc;
}

FrozenSymbol frozen_symbol(const std::vector<double>& sigma, int dim,
                           double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::domain_error("frozen_symbol: alpha must lie in (0,2)");
  }
  if (sigma.size() != std::size_t(dim) * std::size_t(dim)) {
    throw std::invalid_argument("frozen_symbol: sigma must be d x d");
  }
  Eigen::MatrixXd m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      m(r, c) = sigma[std::size_t(r) * std::size_t(dim) + std::size_t(c)];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 1e-12 * smax) || smax == 0.0) {
    throw std::invalid_argument(
        "frozen_symbol: sigma is numerically singular; uniform ellipticity fails");
  }
  FrozenSymbol sym;
  sym.alpha = alpha;
  sym.c_alpha = noise::levy_constant(alpha);
  sym.dim = dim;
  sym.sigma = sigma;
  sym.s_min = smin;
  sym.s_max = smax;
  return sym;
}

KernelSlice kernel(const FrozenSymbol& sym, double s, double t,
                   const spectral::GridSpec& grid, const KernelOptions& opts) {
  if (!(t > s)) throw std::invalid_argument("kernel: need t > s");
  if (grid.dim != sym.dim) throw std::invalid_argument("kernel: dim mismatch");
  const double dt = t - s;
  const double L = grid.box;
  const std::size_t n = grid.n;
  const int d = grid.dim;

  // Decay requirement at the Nyquist sphere, via -psi >= c_alpha (s_min |xi|)^alpha.
  const double xi_nyq = kPi * double(n) / (2.0 * L);
  const double worst_exponent =
      dt * sym.c_alpha * std::pow(sym.s_min * xi_nyq, sym.alpha);
  if (std::exp(-worst_exponent) > opts.decay_tol) {
    const double xi_req =
        std::pow(-std::log(opts.decay_tol) / (dt * sym.c_alpha), 1.0 / sym.alpha) /
        sym.s_min;
    std::size_t n_req = 2;
    while (double(n_req) < 2.0 * L * xi_req / kPi) n_req *= 2;
    throw std::runtime_error(
        "kernel: symbol has not decayed below tolerance at the Nyquist frequency; "
        "increase resolution to n >= " + std::to_string(n_req) +
        " (or enlarge t - s)");
  }

  // Oversampling factor against periodization alias.  The folded tail density
  // is estimated by the stable-tail asymptotic 2 d (t-s) R^{-1-alpha} at
  // R = (2F-1) L, compared with a crude peak estimate.
  const double peak_est = std::pow(dt * sym.c_alpha, -double(d) / sym.alpha) *
                          std::pow(std::tgamma(1.0 + 1.0 / sym.alpha) / kPi, d) /
                          std::pow(sym.s_min, d);
  std::size_t f = 1;
  auto alias_at = [&](std::size_t factor) {
    const double r = (2.0 * double(factor) - 1.0) * L * sym.s_min;
    return 2.0 * double(d) * dt * std::pow(r, -1.0 - sym.alpha);
  };
  while (f < opts.max_oversample &&
         alias_at(f) > opts.alias_rel_tol * peak_est) {
    f *= 2;
  }

  const std::size_t n_syn = f * n;
  const double box_syn = double(f) * L;
  const std::size_t total = pow_size(n_syn, d);

  KernelSlice slice;
  slice.s = s;
  slice.t = t;
  slice.sym = sym;
  slice.oversample = f;
  slice.n_syn = n_syn;
  slice.box_syn = box_syn;
  slice.alias_estimate = alias_at(f);
  slice.symbol_exp.resize(total);

  const double dxi = kPi / box_syn;
  std::vector<double> xi(static_cast<std::size_t>(d));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int a = d - 1; a >= 0; --a) {
      xi[std::size_t(a)] = dxi * double(spectral::signed_index(rem % n_syn, n_syn));
      rem /= n_syn;
    }
    slice.symbol_exp[idx] = std::exp(dt * sym.psi(xi.data()));
  }

  // Synthesize on the enlarged box and restrict the centered block.
  std::vector<std::complex<double>> work(total);
  const double cell = std::pow(dxi / (2.0 * kPi), d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    int parity = 0;
    for (int a = 0; a < d; ++a) {
      parity += int(rem % 2);
      rem /= n_syn;
    }
    work[idx] = (parity % 2 == 0 ? cell : -cell) * slice.symbol_exp[idx];
  }
  spectral::fft_inplace(d, n_syn, work.data(), +1);

  spectral::GridFunction p(d, n, L);
  const std::size_t off = (f - 1) * n / 2;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::size_t tmp = i;
    std::size_t axis_idx[4];
    for (int a = d - 1; a >= 0; --a) {
      axis_idx[a] = tmp % n;
      tmp /= n;
    }
    std::size_t idx_syn = 0;
    for (int a = 0; a < d; ++a) idx_syn = idx_syn * n_syn + (axis_idx[a] + off);
    p[i] = work[idx_syn].real();
  }
  slice.density = std::move(p);
  slice.tail_mass = 1.0 - slice.density.integral();
  return slice;
}

spectral::GridFunction KernelSlice::derivative_magnitude(int order) const {
  if (order < 0 || order > 2) {
    throw std::invalid_argument("derivative_magnitude: order must be 0..2");
  }
  if (order == 0) return density;
  const int d = sym.dim;
  const std::size_t n = density.n();
  const std::size_t total = symbol_exp.size();
  const double dxi = kPi / box_syn;
  const double cell = std::pow(dxi / (2.0 * kPi), d);
  const std::size_t off = (oversample - 1) * n / 2;

  // component multipliers: gradient (d fields) or Hessian (d*(d+1)/2 fields)
  std::vector<std::pair<int, int>> comps;
  if (order == 1) {
    for (int a = 0; a < d; ++a) comps.emplace_back(a, -1);
  } else {
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) comps.emplace_back(a, b);
  }

  spectral::GridFunction acc(d, n, density.box());
  std::vector<std::complex<double>> work(total);
  std::vector<double> xi(static_cast<std::size_t>(d));
  for (const auto& [ca, cb] : comps) {
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      int parity = 0;
      bool nyquist_odd = false;
      for (int a = d - 1; a >= 0; --a) {
        const std::size_t k = rem % n_syn;
        parity += int(k % 2);
        xi[std::size_t(a)] = dxi * double(spectral::signed_index(k, n_syn));
        if (k == n_syn / 2 && (a == ca || (cb >= 0 && a == cb))) nyquist_odd = true;
        rem /= n_syn;
      }
      if (nyquist_odd && order == 1) {
        work[idx] = 0.0;
        continue;
      }
      const double sign = parity % 2 == 0 ? 1.0 : -1.0;
      const double e = sign * cell * symbol_exp[idx];
      if (order == 1) {
        work[idx] = std::complex<double>(0.0, xi[std::size_t(ca)]) * e;
      } else {
        work[idx] = -xi[std::size_t(ca)] * xi[std::size_t(cb)] * e;
      }
    }
    spectral::fft_inplace(d, n_syn, work.data(), +1);
    // accumulate squared magnitude (off-diagonal Hessian entries count twice)
    const double weight = (order == 2 && cb != ca) ? 2.0 : 1.0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
      std::size_t tmp = i;
      std::size_t axis_idx[4];
      for (int a = d - 1; a >= 0; --a) {
        axis_idx[a] = tmp % n;
        tmp /= n;
      }
      std::size_t idx_syn = 0;
      for (int a = 0; a < d; ++a) idx_syn = idx_syn * n_syn + (axis_idx[a] + off);
      const double v = work[idx_syn].real();
      acc[i] += weight * v * v;
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = std::sqrt(acc[i]);
  return acc;
}

void KernelSlice::save(const std::string& path) const {
  density.write_binary(path);
  nlohmann::json meta;
  meta["alpha"] = sym.alpha;
  meta["c_alpha"] = sym.c_alpha;
  meta["sigma"] = sym.sigma;
  meta["s"] = s;
  meta["t"] = t;
  meta["tail_mass"] = tail_mass;
  meta["alias_estimate"] = alias_estimate;
  meta["n"] = density.n();
  meta["box"] = density.box();
  meta["oversample"] = oversample;
  std::ofstream out(path + ".json");
  if (!out) throw std::runtime_error("KernelSlice: cannot open " + path + ".json");
  out << meta.dump(2) << "\n";
}

MomentValue moment_integral(const KernelSlice& slice, int n, double beta) {
  if (!(beta >= 0.0 && beta < slice.sym.alpha)) {
    throw std::domain_error(
        "moment_integral: beta must lie in [0, alpha); the weighted moment "
        "diverges at and above alpha");
  }
  const spectral::GridFunction field = slice.derivative_magnitude(n);
  const double L = field.box();
  const double r0 = 0.8 * L, r1 = 0.9 * L;
  std::vector<double> x(static_cast<std::size_t>(field.dim()));
  double value = 0.0, windowed_out = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    field.point(i, x.data());
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    const double r = std::sqrt(r2);
    const double w = 1.0 - smooth_step((r - r0) / (r1 - r0));
    const double contrib = std::pow(r, beta) * std::abs(field[i]);
    value += w * contrib;
    windowed_out += (1.0 - w) * contrib;
  }
  const double cell = field.cell_volume();
  MomentValue out;
  out.value = value * cell;
  out.tail_bound = windowed_out * cell;
  if (n == 0) {
    // heavy-tail estimate of the out-of-box remainder
    const double dt = slice.t - slice.s;
    const double r = 0.9 * L * slice.sym.s_min;
    out.tail_bound += 2.0 * double(field.dim()) * dt *
                      std::pow(r, beta - slice.sym.alpha) /
                      (slice.sym.alpha - beta);
  }
  return out;
}

double block_kernel_decay(const KernelSlice& slice, int j, int n, double beta,
                          const spectral::DyadicDecomposition& dec) {
  if (!(beta >= 0.0 && beta < slice.sym.alpha)) {
    throw std::domain_error("block_kernel_decay: beta must lie in [0, alpha)");
  }
  if (n < 0 || n > 2) {
    throw std::invalid_argument("block_kernel_decay: n must be 0..2");
  }
  if (j < 0 || j > dec.j_max()) {
    throw std::out_of_range("block_kernel_decay: j outside [0, j_max]");
  }
  const spectral::GridFunction& p = slice.density;
  spectral::SpectralField s = spectral::SpectralField::analyze(p);
  const std::size_t nn = p.n();
  const int d = p.dim();

  // component list as in derivative_magnitude
  std::vector<std::pair<int, int>> comps;
  if (n == 0) {
    comps.emplace_back(-1, -1);
  } else if (n == 1) {
    for (int a = 0; a < d; ++a) comps.emplace_back(a, -1);
  } else {
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) comps.emplace_back(a, b);
  }

  std::vector<double> mag2(p.size(), 0.0);
  std::vector<double> xi(static_cast<std::size_t>(d));
  for (const auto& [ca, cb] : comps) {
    std::vector<std::complex<double>> work = s.coeff();
    for (std::size_t idx = 0; idx < work.size(); ++idx) {
      std::size_t rem = idx;
      double kappa2 = 0.0;
      bool nyquist_odd = false;
      for (int a = d - 1; a >= 0; --a) {
        const std::size_t k = rem % nn;
        const long ks = spectral::signed_index(k, nn);
        kappa2 += double(ks) * double(ks);
        xi[std::size_t(a)] = (kPi / p.box()) * double(ks);
        if (k == nn / 2 && (a == ca || a == cb)) nyquist_odd = true;
        rem /= nn;
      }
      const double ring = spectral::DyadicDecomposition::ring(j, std::sqrt(kappa2));
      if (ring == 0.0) {
        work[idx] = 0.0;
        continue;
      }
      std::complex<double> m(ring, 0.0);
      if (ca >= 0) {
        if (nyquist_odd && n == 1) {
          work[idx] = 0.0;
          continue;
        }
        if (n == 1) {
          m *= std::complex<double>(0.0, xi[std::size_t(ca)]);
        } else {
          m *= -xi[std::size_t(ca)] * xi[std::size_t(cb)];
        }
      }
      work[idx] *= m;
    }
    spectral::fft_inplace(d, nn, work.data(), +1);
    const double weight = (n == 2 && cb != ca) ? 2.0 : 1.0;
    for (std::size_t i = 0; i < mag2.size(); ++i) {
      const double v = work[i].real();
      mag2[i] += weight * v * v;
    }
  }
  std::vector<double> x(static_cast<std::size_t>(d));
  double acc = 0.0;
  for (std::size_t i = 0; i < mag2.size(); ++i) {
    p.point(i, x.data());
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    acc += std::pow(std::sqrt(r2), beta) * std::sqrt(mag2[i]);
  }
  return acc * p.cell_volume();
}

StarFit star_constant(const FrozenSymbol& sym, double rho_min, double rho_max,
                      std::size_t n_rho, std::size_t n_dir,
                      std::uint64_t dir_seed) {
  StarFit fit;
  fit.c2 = std::numeric_limits<double>::infinity();
  const std::size_t dirs = sym.dim == 1 ? 1 : n_dir;
  std::vector<double> xi(static_cast<std::size_t>(sym.dim));
  for (std::size_t i = 0; i < dirs; ++i) {
    const std::vector<double> u = unit_direction(sym.dim, i, dir_seed);
    for (std::size_t r = 0; r < n_rho; ++r) {
      const double rho =
          rho_min * std::pow(rho_max / rho_min, double(r) / double(n_rho - 1));
      for (int a = 0; a < sym.dim; ++a) xi[std::size_t(a)] = rho * u[std::size_t(a)];
      const double denom = std::min(rho * rho, std::pow(rho, sym.alpha));
      const double ratio = -sym.psi(xi.data()) / denom;
      if (ratio < fit.c2) {
        fit.c2 = ratio;
        fit.argmin_xi = xi;
      }
    }
  }
  return fit;
}

namespace {

std::vector<spectral::GridFunction> duhamel_impl(
    const std::vector<FrozenSymbol>& syms, const spectral::GridFunction& phi,
    const std::vector<spectral::GridFunction>& forcing,
    const std::vector<double>& t_grid) {
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw std::invalid_argument("duhamel_solve: t_grid must start at 0");
  }
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) {
      throw std::invalid_argument("duhamel_solve: t_grid must be increasing");
    }
  }
  if (!forcing.empty() && forcing.size() != t_grid.size()) {
    throw std::invalid_argument(
        "duhamel_solve: forcing must be empty or one slice per time node");
  }
  const bool homogeneous = forcing.empty();
  const int d = phi.dim();

  spectral::SpectralField u = spectral::SpectralField::analyze(phi);
  std::vector<spectral::SpectralField> fhat;
  if (!homogeneous) {
    fhat.reserve(forcing.size());
    for (const auto& g : forcing) fhat.push_back(spectral::SpectralField::analyze(g));
  }

  std::vector<spectral::GridFunction> out;
  out.reserve(t_grid.size());
  out.push_back(u.synthesize());

  std::vector<double> xi(static_cast<std::size_t>(d));
  std::vector<double> prop(u.coeff().size());
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    const double dt = t_grid[k + 1] - t_grid[k];
    const FrozenSymbol& sym = syms.size() == 1 ? syms[0] : syms[k];
    for (std::size_t idx = 0; idx < prop.size(); ++idx) {
      u.frequency(idx, xi.data());
      prop[idx] = std::exp(dt * sym.psi(xi.data()));
    }
    for (std::size_t idx = 0; idx < u.coeff().size(); ++idx) {
      std::complex<double> c = u.coeff()[idx];
      if (!homogeneous) c += 0.5 * dt * fhat[k].coeff()[idx];
      c *= prop[idx];
      if (!homogeneous) c += 0.5 * dt * fhat[k + 1].coeff()[idx];
      u.coeff()[idx] = c;
    }
    out.push_back(u.synthesize());
  }
  return out;
}

}  // namespace

std::vector<spectral::GridFunction> duhamel_solve(
    const FrozenSymbol& sym, const spectral::GridFunction& phi,
    const std::vector<spectral::GridFunction>& forcing,
    const std::vector<double>& t_grid) {
  return duhamel_impl({sym}, phi, forcing, t_grid);
}

std::vector<spectral::GridFunction> duhamel_solve(
    const std::vector<FrozenSymbol>& syms, const spectral::GridFunction& phi,
    const std::vector<spectral::GridFunction>& forcing,
    const std::vector<double>& t_grid) {
  if (syms.size() != 1 && syms.size() + 1 != t_grid.size()) {
    throw std::invalid_argument(
        "duhamel_solve: need one symbol, or one per time interval");
  }
  return duhamel_impl(syms, phi, forcing, t_grid);
}

double duhamel_weak_residual(const FrozenSymbol& sym,
                             const std::vector<spectral::GridFunction>& u,
                             const spectral::GridFunction& phi,
                             const std::vector<spectral::GridFunction>& forcing,
                             const spectral::GridFunction& test,
                             const std::vector<double>& t_grid) {
  if (u.size() != t_grid.size()) {
    throw std::invalid_argument("duhamel_weak_residual: u size mismatch");
  }
  const double cell = test.cell_volume();
  auto inner = [&](const spectral::GridFunction& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * test[i];
    return s * cell;
  };
  // L test, applied spectrally (the symbol is even, so L is self-adjoint)
  spectral::SpectralField ts = spectral::SpectralField::analyze(test);
  std::vector<double> m(ts.coeff().size());
  std::vector<double> xi(static_cast<std::size_t>(test.dim()));
  for (std::size_t idx = 0; idx < m.size(); ++idx) {
    ts.frequency(idx, xi.data());
    m[idx] = sym.psi(xi.data());
  }
  const spectral::GridFunction l_test = ts.apply_multiplier(m);
  auto inner_l = [&](const spectral::GridFunction& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * l_test[i];
    return s * cell;
  };

  double drift_int = 0.0, forcing_int = 0.0;
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    const double dt = t_grid[k + 1] - t_grid[k];
    drift_int += 0.5 * dt * (inner_l(u[k]) + inner_l(u[k + 1]));
    if (!forcing.empty()) {
      forcing_int += 0.5 * dt * (inner(forcing[k]) + inner(forcing[k + 1]));
    }
  }
  return std::abs(inner(u.back()) - inner(phi) - drift_int - forcing_int);
}

}  // namespace stablelab::heat
