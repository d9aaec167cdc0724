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

#include "stablelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stablelab/philox.hpp"
#include "stablelab/quadrature.hpp"

namespace stablelab::spectral {

namespace {

int log2_size(std::size_t n) {
  int l = 0;
  while ((std::size_t(1) << l) < n) ++l;
  return l;
}

/// Lattice radius |k| of flat spectral index idx.
double lattice_radius(std::size_t idx, int dim, std::size_t n) {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) {
    const long k = signed_index(idx % n, n);
    r2 += double(k) * double(k);
    idx /= n;
  }
  return std::sqrt(r2);
}

}  // namespace

DyadicDecomposition::DyadicDecomposition(int dim, std::size_t n)
    : dim_(dim), n_(n), j_max_(log2_size(n) - 2) {
  if (j_max_ < 1) {
    throw std::invalid_argument("DyadicDecomposition: grid too small (need n >= 8)");
  }
}

double DyadicDecomposition::cutoff(double kappa, int level) {
  const double scaled = kappa / double(std::size_t(1) << level);
  // 1 on [0,1], smooth fall on [1,2], 0 beyond.
  return 1.0 - smooth_step(scaled - 1.0);
}

double DyadicDecomposition::ring(int j, double kappa) {
  if (j == 0) return cutoff(kappa, 0);
  return cutoff(kappa, j) - cutoff(kappa, j - 1);
}

GridFunction block(int j, const GridFunction& f, const DyadicDecomposition& dec) {
  if (j < 0 || j > dec.j_max()) {
    throw std::out_of_range("block: j outside [0, j_max]");
  }
  SpectralField s = SpectralField::analyze(f);
  std::vector<double> m(s.coeff().size());
  for (std::size_t idx = 0; idx < m.size(); ++idx) {
    m[idx] = DyadicDecomposition::ring(j, lattice_radius(idx, f.dim(), f.n()));
  }
  return s.apply_multiplier(m);
}

std::vector<GridFunction> all_blocks(const GridFunction& f,
                                     const DyadicDecomposition& dec) {
  SpectralField s = SpectralField::analyze(f);
  std::vector<GridFunction> out;
  out.reserve(std::size_t(dec.j_max()) + 1);
  std::vector<double> radius(s.coeff().size());
  for (std::size_t idx = 0; idx < radius.size(); ++idx) {
    radius[idx] = lattice_radius(idx, f.dim(), f.n());
  }
  std::vector<double> m(s.coeff().size());
  for (int j = 0; j <= dec.j_max(); ++j) {
    for (std::size_t idx = 0; idx < m.size(); ++idx) {
      m[idx] = DyadicDecomposition::ring(j, radius[idx]);
    }
    out.push_back(s.apply_multiplier(m));
  }
  return out;
}

double besov_norm(const GridFunction& f, double s, double p, double q,
                  const DyadicDecomposition& dec) {
  const std::vector<GridFunction> blocks = all_blocks(f, dec);
  if (std::isinf(q)) {
    double best = 0.0;
    for (int j = 0; j <= dec.j_max(); ++j) {
      best = std::max(best, std::pow(2.0, s * j) * blocks[std::size_t(j)].lp_norm(p));
    }
    return best;
  }
  if (!(q >= 1.0)) throw std::invalid_argument("besov_norm: q must be in [1,inf]");
  double acc = 0.0;
  for (int j = 0; j <= dec.j_max(); ++j) {
    acc += std::pow(std::pow(2.0, s * j) * blocks[std::size_t(j)].lp_norm(p), q);
  }
  return std::pow(acc, 1.0 / q);
}

namespace {

/// Max over the grid of |f(x + h e_axis) - f(x)| with h = shift nodes.
double shifted_sup_diff(const GridFunction& f, int axis, std::size_t shift) {
  const std::size_t n = f.n();
  const int dim = f.dim();
  // stride of the axis in the flat row-major index
  std::size_t stride = 1;
  for (int a = dim - 1; a > axis; --a) stride *= n;
  const std::size_t block_len = stride * n;
  double best = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t base = (i / block_len) * block_len;
    const std::size_t off = i - base;
    const std::size_t j = base + (off + shift * stride) % block_len;
    best = std::max(best, std::abs(f[j] - f[i]));
  }
  return best;
}

double holder_seminorm_sub1(const GridFunction& f, double gamma) {
  double best = 0.0;
  const int levels = log2_size(f.n());
  for (int axis = 0; axis < f.dim(); ++axis) {
    for (int m = 0; m < levels; ++m) {
      const std::size_t shift = std::size_t(1) << m;
      const double h = f.dx() * double(shift);
      best = std::max(best, shifted_sup_diff(f, axis, shift) / std::pow(h, gamma));
    }
  }
  return best;
}

}  // namespace

double holder_seminorm(const GridFunction& f, double gamma) {
  if (!(gamma > 0.0 && gamma < 2.0)) {
    throw std::invalid_argument("holder_seminorm: gamma must lie in (0,2)");
  }
  if (gamma <= 1.0) return holder_seminorm_sub1(f, gamma);
  const SpectralField s = SpectralField::analyze(f);
  const std::vector<GridFunction> grad = s.gradient();
  double best = 0.0;
  for (const auto& g : grad) {
    best = std::max(best, holder_seminorm_sub1(g, gamma - 1.0));
  }
  return best;
}

double holder_norm(const GridFunction& f, double gamma) {
  if (!(gamma > 0.0 && gamma < 2.0)) {
    throw std::invalid_argument("holder_norm: gamma must lie in (0,2)");
  }
  double norm = f.max_abs() + holder_seminorm(f, gamma);
  if (gamma > 1.0) {
    const SpectralField s = SpectralField::analyze(f);
    const std::vector<GridFunction> grad = s.gradient();
    double grad_sup = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      double m2 = 0.0;
      for (const auto& g : grad) m2 += g[i] * g[i];
      grad_sup = std::max(grad_sup, std::sqrt(m2));
    }
    norm += grad_sup;
  }
  return norm;
}

GridFunction mollify(const GridFunction& f, double eps) {
  if (!(eps > 0.0 && eps < f.box())) {
    throw std::invalid_argument("mollify: need 0 < eps < box");
  }
  // Bump sampled by wrapped displacement (index i along an axis corresponds
  // to the offset i*dx, or (i-n)*dx past the Nyquist node), normalized to
  // exact unit discrete mass so the zero mode of its DFT equals 1.
  const std::size_t n = f.n();
  const int dim = f.dim();
  std::vector<std::complex<double>> rho(f.size());
  double total = 0.0;
  for (std::size_t idx = 0; idx < rho.size(); ++idx) {
    std::size_t rem = idx;
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double delta = f.dx() * double(signed_index(rem % n, n));
      r2 += delta * delta;
      rem /= n;
    }
    const double u = r2 / (eps * eps);
    const double v = u < 1.0 ? std::exp(-1.0 / (1.0 - u)) : 0.0;
    rho[idx] = v;
    total += v;
  }
  if (total == 0.0) return f;  // eps below grid resolution: identity
  for (auto& v : rho) v /= total;
  fft_inplace(dim, n, rho.data(), -1);

  SpectralField sf = SpectralField::analyze(f);
  for (std::size_t idx = 0; idx < rho.size(); ++idx) {
    sf.coeff()[idx] *= rho[idx].real();  // symmetric bump: spectrum is real
  }
  return sf.synthesize();
}

double commutator_decay(const GridFunction& f, const GridFunction& g, int j,
                        double p, const DyadicDecomposition& dec) {
  if (f.dim() != g.dim() || f.n() != g.n() || f.box() != g.box()) {
    throw std::invalid_argument("commutator_decay: grids do not match");
  }
  GridFunction fg(f.dim(), f.n(), f.box());
  for (std::size_t i = 0; i < fg.size(); ++i) fg[i] = f[i] * g[i];
  const GridFunction lhs = block(j, fg, dec);
  const GridFunction rjg = block(j, g, dec);
  GridFunction diff(f.dim(), f.n(), f.box());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = lhs[i] - f[i] * rjg[i];
  return diff.lp_norm(p);
}

GridFunction make_weierstrass(const GridSpec& g, double s, int levels,
                              std::uint64_t seed) {
  GridFunction f(g.dim, g.n, g.box);
  std::vector<double> x(static_cast<std::size_t>(g.dim));
  std::vector<double> amp(std::size_t(levels) + 1);
  std::vector<double> phase(std::size_t(levels + 1) * std::size_t(g.dim));
  double norm = 0.0;
  for (int k = 0; k <= levels; ++k) {
    amp[std::size_t(k)] = std::pow(2.0, -s * k);
    norm += amp[std::size_t(k)];
    for (int a = 0; a < g.dim; ++a) {
      const std::uint64_t h = mix64(seed ^ (std::uint64_t(k) << 32) ^ std::uint64_t(a));
      phase[std::size_t(k) * std::size_t(g.dim) + std::size_t(a)] =
          2.0 * std::numbers::pi * (double(h >> 11) / 9007199254740992.0);
    }
  }
  const double base = std::numbers::pi / g.box;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.point(i, x.data());
    double v = 0.0;
    for (int k = 0; k <= levels; ++k) {
      for (int a = 0; a < g.dim; ++a) {
        v += amp[std::size_t(k)] *
             std::cos(double(std::size_t(1) << k) * base * x[std::size_t(a)] +
                      phase[std::size_t(k) * std::size_t(g.dim) + std::size_t(a)]);
      }
    }
    f[i] = v / (norm * double(g.dim));
  }
  return f;
}

GridFunction make_rough_noise(const GridSpec& g, std::uint64_t seed) {
  GridFunction f(g.dim, g.n, g.box);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const CounterUniforms u = uniforms_at(seed, i, 0, 0xABCDu);
    f[i] = 2.0 * u.u0 - 1.0;
  }
  return f;
}

GridFunction make_square_wave(const GridSpec& g, int freq) {
  GridFunction f(g.dim, g.n, g.box);
  std::vector<double> x(static_cast<std::size_t>(g.dim));
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.point(i, x.data());
    const double v = std::sin(double(freq) * std::numbers::pi * x[0] / g.box);
    f[i] = v >= 0.0 ? 1.0 : -1.0;
  }
  return f;
}

}  // namespace stablelab::spectral
