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

#include "stablelab/stable_noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stablelab/philox.hpp"
#include "stablelab/quadrature.hpp"

namespace stablelab {

double cosine_tail(double y, double alpha, int m) {
  // Integrate by parts until the power is steep enough that truncating the
  // remaining integral at y + 256 contributes below 1e-14.
  constexpr int kDepth = 8;
  // I_c(m) = -sin(y) y^{-m-alpha} + (m+alpha) I_s(m+1)
  // I_s(m) =  cos(y) y^{-m-alpha} - (m+alpha) I_c(m+1)
  // Unroll iteratively from the deepest level back up.
  const int m_final = m + kDepth;
  const bool final_is_cos = (kDepth % 2 == 0);
  const double p_final = double(m_final) + alpha;
  auto integrand = [&](double w) {
    return (final_is_cos ? std::cos(w) : std::sin(w)) * std::pow(w, -p_final);
  };
  const double cut = y + 256.0;
  const std::size_t panels = std::size_t(64 + 8 * (cut - y));
  double value = integrate_panels(integrand, y, cut, panels);

  for (int level = kDepth - 1; level >= 0; --level) {
    const int mm = m + level;
    const double p = double(mm) + alpha;
    const bool is_cos = (level % 2 == 0);
    const double boundary = std::pow(y, -p);
    if (is_cos) {
      value = -std::sin(y) * boundary + p * value;
    } else {
      value = std::cos(y) * boundary - p * value;
    }
  }
  return value;
}

double sine_tail(double y, double alpha, int m) {
  const double p = double(m) + alpha;
  return std::cos(y) * std::pow(y, -p) - p * cosine_tail(y, alpha, m + 1);
}

double stable_tail_integral(double y, double alpha) {
  if (!(y > 0.0)) {
    throw std::domain_error("stable_tail_integral: y must be positive");
  }
  if (y >= 1.0) {
    return cosine_tail(y, alpha, 1) - std::pow(y, -alpha) / alpha;
  }
  // int_y^inf = int_0^inf - int_0^y; the head is an alternating series
  thread_local double cached_alpha = -1.0;
  thread_local double cached_half = 0.0;
  if (alpha != cached_alpha) {
    cached_alpha = alpha;
    cached_half = -0.5 * noise::levy_constant(alpha);
  }
  double head = 0.0;
  double fact = 1.0;
  double ypow = std::pow(y, -alpha);
  const double y2 = y * y;
  double y2k = 1.0;
  for (int k = 1; k <= 24; ++k) {
    fact *= double(2 * k - 1) * double(2 * k);
    y2k *= y2;
    const double term = y2k * ypow / (fact * (double(2 * k) - alpha));
    head += (k % 2 == 1) ? -term : term;
    if (term < 1e-18 * (std::abs(head) + 1e-30)) break;
  }
  return cached_half - head;
}

}  // namespace stablelab

namespace stablelab::noise {

double levy_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::domain_error("levy_constant: alpha must lie in (0,2)");
  }
  // Head int_0^1 (1-cos u) u^{-1-alpha} du as an alternating series:
  // sum_{k>=1} (-1)^{k+1} / ((2k)! (2k - alpha)).
  double head = 0.0;
  double fact = 1.0;  // (2k)!
  for (int k = 1; k <= 30; ++k) {
    fact *= double(2 * k - 1) * double(2 * k);
    const double term = 1.0 / (fact * (double(2 * k) - alpha));
    head += (k % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  // Tail int_1^inf (1-cos u) u^{-1-alpha} du = 1/alpha - int_1^inf cos(u) u^{-1-alpha} du.
  const double tail = 1.0 / alpha - cosine_tail(1.0, alpha, 1);
  return 2.0 * (head + tail);
}

StableSpec StableSpec::make(double alpha, int dim) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::domain_error("StableSpec: alpha must lie in (0,2)");
  }
  if (dim < 1) {
    throw std::domain_error("StableSpec: dim must be >= 1");
  }
  return {alpha, dim, levy_constant(alpha)};
}

double standard_stable_at(double alpha, std::uint64_t seed, std::uint64_t path,
                          std::uint32_t step, std::uint32_t coord) {
  const CounterUniforms u = uniforms_at(seed, path, step, coord);
  const double U = std::numbers::pi * (u.u0 - 0.5);  // uniform (-pi/2, pi/2)
  if (alpha == 1.0) {
    return std::tan(U);
  }
  const double W = -std::log(u.u1);  // Exp(1)
  const double s = std::sin(alpha * U) / std::pow(std::cos(U), 1.0 / alpha);
  const double r = std::cos((1.0 - alpha) * U) / W;
  return s * std::pow(r, (1.0 - alpha) / alpha);
}

std::vector<double> sample_standard_stable(double alpha, std::size_t n,
                                           std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::domain_error("sample_standard_stable: alpha must lie in (0,2)");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = standard_stable_at(alpha, seed, i, 0, 0);
  }
  return out;
}

NoiseMatrix sample_increments(const StableSpec& spec, double dt,
                              std::size_t n_paths, std::uint64_t seed) {
  if (!(dt > 0.0)) {
    throw std::domain_error("sample_increments: dt must be positive");
  }
  NoiseMatrix m;
  m.n_paths = n_paths;
  m.dim = spec.dim;
  m.dt = dt;
  m.seed = seed;
  m.values.resize(n_paths * std::size_t(spec.dim));
  const double scale = std::pow(spec.c_alpha * dt, 1.0 / spec.alpha);
  for (std::size_t k = 0; k < n_paths; ++k) {
    for (int i = 0; i < spec.dim; ++i) {
      m.values[k * std::size_t(spec.dim) + std::size_t(i)] =
          scale * standard_stable_at(spec.alpha, seed, k, 0, std::uint32_t(i));
    }
  }
  return m;
}

}  // namespace stablelab::noise
