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

#include "stablelab/grid_function.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "stablelab/quadrature.hpp"

namespace stablelab::spectral {

namespace {

constexpr char kMagic[8] = {'S', 'L', 'G', 'R', 'I', 'D', 'F', 'N'};
constexpr std::uint32_t kVersion = 1;

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t pow_size(std::size_t n, int d) {
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= n;
  return s;
}

void require_little_endian() {
  if constexpr (std::endian::native != std::endian::little) {
    throw std::runtime_error("GridFunction binary io requires a little-endian host");
  }
}

}  // namespace

GridFunction::GridFunction(int dim, std::size_t n, double box)
    : dim_(dim), n_(n), box_(box) {
  if (dim < 1 || dim > 4) throw std::invalid_argument("GridFunction: dim must be 1..4");
  if (!is_power_of_two(n)) throw std::invalid_argument("GridFunction: n must be a power of two");
  if (!(box > 0.0)) throw std::invalid_argument("GridFunction: box half-width must be positive");
  values_.assign(pow_size(n, dim), 0.0);
}

GridFunction GridFunction::from_values(int dim, std::size_t n, double box,
                                       std::vector<double> values) {
  GridFunction f(dim, n, box);
  if (values.size() != f.values_.size()) {
    throw std::invalid_argument("GridFunction: values size mismatch");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite value");
  }
  f.values_ = std::move(values);
  return f;
}

double GridFunction::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim_; ++i) v *= dx();
  return v;
}

void GridFunction::point(std::size_t idx, double* x) const {
  for (int a = dim_ - 1; a >= 0; --a) {
    x[a] = coord(idx % n_);
    idx /= n_;
  }
}

double GridFunction::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / double(values_.size());
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::min_value() const {
  double m = values_.empty() ? 0.0 : values_[0];
  for (double v : values_) m = std::min(m, v);
  return m;
}

double GridFunction::lp_norm(double p) const {
  if (std::isinf(p)) return max_abs();
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be in [1,inf]");
  double s = 0.0;
  for (double v : values_) s += std::pow(std::abs(v), p);
  return std::pow(s / double(values_.size()), 1.0 / p);
}

double GridFunction::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * cell_volume();
}

void GridFunction::write_binary(const std::string& path) const {
  require_little_endian();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("GridFunction: cannot open " + path);
  char header[32] = {};
  std::memcpy(header, kMagic, 8);
  std::uint32_t version = kVersion;
  std::uint32_t dim32 = std::uint32_t(dim_);
  std::uint64_t n64 = n_;
  std::memcpy(header + 8, &version, 4);
  std::memcpy(header + 12, &dim32, 4);
  std::memcpy(header + 16, &n64, 8);
  std::memcpy(header + 24, &box_, 8);
  out.write(header, 32);
  out.write(reinterpret_cast<const char*>(values_.data()),
            std::streamsize(values_.size() * sizeof(double)));
  if (!out) throw std::runtime_error("GridFunction: write failed for " + path);
}

GridFunction GridFunction::read_binary(const std::string& path) {
  require_little_endian();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("GridFunction: cannot open " + path);
  char header[32];
  in.read(header, 32);
  if (!in || std::memcmp(header, kMagic, 8) != 0) {
    throw std::runtime_error("GridFunction: bad magic in " + path);
  }
  std::uint32_t version, dim32;
  std::uint64_t n64;
  double box;
  std::memcpy(&version, header + 8, 4);
  std::memcpy(&dim32, header + 12, 4);
  std::memcpy(&n64, header + 16, 8);
  std::memcpy(&box, header + 24, 8);
  if (version != kVersion) throw std::runtime_error("GridFunction: unsupported version");
  GridFunction f(int(dim32), std::size_t(n64), box);
  in.read(reinterpret_cast<char*>(f.values_.data()),
          std::streamsize(f.values_.size() * sizeof(double)));
  if (!in) throw std::runtime_error("GridFunction: truncated file " + path);
  for (double v : f.values_) {
    if (!std::isfinite(v)) throw std::runtime_error("GridFunction: non-finite value in " + path);
  }
  return f;
}

void GridFunction::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("GridFunction: cannot open " + path);
  for (int a = 0; a < dim_; ++a) out << "x" << (a + 1) << ",";
  out << "value\n";
  std::vector<double> x(static_cast<std::size_t>(dim_));
  char buf[32];
  for (std::size_t i = 0; i < values_.size(); ++i) {
    point(i, x.data());
    for (int a = 0; a < dim_; ++a) {
      std::snprintf(buf, sizeof(buf), "%.17g", x[std::size_t(a)]);
      out << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", values_[i]);
    out << buf << "\n";
  }
}

GridFunction lin_comb(double a, const GridFunction& f, double b,
                      const GridFunction& g) {
  if (f.dim() != g.dim() || f.n() != g.n() || f.box() != g.box()) {
    throw std::invalid_argument("lin_comb: grids do not match");
  }
  GridFunction out(f.dim(), f.n(), f.box());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * f[i] + b * g[i];
  return out;
}

WindowedFunction apply_radial_window(const GridFunction& f, double r0_frac,
                                     double r1_frac) {
  if (!(0.0 < r0_frac && r0_frac < r1_frac && r1_frac <= 1.0)) {
    throw std::invalid_argument("apply_radial_window: need 0 < r0 < r1 <= 1");
  }
  GridFunction out(f.dim(), f.n(), f.box());
  const double r0 = r0_frac * f.box();
  const double r1 = r1_frac * f.box();
  std::vector<double> x(static_cast<std::size_t>(f.dim()));
  double kept = 0.0, total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.point(i, x.data());
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    const double r = std::sqrt(r2);
    const double w = 1.0 - smooth_step((r - r0) / (r1 - r0));
    out[i] = w * f[i];
    kept += std::abs(out[i]);
    total += std::abs(f[i]);
  }
  const double removed = total > 0.0 ? 1.0 - kept / total : 0.0;
  return {std::move(out), removed};
}

}  // namespace stablelab::spectral
