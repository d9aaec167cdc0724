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

#include "stablelab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace stablelab::spectral {

namespace {

// FFTW plan creation is not thread-safe; execution through the new-array
// interface is.  Plans use FFTW_ESTIMATE so planning never reads the buffers
// and identical transforms are reproducible run to run.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan get_plan(int dim, std::size_t n, int sign) {
  static std::map<std::tuple<int, std::size_t, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  const auto key = std::make_tuple(dim, n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= n;
  fftw_complex* buf = fftw_alloc_complex(total);
  if (!buf) throw std::bad_alloc();
  int dims[4];
  for (int i = 0; i < dim; ++i) dims[i] = int(n);
  fftw_plan plan = fftw_plan_dft(dim, dims, buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!plan) throw std::runtime_error("fftw planning failed");
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

void fft_inplace(int dim, std::size_t n, std::complex<double>* data, int sign) {
  fftw_plan plan = get_plan(dim, n, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

SpectralField SpectralField::analyze(const GridFunction& f) {
  SpectralField s;
  s.dim_ = f.dim();
  s.n_ = f.n();
  s.box_ = f.box();
  s.coeff_.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) s.coeff_[i] = f[i];
  fft_inplace(s.dim_, s.n_, s.coeff_.data(), -1);
  const double scale = 1.0 / double(f.size());
  for (auto& c : s.coeff_) c *= scale;
  return s;
}

GridFunction SpectralField::synthesize() const {
  std::vector<std::complex<double>> work = coeff_;
  fft_inplace(dim_, n_, work.data(), +1);
  GridFunction f(dim_, n_, box_);
  for (std::size_t i = 0; i < work.size(); ++i) f[i] = work[i].real();
  return f;
}

void SpectralField::frequency(std::size_t idx, double* xi) const {
  const double base = std::numbers::pi / box_;
  for (int a = dim_ - 1; a >= 0; --a) {
    xi[a] = base * double(signed_index(idx % n_, n_));
    idx /= n_;
  }
}

double SpectralField::eval(const double* x) const {
  // Real part of the one-sided expansion; for real data this reduces the
  // unpaired Nyquist mode to its cosine part.
  std::vector<double> xi(static_cast<std::size_t>(dim_));
  std::complex<double> acc = 0.0;
  for (std::size_t idx = 0; idx < coeff_.size(); ++idx) {
    frequency(idx, xi.data());
    double phase = 0.0;
    for (int a = 0; a < dim_; ++a) phase += xi[std::size_t(a)] * (x[a] + box_);
    acc += coeff_[idx] * std::polar(1.0, phase);
  }
  return acc.real();
}

GridFunction SpectralField::shifted(const double* v) const {
  std::vector<std::complex<double>> work = coeff_;
  std::vector<double> xi(static_cast<std::size_t>(dim_));
  for (std::size_t idx = 0; idx < work.size(); ++idx) {
    frequency(idx, xi.data());
    double phase = 0.0;
    for (int a = 0; a < dim_; ++a) phase += xi[std::size_t(a)] * v[a];
    work[idx] *= std::polar(1.0, phase);
  }
  fft_inplace(dim_, n_, work.data(), +1);
  GridFunction f(dim_, n_, box_);
  for (std::size_t i = 0; i < work.size(); ++i) f[i] = work[i].real();
  return f;
}

GridFunction SpectralField::apply_multiplier(const std::vector<double>& m) const {
  if (m.size() != coeff_.size()) {
    throw std::invalid_argument("apply_multiplier: size mismatch");
  }
  std::vector<std::complex<double>> work = coeff_;
  for (std::size_t i = 0; i < work.size(); ++i) work[i] *= m[i];
  fft_inplace(dim_, n_, work.data(), +1);
  GridFunction f(dim_, n_, box_);
  for (std::size_t i = 0; i < work.size(); ++i) f[i] = work[i].real();
  return f;
}

std::vector<GridFunction> SpectralField::gradient() const {
  std::vector<GridFunction> out;
  out.reserve(static_cast<std::size_t>(dim_));
  const double base = std::numbers::pi / box_;
  for (int axis = 0; axis < dim_; ++axis) {
    std::vector<std::complex<double>> work = coeff_;
    for (std::size_t idx = 0; idx < work.size(); ++idx) {
      std::size_t rem = idx;
      std::size_t k_axis = 0;
      for (int a = dim_ - 1; a >= 0; --a) {
        const std::size_t k = rem % n_;
        rem /= n_;
        if (a == axis) k_axis = k;
      }
      if (k_axis == n_ / 2) {
        work[idx] = 0.0;  // odd multiplier: drop the unpaired Nyquist mode
      } else {
        const double xi = base * double(signed_index(k_axis, n_));
        work[idx] *= std::complex<double>(0.0, xi);
      }
    }
    fft_inplace(dim_, n_, work.data(), +1);
    GridFunction g(dim_, n_, box_);
    for (std::size_t i = 0; i < work.size(); ++i) g[i] = work[i].real();
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace stablelab::spectral
