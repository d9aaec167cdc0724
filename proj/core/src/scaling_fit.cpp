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

#include "stablelab/scaling_fit.hpp"

#include <cmath>
#include <stdexcept>

namespace stablelab {

ScalingFit fit_exponent(const std::vector<double>& abscissae,
                        const std::vector<double>& ordinates) {
  const std::size_t n = abscissae.size();
  if (n != ordinates.size()) {
    throw std::invalid_argument("fit_exponent: size mismatch");
  }
  if (n < 4) {
    throw std::invalid_argument("fit_exponent: need at least 4 points");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(abscissae[i] > 0.0) || !(ordinates[i] > 0.0)) {
      throw std::invalid_argument("fit_exponent: points must be positive");
    }
  }
  std::vector<double> lx(n), ly(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(abscissae[i]);
    ly[i] = std::log(ordinates[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("fit_exponent: abscissae are all equal");
  }
  ScalingFit fit;
  fit.abscissae = abscissae;
  fit.ordinates = ordinates;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.residual_rms = std::sqrt(ss_res / double(n));
  const double se = n > 2 ? std::sqrt(ss_res / double(n - 2) / sxx) : 0.0;
  fit.confidence_halfwidth = 2.0 * se;
  return fit;
}

}  // namespace stablelab
