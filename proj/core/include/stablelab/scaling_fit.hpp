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

#pragma once

#include <cstddef>
#include <vector>

namespace stablelab {

/// Log-log least-squares fit over a dyadic ladder.
struct ScalingFit {
  std::vector<double> abscissae;
  std::vector<double> ordinates;  // raw (positive) values, not logs
  double slope = 0.0;
  double intercept = 0.0;          // in log space
  double residual_rms = 0.0;       // RMS of log-residuals
  double confidence_halfwidth = 0.0;  // ~2 standard errors of the slope
};

/// Least squares on (log x, log y); requires >= 4 points with positive
/// ordinates (throws std::invalid_argument otherwise).
ScalingFit fit_exponent(const std::vector<double>& abscissae,
                        const std::vector<double>& ordinates);

}  // namespace stablelab
