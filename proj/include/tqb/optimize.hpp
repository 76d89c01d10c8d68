// Copyright 2026 The tqb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small dense least-squares toolkit for two-to-four parameter fits.

#pragma once

#include "tqb/qcore.hpp"

#include <functional>
#include <vector>

namespace tqb::opt {

/// Fills r (and J when non-null, rows = residuals, cols = parameters).
using ResidualFn = std::function<void(const RVector& x, RVector& r, RMatrix* jacobian)>;

struct SimplexOptions {
  int max_iterations = 4000;
  double x_tolerance = 1e-8;   // relative simplex diameter
  double f_tolerance = 1e-12;  // spread relative to max(|f_best|, |f(x0)| * 1e-12)
};

struct SimplexResult {
  RVector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead minimisation. `scale` sets the initial simplex edge per axis.
SimplexResult nelder_mead(const std::function<double(const RVector&)>& f, const RVector& x0,
                          const RVector& scale, const SimplexOptions& options = {});

struct LeastSquaresOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-10;
  double step_tolerance = 1e-8;
  // Residual norm, relative to the one at the first start, below which the
  // residual is treated as rounding and the gradient test is waived.
  double residual_floor = 1e-10;
  int simplex_starts = 8;
};

struct LeastSquaresResult {
  RVector x;
  RVector residuals;
  RMatrix covariance;  // s^2 (J^T J)^-1 with s^2 = SSE / (m - p)
  double residual_rms = 0.0;
  double gradient_norm = 0.0;  // max_c |J_c . r| / (|J_c| |r|)
  double last_step = 0.0;      // |dx| / max(1e-12, |x|)
  int iterations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt polish from x0.
LeastSquaresResult levenberg_marquardt(const ResidualFn& fn, const RVector& x0,
                                       const LeastSquaresOptions& options = {},
                                       double reference_norm = -1.0);

/// Simplex descent on the sum of squares from each start, then a
/// Levenberg-Marquardt polish of the best point. Converged means the polish
/// met the step tolerance and either the gradient tolerance or the
/// residual floor.
LeastSquaresResult multistart_least_squares(const ResidualFn& fn, const std::vector<RVector>& starts,
                                            const RVector& scale,
                                            const LeastSquaresOptions& options = {});

struct LinearFit {
  RVector coefficients;
  RMatrix covariance;
  double residual_rms = 0.0;
  Index rank = 0;
};

/// Ordinary least squares y ~ X b. Throws RankDeficiencyError when X does
/// not have full column rank.
LinearFit linear_least_squares(const RMatrix& x, const RVector& y);

}  // namespace tqb::opt
