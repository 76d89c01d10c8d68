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

#include "tqb/optimize.hpp"

#include "tqb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tqb::opt {

namespace {

double sum_squares(const ResidualFn& fn, const RVector& x) {
  RVector r;
  fn(x, r, nullptr);
  const double s = r.squaredNorm();
  return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

RMatrix covariance_from(const RMatrix& j, const RVector& r) {
  const Index m = j.rows(), p = j.cols();
  const RMatrix jtj = j.transpose() * j;
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(jtj);
  const double s2 = m > p ? r.squaredNorm() / static_cast<double>(m - p) : 0.0;
  RMatrix cov = s2 * cod.pseudoInverse();
  return 0.5 * (cov + cov.transpose());
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const RVector&)>& f, const RVector& x0,
                          const RVector& scale, const SimplexOptions& o) {
  const Index n = x0.size();
  std::vector<RVector> pts(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> val(static_cast<std::size_t>(n + 1));
  for (Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i + 1)](i) += scale(i);
  for (std::size_t i = 0; i < pts.size(); ++i) val[i] = f(pts[i]);
  const double f_floor = 1e-12 * std::abs(val[0]);

  std::vector<std::size_t> idx(pts.size());
  SimplexResult res;
  for (res.iterations = 0; res.iterations < o.max_iterations; ++res.iterations) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[idx.size() - 2];

    double diameter = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      diameter = std::max(diameter, (pts[idx[i]] - pts[best]).cwiseAbs().maxCoeff());
    }
    const double xs = std::max(1e-300, pts[best].cwiseAbs().maxCoeff());
    const double spread = std::abs(val[worst] - val[best]);
    if (diameter <= o.x_tolerance * xs &&
        spread <= o.f_tolerance * std::max({std::abs(val[best]), f_floor, 1e-300})) {
      res.converged = true;
      break;
    }

    RVector centroid = RVector::Zero(n);
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) centroid += pts[idx[i]];
    centroid /= static_cast<double>(n);

    const RVector xr = centroid + (centroid - pts[worst]);
    const double fr = f(xr);
    if (fr < val[best]) {
      const RVector xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const RVector xc = outside ? RVector(centroid + 0.5 * (xr - centroid))
                               : RVector(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i < idx.size(); ++i) {
      pts[idx[i]] = pts[best] + 0.5 * (pts[idx[i]] - pts[best]);
      val[idx[i]] = f(pts[idx[i]]);
    }
  }
  const auto it = std::min_element(val.begin(), val.end());
  res.x = pts[static_cast<std::size_t>(it - val.begin())];
  res.value = *it;
  return res;
}

LeastSquaresResult levenberg_marquardt(const ResidualFn& fn, const RVector& x0,
                                       const LeastSquaresOptions& o, double reference_norm) {
  LeastSquaresResult res;
  RVector x = x0;
  RVector r;
  RMatrix j;
  fn(x, r, &j);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  const double floor_norm = o.residual_floor * (reference_norm >= 0.0 ? reference_norm : r.norm());
  auto stationary = [&] {
    return (res.gradient_norm < o.gradient_tolerance || std::sqrt(cost) <= floor_norm) &&
           res.last_step < o.step_tolerance;
  };
  const Index p = x.size();

  // Largest cosine between the residual and a Jacobian column; invariant
  // under rescaling of individual parameters.
  auto gradient_measure = [&](const RMatrix& jm, const RVector& rv) {
    const double rn = rv.norm();
    if (rn == 0.0) return 0.0;
    double g = 0.0;
    for (Index c = 0; c < jm.cols(); ++c) {
      const double cn = jm.col(c).norm();
      if (cn > 0.0) g = std::max(g, std::abs(jm.col(c).dot(rv)) / (cn * rn));
    }
    return g;
  };

  for (res.iterations = 0; res.iterations < o.max_iterations; ++res.iterations) {
    res.gradient_norm = gradient_measure(j, r);
    const RMatrix jtj = j.transpose() * j;
    const RVector jtr = j.transpose() * r;
    bool accepted = false;
    for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
      RMatrix a = jtj;
      for (Index i = 0; i < p; ++i) a(i, i) += lambda * std::max(jtj(i, i), 1e-300);
      const RVector dx = a.ldlt().solve(-jtr);
      if (!dx.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const RVector xn = x + dx;
      RVector rn;
      RMatrix jn;
      fn(xn, rn, &jn);
      const double cn = rn.squaredNorm();
      // Near the optimum the predicted decrease falls below the rounding of
      // the cost itself; steps that keep the cost within that rounding are
      // taken so the gradient test can still be met.
      if (std::isfinite(cn) && cn <= cost * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) {
        res.last_step = dx.norm() / std::max(1e-12, xn.norm());
        x = xn;
        r = std::move(rn);
        j = std::move(jn);
        cost = cn;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) {
      // No descent direction left at machine precision.
      res.last_step = 0.0;
      res.gradient_norm = gradient_measure(j, r);
      break;
    }
    res.gradient_norm = gradient_measure(j, r);
    if (stationary()) break;
  }
  res.x = x;
  res.residuals = r;
  res.residual_rms = r.size() ? std::sqrt(cost / static_cast<double>(r.size())) : 0.0;
  res.covariance = covariance_from(j, r);
  res.converged = stationary() && x.allFinite();
  return res;
}

LeastSquaresResult multistart_least_squares(const ResidualFn& fn, const std::vector<RVector>& starts,
                                            const RVector& scale, const LeastSquaresOptions& o) {
  if (starts.empty()) throw ValidationError("multistart_least_squares needs at least one start");
  const auto objective = [&](const RVector& x) { return sum_squares(fn, x); };
  SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  const int n_starts = std::min<int>(o.simplex_starts, static_cast<int>(starts.size()));
  for (int s = 0; s < n_starts; ++s) {
    SimplexResult sr = nelder_mead(objective, starts[static_cast<std::size_t>(s)], scale);
    if (sr.value < best.value) best = std::move(sr);
  }
  if (!best.x.size()) best.x = starts.front();
  const double f0 = objective(starts.front());
  return levenberg_marquardt(fn, best.x, o, std::isfinite(f0) ? std::sqrt(f0) : -1.0);
}

LinearFit linear_least_squares(const RMatrix& x, const RVector& y) {
  if (x.rows() != y.size()) throw ShapeError("design rows do not match observations");
  Eigen::ColPivHouseholderQR<RMatrix> qr(x);
  qr.setThreshold(1e-10);
  LinearFit fit;
  fit.rank = qr.rank();
  if (fit.rank < x.cols()) {
    throw RankDeficiencyError("design matrix has rank " + std::to_string(fit.rank) + " < " +
                              std::to_string(x.cols()) + " parameters");
  }
  fit.coefficients = qr.solve(y);
  const RVector r = x * fit.coefficients - y;
  fit.residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
  fit.covariance = covariance_from(x, r);
  return fit;
}

}  // namespace tqb::opt
