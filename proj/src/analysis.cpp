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

#include "tqb/analysis.hpp"

#include "tqb/errors.hpp"
#include "tqb/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

namespace tqb {

namespace {

constexpr double kPi = std::numbers::pi;

RVector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const RVector>(v.data(), static_cast<Index>(v.size()));
}

double mean(const std::vector<double>& v, std::size_t from, std::size_t to) {
  if (to <= from) return 0.0;
  return std::accumulate(v.begin() + static_cast<long>(from), v.begin() + static_cast<long>(to), 0.0) /
         static_cast<double>(to - from);
}

std::size_t count_distinct(const std::vector<ScalingPoint>& pts, double ScalingPoint::*field) {
  std::set<double> s;
  for (const auto& p : pts) s.insert(p.*field);
  return s.size();
}

opt::LeastSquaresOptions fit_options() {
  opt::LeastSquaresOptions o;
  o.simplex_starts = 8;
  return o;
}

}  // namespace

// Series -----------------------------------------------------------------------

Series Series::stored_energy(const Trajectory& t) {
  Series s;
  s.n = t.collision_index();
  s.y = t.stored_energy();
  return s;
}

Series restrict(const Series& s, const Window& w) {
  if (s.n.size() != s.y.size()) throw ShapeError("series abscissa and values differ in length");
  Series out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.n[i] >= w.first && s.n[i] <= w.last) {
      out.n.push_back(s.n[i]);
      out.y.push_back(s.y[i]);
    }
  }
  return out;
}

// Shape detection --------------------------------------------------------------

std::vector<double> smooth(const std::vector<double>& y, int window) {
  if (window <= 1 || y.empty()) return y;
  const long half = window / 2;
  const long n = static_cast<long>(y.size());
  std::vector<double> prefix(y.size() + 1, 0.0);
  for (long i = 0; i < n; ++i) prefix[static_cast<std::size_t>(i + 1)] = prefix[static_cast<std::size_t>(i)] + y[static_cast<std::size_t>(i)];
  std::vector<double> out(y.size());
  for (long i = 0; i < n; ++i) {
    const long lo = std::max(0L, i - half);
    const long hi = std::min(n, i + half + 1);
    out[static_cast<std::size_t>(i)] =
        (prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]) / static_cast<double>(hi - lo);
  }
  return out;
}

std::vector<Extremum> find_extrema(const Series& s, int window, double threshold) {
  const std::vector<double> y = smooth(s.y, window);
  std::vector<Extremum> out;
  if (y.size() < 3) return out;
  int dir = 0;  // +1 rising, -1 falling
  std::size_t hi = 0, lo = 0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (dir == 0) {
      if (y[i] > y[hi]) hi = i;
      if (y[i] < y[lo]) lo = i;
      if (y[i] - y[lo] >= threshold) {
        dir = 1;
        hi = i;
      } else if (y[hi] - y[i] >= threshold) {
        dir = -1;
        lo = i;
      }
    } else if (dir > 0) {
      if (y[i] > y[hi]) {
        hi = i;
      } else if (y[hi] - y[i] >= threshold) {
        out.push_back({hi, true});
        dir = -1;
        lo = i;
      }
    } else {
      if (y[i] < y[lo]) {
        lo = i;
      } else if (y[i] - y[lo] >= threshold) {
        out.push_back({lo, false});
        dir = 1;
        hi = i;
      }
    }
  }
  return out;
}

Shape classify_shape(const Series& s) {
  return find_extrema(s).empty() ? Shape::saturating : Shape::oscillatory;
}

std::size_t first_maximum_index(const Series& s) {
  if (s.y.empty()) throw ShapeError("empty series");
  const auto ext = find_extrema(s);
  const auto it = std::find_if(ext.begin(), ext.end(), [](const Extremum& e) { return e.maximum; });
  if (it == ext.end()) {
    return static_cast<std::size_t>(std::max_element(s.y.begin(), s.y.end()) - s.y.begin());
  }
  const std::size_t lo = it->index > static_cast<std::size_t>(kSmoothingWindow) ? it->index - kSmoothingWindow : 0;
  const std::size_t hi = std::min(s.y.size(), it->index + kSmoothingWindow + 1);
  return static_cast<std::size_t>(std::max_element(s.y.begin() + static_cast<long>(lo), s.y.begin() + static_cast<long>(hi)) -
                                  s.y.begin());
}

// Damped cosine ----------------------------------------------------------------

std::pair<double, double> damped_cosine_guess(const Series& s) {
  const auto ext = find_extrema(s);
  if (ext.size() < 2) {
    throw ShapeMismatchError("no damped oscillation detected (" + std::to_string(ext.size()) +
                             " extrema); use fit_saturation for monotone data");
  }
  const double level = mean(s.y, 0, s.y.size());
  const double centre = std::min(level, 0.5);

  double omega = 0.0;
  const std::vector<double> y = smooth(s.y);
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y[i - 1] < centre && y[i] >= centre) {
      const double t = (centre - y[i - 1]) / (y[i] - y[i - 1]);
      const double n_zc = s.n[i - 1] + t * (s.n[i] - s.n[i - 1]);
      if (n_zc > 0) omega = kPi / (2.0 * n_zc);
      break;
    }
  }
  const auto first_max = std::find_if(ext.begin(), ext.end(), [](const Extremum& e) { return e.maximum; });
  if (omega <= 0.0 && first_max != ext.end() && s.n[first_max->index] > 0) {
    omega = kPi / s.n[first_max->index];
  }
  if (omega <= 0.0) omega = kPi / std::max(1.0, s.n[ext[1].index] - s.n[ext[0].index]);

  double gamma = 0.0;
  std::vector<std::size_t> maxima;
  for (const auto& e : ext)
    if (e.maximum) maxima.push_back(e.index);
  if (maxima.size() >= 2) {
    const double a1 = s.y[maxima[0]] - level, a2 = s.y[maxima[1]] - level;
    if (a1 > 0 && a2 > 0) gamma = std::log(a1 / a2) / (s.n[maxima[1]] - s.n[maxima[0]]);
  } else {
    const double a1 = std::abs(s.y[ext[0].index] - level), a2 = std::abs(s.y[ext[1].index] - level);
    if (a1 > 0 && a2 > 0) gamma = std::log(a1 / a2) / (s.n[ext[1].index] - s.n[ext[0].index]);
  }
  gamma = std::clamp(std::isfinite(gamma) ? gamma : 0.0, 0.0, omega);
  return {omega, gamma};
}

DampedCosineFit fit_damped_cosine(const Series& full, const Window& window, bool free_amplitude) {
  const Series s = restrict(full, window);
  if (s.size() < 8) throw ShapeError("too few points in the fitting window");
  const auto [omega0, gamma0] = damped_cosine_guess(s);
  const std::size_t n_extrema = find_extrema(s).size();

  const RVector n = to_vector(s.n);
  const RVector y = to_vector(s.y);
  const Index p = free_amplitude ? 4 : 2;

  opt::ResidualFn fn = [&](const RVector& x, RVector& r, RMatrix* j) {
    const double om = x(0), ga = x(1);
    const double a = free_amplitude ? x(2) : 0.5;
    const double b = free_amplitude ? x(3) : 0.5;
    r.resize(n.size());
    if (j) j->resize(n.size(), p);
    for (Index i = 0; i < n.size(); ++i) {
      const double decay = std::exp(-ga * n(i));
      const double c = std::cos(om * n(i)), sn = std::sin(om * n(i));
      r(i) = a - b * decay * c - y(i);
      if (j) {
        (*j)(i, 0) = b * decay * n(i) * sn;
        (*j)(i, 1) = b * decay * n(i) * c;
        if (free_amplitude) {
          (*j)(i, 2) = 1.0;
          (*j)(i, 3) = -decay * c;
        }
      }
    }
  };

  const double level0 = mean(s.y, s.size() / 2, s.size());
  const double span = std::max(1.0, s.n.back() - s.n.front());
  const double om_f[8] = {1.0, 0.97, 1.03, 0.9, 1.1, 1.0, 1.0, 0.95};
  const double ga_f[8] = {1.0, 1.0, 1.0, 1.0, 1.0, 0.3, 3.0, 0.0};
  std::vector<RVector> starts;
  for (int k = 0; k < 8; ++k) {
    RVector x(p);
    x(0) = omega0 * om_f[k];
    x(1) = gamma0 * ga_f[k] + (k == 7 ? 0.1 / span : 0.0);
    if (free_amplitude) {
      x(2) = level0;
      x(3) = level0;
    }
    starts.push_back(x);
  }
  RVector scale(p);
  scale(0) = 0.05 * omega0;
  scale(1) = std::max(0.1 * gamma0, 0.1 / span);
  if (free_amplitude) scale.tail(2).setConstant(0.05);

  const opt::LeastSquaresResult ls = opt::multistart_least_squares(fn, starts, scale, fit_options());

  DampedCosineFit fit;
  // The model is even in omega; report the positive branch.
  fit.omega = std::abs(ls.x(0));
  fit.gamma = ls.x(1);
  fit.free_amplitude = free_amplitude;
  fit.amplitude_scale = free_amplitude ? ls.x(2) : 0.5;
  fit.oscillation_amplitude = free_amplitude ? ls.x(3) : 0.5;
  fit.residual_rms = ls.residual_rms;
  fit.covariance = ls.covariance;
  if (ls.x(0) < 0.0) {
    fit.covariance.row(0) *= -1.0;
    fit.covariance.col(0) *= -1.0;
  }
  fit.extrema = n_extrema;
  fit.converged = ls.converged && fit.omega > 0.0 && fit.gamma >= 0.0 &&
                  fit.residual_rms <= kMaxResidualRms;
  return fit;
}

DampedCosineFit fit_damped_cosine(const Trajectory& t, const Window& window, bool free_amplitude) {
  return fit_damped_cosine(Series::stored_energy(t), window, free_amplitude);
}

Window frequency_window(const Series& s, double periods, double cap) {
  const double omega0 = damped_cosine_guess(s).first;
  return Window{0.0, std::floor(std::min(cap, periods * 2.0 * kPi / omega0))};
}

// Saturation -------------------------------------------------------------------

SaturationFit fit_saturation(const Series& full, const Window& window) {
  const Series s = restrict(full, window);
  if (s.size() < 8) throw ShapeError("too few points in the fitting window");
  if (classify_shape(s) == Shape::oscillatory) {
    throw ShapeMismatchError("oscillatory data; use fit_damped_cosine");
  }
  const double f0 = std::max(1e-6, mean(s.y, s.size() - std::max<std::size_t>(1, s.size() / 10), s.size()));
  double gamma0 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.y[i] >= f0 * (1.0 - std::exp(-1.0)) && s.n[i] > 0) {
      gamma0 = 1.0 / s.n[i];
      break;
    }
  }
  if (gamma0 <= 0.0) gamma0 = 1.0 / std::max(1.0, s.n.back());

  const RVector n = to_vector(s.n);
  const RVector y = to_vector(s.y);
  opt::ResidualFn fn = [&](const RVector& x, RVector& r, RMatrix* j) {
    r.resize(n.size());
    if (j) j->resize(n.size(), 2);
    for (Index i = 0; i < n.size(); ++i) {
      const double e = std::exp(-x(1) * n(i));
      r(i) = x(0) * (1.0 - e) - y(i);
      if (j) {
        (*j)(i, 0) = 1.0 - e;
        (*j)(i, 1) = x(0) * n(i) * e;
      }
    }
  };
  std::vector<RVector> starts;
  for (double fg : {1.0, 0.5, 2.0, 0.3, 3.0, 1.0, 1.0, 1.5}) {
    starts.push_back(RVector{{f0, gamma0 * fg}});
  }
  starts[5](0) = 0.8 * f0;
  starts[6](0) = 1.2 * f0;
  const RVector scale{{0.1 * f0, 0.2 * gamma0}};
  const auto ls = opt::multistart_least_squares(fn, starts, scale, fit_options());

  SaturationFit fit;
  fit.f = ls.x(0);
  fit.gamma = ls.x(1);
  fit.residual_rms = ls.residual_rms;
  fit.covariance = ls.covariance;
  fit.converged = ls.converged && fit.gamma > 0.0 && fit.residual_rms <= kMaxResidualRms;
  return fit;
}

SaturationFit fit_saturation(const Trajectory& t, const Window& window) {
  return fit_saturation(Series::stored_energy(t), window);
}

// Scaling laws -----------------------------------------------------------------

const char* to_string(ScalingLaw law) {
  switch (law) {
    case ScalingLaw::frequency: return "frequency";
    case ScalingLaw::damping: return "damping";
    case ScalingLaw::gamma: return "gamma";
    case ScalingLaw::saturation_level: return "saturation_level";
  }
  return "frequency";
}

double ScalingFit::at(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) throw RangeError("scaling fit has no parameter '" + name + "'");
  return it->second;
}

ScalingFit fit_frequency_scaling(const std::vector<ScalingPoint>& pts) {
  if (pts.size() < 6) throw ValidationError("frequency scaling needs at least 6 points");
  if (count_distinct(pts, &ScalingPoint::g) < 3 || count_distinct(pts, &ScalingPoint::q) < 3) {
    throw RankDeficiencyError("frequency scaling needs at least 3 distinct g and 3 distinct q");
  }
  RMatrix x(static_cast<Index>(pts.size()), 3);
  RVector y(static_cast<Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    if (!(p.g > 0 && p.q > 0 && p.q < 1 && p.value > 0)) {
      throw RangeError("frequency scaling needs g > 0, 0 < q < 1 and positive omega");
    }
    const Index r = static_cast<Index>(i);
    x(r, 0) = 1.0;
    x(r, 1) = std::log(p.g);
    x(r, 2) = std::log(p.q * (1.0 - p.q));
    y(r) = std::log(p.value);
  }
  const opt::LinearFit lf = opt::linear_least_squares(x, y);
  ScalingFit fit;
  fit.law = ScalingLaw::frequency;
  fit.names = {"omega_star", "alpha", "beta"};
  const double omega_star = std::exp(lf.coefficients(0));
  fit.params = {{"omega_star", omega_star}, {"alpha", lf.coefficients(1)}, {"beta", lf.coefficients(2)}};
  RMatrix jac = RMatrix::Identity(3, 3);
  jac(0, 0) = omega_star;
  fit.covariance = jac * lf.covariance * jac.transpose();
  fit.residual_rms = lf.residual_rms;
  return fit;
}

ScalingFit fit_power_law(const std::vector<ScalingPoint>& pts, ScalingLaw law) {
  if (count_distinct(pts, &ScalingPoint::g) < 2) {
    throw RankDeficiencyError("power law needs at least 2 distinct couplings");
  }
  RMatrix x(static_cast<Index>(pts.size()), 2);
  RVector y(static_cast<Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].g > 0 && pts[i].value > 0)) throw RangeError("power law needs positive g and values");
    x(static_cast<Index>(i), 0) = 1.0;
    x(static_cast<Index>(i), 1) = std::log(pts[i].g);
    y(static_cast<Index>(i)) = std::log(pts[i].value);
  }
  const opt::LinearFit lf = opt::linear_least_squares(x, y);
  ScalingFit fit;
  fit.law = law;
  fit.names = {"prefactor", "exponent"};
  const double pref = std::exp(lf.coefficients(0));
  fit.params = {{"prefactor", pref}, {"exponent", lf.coefficients(1)}};
  RMatrix jac = RMatrix::Identity(2, 2);
  jac(0, 0) = pref;
  fit.covariance = jac * lf.covariance * jac.transpose();
  fit.residual_rms = lf.residual_rms;
  return fit;
}

ScalingFit fit_damping_shape(const std::vector<ScalingPoint>& pts) {
  std::set<double> dist;
  for (const auto& p : pts) dist.insert(std::abs(p.q - 0.5));
  if (dist.size() < 3) throw RankDeficiencyError("damping shape needs at least 3 distinct |q - 1/2|");

  const Index m = static_cast<Index>(pts.size());
  RVector u(m), y(m);
  for (Index i = 0; i < m; ++i) {
    const auto& p = pts[static_cast<std::size_t>(i)];
    if (!(p.g > 0)) throw RangeError("damping shape needs positive g");
    u(i) = std::abs(p.q - 0.5);
    y(i) = p.value / (p.g * p.g);
  }
  opt::ResidualFn fn = [&](const RVector& x, RVector& r, RMatrix* j) {
    r.resize(m);
    if (j) j->resize(m, 3);
    for (Index i = 0; i < m; ++i) {
      const double pw = u(i) > 0 ? std::pow(u(i), x(1)) : 0.0;
      r(i) = x(0) * (pw + x(2)) - y(i);
      if (j) {
        (*j)(i, 0) = pw + x(2);
        (*j)(i, 1) = u(i) > 0 ? x(0) * pw * std::log(u(i)) : 0.0;
        (*j)(i, 2) = x(0);
      }
    }
  };
  // For fixed delta the model is linear in (Gamma*, Gamma* offset).
  std::vector<RVector> starts;
  for (double delta : {1.0, 1.5, 2.0, 2.5, 3.0, 1.25, 1.75, 2.25}) {
    RMatrix x(m, 2);
    for (Index i = 0; i < m; ++i) {
      x(i, 0) = u(i) > 0 ? std::pow(u(i), delta) : 0.0;
      x(i, 1) = 1.0;
    }
    const RVector c = x.colPivHouseholderQr().solve(y);
    const double gs = std::abs(c(0)) > 1e-300 ? c(0) : 1.0;
    starts.push_back(RVector{{gs, delta, c(1) / gs}});
  }
  const RVector scale{{0.1 * std::abs(starts[2](0)), 0.2, 0.02}};
  const auto ls = opt::multistart_least_squares(fn, starts, scale, fit_options());
  ScalingFit fit;
  fit.law = ScalingLaw::damping;
  fit.names = {"gamma_star", "delta", "offset"};
  fit.params = {{"gamma_star", ls.x(0)}, {"delta", ls.x(1)}, {"offset", ls.x(2)}};
  fit.covariance = ls.covariance;
  fit.residual_rms = ls.residual_rms;
  return fit;
}

DampingScalingFit fit_damping_scaling(const std::vector<ScalingPoint>& pts) {
  if (pts.size() < 6) throw ValidationError("damping scaling needs at least 6 points");
  DampingScalingFit out;
  std::map<double, std::vector<ScalingPoint>> by_q, by_g;
  for (const auto& p : pts) {
    by_q[p.q].push_back(p);
    by_g[p.g].push_back(p);
  }
  double sum = 0.0;
  for (const auto& [q, slice] : by_q) {
    if (count_distinct(slice, &ScalingPoint::g) < 2) continue;
    ScalingFit f = fit_power_law(slice, ScalingLaw::damping);
    sum += f.at("exponent");
    out.coupling_exponent_by_q.emplace(q, std::move(f));
  }
  for (const auto& [g, slice] : by_g) {
    std::set<double> dist;
    for (const auto& p : slice) dist.insert(std::abs(p.q - 0.5));
    if (dist.size() < 3) continue;
    out.shape_by_g.emplace(g, fit_damping_shape(slice));
  }
  if (out.coupling_exponent_by_q.empty() && out.shape_by_g.empty()) {
    throw RankDeficiencyError("damping scaling needs either 2 couplings per q or 3 q per coupling");
  }
  out.coupling_exponent = out.coupling_exponent_by_q.empty()
                              ? std::nan("")
                              : sum / static_cast<double>(out.coupling_exponent_by_q.size());
  return out;
}

ScalingFit fit_saturation_level(const std::vector<ScalingPoint>& pts) {
  if (count_distinct(pts, &ScalingPoint::q) < 2) {
    throw RankDeficiencyError("saturation level needs at least 2 distinct q");
  }
  RMatrix x(static_cast<Index>(pts.size()), 2);
  RVector y(static_cast<Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    x(static_cast<Index>(i), 0) = 1.0 - pts[i].q;
    x(static_cast<Index>(i), 1) = 1.0;
    y(static_cast<Index>(i)) = pts[i].value;
  }
  const opt::LinearFit lf = opt::linear_least_squares(x, y);
  ScalingFit fit;
  fit.law = ScalingLaw::saturation_level;
  fit.names = {"a", "b"};
  fit.params = {{"a", lf.coefficients(0)}, {"b", lf.coefficients(1)}};
  fit.covariance = lf.covariance;
  fit.residual_rms = lf.residual_rms;
  return fit;
}

ScalingFit fit_gamma_scaling(const std::vector<ScalingPoint>& pts) {
  ScalingFit f = fit_power_law(pts, ScalingLaw::gamma);
  f.names = {"gamma_star", "beta"};
  f.params = {{"gamma_star", f.at("prefactor")}, {"beta", f.at("exponent")}};
  return f;
}

// Feasibility ------------------------------------------------------------------

namespace {
constexpr double kElementaryCharge = 1.602176634e-19;  // C
constexpr double kFemto = 1e-15;

void check_capacitances(double c_bn, double c_n, double c_b) {
  if (!(c_bn >= 0.0) || !(c_n > 0.0) || !(c_b > 0.0)) {
    throw RangeError("capacitances must be positive (c_bn may be zero)");
  }
}
}  // namespace

double feasibility_coupling(double c_bn, double c_n, double c_b, double n10) {
  check_capacitances(c_bn, c_n, c_b);
  return std::sqrt(2.0) * std::abs(n10) / 5.0 * (c_bn / c_n);
}

double feasibility_coupling(double c_bn, double c_n, double c_b, double n10, double ej_joule,
                            double ec_joule) {
  check_capacitances(c_bn, c_n, c_b);
  if (!(ej_joule > 0.0) || !(ec_joule > 0.0)) throw RangeError("E_J and E_C must be positive");
  const double e2 = kElementaryCharge * kElementaryCharge;
  return 4.0 * e2 * std::abs(n10) * (c_bn * kFemto) / ((c_b * kFemto) * (c_n * kFemto)) /
         std::sqrt(8.0 * ej_joule * ec_joule);
}

double charging_energy(double c_fF) {
  if (!(c_fF > 0.0)) throw RangeError("capacitance must be positive");
  return kElementaryCharge * kElementaryCharge / (2.0 * c_fF * kFemto);
}

}  // namespace tqb
