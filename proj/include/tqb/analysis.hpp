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

// Phenomenological fits of charging trajectories and the scaling laws built
// on top of them. Energies are in units of E_f, n counts collisions and g is
// g / omega_p throughout.
//
//   coherent:    dE(n) = A - B exp(-Gamma n) cos(Omega n)   (A = B = 1/2 unless free)
//   frequency:   Omega = Omega* g^alpha [q (1 - q)]^beta
//   damping:     Gamma = Gamma* g^beta_d (|q - 1/2|^delta + offset)
//   incoherent:  dE(n) = f (1 - exp(-gamma n)),  f(q) = a (1 - q) + b,  gamma = gamma* g^beta

#pragma once

#include "tqb/collision.hpp"
#include "tqb/qcore.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tqb {

struct Series {
  std::vector<double> n;
  std::vector<double> y;

  std::size_t size() const { return n.size(); }
  static Series stored_energy(const Trajectory& t);
};

/// Inclusive range of collision indices.
struct Window {
  double first = 0.0;
  double last = 1e300;
};

Series restrict(const Series& s, const Window& w);

// Shape detection -------------------------------------------------------------

inline constexpr int kSmoothingWindow = 50;
inline constexpr double kExtremumThreshold = 0.02;  // E_f

/// Centered moving average over `window` points (shrinking at the ends).
std::vector<double> smooth(const std::vector<double>& y, int window = kSmoothingWindow);

struct Extremum {
  std::size_t index;
  bool maximum;
};

/// Turning points of the smoothed series that reverse by at least
/// `threshold` (zigzag with hysteresis).
std::vector<Extremum> find_extrema(const Series& s, int window = kSmoothingWindow,
                                   double threshold = kExtremumThreshold);

enum class Shape { oscillatory, saturating };
Shape classify_shape(const Series& s);

/// First local maximum of the raw series after smoothing-based detection;
/// falls back to the global maximum when none is found.
std::size_t first_maximum_index(const Series& s);

// Damped cosine ----------------------------------------------------------------

struct DampedCosineFit {
  double omega = 0.0;              // per collision
  double gamma = 0.0;              // per collision
  double amplitude_scale = 0.5;    // A, E_f
  double oscillation_amplitude = 0.5;  // B, E_f
  bool free_amplitude = false;
  double residual_rms = 0.0;       // E_f
  RMatrix covariance;              // over (omega, gamma[, A, B])
  bool converged = false;
  std::size_t extrema = 0;
};

inline constexpr double kMaxResidualRms = 0.05;

/// Least-squares fit over the window. Throws ShapeMismatchError when fewer
/// than two extrema are detected (use fit_saturation for such data).
DampedCosineFit fit_damped_cosine(const Series& s, const Window& window = {},
                                  bool free_amplitude = false);
DampedCosineFit fit_damped_cosine(const Trajectory& t, const Window& window = {},
                                  bool free_amplitude = false);

/// Heuristic (omega, gamma) from the zero crossing of dE - 1/2 and from the
/// decay of successive maxima.
std::pair<double, double> damped_cosine_guess(const Series& s);

/// [0, min(cap, periods * 2 pi / omega0)] with omega0 from the heuristic guess.
Window frequency_window(const Series& s, double periods = 2.2, double cap = 6000.0);

// Saturation -------------------------------------------------------------------

struct SaturationFit {
  double f = 0.0;      // E_f
  double gamma = 0.0;  // per collision
  double residual_rms = 0.0;
  RMatrix covariance;
  bool converged = false;
};

/// Throws ShapeMismatchError on oscillatory input (use fit_damped_cosine).
SaturationFit fit_saturation(const Series& s, const Window& window = {});
SaturationFit fit_saturation(const Trajectory& t, const Window& window = {});

// Scaling laws -----------------------------------------------------------------

enum class ScalingLaw { frequency, damping, gamma, saturation_level };
const char* to_string(ScalingLaw law);

struct ScalingFit {
  ScalingLaw law = ScalingLaw::frequency;
  std::vector<std::string> names;  // parameter order of the covariance
  std::map<std::string, double> params;
  RMatrix covariance;
  double residual_rms = 0.0;

  double at(const std::string& name) const;
};

struct ScalingPoint {
  double g = 0.0;
  double q = 0.0;
  double value = 0.0;
};

/// log Omega = log Omega* + alpha log g + beta log q(1-q). Needs >= 6 points
/// with >= 3 distinct g and q; throws RankDeficiencyError otherwise.
ScalingFit fit_frequency_scaling(const std::vector<ScalingPoint>& points);

/// Power law value = prefactor * g^exponent at fixed q ("prefactor",
/// "exponent"); needs two distinct g.
ScalingFit fit_power_law(const std::vector<ScalingPoint>& points, ScalingLaw law);

struct DampingScalingFit {
  std::map<double, ScalingFit> coupling_exponent_by_q;  // "exponent", "prefactor"
  double coupling_exponent = 0.0;                        // mean over q slices
  // Per coupling: Gamma / g^2 = Gamma* (|q - 1/2|^delta + offset).
  std::map<double, ScalingFit> shape_by_g;  // "gamma_star", "delta", "offset"
};

DampingScalingFit fit_damping_scaling(const std::vector<ScalingPoint>& points);

/// (Gamma*, delta, offset) for one coupling from (q, Gamma / g^2) pairs.
ScalingFit fit_damping_shape(const std::vector<ScalingPoint>& points);

/// f = a (1 - q) + b over all points.
ScalingFit fit_saturation_level(const std::vector<ScalingPoint>& points);

/// gamma = gamma* g^beta; reported as "gamma_star", "beta".
ScalingFit fit_gamma_scaling(const std::vector<ScalingPoint>& points);

// Feasibility ------------------------------------------------------------------

/// g / omega_p = (sqrt(2) n10 / 5) (c_bn / c_n), valid at E_J = 100 E_C.
/// Capacitances in fF; c_b is checked but cancels in this form.
double feasibility_coupling(double c_bn, double c_n, double c_b, double n10);

/// g / omega_p = 4 e^2 n10 c_bn / (c_b c_n sqrt(8 E_J E_C)), with E_J and E_C
/// in joules and capacitances in fF.
double feasibility_coupling(double c_bn, double c_n, double c_b, double n10, double ej_joule,
                            double ec_joule);

/// E_C = e^2 / (2 C) in joules for C in fF.
double charging_energy(double c_fF);

}  // namespace tqb
