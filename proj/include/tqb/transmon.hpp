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

// Transmon battery spectrum in the Cooper-pair charge basis.
//
// H = 4 E_C (N - N_g)^2 - E_J cos(phi), with cos(phi) = (|N><N+1| + h.c.)/2.
// All energies are in units of E_C. The plasma frequency is
// omega_p = sqrt(8 E_J E_C) and the collision time unit is tau_p = 1/omega_p.

#pragma once

#include "tqb/qcore.hpp"

#include <iosfwd>
#include <vector>

namespace tqb {

struct TransmonSpec {
  double ej_over_ec = 100.0;
  double ng = 0.0;
  int charge_cutoff = 35;   // charge basis spans N in [-cutoff, +cutoff]
  int battery_levels = 15;  // eigenstates retained for the dynamics

  /// Throws RangeError on a violated invariant.
  void validate() const;

  Index charge_dim() const { return 2 * static_cast<Index>(charge_cutoff) + 1; }
  /// omega_p in units of E_C.
  double plasma_frequency() const;
  /// tau_p = 1/omega_p in units of 1/E_C.
  double plasma_time() const { return 1.0 / plasma_frequency(); }
  /// Smallest cutoff accepted by validate().
  static int minimum_cutoff(double ej_over_ec);
};

struct Spectrum {
  TransmonSpec spec;
  RVector all_levels;     // every charge-basis eigenvalue, ascending (E_C)
  RVector levels;         // the retained battery_levels lowest, unshifted (E_C)
  RMatrix eigenvectors;   // charge_dim x battery_levels, real under the phase convention
  CMatrix charge_matrix;  // <m|N|m'> over the retained levels
  int bound_count = 0;    // levels strictly below the well top
  double well_top = 0.0;  // +E_J
  double e_f = 0.0;       // E_J - E_0, the charging ceiling
  double convergence_shift = 0.0;  // max relative level change at cutoff + 10
  bool converged = false;
  int degenerate_pairs = 0;  // adjacent retained levels within 1e-9 relative

  Index dim() const { return levels.size(); }
  double ground_energy() const { return levels(0); }
  /// E_m - E_0 over the retained levels (the dynamics' energy zero).
  RVector shifted_levels() const;
  bool is_bound(Index m) const { return all_levels(m) < well_top; }
};

/// Real symmetric charge-basis Hamiltonian of dimension 2 * cutoff + 1.
HermitianOperator build_charge_hamiltonian(const TransmonSpec& spec);

/// Number of levels whose shift is compared when checking convergence.
inline constexpr int kConvergenceCutoffStep = 10;
inline constexpr double kConvergenceTolerance = 1e-8;

/// Diagonalizes the transmon and fills every Spectrum field. The spectrum is
/// re-solved at charge_cutoff + 10; if the retained levels move by more than
/// 1e-8 relative a ConvergenceError is thrown (unless require_convergence is
/// false, in which case only the `converged` flag is cleared).
Spectrum solve_spectrum(const TransmonSpec& spec, bool require_convergence = true);

/// Second-order perturbative level E_m (units of E_C):
/// -E_J + omega_p (m + 1/2) - (E_C / 4)(2 m^2 + 2 m + 1).
double perturbative_level(const TransmonSpec& spec, int m);

enum class AnharmonicityMode { exact, approximate };

/// |dE_{m+1} - dE_m| / dE_0 from the numerical levels.
double relative_anharmonicity(const Spectrum& spectrum, int m);
/// exact: solves the spectrum; approximate: sqrt(E_C / 8 E_J).
double relative_anharmonicity(const TransmonSpec& spec, int m, AnharmonicityMode mode);

/// N_b ~ sqrt(E_J / E_C).
double bound_state_estimate(const TransmonSpec& spec);

/// <m|N|m'> in the energy eigenbasis.
Complex charge_matrix_element(const Spectrum& spectrum, int m, int mp);

struct DispersionRow {
  double ng;
  std::vector<double> levels;  // E_0..E_{k-1} in units of E_J
};

/// Lowest `n_levels` energies as a function of N_g (charge dispersion).
std::vector<DispersionRow> charge_dispersion(TransmonSpec spec, const std::vector<double>& ng_values,
                                             int n_levels = 4);

/// CSV: m,E_m_over_EJ,E_m_over_EC,bound_flag over the retained levels.
void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum);
/// CSV: ng,E0_over_EJ,...,E{k-1}_over_EJ.
void write_dispersion_csv(std::ostream& os, const std::vector<DispersionRow>& rows);

}  // namespace tqb
