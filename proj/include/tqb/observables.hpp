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

// Battery figures of merit. States are expressed in the battery energy
// eigenbasis, so H_B is diagonal with the (ascending) retained levels.
//
// Energy zero: the dynamics measure energies from the ground level (E_0 = 0).
// With this choice the efficiency E/E lies in [0, 1]. Two alternatives are
// kept for comparison: the bottom of the cosine well (-E_J) and the raw
// Hamiltonian zero.

#pragma once

#include "tqb/qcore.hpp"
#include "tqb/transmon.hpp"

#include <optional>
#include <span>
#include <vector>

namespace tqb {

enum class EnergyReference { ground, well_bottom, absolute };

const char* to_string(EnergyReference r);
EnergyReference energy_reference_from_string(const std::string& s);

/// Energy added to a ground-referenced energy to express it in reference `r`
/// (units of E_C).
double energy_offset(const Spectrum& spectrum, EnergyReference r);

struct ErgotropyResult {
  double ergotropy = 0.0;       // energy - passive_energy, clamped at 0 within 1e-10
  double energy = 0.0;          // tr(rho H_B)
  double passive_energy = 0.0;  // sum_j p_j(desc) E_j(asc)
  RVector populations;          // eigenvalues of rho, non-increasing
  // permutation[k] is the energy level that receives the k-th eigenvector of
  // rho as returned by the eigensolver.
  std::vector<int> permutation;
};

/// sum_m (E_m - E_0) rho_mm with `levels` ascending.
double stored_energy(const CMatrix& rho, std::span<const double> levels);
/// Same, in units of E_f.
double stored_energy(const DensityMatrix& rho, const Spectrum& spectrum);

/// Ergotropy by sorted rearrangement: the passive state places the largest
/// population on the lowest level. Energies are in the units of `levels`.
ErgotropyResult ergotropy(const CMatrix& rho, std::span<const double> levels);
/// Ground-referenced, in units of E_f.
ErgotropyResult ergotropy(const DensityMatrix& rho, const Spectrum& spectrum);

/// diag(populations) in the energy eigenbasis.
DensityMatrix passive_state(const ErgotropyResult& r);

/// Ergotropy over energy in the chosen reference. Empty when that energy is
/// not above 1e-12 E_f (the ground state; undefined efficiency). The absolute
/// reference returns the literal, typically negative, ratio.
std::optional<double> efficiency(const DensityMatrix& rho, const Spectrum& spectrum,
                                 EnergyReference reference = EnergyReference::ground);
/// The ratio rule above applied to precomputed values (any consistent units).
std::optional<double> efficiency_ratio(double ergotropy, double energy, EnergyReference reference);

}  // namespace tqb
