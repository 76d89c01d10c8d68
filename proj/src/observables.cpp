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

#include "tqb/observables.hpp"

#include "tqb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tqb {

namespace {

void require_levels(const CMatrix& rho, std::span<const double> levels) {
  if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != levels.size()) {
    throw ShapeError("state dimension does not match the number of levels");
  }
}

std::span<const double> as_span(const RVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

const char* to_string(EnergyReference r) {
  switch (r) {
    case EnergyReference::ground: return "ground";
    case EnergyReference::well_bottom: return "well_bottom";
    case EnergyReference::absolute: return "absolute";
  }
  return "ground";
}

EnergyReference energy_reference_from_string(const std::string& s) {
  if (s == "ground") return EnergyReference::ground;
  if (s == "well_bottom") return EnergyReference::well_bottom;
  if (s == "absolute") return EnergyReference::absolute;
  throw RangeError("unknown energy reference '" + s + "'");
}

double energy_offset(const Spectrum& spectrum, EnergyReference r) {
  switch (r) {
    case EnergyReference::ground: return 0.0;
    case EnergyReference::well_bottom: return spectrum.ground_energy() + spectrum.spec.ej_over_ec;
    case EnergyReference::absolute: return spectrum.ground_energy();
  }
  return 0.0;
}

double stored_energy(const CMatrix& rho, std::span<const double> levels) {
  require_levels(rho, levels);
  double e = 0.0;
  for (std::size_t m = 0; m < levels.size(); ++m) {
    e += (levels[m] - levels[0]) * rho(static_cast<Index>(m), static_cast<Index>(m)).real();
  }
  return e;
}

double stored_energy(const DensityMatrix& rho, const Spectrum& spectrum) {
  return stored_energy(rho.matrix(), as_span(spectrum.levels)) / spectrum.e_f;
}

ErgotropyResult ergotropy(const CMatrix& rho, std::span<const double> levels) {
  require_levels(rho, levels);
  if (!std::is_sorted(levels.begin(), levels.end())) {
    throw RangeError("levels must be ascending");
  }
  const Index d = rho.rows();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();  // ascending
  if (!ev.allFinite()) throw ValidationError("non-finite eigenvalues in ergotropy");

  // Descending populations; ties keep the solver's index order.
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ev(a) > ev(b); });

  ErgotropyResult r;
  r.populations.resize(d);
  r.permutation.assign(static_cast<std::size_t>(d), 0);
  for (Index j = 0; j < d; ++j) {
    const int k = order[static_cast<std::size_t>(j)];
    r.populations(j) = ev(k);
    r.permutation[static_cast<std::size_t>(k)] = static_cast<int>(j);
    r.passive_energy += ev(k) * levels[static_cast<std::size_t>(j)];
  }
  for (Index m = 0; m < d; ++m) r.energy += levels[static_cast<std::size_t>(m)] * rho(m, m).real();

  const double raw = r.energy - r.passive_energy;
  const double scale = std::max(1.0, std::abs(levels.back()) + std::abs(levels.front()));
  if (raw < -1e-10 * scale) {
    throw ValidationError("negative ergotropy " + std::to_string(raw) + "; state is not valid");
  }
  r.ergotropy = std::max(raw, 0.0);
  return r;
}

ErgotropyResult ergotropy(const DensityMatrix& rho, const Spectrum& spectrum) {
  const RVector shifted = spectrum.shifted_levels() / spectrum.e_f;
  return ergotropy(rho.matrix(), as_span(shifted));
}

DensityMatrix passive_state(const ErgotropyResult& r) {
  return DensityMatrix::unchecked(r.populations.cast<Complex>().asDiagonal());
}

std::optional<double> efficiency(const DensityMatrix& rho, const Spectrum& spectrum,
                                 EnergyReference reference) {
  const ErgotropyResult e = ergotropy(rho, spectrum);
  const double energy = e.energy + energy_offset(spectrum, reference) / spectrum.e_f;
  return efficiency_ratio(e.ergotropy, energy, reference);
}

std::optional<double> efficiency_ratio(double ergotropy, double energy, EnergyReference reference) {
  // The raw Hamiltonian zero gives a negative denominator; report the literal ratio.
  if (reference == EnergyReference::absolute) {
    if (!(std::abs(energy) > 1e-12)) return std::nullopt;
    return ergotropy / energy;
  }
  if (!(energy > 1e-12)) return std::nullopt;
  return ergotropy / energy;
}

}  // namespace tqb
