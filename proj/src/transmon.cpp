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

#include "tqb/transmon.hpp"

#include "tqb/csv.hpp"
#include "tqb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace tqb {

namespace {

std::string str(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

RVector ascending_levels(const TransmonSpec& spec) {
  const HermitianOperator h = build_charge_hamiltonian(spec);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h.matrix().real(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Real eigensystem of the charge Hamiltonian, vectors under the qcore phase
// convention. At ng = 0 the even and odd sectors of N -> -N are solved
// separately so near-degenerate pairs above the well keep exact parity.
struct RealEigen {
  RVector values;
  RMatrix vectors;
};

void fix_sign(Eigen::Ref<RVector> v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= vmax * (1.0 - 1e-8)) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

RealEigen charge_eigensystem(const TransmonSpec& spec) {
  const Index dim = spec.charge_dim();
  const Index nc = spec.charge_cutoff;
  RealEigen out;
  if (spec.ng != 0.0) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(build_charge_hamiltonian(spec).matrix().real());
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  } else {
    spec.validate();
    const double t = -0.5 * spec.ej_over_ec;
    const double r2 = std::sqrt(0.5);
    // Even sector: |0>, (|k> + |-k>)/sqrt2; odd sector: (|k> - |-k>)/sqrt2.
    RMatrix he = RMatrix::Zero(nc + 1, nc + 1);
    RMatrix ho = RMatrix::Zero(nc, nc);
    for (Index k = 0; k <= nc; ++k) he(k, k) = 4.0 * static_cast<double>(k * k);
    for (Index k = 0; k < nc; ++k) {
      const double hop = k == 0 ? t * std::sqrt(2.0) : t;
      he(k, k + 1) = he(k + 1, k) = hop;
      ho(k, k) = 4.0 * static_cast<double>((k + 1) * (k + 1));
      if (k + 1 < nc) ho(k, k + 1) = ho(k + 1, k) = t;
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> ee(he), eo(ho);
    std::vector<std::pair<double, RVector>> all;
    all.reserve(dim);
    for (Index j = 0; j <= nc; ++j) {
      RVector v = RVector::Zero(dim);
      v(nc) = ee.eigenvectors()(0, j);
      for (Index k = 1; k <= nc; ++k) v(nc + k) = v(nc - k) = r2 * ee.eigenvectors()(k, j);
      all.emplace_back(ee.eigenvalues()(j), std::move(v));
    }
    for (Index j = 0; j < nc; ++j) {
      RVector v = RVector::Zero(dim);
      for (Index k = 1; k <= nc; ++k) {
        v(nc + k) = r2 * eo.eigenvectors()(k - 1, j);
        v(nc - k) = -v(nc + k);
      }
      all.emplace_back(eo.eigenvalues()(j), std::move(v));
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    out.values.resize(dim);
    out.vectors.resize(dim, dim);
    for (Index j = 0; j < dim; ++j) {
      out.values(j) = all[j].first;
      out.vectors.col(j) = all[j].second;
    }
  }
  for (Index j = 0; j < dim; ++j) fix_sign(out.vectors.col(j));
  return out;
}

}  // namespace

// TransmonSpec ---------------------------------------------------------------

int TransmonSpec::minimum_cutoff(double ej_over_ec) {
  return static_cast<int>(std::ceil(3.0 * std::sqrt(ej_over_ec)));
}

void TransmonSpec::validate() const {
  if (!(ej_over_ec > 0.0) || !std::isfinite(ej_over_ec)) {
    throw RangeError("ej_over_ec must be positive, got " + str(ej_over_ec));
  }
  if (!std::isfinite(ng)) throw RangeError("ng must be finite");
  if (charge_cutoff <= 0) throw RangeError("charge_cutoff must be positive");
  if (battery_levels <= 0) throw RangeError("battery_levels must be positive");
  if (charge_cutoff < minimum_cutoff(ej_over_ec)) {
    throw RangeError("charge_cutoff " + std::to_string(charge_cutoff) + " below the guard " +
                     std::to_string(minimum_cutoff(ej_over_ec)) + " for ej_over_ec = " +
                     str(ej_over_ec));
  }
  if (battery_levels > 2 * charge_cutoff + 1) {
    throw RangeError("battery_levels exceeds the charge-basis dimension");
  }
}

double TransmonSpec::plasma_frequency() const { return std::sqrt(8.0 * ej_over_ec); }

// Spectrum -------------------------------------------------------------------

RVector Spectrum::shifted_levels() const {
  return levels.array() - levels(0);
}

HermitianOperator build_charge_hamiltonian(const TransmonSpec& spec) {
  spec.validate();
  const Index dim = spec.charge_dim();
  RMatrix h = RMatrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    const double n = static_cast<double>(i - spec.charge_cutoff) - spec.ng;
    h(i, i) = 4.0 * n * n;
    if (i + 1 < dim) {
      h(i, i + 1) = -0.5 * spec.ej_over_ec;
      h(i + 1, i) = -0.5 * spec.ej_over_ec;
    }
  }
  return HermitianOperator::from_real(h);
}

Spectrum solve_spectrum(const TransmonSpec& spec, bool require_convergence) {
  spec.validate();
  const RealEigen eig = charge_eigensystem(spec);
  const Index d = spec.battery_levels;

  Spectrum s;
  s.spec = spec;
  s.all_levels = eig.values;
  s.levels = eig.values.head(d);
  s.eigenvectors = eig.vectors.leftCols(d);
  s.well_top = spec.ej_over_ec;
  s.e_f = spec.ej_over_ec - s.levels(0);
  s.bound_count = static_cast<int>(
      std::count_if(s.all_levels.begin(), s.all_levels.end(), [&](double e) { return e < s.well_top; }));

  RVector charges(spec.charge_dim());
  for (Index i = 0; i < charges.size(); ++i) charges(i) = static_cast<double>(i - spec.charge_cutoff);
  const RMatrix n_eig = s.eigenvectors.transpose() * charges.asDiagonal() * s.eigenvectors;
  s.charge_matrix = (0.5 * (n_eig + n_eig.transpose())).cast<Complex>();

  for (Index m = 0; m + 1 < d; ++m) {
    const double scale = std::max(1.0, std::abs(s.levels(m)));
    if (std::abs(s.levels(m + 1) - s.levels(m)) <= 1e-9 * scale) ++s.degenerate_pairs;
  }

  TransmonSpec wider = spec;
  wider.charge_cutoff += kConvergenceCutoffStep;
  const RVector ref = ascending_levels(wider);
  double shift = 0.0;
  for (Index m = 0; m < d; ++m) {
    const double scale = std::max(1.0, std::abs(s.levels(m)));
    shift = std::max(shift, std::abs(ref(m) - s.levels(m)) / scale);
  }
  s.convergence_shift = shift;
  s.converged = shift <= kConvergenceTolerance;
  if (!s.converged && require_convergence) {
    throw ConvergenceError("spectrum not converged at charge_cutoff = " +
                           std::to_string(spec.charge_cutoff) + " (relative level shift " +
                           str(shift) + " > 1e-8); raise charge_cutoff");
  }
  return s;
}

double perturbative_level(const TransmonSpec& spec, int m) {
  if (m < 0) throw RangeError("level index must be non-negative");
  const double wp = spec.plasma_frequency();
  const double md = m;
  return -spec.ej_over_ec + wp * (md + 0.5) - 0.25 * (2.0 * md * md + 2.0 * md + 1.0);
}

double relative_anharmonicity(const Spectrum& spectrum, int m) {
  if (m < 0 || m + 2 >= spectrum.dim()) {
    throw RangeError("relative_anharmonicity needs levels m..m+2 inside the retained window");
  }
  const auto& e = spectrum.levels;
  const double d0 = e(1) - e(0);
  const double dm = e(m + 1) - e(m);
  const double dm1 = e(m + 2) - e(m + 1);
  return std::abs(dm1 - dm) / d0;
}

double relative_anharmonicity(const TransmonSpec& spec, int m, AnharmonicityMode mode) {
  if (mode == AnharmonicityMode::approximate) return std::sqrt(1.0 / (8.0 * spec.ej_over_ec));
  if (m < 0 || m + 2 >= spec.battery_levels) {
    throw RangeError("relative_anharmonicity needs levels m..m+2 inside the retained window");
  }
  return relative_anharmonicity(solve_spectrum(spec), m);
}

double bound_state_estimate(const TransmonSpec& spec) { return std::sqrt(spec.ej_over_ec); }

Complex charge_matrix_element(const Spectrum& spectrum, int m, int mp) {
  if (m < 0 || mp < 0 || m >= spectrum.dim() || mp >= spectrum.dim()) {
    throw RangeError("charge matrix index outside the retained levels");
  }
  return spectrum.charge_matrix(m, mp);
}

std::vector<DispersionRow> charge_dispersion(TransmonSpec spec, const std::vector<double>& ng_values,
                                             int n_levels) {
  std::vector<DispersionRow> rows;
  rows.reserve(ng_values.size());
  for (double ng : ng_values) {
    spec.ng = ng;
    const RVector e = ascending_levels(spec);
    DispersionRow r{ng, {}};
    for (int k = 0; k < n_levels && k < e.size(); ++k) r.levels.push_back(e(k) / spec.ej_over_ec);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "m,E_m_over_EJ,E_m_over_EC,bound_flag\n";
  for (Index m = 0; m < s.dim(); ++m) {
    os << m << ',' << csv::number(s.levels(m) / s.spec.ej_over_ec) << ','
       << csv::number(s.levels(m)) << ',' << (s.is_bound(m) ? 1 : 0) << '\n';
  }
}

void write_dispersion_csv(std::ostream& os, const std::vector<DispersionRow>& rows) {
  os << "ng";
  const std::size_t k = rows.empty() ? 0 : rows.front().levels.size();
  for (std::size_t i = 0; i < k; ++i) os << ",E" << i << "_over_EJ";
  os << '\n';
  for (const auto& r : rows) {
    os << csv::number(r.ng);
    for (double e : r.levels) os << ',' << csv::number(e);
    os << '\n';
  }
}

}  // namespace tqb
