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

#include "catch_amalgamated.hpp"

#include "tqb/analysis.hpp"
#include "tqb/collision.hpp"
#include "tqb/errors.hpp"
#include "tqb/observables.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace tqb;

namespace {

CMatrix random_density(Index n, std::mt19937_64& rng, int rank = -1) {
  std::normal_distribution<double> nd;
  const Index k = rank > 0 ? rank : n;
  CMatrix a(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < k; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

std::vector<double> random_levels(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<double> e(static_cast<std::size_t>(n));
  for (auto& x : e) x = u(rng);
  std::sort(e.begin(), e.end());
  return e;
}

// min over permutations pi of sum_j p_j E_pi(j), p the eigenvalues of rho.
double brute_passive_energy(const CMatrix& rho, const std::vector<double>& levels) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  const RVector p = es.eigenvalues();
  std::vector<int> perm(levels.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double e = 0.0;
    for (std::size_t j = 0; j < perm.size(); ++j) e += p(static_cast<Index>(j)) * levels[perm[j]];
    best = std::min(best, e);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double energy_of(const CMatrix& rho, const std::vector<double>& levels) {
  double e = 0.0;
  for (std::size_t m = 0; m < levels.size(); ++m) e += levels[m] * rho(static_cast<Index>(m), static_cast<Index>(m)).real();
  return e;
}

CMatrix diag(std::initializer_list<double> p) {
  CMatrix m = CMatrix::Zero(static_cast<Index>(p.size()), static_cast<Index>(p.size()));
  Index i = 0;
  for (double x : p) m(i, i) = x, ++i;
  return m;
}

}  // namespace

TEST_CASE("stored energy on basis states") {
  const Spectrum s = solve_spectrum(TransmonSpec{});
  const Index d = s.dim();
  CHECK(stored_energy(DensityMatrix::basis_state(d, 0), s) == 0.0);
  CHECK(stored_energy(DensityMatrix::basis_state(d, 1), s) * s.e_f ==
        Catch::Approx(s.levels(1) - s.levels(0)));
  CMatrix mix = CMatrix::Zero(d, d);
  mix(0, 0) = mix(d - 1, d - 1) = 0.5;
  CHECK(stored_energy(DensityMatrix(mix), s) * s.e_f == Catch::Approx(0.5 * (s.levels(d - 1) - s.levels(0))));
}

TEST_CASE("ergotropy of small examples") {
  const std::vector<double> e{0.0, 1.0};
  CHECK(ergotropy(diag({0.3, 0.7}), e).ergotropy == Catch::Approx(0.4));
  CHECK(ergotropy(diag({0.7, 0.3}), e).ergotropy == 0.0);
  const ErgotropyResult r = ergotropy(diag({0.3, 0.7}), e);
  CHECK(r.populations(0) == Catch::Approx(0.7));
  CHECK(r.energy == Catch::Approx(0.7));
  CHECK(r.passive_energy == Catch::Approx(0.3));
  CHECK_THROWS_AS(ergotropy(diag({0.5, 0.5}), std::vector<double>{1.0, 0.0}), RangeError);
  CHECK_THROWS_AS(ergotropy(diag({0.5, 0.5}), std::vector<double>{0.0, 1.0, 2.0}), ShapeError);
}

TEST_CASE("ergotropy matches the exhaustive permutation minimum") {
  std::mt19937_64 rng(21);
  for (Index d = 2; d <= 5; ++d) {
    for (int trial = 0; trial < 25; ++trial) {
      const CMatrix rho = random_density(d, rng, trial % 2 ? 1 : -1);
      const auto levels = random_levels(d, rng);
      const ErgotropyResult r = ergotropy(rho, levels);
      const double expected = energy_of(rho, levels) - brute_passive_energy(rho, levels);
      CHECK(std::abs(r.ergotropy - std::max(expected, 0.0)) <= 1e-10);
      CHECK(r.ergotropy <= r.energy - levels.front() + 1e-12);
    }
  }
}

TEST_CASE("passive states carry no ergotropy") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix rho = random_density(5, rng);
    const auto levels = random_levels(5, rng);
    const ErgotropyResult r = ergotropy(rho, levels);
    const DensityMatrix passive = passive_state(r);
    for (Index j = 1; j < 5; ++j) CHECK(passive.matrix()(j, j).real() <= passive.matrix()(j - 1, j - 1).real());
    CHECK(ergotropy(passive.matrix(), levels).ergotropy <= 1e-10);
    CHECK(r.passive_energy == Catch::Approx(energy_of(passive.matrix(), levels)).margin(1e-12));
  }
}

TEST_CASE("ergotropy is invariant under the free rotation") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix rho = random_density(5, rng);
    const auto levels = random_levels(5, rng);
    const double t = 0.37 * (trial + 1);
    CVector phase(5);
    for (Index m = 0; m < 5; ++m) phase(m) = std::polar(1.0, -levels[static_cast<std::size_t>(m)] * t);
    const CMatrix rotated = phase.asDiagonal() * rho * phase.conjugate().asDiagonal();
    CHECK(std::abs(ergotropy(rotated, levels).ergotropy - ergotropy(rho, levels).ergotropy) <= 1e-9);
  }
}

TEST_CASE("efficiency bounds and limits") {
  const Spectrum s = solve_spectrum(TransmonSpec{});
  const Index d = s.dim();
  CHECK(*efficiency(DensityMatrix::basis_state(d, 3), s) == Catch::Approx(1.0));
  CHECK_FALSE(efficiency(DensityMatrix::basis_state(d, 0), s).has_value());
  CMatrix mix = CMatrix::Zero(d, d);
  mix(0, 0) = mix(1, 1) = 0.5;
  CHECK(*efficiency(DensityMatrix(mix), s) == Catch::Approx(0.0).margin(1e-12));

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho(random_density(d, rng));
    for (auto ref : {EnergyReference::ground, EnergyReference::well_bottom}) {
      const auto eta = efficiency(rho, s, ref);
      REQUIRE(eta.has_value());
      CHECK(*eta >= 0.0);
      CHECK(*eta <= 1.0 + 1e-12);
    }
  }
  CHECK(energy_reference_from_string("well_bottom") == EnergyReference::well_bottom);
  CHECK_THROWS_AS(energy_reference_from_string("top"), RangeError);
}

TEST_CASE("efficiency at the first maximum of coherent charging") {
  ProtocolConfig cfg;
  cfg.n_collisions = 1200;
  cfg.energy_reference = EnergyReference::well_bottom;
  const Trajectory t = run_protocol(cfg);
  CHECK(t.points.front().efficiency.value_or(0.0) == 0.0);
  const std::size_t k = first_maximum_index(Series::stored_energy(t));
  REQUIRE(t.points[k].efficiency.has_value());
  CHECK(*t.points[k].efficiency == Catch::Approx(0.9).margin(0.05));

  // Measured from E_0 the same state is almost entirely extractable.
  cfg.energy_reference = EnergyReference::ground;
  const Trajectory g = run_protocol(cfg);
  CHECK_FALSE(g.points.front().efficiency.has_value());
  CHECK(*g.points[k].efficiency > 0.99);
}
