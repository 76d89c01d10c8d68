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
#include "tqb/errors.hpp"
#include "tqb/optimize.hpp"

#include <random>

using namespace tqb;

namespace {

Series damped_cosine(double omega, double gamma, long n, double a = 0.5, double b = 0.5) {
  Series s;
  for (long i = 0; i <= n; ++i) {
    s.n.push_back(static_cast<double>(i));
    s.y.push_back(a - b * std::exp(-gamma * i) * std::cos(omega * i));
  }
  return s;
}

Series saturation(double f, double gamma, long n) {
  Series s;
  for (long i = 0; i <= n; ++i) {
    s.n.push_back(static_cast<double>(i));
    s.y.push_back(f * (1.0 - std::exp(-gamma * i)));
  }
  return s;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

ProtocolConfig coherent(double g, double q, long n) {
  ProtocolConfig cfg;
  cfg.coupling_g = g;
  cfg.q = q;
  cfg.n_collisions = n;
  return cfg;
}

}  // namespace

TEST_CASE("optimizers on textbook problems") {
  SECTION("simplex on the Rosenbrock valley") {
    auto f = [](const RVector& x) { return std::pow(1 - x(0), 2) + 100 * std::pow(x(1) - x(0) * x(0), 2); };
    const auto r = opt::nelder_mead(f, RVector{{-1.2, 1.0}}, RVector{{0.1, 0.1}});
    CHECK(r.x(0) == Catch::Approx(1.0).epsilon(1e-4));
    CHECK(r.x(1) == Catch::Approx(1.0).epsilon(1e-4));
  }
  SECTION("linear least squares recovers a plane and reports rank deficiency") {
    RMatrix x(5, 2);
    RVector y(5);
    for (int i = 0; i < 5; ++i) {
      x(i, 0) = 1.0;
      x(i, 1) = i;
      y(i) = 2.0 + 3.0 * i;
    }
    const auto lf = opt::linear_least_squares(x, y);
    CHECK(lf.coefficients(0) == Catch::Approx(2.0));
    CHECK(lf.coefficients(1) == Catch::Approx(3.0));
    x.col(1).setConstant(1.0);
    CHECK_THROWS_AS(opt::linear_least_squares(x, y), RankDeficiencyError);
  }
}

TEST_CASE("shape detection") {
  const Series osc = damped_cosine(0.01, 1e-4, 3000);
  const auto ext = find_extrema(osc);
  REQUIRE(ext.size() >= 2);
  CHECK(ext[0].maximum);
  CHECK(std::abs(osc.n[ext[0].index] - M_PI / 0.01) < 30.0);
  CHECK(classify_shape(osc) == Shape::oscillatory);
  CHECK(std::abs(osc.n[first_maximum_index(osc)] - M_PI / 0.01) < 30.0);
  CHECK(classify_shape(saturation(0.6, 1e-3, 3000)) == Shape::saturating);

  std::vector<double> y(200, 1.0);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (i % 2) ? 1.0 : 0.0;
  const std::vector<double> sm = smooth(y);
  for (std::size_t i = 30; i + 30 < sm.size(); ++i) CHECK(std::abs(sm[i] - 0.5) < 0.02);
}

TEST_CASE("damped cosine recovers exact model data") {
  const Series s = damped_cosine(0.01, 1e-4, 3000);
  const DampedCosineFit f = fit_damped_cosine(s);
  CHECK(f.converged);
  CHECK(rel(f.omega, 0.01) <= 1e-6);
  CHECK(rel(f.gamma, 1e-4) <= 1e-6);
  CHECK(f.residual_rms < 1e-9);

  const DampedCosineFit ff = fit_damped_cosine(damped_cosine(0.01, 1e-4, 3000, 0.47, 0.44), {}, true);
  CHECK(ff.converged);
  CHECK(rel(ff.omega, 0.01) <= 1e-6);
  CHECK(rel(ff.amplitude_scale, 0.47) <= 1e-6);
  CHECK(rel(ff.oscillation_amplitude, 0.44) <= 1e-6);
}

TEST_CASE("fits recover 100 random parameter draws") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> lom(std::log(2e-3), std::log(2e-2));
  std::uniform_real_distribution<double> lga(std::log(1e-5), std::log(5e-4));
  int bad = 0;
  for (int k = 0; k < 100; ++k) {
    const double om = std::exp(lom(rng)), ga = std::exp(lga(rng));
    const long n = static_cast<long>(2.2 * 2 * M_PI / om);
    const DampedCosineFit f = fit_damped_cosine(damped_cosine(om, ga, n));
    if (!(f.converged && rel(f.omega, om) <= 1e-6 && rel(f.gamma, ga) <= 1e-6)) ++bad;
  }
  CHECK(bad == 0);

  std::uniform_real_distribution<double> uf(0.2, 0.9);
  std::uniform_real_distribution<double> lsat(std::log(2e-4), std::log(5e-3));
  bad = 0;
  for (int k = 0; k < 100; ++k) {
    const double f0 = uf(rng), g0 = std::exp(lsat(rng));
    const SaturationFit f = fit_saturation(saturation(f0, g0, static_cast<long>(6.0 / g0)));
    if (!(f.converged && rel(f.f, f0) <= 1e-6 && rel(f.gamma, g0) <= 1e-6)) ++bad;
  }
  CHECK(bad == 0);

  std::uniform_real_distribution<double> ustar(1.0, 3.0), ua(0.8, 1.2), ub(0.3, 0.7);
  for (int k = 0; k < 100; ++k) {
    const double os = ustar(rng), a = ua(rng), b = ub(rng);
    std::vector<ScalingPoint> pts;
    for (double g : {3e-3, 6e-3, 1e-2, 3e-2})
      for (double q : {0.05, 0.2, 0.35, 0.5}) pts.push_back({g, q, os * std::pow(g, a) * std::pow(q * (1 - q), b)});
    const ScalingFit sf = fit_frequency_scaling(pts);
    CHECK(rel(sf.at("omega_star"), os) <= 1e-6);
    CHECK(rel(sf.at("alpha"), a) <= 1e-6);
    CHECK(rel(sf.at("beta"), b) <= 1e-6);
  }
}

TEST_CASE("saturation recovers exact model data") {
  const SaturationFit f = fit_saturation(saturation(0.55, 1.3e-3, 5000));
  CHECK(f.converged);
  CHECK(rel(f.f, 0.55) <= 1e-8);
  CHECK(rel(f.gamma, 1.3e-3) <= 1e-8);
}

TEST_CASE("shape mismatch is reported") {
  CHECK_THROWS_AS(fit_damped_cosine(saturation(0.5, 1e-3, 4000)), ShapeMismatchError);
  CHECK_THROWS_AS(fit_saturation(damped_cosine(0.01, 1e-4, 3000)), ShapeMismatchError);
}

TEST_CASE("frequency law") {
  std::vector<ScalingPoint> pts;
  for (double g : {4e-3, 8e-3, 1e-2})
    for (double q : {0.05, 0.25, 0.5}) pts.push_back({g, q, 1.7 * g * std::sqrt(q * (1 - q))});
  const ScalingFit f = fit_frequency_scaling(pts);
  CHECK(std::abs(f.at("alpha") - 1.0) <= 1e-10);
  CHECK(std::abs(f.at("beta") - 0.5) <= 1e-10);
  CHECK(std::abs(f.at("omega_star") - 1.7) <= 1e-10);
  CHECK(f.covariance.rows() == 3);
  CHECK(std::isfinite(f.covariance.sum()));

  std::vector<ScalingPoint> one_g;
  for (double q : {0.05, 0.1, 0.25, 0.3, 0.4, 0.5}) one_g.push_back({4e-3, q, 1.7 * 4e-3 * std::sqrt(q * (1 - q))});
  CHECK_THROWS_AS(fit_frequency_scaling(one_g), RankDeficiencyError);
  CHECK_THROWS_AS(fit_frequency_scaling({pts.begin(), pts.begin() + 4}), ValidationError);
}

TEST_CASE("damping law") {
  const double gs = 1.32, delta = 1.84, offset = 0.070, beta = 2.0;
  std::vector<ScalingPoint> pts;
  for (double g : {5e-3, 1e-2, 5e-2})
    for (double q : {0.05, 0.15, 0.25, 0.35, 0.5})
      pts.push_back({g, q, gs * std::pow(g, beta) * (std::pow(std::abs(q - 0.5), delta) + offset)});
  const ScalingFit shape = fit_damping_shape({pts.begin(), pts.begin() + 5});
  CHECK(rel(shape.at("gamma_star"), gs) <= 1e-8);
  CHECK(rel(shape.at("delta"), delta) <= 1e-8);
  CHECK(rel(shape.at("offset"), offset) <= 1e-8);

  const DampingScalingFit all = fit_damping_scaling(pts);
  CHECK(all.coupling_exponent_by_q.size() == 5);
  CHECK(std::abs(all.coupling_exponent - beta) <= 1e-8);
  CHECK(all.shape_by_g.size() == 3);
  for (const auto& [g, f] : all.shape_by_g) CHECK(rel(f.at("delta"), delta) <= 1e-8);

  CHECK_THROWS_AS(fit_damping_shape({{5e-3, 0.5, 1e-5}, {5e-3, 0.5, 1e-5}, {5e-3, 0.25, 2e-5}}),
                  RankDeficiencyError);
}

TEST_CASE("incoherent laws") {
  std::vector<ScalingPoint> f_pts;
  for (double q : {0.05, 0.25, 0.5, 0.75}) f_pts.push_back({5e-2, q, 0.21 * (1 - q) + 0.43});
  const ScalingFit lvl = fit_saturation_level(f_pts);
  CHECK(std::abs(lvl.at("a") - 0.21) <= 1e-10);
  CHECK(std::abs(lvl.at("b") - 0.43) <= 1e-10);

  std::vector<ScalingPoint> g_pts;
  for (double g : {1e-2, 2e-2, 5e-2}) g_pts.push_back({g, 0.25, 0.8 * g * g});
  const ScalingFit gam = fit_gamma_scaling(g_pts);
  CHECK(std::abs(gam.at("beta") - 2.0) <= 1e-10);
  CHECK(rel(gam.at("gamma_star"), 0.8) <= 1e-10);
  CHECK_THROWS_AS(fit_gamma_scaling({g_pts[0]}), RankDeficiencyError);
}

TEST_CASE("fits of simulated coherent trajectories") {
  const std::vector<double> gs{4e-3, 8e-3, 1e-2};
  const std::vector<double> qs{0.05, 0.25, 0.5};
  std::vector<Series> runs;
  for (double g : gs)
    for (double q : qs) runs.push_back(Series::stored_energy(run_protocol(coherent(g, q, 6000))));

  for (const auto& s : runs) CHECK(classify_shape(s) == Shape::oscillatory);

  auto fit_grid = [&](double start_fraction) {
    std::vector<ScalingPoint> pts;
    std::size_t k = 0;
    for (double g : gs) {
      for (double q : qs) {
        Window w = frequency_window(runs[k]);
        const double len = w.last - w.first;
        w.first += start_fraction * len;
        w.last += start_fraction * len;
        const DampedCosineFit f = fit_damped_cosine(runs[k], w);
        CHECK(f.converged);
        pts.push_back({g, q, f.omega});
        ++k;
      }
    }
    return pts;
  };
  const auto base_pts = fit_grid(0.1);
  const ScalingFit base = fit_frequency_scaling(base_pts);
  // Doubling g at fixed q doubles the frequency.
  CHECK(base_pts[3].value / base_pts[0].value == Catch::Approx(2.0).margin(0.1));
  CHECK(base_pts[5].value / base_pts[2].value == Catch::Approx(2.0).margin(0.1));
  for (double shift : {0.0, 0.2}) {
    const ScalingFit moved = fit_frequency_scaling(fit_grid(shift));
    CHECK(std::abs(moved.at("alpha") - base.at("alpha")) <= 0.05);
    CHECK(std::abs(moved.at("beta") - base.at("beta")) <= 0.05);
  }
}

TEST_CASE("incoherent trajectories are classified as saturating") {
  for (double g : {1e-2, 5e-2}) {
    ProtocolConfig cfg = coherent(g, 0.25, 3000);
    cfg.c = 0.0;
    const Series s = Series::stored_energy(run_protocol(cfg));
    CHECK(classify_shape(s) == Shape::saturating);
    CHECK_THROWS_AS(fit_damped_cosine(s), ShapeMismatchError);
  }
}

TEST_CASE("feasibility coupling") {
  const double n10 = 0.4 * 5.0 / std::sqrt(2.0);
  CHECK(feasibility_coupling(1.0, 100.0, 50.0, n10) == Catch::Approx(4e-3));
  CHECK(feasibility_coupling(0.0, 100.0, 50.0, n10) == 0.0);
  CHECK_THROWS_AS(feasibility_coupling(1.0, 0.0, 50.0, n10), RangeError);

  const Spectrum s = solve_spectrum(TransmonSpec{});
  const double prefactor = std::sqrt(2.0) * std::abs(s.charge_matrix(1, 0)) / 5.0;
  CHECK(prefactor == Catch::Approx(0.4).epsilon(0.1));

  // With E_C = e^2 / 2 C_B and E_J = 100 E_C the explicit form reduces to the
  // ratio form.
  const double c_b = 80.0;
  const double ec = charging_energy(c_b);
  CHECK(feasibility_coupling(0.8, 80.0, c_b, 1.3, 100.0 * ec, ec) ==
        Catch::Approx(feasibility_coupling(0.8, 80.0, c_b, 1.3)).epsilon(1e-12));
}
