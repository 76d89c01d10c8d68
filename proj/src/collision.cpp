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

#include "tqb/collision.hpp"

#include "tqb/csv.hpp"
#include "tqb/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace tqb {

namespace {

constexpr Index kAncillaDim = 2;

std::string str(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

bool same_transmon(const TransmonSpec& a, const TransmonSpec& b) {
  return a.ej_over_ec == b.ej_over_ec && a.ng == b.ng && a.charge_cutoff == b.charge_cutoff &&
         a.battery_levels == b.battery_levels;
}

}  // namespace

// Ancilla --------------------------------------------------------------------

void AncillaSpec::validate() const {
  if (!(q >= 0.0 && q <= 1.0)) throw RangeError("ancilla q must lie in [0, 1], got " + str(q));
  if (!(c >= 0.0 && c <= 1.0)) throw RangeError("ancilla c must lie in [0, 1], got " + str(c));
  if (!std::isfinite(delta)) throw RangeError("ancilla delta must be finite");
}

AncillaSpec AncillaSpec::resonant(const Spectrum& spectrum, double q, double c) {
  if (spectrum.dim() < 2) throw RangeError("resonant ancilla needs at least two battery levels");
  return AncillaSpec{spectrum.levels(1) - spectrum.levels(0), q, c};
}

const char* to_string(Frame f) { return f == Frame::interaction ? "interaction" : "schrodinger"; }

Frame frame_from_string(const std::string& s) {
  if (s == "interaction") return Frame::interaction;
  if (s == "schrodinger") return Frame::schrodinger;
  throw RangeError("unknown frame '" + s + "'");
}

DensityMatrix ancilla_state(const AncillaSpec& spec) {
  spec.validate();
  const double coh = spec.c * std::sqrt(spec.q * (1.0 - spec.q));
  CMatrix eta(2, 2);
  eta << 1.0 - spec.q, coh, coh, spec.q;
  return DensityMatrix(std::move(eta));
}

// Hamiltonians ---------------------------------------------------------------

HermitianOperator free_hamiltonian(const Spectrum& spectrum, const AncillaSpec& ancilla) {
  const RVector e = spectrum.shifted_levels();
  const Index d = e.size();
  CMatrix h = CMatrix::Zero(d * kAncillaDim, d * kAncillaDim);
  for (Index b = 0; b < d; ++b) {
    h(b * 2, b * 2) = e(b) + 0.5 * ancilla.delta;      // ancilla |1>
    h(b * 2 + 1, b * 2 + 1) = e(b) - 0.5 * ancilla.delta;  // ancilla |0>
  }
  return HermitianOperator(std::move(h));
}

HermitianOperator total_hamiltonian(const Spectrum& spectrum, const AncillaSpec& ancilla,
                                    PlasmaCoupling g) {
  if (!(g.g_over_wp >= 0.0) || !std::isfinite(g.g_over_wp)) {
    throw RangeError("coupling g/omega_p must be non-negative");
  }
  if (g.g_over_wp >= 1.0) {
    throw RangeError("coupling g/omega_p = " + str(g.g_over_wp) +
                     " >= 1; expected units of omega_p, not E_C");
  }
  CMatrix h = free_hamiltonian(spectrum, ancilla).matrix();
  const double g_ec = g.g_over_wp * spectrum.spec.plasma_frequency();
  CMatrix sigma_x(2, 2);
  sigma_x << 0.0, 1.0, 1.0, 0.0;
  h += g_ec * tensor(spectrum.charge_matrix, sigma_x);
  return HermitianOperator(std::move(h));
}

UnitaryPropagator collision_propagator(const Spectrum& spectrum, const AncillaSpec& ancilla,
                                       PlasmaCoupling g, double tau, Frame frame,
                                       PropagatorCache* cache) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw RangeError("collision duration must be positive");
  const HermitianOperator h = total_hamiltonian(spectrum, ancilla, g);
  const double t = tau * spectrum.spec.plasma_time();
  const std::uint64_t key = generator_hash(h.matrix(), t, frame == Frame::interaction ? 1 : 2);

  auto build = [&](const EigenSystem& eig) {
    UnitaryPropagator u = expm_hermitian_generator(eig, t, key);
    if (frame == Frame::schrodinger) return u;
    const HermitianOperator h0op = free_hamiltonian(spectrum, ancilla);
    const CMatrix& h0 = h0op.matrix();
    CVector back(h0.rows());
    for (Index i = 0; i < back.size(); ++i) back(i) = std::polar(1.0, h0(i, i).real() * t);
    return UnitaryPropagator(back.asDiagonal() * u.matrix(), key);
  };

  if (cache == nullptr) return build(eig_hermitian(h));
  auto eig = cache->eigensystem(h);
  return *cache->propagator(key, [&] { return build(*eig); });
}

// Collision map --------------------------------------------------------------

DensityMatrix collision_step(const DensityMatrix& rho_b, const UnitaryPropagator& u,
                             const DensityMatrix& eta, long collision_index) {
  const Index d = rho_b.dim();
  if (u.dim() != d * eta.dim()) {
    throw ShapeError("propagator dimension " + std::to_string(u.dim()) + " != " +
                     std::to_string(d) + " x " + std::to_string(eta.dim()));
  }
  const CMatrix joint = tensor(rho_b.matrix(), eta.matrix());
  const CMatrix evolved = u.matrix() * joint * u.matrix().adjoint();
  CMatrix out = partial_trace_ancilla(evolved, d, eta.dim());
  try {
    return DensityMatrix(std::move(out), {tol::kPhysics, tol::kPhysics, tol::kPhysics});
  } catch (const ValidationError& e) {
    throw CollisionError(e.what(), collision_index);
  }
}

CollisionChannel::CollisionChannel(const UnitaryPropagator& u, const DensityMatrix& eta) {
  const Index da = eta.dim();
  if (u.dim() % da != 0) throw ShapeError("propagator does not factorize over the ancilla");
  dim_ = u.dim() / da;
  const CMatrix& U = u.matrix();

  Eigen::SelfAdjointEigenSolver<CMatrix> es(eta.matrix());
  for (Index k = da - 1; k >= 0; --k) {
    const double weight = es.eigenvalues()(k);
    if (weight <= 1e-15) continue;
    const CVector psi = es.eigenvectors().col(k);
    for (Index c = 0; c < da; ++c) {
      // K(b, b') = sqrt(w) sum_a psi_a U(b*da + c, b'*da + a)
      CMatrix kraus = CMatrix::Zero(dim_, dim_);
      for (Index b = 0; b < dim_; ++b)
        for (Index bp = 0; bp < dim_; ++bp) {
          Complex acc = 0.0;
          for (Index a = 0; a < da; ++a) acc += psi(a) * U(b * da + c, bp * da + a);
          kraus(b, bp) = std::sqrt(weight) * acc;
        }
      kraus_.push_back(std::move(kraus));
    }
  }
}

CMatrix CollisionChannel::apply(const CMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw ShapeError("state dimension mismatch");
  CMatrix out = CMatrix::Zero(dim_, dim_);
  CMatrix tmp(dim_, dim_);
  for (const auto& k : kraus_) {
    tmp.noalias() = k * rho;
    out.noalias() += tmp * k.adjoint();
  }
  return out;
}

DensityMatrix CollisionChannel::apply(const DensityMatrix& rho) const {
  return DensityMatrix::unchecked(apply(rho.matrix()));
}

// Protocol -------------------------------------------------------------------

void ProtocolConfig::validate() const {
  transmon.validate();
  AncillaSpec{delta.value_or(0.0), q, c}.validate();
  if (!(coupling_g > 0.0) || !std::isfinite(coupling_g)) throw RangeError("coupling_g must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw RangeError("tau must be positive");
  if (n_collisions < 0) throw RangeError("n_collisions must be non-negative");
  if (record_every <= 0) throw RangeError("record_every must be positive");
  if (!std::isfinite(detuning) || detuning <= -1.0) throw RangeError("detuning must exceed -1");
}

bool ProtocolConfig::in_strong_coupling_regime() const {
  return coupling_g >= 1e-3 && coupling_g < 1e-1;
}

AncillaSpec ProtocolConfig::ancilla_for(const Spectrum& spectrum) const {
  AncillaSpec a = AncillaSpec::resonant(spectrum, q, c);
  if (delta) a.delta = *delta;
  a.delta *= 1.0 + detuning;
  return a;
}

std::vector<double> Trajectory::collision_index() const {
  std::vector<double> v;
  v.reserve(points.size());
  for (const auto& p : points) v.push_back(static_cast<double>(p.n));
  return v;
}

std::vector<double> Trajectory::stored_energy() const {
  std::vector<double> v;
  v.reserve(points.size());
  for (const auto& p : points) v.push_back(p.stored_energy);
  return v;
}

std::vector<double> Trajectory::ergotropy() const {
  std::vector<double> v;
  v.reserve(points.size());
  for (const auto& p : points) v.push_back(p.ergotropy);
  return v;
}

Trajectory run_protocol(const ProtocolConfig& config) {
  config.validate();
  return run_protocol(config, solve_spectrum(config.transmon), nullptr);
}

Trajectory run_protocol(const ProtocolConfig& config, const Spectrum& spectrum, PropagatorCache* cache) {
  config.validate();
  if (!same_transmon(config.transmon, spectrum.spec)) {
    throw RangeError("spectrum was solved for a different transmon specification");
  }
  if (!spectrum.converged) throw ConvergenceError("run_protocol requires a converged spectrum");

  const AncillaSpec ancilla = config.ancilla_for(spectrum);
  const DensityMatrix eta = ancilla_state(ancilla);
  const UnitaryPropagator u = collision_propagator(spectrum, ancilla, PlasmaCoupling{config.coupling_g},
                                                   config.tau, config.frame, cache);
  const CollisionChannel channel(u, eta);

  const Index d = spectrum.dim();
  const RVector levels = spectrum.shifted_levels() / spectrum.e_f;
  const std::span<const double> level_span(levels.data(), static_cast<std::size_t>(d));
  const double offset = energy_offset(spectrum, config.energy_reference) / spectrum.e_f;

  Trajectory traj;
  traj.config = config;
  traj.e_f = spectrum.e_f;
  traj.delta = ancilla.delta;
  traj.points.reserve(static_cast<std::size_t>(config.n_collisions / config.record_every + 1));

  auto record = [&](long n, const CMatrix& rho) {
    const ErgotropyResult erg = ergotropy(rho, level_span);
    const double lmin = erg.populations(d - 1);
    ++traj.stats.validity_checks;
    traj.stats.min_eigenvalue = std::min(traj.stats.min_eigenvalue, lmin);
    if (lmin < -tol::kPhysics) throw CollisionError("negative population " + str(lmin), n);
    TrajectoryPoint p;
    p.n = n;
    p.stored_energy = erg.energy;
    p.energy = erg.energy + offset;
    p.ergotropy = erg.ergotropy;
    p.efficiency = efficiency_ratio(erg.ergotropy, p.energy, config.energy_reference);
    p.purity = rho.cwiseAbs2().sum();
    if (!std::isfinite(p.energy) || !std::isfinite(p.ergotropy) || !std::isfinite(p.purity)) {
      throw CollisionError("non-finite observable", n);
    }
    traj.points.push_back(p);
  };

  CMatrix rho = CMatrix::Zero(d, d);
  rho(0, 0) = 1.0;
  record(0, rho);
  for (long n = 1; n <= config.n_collisions; ++n) {
    rho = channel.apply(rho);
    const double tr_err = std::abs(rho.trace() - Complex(1.0, 0.0));
    const double herm = hermitian_defect(rho);
    traj.stats.max_trace_error = std::max(traj.stats.max_trace_error, tr_err);
    traj.stats.max_hermitian_defect = std::max(traj.stats.max_hermitian_defect, herm);
    if (!(tr_err <= tol::kPhysics)) throw CollisionError("trace not preserved (" + str(tr_err) + ")", n);
    if (!(herm <= tol::kPhysics)) throw CollisionError("state lost Hermiticity (" + str(herm) + ")", n);
    if (n % config.record_every == 0) record(n, rho);
  }
  return traj;
}

// Persistence ----------------------------------------------------------------

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  os << "n,E[E_f],delta_E[E_f],ergotropy[E_f],efficiency,purity\n";
  for (const auto& p : t.points) {
    os << p.n << ',' << csv::number(p.energy) << ',' << csv::number(p.stored_energy) << ','
       << csv::number(p.ergotropy) << ',' << csv::number(p.efficiency) << ','
       << csv::number(p.purity) << '\n';
  }
}

std::string trajectory_file_name(const ProtocolConfig& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "traj_ej%.6g_g%.6g_tau%.6g_q%.6g_c%.6g.csv", c.transmon.ej_over_ec,
                c.coupling_g, c.tau, c.q, c.c);
  return buf;
}

Trajectory read_trajectory_csv(const std::string& path) {
  const csv::Table table = csv::read_file(path);
  const std::size_t cn = table.column("n");
  const std::size_t ce = table.column("E[");
  const std::size_t cd = table.column("delta_E");
  const std::size_t cg = table.column("ergotropy");
  const std::size_t cf = table.column("efficiency");
  const std::size_t cp = table.column("purity");
  Trajectory t;
  for (const auto& r : table.rows) {
    TrajectoryPoint p;
    p.n = static_cast<long>(r[cn]);
    p.energy = r[ce];
    p.stored_energy = r[cd];
    p.ergotropy = r[cg];
    if (!std::isnan(r[cf])) p.efficiency = r[cf];
    p.purity = r[cp];
    t.points.push_back(p);
  }
  return t;
}

}  // namespace tqb
