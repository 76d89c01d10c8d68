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

// Homogeneous Markovian collision model: a transmon battery repeatedly meets
// fresh two-level ancillas, each for a time tau, and the ancilla is traced
// out afterwards:
//
//   rho_B(n) = Tr_a[ U (rho_B(n-1) x eta) U^dagger ].
//
// Within one collision the generator is time independent:
//   H = H_B x 1 + 1 x (Delta/2) sigma_z + g N x sigma_x,
// with H_B diagonal (battery eigenbasis, E_0 = 0) and the ancilla basis
// ordered (|1>, |0>) = (excited, ground).
//
// Frames. Frame::interaction (the default) uses the interaction-picture
// propagator of one collision window,
//   U_I = exp(+i H_0 tau) exp(-i H tau),  H_0 = H(g = 0),
// i.e. each collision starts with the ancilla in eta relative to the free
// rotation of both parties. Tracing out the ancilla turns the H_0 factor into
// a battery rotation exp(+i H_B tau), which leaves the populations and the
// spectrum of rho_B unchanged; stored energy and ergotropy therefore agree
// with the lab-frame state the same collision sequence produces. The resonance
// between Delta and E_1 - E_0 accumulates coherently from collision to
// collision only in this frame. Frame::schrodinger applies exp(-i H tau)
// with the same eta in the lab frame; the ancilla coherence then dephases
// against the battery by Delta tau per collision.

#pragma once

#include "tqb/observables.hpp"
#include "tqb/qcore.hpp"
#include "tqb/transmon.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tqb {

struct AncillaSpec {
  double delta = 0.0;  // level spacing, units of E_C
  double q = 0.5;      // ground-state population
  double c = 1.0;      // coherence factor

  void validate() const;
  /// Delta = E_1 - E_0 of the given spectrum.
  static AncillaSpec resonant(const Spectrum& spectrum, double q, double c);
};

/// Coupling strength in units of the plasma frequency, g / omega_p.
struct PlasmaCoupling {
  double g_over_wp = 0.0;
};

enum class Frame { interaction, schrodinger };
const char* to_string(Frame f);
Frame frame_from_string(const std::string& s);

/// eta = (1-q)|1><1| + q|0><0| + c sqrt(q(1-q)) (|1><0| + |0><1|),
/// basis order (|1>, |0>).
DensityMatrix ancilla_state(const AncillaSpec& spec);

/// H_B x 1 + 1 x (Delta/2) sigma_z (units of E_C).
HermitianOperator free_hamiltonian(const Spectrum& spectrum, const AncillaSpec& ancilla);
/// Free part plus g N x sigma_x. Throws RangeError for g/omega_p >= 1, which
/// signals a coupling passed in E_C units.
HermitianOperator total_hamiltonian(const Spectrum& spectrum, const AncillaSpec& ancilla,
                                    PlasmaCoupling g);

/// Propagator of one collision of duration tau (units of tau_p). When a cache
/// is given, the eigensystem of H and the propagator are shared across calls.
UnitaryPropagator collision_propagator(const Spectrum& spectrum, const AncillaSpec& ancilla,
                                       PlasmaCoupling g, double tau, Frame frame = Frame::interaction,
                                       PropagatorCache* cache = nullptr);

/// Literal collision map: tensor, conjugate, trace out the ancilla.
/// Throws CollisionError tagged with `collision_index` if the result is not a
/// valid state at tol::kPhysics.
DensityMatrix collision_step(const DensityMatrix& rho_b, const UnitaryPropagator& u,
                             const DensityMatrix& eta, long collision_index = 0);

/// The same map in Kraus form, rho -> sum_k K_k rho K_k^dagger, with at most
/// four d x d operators built once from U and eta.
class CollisionChannel {
 public:
  CollisionChannel(const UnitaryPropagator& u, const DensityMatrix& eta);

  CMatrix apply(const CMatrix& rho) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

  Index battery_dim() const { return dim_; }
  const std::vector<CMatrix>& kraus() const { return kraus_; }

 private:
  Index dim_ = 0;
  std::vector<CMatrix> kraus_;
};

struct ProtocolConfig {
  TransmonSpec transmon;
  double q = 0.5;
  double c = 1.0;
  std::optional<double> delta;  // E_C units; default E_1 - E_0
  double detuning = 0.0;        // relative: Delta -> Delta (1 + detuning)
  double coupling_g = 4e-3;     // g / omega_p
  double tau = 1.0;             // tau / tau_p
  long n_collisions = 1000;
  long record_every = 1;
  Frame frame = Frame::interaction;
  EnergyReference energy_reference = EnergyReference::ground;

  void validate() const;
  /// 1e-3 <= g/omega_p < 1e-1; reported, not enforced.
  bool in_strong_coupling_regime() const;
  AncillaSpec ancilla_for(const Spectrum& spectrum) const;
};

struct TrajectoryPoint {
  long n = 0;
  double energy = 0.0;         // E(n) in the configured reference, units of E_f
  double stored_energy = 0.0;  // E(n) - E(0), units of E_f
  double ergotropy = 0.0;      // units of E_f
  std::optional<double> efficiency;
  double purity = 1.0;
};

struct RunStats {
  long validity_checks = 0;
  double max_trace_error = 0.0;
  double max_hermitian_defect = 0.0;
  double min_eigenvalue = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  ProtocolConfig config;
  double e_f = 0.0;    // units of E_C
  double delta = 0.0;  // ancilla spacing used, units of E_C
  RunStats stats;

  std::vector<double> collision_index() const;
  std::vector<double> stored_energy() const;
  std::vector<double> ergotropy() const;
};

/// Runs the protocol from the battery ground state, recording every
/// `record_every` collisions (n = 0 always). Throws CollisionError with the
/// failing index on an invalid state or non-finite observable.
Trajectory run_protocol(const ProtocolConfig& config);
Trajectory run_protocol(const ProtocolConfig& config, const Spectrum& spectrum,
                        PropagatorCache* cache = nullptr);

/// Header names units; columns n,E,delta_E,ergotropy,efficiency,purity.
void write_trajectory_csv(std::ostream& os, const Trajectory& t);
/// Encodes (ej_over_ec, g, tau, q, c), e.g. traj_ej100_g0.004_tau1_q0.5_c1.csv
std::string trajectory_file_name(const ProtocolConfig& config);
/// Reads back a trajectory CSV (config left default).
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace tqb
