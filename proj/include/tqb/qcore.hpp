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

// Dense complex linear algebra for small quantum systems: Hermitian
// eigendecomposition, spectral propagators, tensor products and the
// partial trace over a trailing subsystem.
//
// Composite index convention: for A (dim dA) tensor B (dim dB) the row/column
// index is i = a * dB + b. In the collision model A is the battery and B the
// ancilla ("battery-major"), so tracing out the ancilla sums contiguous
// dB x dB blocks.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace tqb {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-10;
inline constexpr double kUnitary = 1e-10;
// Physics-level assertions (trace preservation, positivity after a collision).
inline constexpr double kPhysics = 1e-9;
}  // namespace tol

/// max_ij |m_ij - conj(m_ji)|
double hermitian_defect(const CMatrix& m);
/// max_ij |(u u^dagger - I)_ij|
double unitarity_defect(const CMatrix& u);
/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const CMatrix& m);

class HermitianOperator {
 public:
  /// Throws ValidationError naming the max asymmetry if m is not Hermitian
  /// to `tolerance` (absolute).
  explicit HermitianOperator(CMatrix m, double tolerance = tol::kHermitian);
  static HermitianOperator from_real(const RMatrix& m);

  Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }

 private:
  CMatrix m_;
};

struct DensityTolerances {
  double hermitian = tol::kHermitian;
  double trace = tol::kTrace;
  double positivity = tol::kPositivity;
};

/// Throws ValidationError if m is not a valid density matrix.
void validate_density(const CMatrix& m, const DensityTolerances& t = {});

class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m, const DensityTolerances& t = {});

  /// Wraps a matrix without running the O(d^3) positivity check. For internal
  /// hot loops whose caller validates on its own schedule.
  static DensityMatrix unchecked(CMatrix m);
  static DensityMatrix basis_state(Index dim, Index k);
  static DensityMatrix pure(const CVector& psi);

  Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double purity() const;

 private:
  struct Unchecked {};
  DensityMatrix(CMatrix m, Unchecked) : m_(std::move(m)) {}
  CMatrix m_;
};

class UnitaryPropagator {
 public:
  /// Throws ValidationError if u is not unitary to tol::kUnitary.
  UnitaryPropagator(CMatrix u, std::uint64_t generator_hash);

  Index dim() const { return u_.rows(); }
  const CMatrix& matrix() const { return u_; }
  std::uint64_t generator_hash() const { return hash_; }

 private:
  CMatrix u_;
  std::uint64_t hash_;
};

struct EigenSystem {
  RVector values;   // ascending
  CMatrix vectors;  // columns, orthonormal
};

/// Eigendecomposition with ascending eigenvalues. Each eigenvector is
/// rephased so that its largest-magnitude component is real and positive
/// (the first such component when several tie to within 1e-8 relative).
EigenSystem eig_hermitian(const HermitianOperator& h);

/// Stable 64-bit fingerprint of a matrix (and an optional time and salt),
/// used as cache key and as the provenance tag of a propagator.
std::uint64_t generator_hash(const CMatrix& h, double t = 0.0, std::uint64_t salt = 0);

/// exp(-i H t) = V diag(exp(-i lambda t)) V^dagger.
UnitaryPropagator expm_hermitian_generator(const HermitianOperator& h, double t);
UnitaryPropagator expm_hermitian_generator(const EigenSystem& eig, double t,
                                           std::uint64_t hash);

/// Kronecker product, battery-major: (A x B)(a*dB+b, a'*dB+b') = A(a,a') B(b,b').
CMatrix tensor(const CMatrix& a, const CMatrix& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Tr_ancilla over the trailing factor of dimension d_a.
CMatrix partial_trace_ancilla(const CMatrix& rho, Index d_b, Index d_a);
DensityMatrix partial_trace_ancilla(const DensityMatrix& rho, Index d_b, Index d_a);

/// Thread-safe memo of eigensystems and propagators keyed by generator hash.
/// Entries are immutable once inserted and may be shared across threads.
class PropagatorCache {
 public:
  std::shared_ptr<const EigenSystem> eigensystem(const HermitianOperator& h);
  std::shared_ptr<const UnitaryPropagator> propagator(
      std::uint64_t key, const std::function<UnitaryPropagator()>& build);

  std::size_t hits() const;
  std::size_t misses() const;

 private:
  mutable std::mutex mu_;
  std::map<std::uint64_t, std::shared_ptr<const EigenSystem>> eig_;
  std::map<std::uint64_t, std::shared_ptr<const UnitaryPropagator>> prop_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace tqb
