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

#include "tqb/qcore.hpp"

#include "tqb/errors.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace tqb {

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << " must be square and non-empty, got " << m.rows() << "x" << m.cols();
    throw ShapeError(os.str());
  }
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

double hermitian_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u * u.adjoint() - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const CMatrix& m) {
  const CMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// HermitianOperator ----------------------------------------------------------

HermitianOperator::HermitianOperator(CMatrix m, double tolerance) : m_(std::move(m)) {
  require_square(m_, "Hermitian operator");
  const double defect = hermitian_defect(m_);
  if (!(defect <= tolerance)) {
    throw ValidationError("operator is not Hermitian: max |H - H^dagger| = " +
                          fmt_double(defect) + " exceeds " + fmt_double(tolerance));
  }
}

HermitianOperator HermitianOperator::from_real(const RMatrix& m) {
  return HermitianOperator(m.cast<Complex>());
}

// DensityMatrix --------------------------------------------------------------

void validate_density(const CMatrix& m, const DensityTolerances& t) {
  require_square(m, "density matrix");
  const double herm = hermitian_defect(m);
  if (!(herm <= t.hermitian)) {
    throw ValidationError("density matrix not Hermitian: defect " + fmt_double(herm));
  }
  const double tr_err = std::abs(m.trace() - Complex(1.0, 0.0));
  if (!(tr_err <= t.trace)) {
    throw ValidationError("density matrix trace deviates from 1 by " + fmt_double(tr_err));
  }
  const double lmin = min_eigenvalue(m);
  if (!(lmin >= -t.positivity)) {
    throw ValidationError("density matrix has negative eigenvalue " + fmt_double(lmin));
  }
}

DensityMatrix::DensityMatrix(CMatrix m, const DensityTolerances& t) : m_(std::move(m)) {
  validate_density(m_, t);
}

DensityMatrix DensityMatrix::unchecked(CMatrix m) { return DensityMatrix(std::move(m), Unchecked{}); }

DensityMatrix DensityMatrix::basis_state(Index dim, Index k) {
  if (dim <= 0 || k < 0 || k >= dim) throw ShapeError("basis state index out of range");
  CMatrix m = CMatrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return DensityMatrix(std::move(m), Unchecked{});
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw ValidationError("pure state vector has zero norm");
  const CVector v = psi / n;
  return DensityMatrix(v * v.adjoint());
}

double DensityMatrix::purity() const {
  // tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho
  return m_.cwiseAbs2().sum();
}

// UnitaryPropagator ----------------------------------------------------------

UnitaryPropagator::UnitaryPropagator(CMatrix u, std::uint64_t generator_hash)
    : u_(std::move(u)), hash_(generator_hash) {
  require_square(u_, "propagator");
  const double defect = unitarity_defect(u_);
  if (!(defect <= tol::kUnitary)) {
    throw ValidationError("propagator not unitary: max |U U^dagger - I| = " + fmt_double(defect));
  }
}

// Spectral tools -------------------------------------------------------------

EigenSystem eig_hermitian(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw ValidationError("Hermitian eigensolver failed");
  EigenSystem out{es.eigenvalues(), es.eigenvectors()};
  for (Index k = 0; k < out.vectors.cols(); ++k) {
    auto col = out.vectors.col(k);
    const double vmax = col.cwiseAbs().maxCoeff();
    Index pivot = 0;
    for (Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) >= vmax * (1.0 - 1e-8)) {
        pivot = i;
        break;
      }
    }
    const Complex c = col(pivot);
    col *= std::conj(c) / std::abs(c);
    col(pivot) = Complex(col(pivot).real(), 0.0);
  }
  return out;
}

std::uint64_t generator_hash(const CMatrix& h, double t, std::uint64_t salt) {
  std::uint64_t x = kFnvOffset;
  const std::int64_t r = h.rows(), c = h.cols();
  fnv_mix(x, &r, sizeof r);
  fnv_mix(x, &c, sizeof c);
  fnv_mix(x, h.data(), sizeof(Complex) * static_cast<std::size_t>(h.size()));
  fnv_mix(x, &t, sizeof t);
  fnv_mix(x, &salt, sizeof salt);
  return x;
}

UnitaryPropagator expm_hermitian_generator(const EigenSystem& eig, double t, std::uint64_t hash) {
  const Index n = eig.values.size();
  CVector phases(n);
  for (Index k = 0; k < n; ++k) phases(k) = std::polar(1.0, -eig.values(k) * t);
  CMatrix u = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
  return UnitaryPropagator(std::move(u), hash);
}

UnitaryPropagator expm_hermitian_generator(const HermitianOperator& h, double t) {
  return expm_hermitian_generator(eig_hermitian(h), t, generator_hash(h.matrix(), t));
}

// Composite systems ----------------------------------------------------------

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  require_square(a, "tensor factor");
  require_square(b, "tensor factor");
  const Index da = a.rows(), db = b.rows();
  CMatrix out(da * db, da * db);
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = a(i, j) * b;
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::unchecked(tensor(a.matrix(), b.matrix()));
}

CMatrix partial_trace_ancilla(const CMatrix& rho, Index d_b, Index d_a) {
  require_square(rho, "composite state");
  if (d_b <= 0 || d_a <= 0 || rho.rows() != d_b * d_a) {
    std::ostringstream os;
    os << "dimension " << rho.rows() << " does not factorize as " << d_b << " x " << d_a;
    throw ShapeError(os.str());
  }
  CMatrix out = CMatrix::Zero(d_b, d_b);
  for (Index i = 0; i < d_b; ++i)
    for (Index j = 0; j < d_b; ++j) out(i, j) = rho.block(i * d_a, j * d_a, d_a, d_a).trace();
  return out;
}

DensityMatrix partial_trace_ancilla(const DensityMatrix& rho, Index d_b, Index d_a) {
  return DensityMatrix::unchecked(partial_trace_ancilla(rho.matrix(), d_b, d_a));
}

// PropagatorCache ------------------------------------------------------------

std::shared_ptr<const EigenSystem> PropagatorCache::eigensystem(const HermitianOperator& h) {
  const std::uint64_t key = generator_hash(h.matrix());
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = eig_.find(key); it != eig_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto built = std::make_shared<const EigenSystem>(eig_hermitian(h));
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = eig_.emplace(key, std::move(built));
  if (inserted) ++misses_; else ++hits_;
  return it->second;
}

std::shared_ptr<const UnitaryPropagator> PropagatorCache::propagator(
    std::uint64_t key, const std::function<UnitaryPropagator()>& build) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = prop_.find(key); it != prop_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto built = std::make_shared<const UnitaryPropagator>(build());
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = prop_.emplace(key, std::move(built));
  if (inserted) ++misses_; else ++hits_;
  return it->second;
}

std::size_t PropagatorCache::hits() const {
  std::lock_guard<std::mutex> lock(mu_);
  return hits_;
}

std::size_t PropagatorCache::misses() const {
  std::lock_guard<std::mutex> lock(mu_);
  return misses_;
}

}  // namespace tqb
