// Copyright 2026 The hpbandit Authors.
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

#include "hpb/linalg.hpp"

#include <cmath>
#include <string>

#include "hpb/errors.hpp"

namespace hpb {

void require_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) throw NumericError("matrix is not square");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      const double tol = 1e-12 * std::max(1.0, std::abs(m(i, j)));
      if (std::abs(m(i, j) - m(j, i)) > tol)
        throw NumericError("matrix is not symmetric at (" + std::to_string(i) +
                           "," + std::to_string(j) + ")");
    }
  }
}

SpdMatrix::SpdMatrix(const Matrix& m) {
  require_symmetric(m);
  if (m.rows() == 0) throw NumericError("empty matrix");
  m_ = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_);
  if (es.info() != Eigen::Success) throw NumericError("eigensolve failed");
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
  const double lo = evals_(0), hi = evals_(evals_.size() - 1);
  if (!(lo > 1e-14 * m_.trace()))
    throw NumericError("matrix is not positive definite (min eigenvalue " +
                       std::to_string(lo) + ")");
  if (hi / lo > kMaxCondition)
    throw NumericError("condition number above 1e14");
}

Matrix SpdMatrix::sqrt_matrix() const {
  Matrix r = evecs_ * evals_.cwiseSqrt().asDiagonal() * evecs_.transpose();
  return 0.5 * (r + r.transpose());
}

Matrix SpdMatrix::inv_sqrt_matrix() const {
  Matrix r = evecs_ * evals_.cwiseSqrt().cwiseInverse().asDiagonal() *
             evecs_.transpose();
  return 0.5 * (r + r.transpose());
}

Matrix SpdMatrix::inverse() const {
  Matrix r = evecs_ * evals_.cwiseInverse().asDiagonal() * evecs_.transpose();
  return 0.5 * (r + r.transpose());
}

Vector SpdMatrix::solve(const Vector& v) const {
  return evecs_ * (evals_.cwiseInverse().asDiagonal() * (evecs_.transpose() * v));
}

double SpdMatrix::norm(const Vector& v) const {
  return std::sqrt(std::max(0.0, v.dot(m_ * v)));
}

double SpdMatrix::dual_norm(const Vector& v) const {
  const Vector c = evecs_.transpose() * v;
  return std::sqrt(c.cwiseAbs2().cwiseQuotient(evals_).sum());
}

SpdMatrix spd_sqrt(const SpdMatrix& m) { return SpdMatrix(m.sqrt_matrix()); }

SpdMatrix spd_inv_sqrt(const SpdMatrix& m) {
  return SpdMatrix(m.inv_sqrt_matrix());
}

double lambda_max(const Matrix& m) {
  require_symmetric(m);
  if (m.rows() == 0) throw NumericError("empty matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                           Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigensolve failed");
  return es.eigenvalues()(m.rows() - 1);
}

UnitVector::UnitVector(Vector v) : v_(std::move(v)) {
  if (std::abs(v_.norm() - 1.0) > 1e-12)
    throw NumericError("vector is not unit length");
}

Vector standard_normal(int n, Rng& rng) {
  Vector g(n);
  for (int i = 0; i < n; ++i) g(i) = rng.normal();
  return g;
}

UnitVector sample_sphere_orthogonal(const Vector& v, Rng& rng) {
  const double vn = v.norm();
  if (!(vn > 0.0)) throw std::invalid_argument("direction must be nonzero");
  if (v.size() < 2) throw std::invalid_argument("dimension must be at least 2");
  const Vector vh = v / vn;
  for (;;) {
    Vector g = standard_normal(static_cast<int>(v.size()), rng);
    g -= g.dot(vh) * vh;
    const double gn = g.norm();
    if (gn < 1e-8) continue;
    g /= gn;
    // One more projection pass cleans up cancellation error.
    g -= g.dot(vh) * vh;
    g.normalize();
    return UnitVector(std::move(g));
  }
}

}  // namespace hpb
