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

#ifndef HPB_LINALG_HPP_
#define HPB_LINALG_HPP_

#include <Eigen/Dense>

#include "hpb/rng.hpp"

namespace hpb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Symmetric positive-definite matrix with a cached eigendecomposition.
class SpdMatrix {
 public:
  // Throws NumericError on asymmetry, non-positive spectrum, or condition
  // number above kMaxCondition.
  explicit SpdMatrix(const Matrix& m);

  static constexpr double kMaxCondition = 1e14;

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  const Vector& eigenvalues() const { return evals_; }
  const Matrix& eigenvectors() const { return evecs_; }
  double min_eigenvalue() const { return evals_(0); }
  double max_eigenvalue() const { return evals_(evals_.size() - 1); }

  Matrix sqrt_matrix() const;
  Matrix inv_sqrt_matrix() const;
  Matrix inverse() const;
  Vector solve(const Vector& v) const;
  // sqrt(v' M v) and sqrt(v' M^{-1} v).
  double norm(const Vector& v) const;
  double dual_norm(const Vector& v) const;

 private:
  Matrix m_;
  Vector evals_;
  Matrix evecs_;
};

// Returns R = R' with R R = M.
SpdMatrix spd_sqrt(const SpdMatrix& m);
SpdMatrix spd_inv_sqrt(const SpdMatrix& m);

// Largest eigenvalue of a symmetric (possibly indefinite) matrix.
double lambda_max(const Matrix& m);

// Throws NumericError unless |m(i,j) - m(j,i)| <= 1e-12 max(1, |m(i,j)|).
void require_symmetric(const Matrix& m);

class UnitVector {
 public:
  explicit UnitVector(Vector v);
  const Vector& vec() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()); }
  double operator()(int i) const { return v_(i); }

 private:
  Vector v_;
};

// Uniform direction on the unit sphere of the orthogonal complement of v.
UnitVector sample_sphere_orthogonal(const Vector& v, Rng& rng);

Vector standard_normal(int n, Rng& rng);

}  // namespace hpb

#endif  // HPB_LINALG_HPP_
