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

#ifndef HPB_BARRIER_HPP_
#define HPB_BARRIER_HPP_

#include <vector>

#include "hpb/linalg.hpp"
#include "hpb/rng.hpp"

namespace hpb {

enum class BodyKind { kPolytope, kBall, kTruncatedSimplex };

// Full-dimensional convex body. Truncated simplices live in R^d with the
// implicit constraint sum(w) = 1.
class ConvexBody {
 public:
  static ConvexBody polytope(Matrix a, Vector b, Vector interior);
  static ConvexBody ball(Vector center, double radius);
  static ConvexBody truncated_simplex(int d, double floor);
  // Axis-aligned box [lo, hi]^d as a polytope with 2d facets.
  static ConvexBody box(int d, double lo, double hi);

  BodyKind kind() const { return kind_; }
  int dim() const { return dim_; }
  // Number of facets for polytopes, 1 for balls, d for simplices.
  int num_constraints() const;

  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  const Vector& interior() const { return interior_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  double floor() const { return floor_; }

  // Constraint slacks: b - A w for polytopes, r^2 - |w - c|^2 for balls,
  // w - floor for simplices.
  Vector slacks(const Vector& w) const;
  bool strictly_contains(const Vector& w) const;
  bool contains(const Vector& w, double tol = 1e-9) const;

 private:
  BodyKind kind_ = BodyKind::kPolytope;
  int dim_ = 0;
  Matrix a_;
  Vector b_;
  Vector interior_;
  Vector center_;
  double radius_ = 0.0;
  double floor_ = 0.0;
};

// Self-concordant barrier on a ConvexBody. Polytope: -sum ln(b - A w), nu = m.
// Ball: -ln(r^2 - |w - c|^2), nu = 2. Truncated simplex: -sum ln w_i, nu = d.
class Barrier {
 public:
  explicit Barrier(ConvexBody body);

  const ConvexBody& body() const { return body_; }
  double nu() const { return nu_; }
  int dim() const { return body_.dim(); }

  // True when w is strictly inside the barrier's domain.
  bool in_domain(const Vector& w) const;
  double value(const Vector& w) const;
  Vector gradient(const Vector& w) const;
  Matrix hessian(const Vector& w) const;

 private:
  void require_domain(const Vector& w) const;

  ConvexBody body_;
  double nu_;
};

Barrier make_barrier(const ConvexBody& body);

// Psi(w, b) = 400 (psi(w / b) - 2 nu ln b) on the conic hull of the body,
// a normal barrier with parameter theta = 800 nu.
class NormalBarrier {
 public:
  explicit NormalBarrier(Barrier base) : base_(std::move(base)) {}

  const Barrier& base() const { return base_; }
  double theta() const { return 800.0 * base_.nu(); }
  int dim() const { return base_.dim() + 1; }

  bool in_domain(const Vector& z) const;
  double value(const Vector& z) const;
  Vector gradient(const Vector& z) const;
  Matrix hessian(const Vector& z) const;

 private:
  void require_domain(const Vector& z) const;
  Barrier base_;
};

NormalBarrier lift_normal_barrier(const Barrier& psi);

// Minkowsky gauge of u with respect to the pole.
double minkowsky(const ConvexBody& body, const Vector& pole, const Vector& u);

// pole + factor (body - pole).
ConvexBody shrink_body(const ConvexBody& body, const Vector& pole,
                       double factor);

// |v - center| in the barrier's local norm at center is at most 1.
bool dikin_contains(const Barrier& barrier, const Vector& center,
                    const Vector& v);
double local_norm(const Barrier& barrier, const Vector& center,
                  const Vector& h);

// Vertices of a bounded polytope by facet-subset enumeration.
std::vector<Vector> polytope_vertices(const ConvexBody& body);

// Bounded polytope with m >= d + 1 facets containing the origin.
ConvexBody random_polytope(int d, int m, Rng& rng);

// Point drawn from the body by rejection/scaling; stays away from the
// boundary by a random margin.
Vector random_interior_point(const ConvexBody& body, Rng& rng);

}  // namespace hpb

#endif  // HPB_BARRIER_HPP_
