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

#include "hpb/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hpb {

namespace {

constexpr double kInteriorTol = 1e-12;

}  // namespace

ConvexBody ConvexBody::polytope(Matrix a, Vector b, Vector interior) {
  if (a.rows() != b.size() || a.cols() != interior.size() || a.rows() == 0)
    throw std::invalid_argument("polytope: inconsistent dimensions");
  ConvexBody body;
  body.kind_ = BodyKind::kPolytope;
  body.dim_ = static_cast<int>(a.cols());
  body.a_ = std::move(a);
  body.b_ = std::move(b);
  body.interior_ = std::move(interior);
  if (!body.strictly_contains(body.interior_))
    throw std::invalid_argument("polytope: interior point is not interior");
  return body;
}

ConvexBody ConvexBody::ball(Vector center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be > 0");
  ConvexBody body;
  body.kind_ = BodyKind::kBall;
  body.dim_ = static_cast<int>(center.size());
  body.center_ = center;
  body.interior_ = std::move(center);
  body.radius_ = radius;
  return body;
}

ConvexBody ConvexBody::truncated_simplex(int d, double floor) {
  if (d < 1 || floor < 0.0 || !(floor * d < 1.0))
    throw std::invalid_argument("truncated simplex: need d >= 1, floor*d < 1");
  ConvexBody body;
  body.kind_ = BodyKind::kTruncatedSimplex;
  body.dim_ = d;
  body.floor_ = floor;
  body.interior_ = Vector::Constant(d, 1.0 / d);
  return body;
}

ConvexBody ConvexBody::box(int d, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("box: need lo < hi");
  Matrix a = Matrix::Zero(2 * d, d);
  Vector b(2 * d);
  for (int i = 0; i < d; ++i) {
    a(2 * i, i) = 1.0;
    b(2 * i) = hi;
    a(2 * i + 1, i) = -1.0;
    b(2 * i + 1) = -lo;
  }
  return polytope(std::move(a), std::move(b),
                  Vector::Constant(d, 0.5 * (lo + hi)));
}

int ConvexBody::num_constraints() const {
  switch (kind_) {
    case BodyKind::kPolytope: return static_cast<int>(a_.rows());
    case BodyKind::kBall: return 1;
    case BodyKind::kTruncatedSimplex: return dim_;
  }
  return 0;
}

Vector ConvexBody::slacks(const Vector& w) const {
  switch (kind_) {
    case BodyKind::kPolytope: return b_ - a_ * w;
    case BodyKind::kBall:
      return Vector::Constant(1, radius_ * radius_ - (w - center_).squaredNorm());
    case BodyKind::kTruncatedSimplex:
      return w - Vector::Constant(dim_, floor_);
  }
  return {};
}

bool ConvexBody::strictly_contains(const Vector& w) const {
  if (w.size() != dim_) return false;
  const Vector s = slacks(w);
  switch (kind_) {
    case BodyKind::kPolytope:
      for (int i = 0; i < s.size(); ++i)
        if (!(s(i) >= kInteriorTol * (1.0 + std::abs(b_(i))))) return false;
      return true;
    case BodyKind::kBall:
      return s(0) >= kInteriorTol * radius_ * radius_;
    case BodyKind::kTruncatedSimplex:
      if (std::abs(w.sum() - 1.0) > 1e-9) return false;
      return (s.array() >= kInteriorTol).all();
  }
  return false;
}

bool ConvexBody::contains(const Vector& w, double tol) const {
  if (w.size() != dim_) return false;
  const Vector s = slacks(w);
  switch (kind_) {
    case BodyKind::kPolytope:
      for (int i = 0; i < s.size(); ++i)
        if (s(i) < -tol * (1.0 + std::abs(b_(i)))) return false;
      return true;
    case BodyKind::kBall:
      return s(0) >= -tol * radius_ * radius_;
    case BodyKind::kTruncatedSimplex:
      return std::abs(w.sum() - 1.0) <= tol && (s.array() >= -tol).all();
  }
  return false;
}

Barrier::Barrier(ConvexBody body) : body_(std::move(body)) {
  switch (body_.kind()) {
    case BodyKind::kPolytope: nu_ = body_.num_constraints(); break;
    case BodyKind::kBall: nu_ = 2.0; break;
    case BodyKind::kTruncatedSimplex: nu_ = body_.dim(); break;
  }
  if (!in_domain(body_.interior()))
    throw std::invalid_argument("barrier: body has empty interior");
}

bool Barrier::in_domain(const Vector& w) const {
  if (w.size() != body_.dim() || !w.allFinite()) return false;
  if (body_.kind() == BodyKind::kTruncatedSimplex)
    return (w.array() > 0.0).all();
  return body_.strictly_contains(w);
}

void Barrier::require_domain(const Vector& w) const {
  if (!in_domain(w))
    throw std::domain_error("barrier evaluated outside its open domain");
}

double Barrier::value(const Vector& w) const {
  require_domain(w);
  switch (body_.kind()) {
    case BodyKind::kPolytope:
      return -(body_.b() - body_.a() * w).array().log().sum();
    case BodyKind::kBall:
      return -std::log(body_.radius() * body_.radius() -
                       (w - body_.center()).squaredNorm());
    case BodyKind::kTruncatedSimplex:
      return -w.array().log().sum();
  }
  return 0.0;
}

Vector Barrier::gradient(const Vector& w) const {
  require_domain(w);
  switch (body_.kind()) {
    case BodyKind::kPolytope: {
      const Vector inv = (body_.b() - body_.a() * w).cwiseInverse();
      return body_.a().transpose() * inv;
    }
    case BodyKind::kBall: {
      const Vector dw = w - body_.center();
      const double q = body_.radius() * body_.radius() - dw.squaredNorm();
      return 2.0 * dw / q;
    }
    case BodyKind::kTruncatedSimplex:
      return -w.cwiseInverse();
  }
  return {};
}

Matrix Barrier::hessian(const Vector& w) const {
  require_domain(w);
  switch (body_.kind()) {
    case BodyKind::kPolytope: {
      const Vector inv = (body_.b() - body_.a() * w).cwiseInverse();
      const Matrix scaled = inv.asDiagonal() * body_.a();
      return scaled.transpose() * scaled;
    }
    case BodyKind::kBall: {
      const Vector dw = w - body_.center();
      const double q = body_.radius() * body_.radius() - dw.squaredNorm();
      const int d = body_.dim();
      return 2.0 / q * Matrix::Identity(d, d) +
             4.0 / (q * q) * dw * dw.transpose();
    }
    case BodyKind::kTruncatedSimplex:
      return w.cwiseAbs2().cwiseInverse().asDiagonal();
  }
  return {};
}

Barrier make_barrier(const ConvexBody& body) { return Barrier(body); }

bool NormalBarrier::in_domain(const Vector& z) const {
  if (z.size() != dim()) return false;
  const double b = z(z.size() - 1);
  if (!(b > 0.0)) return false;
  return base_.in_domain(z.head(z.size() - 1) / b);
}

void NormalBarrier::require_domain(const Vector& z) const {
  if (!in_domain(z))
    throw std::domain_error("normal barrier evaluated outside the open cone");
}

double NormalBarrier::value(const Vector& z) const {
  require_domain(z);
  const int d = base_.dim();
  const double b = z(d);
  return 400.0 * (base_.value(z.head(d) / b) - 2.0 * base_.nu() * std::log(b));
}

Vector NormalBarrier::gradient(const Vector& z) const {
  require_domain(z);
  const int d = base_.dim();
  const double b = z(d);
  const Vector y = z.head(d) / b;
  const Vector g = base_.gradient(y);
  Vector out(d + 1);
  out.head(d) = 400.0 * g / b;
  out(d) = 400.0 * (-g.dot(y) - 2.0 * base_.nu()) / b;
  return out;
}

Matrix NormalBarrier::hessian(const Vector& z) const {
  require_domain(z);
  const int d = base_.dim();
  const double b = z(d);
  const Vector y = z.head(d) / b;
  const Vector g = base_.gradient(y);
  const Matrix h = base_.hessian(y);
  const Vector hy = h * y;
  const double s = 400.0 / (b * b);
  Matrix out(d + 1, d + 1);
  out.topLeftCorner(d, d) = s * h;
  const Vector cross = -s * (hy + g);
  out.topRightCorner(d, 1) = cross;
  out.bottomLeftCorner(1, d) = cross.transpose();
  out(d, d) = s * (y.dot(hy) + 2.0 * g.dot(y) + 2.0 * base_.nu());
  return out;
}

NormalBarrier lift_normal_barrier(const Barrier& psi) {
  return NormalBarrier(psi);
}

double minkowsky(const ConvexBody& body, const Vector& pole, const Vector& u) {
  if (!body.strictly_contains(pole))
    throw std::invalid_argument("minkowsky: pole must be strictly interior");
  const Vector v = u - pole;
  double pi = 0.0;
  switch (body.kind()) {
    case BodyKind::kPolytope: {
      const Vector room = body.b() - body.a() * pole;
      const Vector step = body.a() * v;
      for (int i = 0; i < room.size(); ++i) pi = std::max(pi, step(i) / room(i));
      break;
    }
    case BodyKind::kBall: {
      const double vv = v.squaredNorm();
      if (vv == 0.0) return 0.0;
      const Vector p = pole - body.center();
      const double pv = p.dot(v);
      const double r2 = body.radius() * body.radius();
      const double disc = pv * pv - vv * (p.squaredNorm() - r2);
      const double s = (-pv + std::sqrt(std::max(0.0, disc))) / vv;
      pi = 1.0 / s;
      break;
    }
    case BodyKind::kTruncatedSimplex: {
      if (std::abs(v.sum()) > 1e-9)
        throw std::invalid_argument("minkowsky: u is off the simplex plane");
      for (int i = 0; i < v.size(); ++i)
        pi = std::max(pi, -v(i) / (pole(i) - body.floor()));
      break;
    }
  }
  if (pi > 1.0 + 1e-9)
    throw std::invalid_argument("minkowsky: u is outside the body");
  return pi;
}

ConvexBody shrink_body(const ConvexBody& body, const Vector& pole,
                       double factor) {
  if (!(factor > 0.0 && factor <= 1.0))
    throw std::invalid_argument("shrink_body: factor must lie in (0, 1]");
  switch (body.kind()) {
    case BodyKind::kPolytope: {
      const Vector ap = body.a() * pole;
      return ConvexBody::polytope(body.a(), ap + factor * (body.b() - ap), pole);
    }
    case BodyKind::kBall:
      return ConvexBody::ball(pole + factor * (body.center() - pole),
                              factor * body.radius());
    case BodyKind::kTruncatedSimplex: {
      const int d = body.dim();
      if ((pole.array() - 1.0 / d).abs().maxCoeff() > 1e-12)
        throw std::invalid_argument(
            "shrink_body: simplex shrinking needs the uniform pole");
      return ConvexBody::truncated_simplex(
          d, (1.0 - factor) / d + factor * body.floor());
    }
  }
  return body;
}

double local_norm(const Barrier& barrier, const Vector& center,
                  const Vector& h) {
  return std::sqrt(std::max(0.0, h.dot(barrier.hessian(center) * h)));
}

bool dikin_contains(const Barrier& barrier, const Vector& center,
                    const Vector& v) {
  return local_norm(barrier, center, v - center) <= 1.0;
}

std::vector<Vector> polytope_vertices(const ConvexBody& body) {
  if (body.kind() != BodyKind::kPolytope)
    throw std::invalid_argument("polytope_vertices: not a polytope");
  const int m = static_cast<int>(body.a().rows());
  const int d = body.dim();
  std::vector<Vector> out;
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  if (d > m) return out;
  for (;;) {
    Matrix as(d, d);
    Vector bs(d);
    for (int i = 0; i < d; ++i) {
      as.row(i) = body.a().row(idx[i]);
      bs(i) = body.b()(idx[i]);
    }
    Eigen::FullPivLU<Matrix> lu(as);
    if (lu.rank() == d) {
      const Vector x = lu.solve(bs);
      if (body.contains(x, 1e-9)) {
        bool dup = false;
        for (const Vector& y : out) dup = dup || (x - y).norm() < 1e-9;
        if (!dup) out.push_back(x);
      }
    }
    int k = d - 1;
    while (k >= 0 && idx[k] == m - d + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

ConvexBody random_polytope(int d, int m, Rng& rng) {
  if (m < d + 1) throw std::invalid_argument("random_polytope: need m > d");
  for (;;) {
    Matrix a(m, d);
    Vector sum = Vector::Zero(d);
    for (int i = 0; i < d; ++i) {
      a.row(i) = standard_normal(d, rng).normalized().transpose();
      sum += a.row(i).transpose();
    }
    if (sum.norm() < 1e-3) continue;
    // Row d closes a positive circuit, so the normals positively span R^d.
    a.row(d) = -sum.normalized().transpose();
    for (int i = d + 1; i < m; ++i)
      a.row(i) = standard_normal(d, rng).normalized().transpose();
    Vector b(m);
    for (int i = 0; i < m; ++i) b(i) = 0.5 + rng.uniform();
    ConvexBody body = ConvexBody::polytope(a, b, Vector::Zero(d));
    const auto verts = polytope_vertices(body);
    double far = 0.0;
    for (const Vector& v : verts) far = std::max(far, v.norm());
    if (!verts.empty() && far <= 10.0) return body;
  }
}

Vector random_interior_point(const ConvexBody& body, Rng& rng) {
  const int d = body.dim();
  const Vector& pole = body.interior();
  Vector h = standard_normal(d, rng);
  if (body.kind() == BodyKind::kTruncatedSimplex) h.array() -= h.mean();
  if (h.norm() == 0.0) return pole;
  // Gauge is positively homogeneous in the displacement around the pole.
  const Vector probe = h * (1e-3 / h.norm());
  const double reach = minkowsky(body, pole, pole + probe) * 1e3 * h.norm();
  const double t = 0.98 * std::pow(rng.uniform(), 1.0 / d);
  return pole + h * (t / reach);
}

}  // namespace hpb
