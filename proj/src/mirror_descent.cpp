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

#include "hpb/mirror_descent.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "hpb/errors.hpp"

namespace hpb {

SmoothFunction from_barrier(const Barrier& psi, double scale) {
  return SmoothFunction{
      [psi](const Vector& x) { return psi.in_domain(x); },
      [psi, scale](const Vector& x) { return scale * psi.value(x); },
      [psi, scale](const Vector& x) -> Vector { return scale * psi.gradient(x); },
      [psi, scale](const Vector& x) -> Matrix { return scale * psi.hessian(x); }};
}

SmoothFunction weighted_log_barrier(Vector weights) {
  return SmoothFunction{
      [](const Vector& x) { return (x.array() > 0.0).all(); },
      [weights](const Vector& x) {
        return -(weights.array() * x.array().log()).sum();
      },
      [weights](const Vector& x) -> Vector {
        return -weights.cwiseQuotient(x);
      },
      [weights](const Vector& x) -> Matrix {
        return weights.cwiseQuotient(x.cwiseAbs2()).asDiagonal();
      }};
}

InequalitySet linear_inequalities(Matrix c, Vector d) {
  InequalitySet set;
  set.slacks = [c, d](const Vector& x) -> Vector { return d - c * x; };
  set.jacobian = [c](const Vector&) -> Matrix { return -c; };
  return set;
}

InequalitySet ball_inequality(Vector center, double radius) {
  InequalitySet set;
  const double r2 = radius * radius;
  set.slacks = [center, r2](const Vector& x) -> Vector {
    return Vector::Constant(1, r2 - (x - center).squaredNorm());
  };
  set.jacobian = [center](const Vector& x) -> Matrix {
    return -2.0 * (x - center).transpose();
  };
  set.curvature = [](const Vector& x, const Vector& c) -> Matrix {
    return -2.0 * c(0) * Matrix::Identity(x.size(), x.size());
  };
  return set;
}

InequalitySet body_inequalities(const ConvexBody& body) {
  switch (body.kind()) {
    case BodyKind::kPolytope: return linear_inequalities(body.a(), body.b());
    case BodyKind::kBall: return ball_inequality(body.center(), body.radius());
    case BodyKind::kTruncatedSimplex:
      return linear_inequalities(-Matrix::Identity(body.dim(), body.dim()),
                                 -Vector::Constant(body.dim(), body.floor()));
  }
  return {};
}

double bregman(const SmoothFunction& psi, const Vector& u, const Vector& w) {
  if (!psi.in_domain(u) || !psi.in_domain(w))
    throw std::domain_error("bregman: points must be interior");
  return psi.value(u) - psi.value(w) - psi.gradient(w).dot(u - w);
}

double bregman(const Barrier& psi, const Vector& u, const Vector& w) {
  return psi.value(u) - psi.value(w) - psi.gradient(w).dot(u - w);
}

namespace {

struct Reduction {
  Matrix z;   // orthonormal null-space basis of a_eq
  Vector x0;  // feasible point for the equalities
};

Reduction reduce(const Matrix& a_eq, const Vector& b_eq, const Vector& start) {
  const Eigen::Index n = start.size();
  Reduction r;
  if (a_eq.rows() == 0) {
    r.z = Matrix::Identity(n, n);
    r.x0 = start;
    return r;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(a_eq.transpose());
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  r.z = q.rightCols(n - rank);
  const Vector resid = b_eq - a_eq * start;
  if (resid.cwiseAbs().maxCoeff() <= 1e-14) {
    r.x0 = start;
  } else {
    r.x0 = start + a_eq.completeOrthogonalDecomposition().solve(resid);
  }
  if ((a_eq * r.x0 - b_eq).cwiseAbs().maxCoeff() > 1e-9)
    throw InfeasibleError("equality constraints are inconsistent");
  return r;
}

// Jacobi-scaled solve of the reduced Newton system h dy = -g.
Vector newton_direction(const Matrix& h, const Vector& g) {
  const Vector dscale = h.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  const Matrix hs = dscale.asDiagonal() * h * dscale.asDiagonal();
  Eigen::LDLT<Matrix> ldlt(hs);
  Vector u = ldlt.solve(-(dscale.asDiagonal() * g));
  if (ldlt.info() != Eigen::Success || !u.allFinite()) {
    const Matrix reg = hs + 1e-12 * Matrix::Identity(hs.rows(), hs.cols());
    u = reg.completeOrthogonalDecomposition().solve(-(dscale.asDiagonal() * g));
  }
  return dscale.asDiagonal() * u;
}

double dual_local_norm(const Matrix& h, const Vector& g) {
  if (g.size() == 0) return 0.0;
  const Vector d = newton_direction(h, g);
  return std::sqrt(std::max(0.0, -g.dot(d)));
}

class PathSolver {
 public:
  PathSolver(const OmdProblem& p, const SolverOptions& opt, Reduction red)
      : p_(p), opt_(opt), z_(std::move(red.z)), x_(std::move(red.x0)) {
    lin_ = p_.g - p_.reg.gradient(p_.w_ref);
  }

  OmdResult run() {
    if (!feasible(x_))
      throw InfeasibleError("starting point is not strictly feasible");
    OmdResult res;
    if (z_.cols() == 0) {
      res.w = x_;
      return res;
    }
    std::vector<double> mus;
    if (p_.extra) {
      for (double mu = opt_.mu_start; mu >= opt_.mu_end * 0.999;
           mu *= opt_.mu_factor)
        mus.push_back(mu);
    } else {
      mus.push_back(0.0);
    }
    for (size_t s = 0; s < mus.size(); ++s)
      stage(mus[s], s + 1 == mus.size(), res);
    res.w = x_;
    res.certificate = certificate(mus.back());
    return res;
  }

 private:
  bool feasible(const Vector& x) const {
    if (!x.allFinite() || !p_.reg.in_domain(x)) return false;
    return !p_.extra || (p_.extra->slacks(x).array() > 0.0).all();
  }

  double objective(const Vector& x, double mu) const {
    double f = lin_.dot(x) + p_.reg.value(x);
    if (mu > 0.0) f -= mu * p_.extra->slacks(x).array().log().sum();
    return f;
  }

  Vector full_gradient(const Vector& x, double mu) const {
    Vector g = lin_ + p_.reg.gradient(x);
    if (mu > 0.0) {
      const Vector inv = p_.extra->slacks(x).cwiseInverse();
      g -= mu * (p_.extra->jacobian(x).transpose() * inv);
    }
    return g;
  }

  Matrix reduced_hessian(const Vector& x, double mu, bool reg_only) const {
    Matrix h = p_.reg.hessian(x);
    if (mu > 0.0 && !reg_only) {
      const Vector inv = p_.extra->slacks(x).cwiseInverse();
      const Matrix js = inv.asDiagonal() * p_.extra->jacobian(x);
      h += mu * (js.transpose() * js);
      if (p_.extra->curvature) h -= mu * p_.extra->curvature(x, inv);
    }
    return z_.transpose() * h * z_;
  }

  // KKT residual with barrier multipliers mu / s, and again with the
  // near-active multipliers refit by nonnegative least squares.
  double certificate(double mu) const {
    const Matrix k = reduced_hessian(x_, mu, true);
    const Vector gbar = z_.transpose() * full_gradient(x_, mu);
    const double barrier_est = dual_local_norm(k, gbar);
    if (!p_.extra || mu == 0.0) return barrier_est;
    const Vector s = p_.extra->slacks(x_);
    const Matrix j = p_.extra->jacobian(x_);
    const double xscale = 1.0 + x_.cwiseAbs().maxCoeff();
    std::vector<int> active;
    Vector base = lin_ + p_.reg.gradient(x_);
    for (int i = 0; i < s.size(); ++i) {
      if (s(i) <= 1e-6 * (1.0 + j.row(i).norm() * xscale))
        active.push_back(i);
      else
        base -= (mu / s(i)) * j.row(i).transpose();
    }
    if (active.empty()) return barrier_est;
    const Vector r0 = z_.transpose() * base;
    Eigen::LDLT<Matrix> kf(k);
    const Vector mr0 = kf.solve(r0);
    while (!active.empty()) {
      Matrix g(z_.cols(), static_cast<Eigen::Index>(active.size()));
      for (size_t a = 0; a < active.size(); ++a)
        g.col(a) = z_.transpose() * j.row(active[a]).transpose();
      const Matrix mg = kf.solve(g);
      const Matrix normal = g.transpose() * mg;
      // KKT: grad F = sum_i lambda_i grad s_i with lambda >= 0.
      const Vector lam = normal.completeOrthogonalDecomposition().solve(g.transpose() * mr0);
      Eigen::Index worst;
      if (lam.minCoeff(&worst) < 0.0) {
        active.erase(active.begin() + worst);
        continue;
      }
      const Vector r = r0 - g * lam;
      return std::min(barrier_est, std::sqrt(std::max(0.0, r.dot(kf.solve(r)))));
    }
    return std::min(barrier_est, std::sqrt(std::max(0.0, r0.dot(mr0))));
  }

  void stage(double mu, bool last, OmdResult& res) {
    const double stage_tol = last ? opt_.tolerance : 1e-6;
    double prev_lambda = std::numeric_limits<double>::infinity();
    const int total = opt_.max_iterations + opt_.fallback_iterations;
    for (int it = 0; it < total; ++it) {
      const bool fallback = it >= opt_.max_iterations;
      const Vector g = z_.transpose() * full_gradient(x_, mu);
      const Matrix h = reduced_hessian(x_, mu, false);
      const Vector dy = newton_direction(h, g);
      const double slope = g.dot(dy);
      const double lambda = std::sqrt(std::max(0.0, -slope));
      if (prev_lambda < 0.25 && lambda > prev_lambda * (1.0 + 1e-6) + 1e-13)
        ++res.monotonicity_breaks;
      prev_lambda = lambda;
      const double done = last ? certificate(mu) : lambda;
      if (done <= stage_tol) return;
      ++res.newton_iterations;
      const Vector dx = z_ * dy;
      const double f0 = objective(x_, mu);
      double t = fallback ? opt_.fallback_damping : 1.0;
      bool moved = false;
      for (int k = 0; k < 80; ++k, t *= 0.5) {
        const Vector xn = x_ + t * dx;
        if (!feasible(xn)) continue;
        const double f1 = objective(xn, mu);
        const double noise = 1e-13 * (1.0 + std::abs(f0));
        if (f1 <= f0 + opt_.armijo * t * slope + noise || lambda < 1e-4) {
          moved = (xn - x_).cwiseAbs().maxCoeff() > 0.0;
          x_ = xn;
          break;
        }
      }
      if (!moved) break;
    }
    const double cert = last ? certificate(mu) : 0.0;
    if (!last || cert <= stage_tol) return;
    std::ostringstream os;
    os << "Newton solver did not converge (mu=" << mu
       << ", gradient norm=" << cert << ")";
    throw SolverError(os.str(), cert);
  }

  const OmdProblem& p_;
  const SolverOptions& opt_;
  Matrix z_;
  Vector x_;
  Vector lin_;
};

}  // namespace

OmdResult omd_step(const OmdProblem& p, const SolverOptions& opt) {
  if (p.g.size() != p.w_ref.size())
    throw std::invalid_argument("omd_step: dimension mismatch");
  if (!p.reg.in_domain(p.w_ref))
    throw std::invalid_argument("omd_step: reference point outside domain");
  Reduction red = reduce(p.a_eq, p.b_eq, p.start ? *p.start : p.w_ref);
  PathSolver solver(p, opt, std::move(red));
  return solver.run();
}

OmdResult analytic_center_detail(const Barrier& psi, const SolverOptions& opt) {
  OmdProblem p;
  p.reg = from_barrier(psi);
  p.w_ref = psi.body().interior();
  // <g, x> + D(x, x_ref) with g = grad psi(x_ref) equals psi up to a constant.
  p.g = psi.gradient(p.w_ref);
  if (psi.body().kind() == BodyKind::kTruncatedSimplex) {
    p.a_eq = Matrix::Ones(1, psi.dim());
    p.b_eq = Vector::Ones(1);
  }
  return omd_step(p, opt);
}

Vector analytic_center(const Barrier& psi) {
  return analytic_center_detail(psi).w;
}

}  // namespace hpb
