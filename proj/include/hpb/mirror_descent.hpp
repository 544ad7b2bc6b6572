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

#ifndef HPB_MIRROR_DESCENT_HPP_
#define HPB_MIRROR_DESCENT_HPP_

#include <functional>
#include <optional>

#include "hpb/barrier.hpp"
#include "hpb/linalg.hpp"

namespace hpb {

// Convex function with an open domain, evaluated through callbacks.
struct SmoothFunction {
  std::function<bool(const Vector&)> in_domain;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
};

// scale * psi.
SmoothFunction from_barrier(const Barrier& psi, double scale = 1.0);
// sum_i weights_i * (-ln x_i).
SmoothFunction weighted_log_barrier(Vector weights);

// Constraints s_i(x) >= 0 with concave slack functions s_i.
struct InequalitySet {
  std::function<Vector(const Vector&)> slacks;
  // Row i is the gradient of s_i.
  std::function<Matrix(const Vector&)> jacobian;
  // sum_i c_i * hess s_i(x); empty for linear slacks.
  std::function<Matrix(const Vector&, const Vector&)> curvature;
};

// d - C x >= 0.
InequalitySet linear_inequalities(Matrix c, Vector d);
// r^2 - |x - center|^2 >= 0.
InequalitySet ball_inequality(Vector center, double radius);
// The body's own constraints (polytope or ball).
InequalitySet body_inequalities(const ConvexBody& body);

double bregman(const SmoothFunction& psi, const Vector& u, const Vector& w);
double bregman(const Barrier& psi, const Vector& u, const Vector& w);

// argmin_x <g, x> + D_reg(x, w_ref) subject to a_eq x = b_eq and the extra
// inequalities. The regularizer carries the learning rates.
struct OmdProblem {
  Vector g;
  Vector w_ref;
  SmoothFunction reg;
  std::optional<InequalitySet> extra;
  Matrix a_eq;
  Vector b_eq;
  // Strictly feasible starting point when w_ref is not.
  std::optional<Vector> start;
};

struct OmdResult {
  Vector w;
  // KKT residual: reduced gradient of the objective minus the best
  // nonnegative combination of near-active constraint gradients, in the
  // dual local norm of the regularizer.
  double certificate = 0.0;
  int newton_iterations = 0;
  // Newton decrement increases observed inside the quadratic phase.
  int monotonicity_breaks = 0;
};

struct SolverOptions {
  double tolerance = 1e-9;
  int max_iterations = 200;
  int fallback_iterations = 400;
  double fallback_damping = 0.5;
  double armijo = 1e-4;
  double mu_start = 1.0;
  double mu_end = 1e-12;
  double mu_factor = 0.1;
};

OmdResult omd_step(const OmdProblem& p, const SolverOptions& opt = {});

// Minimizer of the barrier over its body, by damped Newton from the body's
// stored interior point.
OmdResult analytic_center_detail(const Barrier& psi,
                                 const SolverOptions& opt = {});
Vector analytic_center(const Barrier& psi);

}  // namespace hpb

#endif  // HPB_MIRROR_DESCENT_HPP_
