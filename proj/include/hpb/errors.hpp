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

#ifndef HPB_ERRORS_HPP_
#define HPB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace hpb {

// Bad matrix input: asymmetric, not positive definite, or ill-conditioned.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Newton solver failed to reach its certificate.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double grad_norm)
      : std::runtime_error(what), grad_norm_(grad_norm) {}
  double grad_norm() const { return grad_norm_; }

 private:
  double grad_norm_;
};

// Empty feasible region (e.g. a confidence set that excludes the floor).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pathwise inequality or state invariant failed in check mode.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hpb

#endif  // HPB_ERRORS_HPP_
