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

#include "hpb/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hpb {

namespace {

// Oblivious randomness depends on (seed, round) only.
Rng round_rng(std::uint64_t seed, int t) {
  return Rng(seed).split(static_cast<std::uint64_t>(t));
}

std::vector<Vector> extreme_points(const ConvexBody& body) {
  switch (body.kind()) {
    case BodyKind::kPolytope:
      return polytope_vertices(body);
    case BodyKind::kTruncatedSimplex: {
      std::vector<Vector> out;
      const int d = body.dim();
      const double f = body.floor();
      for (int i = 0; i < d; ++i) {
        Vector v = Vector::Constant(d, f);
        v(i) = 1.0 - (d - 1) * f;
        out.push_back(v);
      }
      return out;
    }
    case BodyKind::kBall:
      break;
  }
  return {};
}

}  // namespace

AdversaryKind parse_adversary_kind(const std::string& name) {
  if (name == "oblivious-stochastic-gap") return AdversaryKind::kStochasticGap;
  if (name == "oblivious-fixed-sequence") return AdversaryKind::kFixedSequence;
  if (name == "adaptive-follow-the-learner")
    return AdversaryKind::kFollowTheLearner;
  throw std::invalid_argument("unknown adversary kind: " + name);
}

std::string adversary_kind_name(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kStochasticGap:
      return "oblivious-stochastic-gap";
    case AdversaryKind::kFixedSequence:
      return "oblivious-fixed-sequence";
    case AdversaryKind::kFollowTheLearner:
      return "adaptive-follow-the-learner";
  }
  return "";
}

MabAdversary::MabAdversary(AdversarySpec spec, int d)
    : spec_(std::move(spec)), d_(d) {
  if (spec_.best < 0 || spec_.best >= d_)
    throw std::invalid_argument("best arm out of range");
  if (spec_.best_mean < 0.0 || spec_.best_mean + spec_.gap > 1.0 ||
      spec_.gap < 0.0)
    throw std::invalid_argument("gap instance means must lie in [0, 1]");
  if (spec_.kind == AdversaryKind::kFixedSequence) {
    if (spec_.sequence.rows() == 0 || spec_.sequence.cols() != d_)
      throw std::invalid_argument("fixed sequence must have d columns");
    if (spec_.sequence.minCoeff() < 0.0 || spec_.sequence.maxCoeff() > 1.0)
      throw std::invalid_argument("fixed sequence entries must lie in [0, 1]");
  }
}

Vector MabAdversary::next_loss(int t, const std::vector<int>& arms) const {
  Vector loss(d_);
  switch (spec_.kind) {
    case AdversaryKind::kStochasticGap: {
      Rng rng = round_rng(spec_.seed, t);
      for (int i = 0; i < d_; ++i) {
        const double mean = i == spec_.best ? spec_.best_mean
                                            : spec_.best_mean + spec_.gap;
        loss(i) = rng.bernoulli(mean) ? 1.0 : 0.0;
      }
      if (spec_.small_loss) loss(spec_.best) = 0.0;
      break;
    }
    case AdversaryKind::kFixedSequence:
      loss = spec_.sequence.row((t - 1) % spec_.sequence.rows()).transpose();
      break;
    case AdversaryKind::kFollowTheLearner: {
      loss.setConstant(spec_.low);
      if (!arms.empty()) {
        const int prev = arms.back();
        for (int k = -spec_.neighborhood; k <= spec_.neighborhood; ++k)
          loss(((prev + k) % d_ + d_) % d_) = 1.0;
      }
      break;
    }
  }
  return loss;
}

double body_abs_max(const ConvexBody& body, const Vector& loss) {
  if (body.kind() == BodyKind::kBall)
    return std::abs(body.center().dot(loss)) + body.radius() * loss.norm();
  double m = 0.0;
  for (const Vector& v : extreme_points(body)) m = std::max(m, std::abs(v.dot(loss)));
  return m;
}

double body_min(const ConvexBody& body, const Vector& loss, Vector* argmin) {
  if (body.kind() == BodyKind::kBall) {
    const double n = loss.norm();
    const Vector u = n > 0.0 ? Vector(body.center() - body.radius() / n * loss)
                             : body.center();
    if (argmin) *argmin = u;
    return u.dot(loss);
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& v : extreme_points(body)) {
    const double val = v.dot(loss);
    if (val < best) {
      best = val;
      if (argmin) *argmin = v;
    }
  }
  return best;
}

LinearAdversary::LinearAdversary(AdversarySpec spec, ConvexBody body)
    : spec_(std::move(spec)), body_(std::move(body)) {
  const int d = body_.dim();
  if (spec_.theta.size() == 0) spec_.theta = Vector::Unit(d, 0) * 0.5;
  if (spec_.theta.size() != d)
    throw std::invalid_argument("theta has the wrong dimension");
  if (spec_.kind == AdversaryKind::kFixedSequence && spec_.sequence.cols() != d)
    throw std::invalid_argument("fixed sequence must have d columns");
  if (spec_.nonnegative) {
    bool ok;
    if (body_.kind() == BodyKind::kBall) {
      ok = (body_.center().array() >= body_.radius()).all();
    } else {
      ok = true;
      for (const Vector& v : extreme_points(body_)) ok = ok && v.minCoeff() >= 0.0;
    }
    if (!ok)
      throw std::invalid_argument(
          "nonnegative losses need a body inside the nonnegative orthant");
  }
}

LinearLoss LinearAdversary::normalize(Vector loss) const {
  if (spec_.nonnegative) loss = loss.cwiseMax(0.0);
  LinearLoss out{std::move(loss), false};
  const double m = body_abs_max(body_, out.loss);
  if (m > 1.0) {
    out.loss /= m;
    out.rescaled = true;
  }
  return out;
}

LinearLoss LinearAdversary::next_loss(int t,
                                      const std::vector<Vector>& actions) const {
  const int d = body_.dim();
  switch (spec_.kind) {
    case AdversaryKind::kStochasticGap: {
      Rng rng = round_rng(spec_.seed, t);
      const Vector dir = standard_normal(d, rng).normalized();
      return normalize(spec_.theta + spec_.noise * dir);
    }
    case AdversaryKind::kFixedSequence:
      return normalize(
          spec_.sequence.row((t - 1) % spec_.sequence.rows()).transpose());
    case AdversaryKind::kFollowTheLearner: {
      Rng rng = round_rng(spec_.seed, t);
      Vector loss = spec_.low * standard_normal(d, rng).normalized();
      if (!actions.empty() && actions.back().norm() > 0.0) {
        // Push against the direction just played.
        const Vector& prev = actions.back();
        loss += prev / body_abs_max(body_, prev);
      }
      return normalize(loss);
    }
  }
  return {};
}

MdpAdversary::MdpAdversary(AdversarySpec spec, MdpLayout layout)
    : spec_(std::move(spec)), layout_(std::move(layout)) {
  if (spec_.best < 0 || spec_.best >= layout_.num_actions())
    throw std::invalid_argument("best action out of range");
  if (spec_.best_mean < 0.0 || spec_.best_mean + spec_.gap > 1.0 ||
      spec_.gap < 0.0)
    throw std::invalid_argument("gap instance means must lie in [0, 1]");
  if (spec_.kind == AdversaryKind::kFixedSequence) {
    if (spec_.sequence.rows() == 0 || spec_.sequence.cols() != layout_.num_pairs())
      throw std::invalid_argument("fixed sequence must have one column per pair");
    if (spec_.sequence.minCoeff() < 0.0 || spec_.sequence.maxCoeff() > 1.0)
      throw std::invalid_argument("fixed sequence entries must lie in [0, 1]");
  }
}

Vector MdpAdversary::next_loss(int t,
                               const std::vector<Trajectory>& history) const {
  const int n = layout_.num_pairs();
  Vector loss(n);
  switch (spec_.kind) {
    case AdversaryKind::kStochasticGap: {
      Rng rng = round_rng(spec_.seed, t);
      for (int x = 0; x < layout_.num_active_states(); ++x) {
        for (int a = 0; a < layout_.num_actions(); ++a) {
          const bool best = a == spec_.best;
          const double mean = best ? spec_.best_mean : spec_.best_mean + spec_.gap;
          double v = rng.bernoulli(mean) ? 1.0 : 0.0;
          if (best && spec_.small_loss) v = 0.0;
          loss(layout_.pair(x, a)) = v;
        }
      }
      break;
    }
    case AdversaryKind::kFixedSequence:
      loss = spec_.sequence.row((t - 1) % spec_.sequence.rows()).transpose();
      break;
    case AdversaryKind::kFollowTheLearner:
      loss.setConstant(spec_.low);
      if (!history.empty())
        for (const EpisodeStep& st : history.back().steps)
          loss(layout_.pair(st.x, st.a)) = 1.0;
      break;
  }
  return loss;
}

Policy MdpAdversary::designated_policy() const {
  Policy pi = Policy::Zero(layout_.num_active_states(), layout_.num_actions());
  pi.col(spec_.best).setOnes();
  return pi;
}

}  // namespace hpb
