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

#ifndef HPB_ENVIRONMENT_HPP_
#define HPB_ENVIRONMENT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hpb/barrier.hpp"
#include "hpb/linalg.hpp"
#include "hpb/mdp.hpp"

namespace hpb {

enum class AdversaryKind { kStochasticGap, kFixedSequence, kFollowTheLearner };

// "oblivious-stochastic-gap", "oblivious-fixed-sequence",
// "adaptive-follow-the-learner".
AdversaryKind parse_adversary_kind(const std::string& name);
std::string adversary_kind_name(AdversaryKind kind);

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::kStochasticGap;
  std::uint64_t seed = 0;
  // Stochastic gap: the best arm (or action in every state) has mean
  // best_mean, the others best_mean + gap. Losses are Bernoulli draws.
  double gap = 0.2;
  double best_mean = 0.1;
  int best = 0;
  // Best arm / action loss identically zero.
  bool small_loss = false;
  // Follow-the-learner: loss 1 on the previous action and its cyclic
  // neighbours within `neighborhood`, `low` elsewhere.
  double low = 0.1;
  int neighborhood = 0;
  // Linear setting: loss theta + noise * (uniform on the unit sphere),
  // rescaled onto the normalized range when needed.
  Vector theta;
  double noise = 0.1;
  bool nonnegative = false;
  // Fixed sequence: row t (cyclically) is the loss of round t.
  Matrix sequence;
};

class MabAdversary {
 public:
  MabAdversary(AdversarySpec spec, int d);
  // Round t counts from 1; arms holds the learner's past arms.
  Vector next_loss(int t, const std::vector<int>& arms) const;
  int best_arm() const { return spec_.best; }

 private:
  AdversarySpec spec_;
  int d_;
};

// max over the body of |<w, loss>|.
double body_abs_max(const ConvexBody& body, const Vector& loss);
// min over the body of <w, loss> and a minimizer.
double body_min(const ConvexBody& body, const Vector& loss, Vector* argmin);

struct LinearLoss {
  Vector loss;
  bool rescaled = false;
};

class LinearAdversary {
 public:
  // Throws std::invalid_argument if nonnegative mode is requested for a body
  // that leaves the nonnegative orthant.
  LinearAdversary(AdversarySpec spec, ConvexBody body);
  LinearLoss next_loss(int t, const std::vector<Vector>& actions) const;

 private:
  LinearLoss normalize(Vector loss) const;

  AdversarySpec spec_;
  ConvexBody body_;
};

class MdpAdversary {
 public:
  MdpAdversary(AdversarySpec spec, MdpLayout layout);
  Vector next_loss(int t, const std::vector<Trajectory>& history) const;
  // The policy playing the designated best action everywhere.
  Policy designated_policy() const;

 private:
  AdversarySpec spec_;
  MdpLayout layout_;
};

}  // namespace hpb

#endif  // HPB_ENVIRONMENT_HPP_
