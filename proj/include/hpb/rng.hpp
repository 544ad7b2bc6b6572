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

#ifndef HPB_RNG_HPP_
#define HPB_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace hpb {

// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Seeded random source. Sampling routines are written out by hand so the
// output sequence does not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  // Independent child stream; does not advance this generator.
  Rng split(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  int categorical(const std::vector<double>& probs);
  template <typename Vec>
  int categorical_vec(const Vec& probs) {
    double u = uniform(), acc = 0.0;
    const int n = static_cast<int>(probs.size());
    for (int i = 0; i < n; ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    for (int i = n - 1; i >= 0; --i)
      if (probs[i] > 0) return i;
    return n - 1;
  }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hpb

#endif  // HPB_RNG_HPP_
