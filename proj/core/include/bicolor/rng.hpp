// Copyright 2026 The bicolor Authors. All Rights Reserved.
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
// =============================================================================
#ifndef BICOLOR_RNG_HPP_
#define BICOLOR_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace bicolor {

// SplitMix64 finalizer, used to derive well-separated substream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// A seeded random stream. All draws are computed from raw 64-bit engine
/// output, so sequences are identical across standard library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent substream `stream` of the run seeded with `seed`.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix_seed(seed, stream));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Uniform k-subset of [0, d) by partial Fisher-Yates, returned ascending.
std::vector<std::uint32_t> sample_subset(Rng& rng, std::size_t d,
                                         std::size_t k);

}  // namespace bicolor

#endif  // BICOLOR_RNG_HPP_
