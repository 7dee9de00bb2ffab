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
#ifndef BICOLOR_ACCOUNTING_HPP_
#define BICOLOR_ACCOUNTING_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "bicolor/algorithm.hpp"

namespace bicolor {

enum class UplinkPolicy { sum_over_clients, max_over_clients };

struct CostModel {
  /// Weight of downlink bits relative to uplink bits.
  double alpha = 1.0;
  /// Charge ceil(log2 d) bits per transmitted index of sparse messages.
  bool count_index_overhead = true;
  UplinkPolicy uplink_policy = UplinkPolicy::sum_over_clients;
};

/// up + alpha * down
double totalcom(std::uint64_t up_bits, std::uint64_t down_bits,
                const CostModel& model);

struct RoundCharge {
  std::uint64_t up_bits = 0;
  std::uint64_t down_bits = 0;
};

/// Bits billed for one round under the model. Zero for silent rounds.
RoundCharge charge(const RoundOutcome& outcome, const CostModel& model);

struct CumulativeBits {
  std::vector<std::uint64_t> up;
  std::vector<std::uint64_t> down;
  std::vector<double> total;
};

/// Prefix sums of per-round charges.
CumulativeBits accumulate(std::span<const RoundCharge> rounds,
                          const CostModel& model);

}  // namespace bicolor

#endif  // BICOLOR_ACCOUNTING_HPP_
