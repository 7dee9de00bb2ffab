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
#include "bicolor/accounting.hpp"

#include <algorithm>

namespace bicolor {
namespace {

std::uint64_t billed(const MessageRecord& m, const CostModel& model) {
  return model.count_index_overhead ? m.bits : m.bits - m.index_bits;
}

}  // namespace

double totalcom(std::uint64_t up_bits, std::uint64_t down_bits,
                const CostModel& model) {
  return static_cast<double>(up_bits) +
         model.alpha * static_cast<double>(down_bits);
}

RoundCharge charge(const RoundOutcome& outcome, const CostModel& model) {
  RoundCharge c;
  if (!outcome.communicated) return c;
  for (const auto& m : outcome.uplink) {
    const std::uint64_t b = billed(m, model);
    if (model.uplink_policy == UplinkPolicy::sum_over_clients)
      c.up_bits += b;
    else
      c.up_bits = std::max(c.up_bits, b);
  }
  c.down_bits = billed(outcome.downlink, model);
  return c;
}

CumulativeBits accumulate(std::span<const RoundCharge> rounds,
                          const CostModel& model) {
  CumulativeBits out;
  out.up.reserve(rounds.size());
  out.down.reserve(rounds.size());
  out.total.reserve(rounds.size());
  std::uint64_t up = 0;
  std::uint64_t down = 0;
  for (const auto& r : rounds) {
    up += r.up_bits;
    down += r.down_bits;
    out.up.push_back(up);
    out.down.push_back(down);
    out.total.push_back(totalcom(up, down, model));
  }
  return out;
}

}  // namespace bicolor
