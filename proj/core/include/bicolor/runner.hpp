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
#ifndef BICOLOR_RUNNER_HPP_
#define BICOLOR_RUNNER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bicolor/accounting.hpp"
#include "bicolor/algorithm.hpp"
#include "bicolor/metrics.hpp"

namespace bicolor {

/// Quantity compared against StoppingRule::target, each relative to t = 0.
enum class StopMetric {
  rel_dist,    // ||xbar - x*||^2 / ||x^0 - x*||^2
  rel_subopt,  // (F(xbar) - F*) / (F(xbar^0) - F*)
  rel_psi,     // Psi^t / Psi^0
};

struct StoppingRule {
  std::uint64_t max_iterations = 1000;
  std::optional<double> target;
  StopMetric metric = StopMetric::rel_dist;
  /// Stop once cumulative TotalCom reaches this many bits.
  std::optional<double> bit_budget;
  /// Declare divergence when the stop metric exceeds this (or is NaN).
  double divergence_factor = 1e3;
};

struct RunOptions {
  StoppingRule stop;
  /// Record every this many iterations (the first and last are always kept).
  std::uint64_t record_every = 1;
  CostModel cost;
  bool check_invariants = true;
  std::string fingerprint;
};

enum class RunStatus { max_iterations, target_reached, bit_budget_exhausted, diverged };

const char* to_string(RunStatus status);

struct RunTrace {
  std::string fingerprint;
  /// Variant name within an experiment, e.g. "decreasing" or "constant".
  std::string label;
  std::uint64_t seed = 0;
  std::vector<MetricRecord> records;
  double wall_seconds = 0;
  RunStatus status = RunStatus::max_iterations;
  std::uint64_t iterations = 0;
  std::uint64_t rounds = 0;
  std::uint64_t up_bits = 0;
  std::uint64_t down_bits = 0;
  double total_bits = 0;
  /// Last value of the stop metric.
  double final_metric = 0;
};

/// Iterates step() from the initial state until a stopping condition holds.
/// A record's `communicated` flag is set when any round occurred since the
/// previous record. Psi uses p_t in place of p under a decreasing schedule.
RunTrace run(const ProblemInstance& problem, const AlgoConfig& config,
             const InitMode& init, const ReferenceSolution& ref,
             std::uint64_t seed, const RunOptions& options);

}  // namespace bicolor

#endif  // BICOLOR_RUNNER_HPP_
