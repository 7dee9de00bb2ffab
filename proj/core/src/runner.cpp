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
#include "bicolor/runner.hpp"

#include <chrono>
#include <cmath>

namespace bicolor {

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::max_iterations: return "max_iterations";
    case RunStatus::target_reached: return "target_reached";
    case RunStatus::bit_budget_exhausted: return "bit_budget_exhausted";
    case RunStatus::diverged: return "diverged";
  }
  return "unknown";
}

RunTrace run(const ProblemInstance& problem, const AlgoConfig& config,
             const InitMode& init, const ReferenceSolution& ref,
             std::uint64_t seed, const RunOptions& options) {
  config.validate(problem.n(), problem.d());
  const auto start = std::chrono::steady_clock::now();
  AlgoState state = init_state(problem, init);
  RunStreams streams = RunStreams::from_seed(seed, problem.n());

  RunTrace trace;
  trace.fingerprint = options.fingerprint;
  trace.seed = seed;

  auto p_for = [&](std::uint64_t t) {
    return config.schedule.p_at(std::max<std::uint64_t>(t, 1));
  };
  const double initial_dist =
      (state.mean_iterate() - ref.x_star).squaredNorm();
  auto context = [&]() {
    return MeasureContext{config.gamma, p_for(state.t), config.k, config.eta,
                          initial_dist};
  };

  MetricRecord first = measure(problem, state, ref, context());
  first.seed = seed;
  const double psi0 = first.psi;
  const double subopt0 = first.subopt;

  auto stop_metric = [&]() -> double {
    switch (options.stop.metric) {
      case StopMetric::rel_dist:
        return initial_dist > 0
                   ? (state.mean_iterate() - ref.x_star).squaredNorm() /
                         initial_dist
                   : 0.0;
      case StopMetric::rel_subopt: {
        const double s =
            std::max(0.0, problem.value(state.mean_iterate()) - ref.f_star);
        return subopt0 > 0 ? s / subopt0 : 0.0;
      }
      case StopMetric::rel_psi:
        return psi0 > 0
                   ? lyapunov(state, ref, config.gamma, p_for(state.t),
                              config.k, problem.d(), config.eta) /
                         psi0
                   : 0.0;
    }
    return 0.0;
  };
  auto from_record = [&](const MetricRecord& r) -> double {
    switch (options.stop.metric) {
      case StopMetric::rel_dist: return r.rel_dist;
      case StopMetric::rel_subopt: return subopt0 > 0 ? r.subopt / subopt0 : 0.0;
      case StopMetric::rel_psi: return psi0 > 0 ? r.psi / psi0 : 0.0;
    }
    return 0.0;
  };

  trace.records.push_back(first);
  trace.final_metric = from_record(first);

  std::uint64_t up_since = 0;
  std::uint64_t down_since = 0;
  bool comm_since = false;
  StepOptions step_options;
  step_options.check_invariants = options.check_invariants;
  const std::uint64_t every = std::max<std::uint64_t>(1, options.record_every);

  auto diverged = [&](double m) {
    return !std::isfinite(m) || m > options.stop.divergence_factor;
  };

  if (options.stop.target && trace.final_metric <= *options.stop.target)
    trace.status = RunStatus::target_reached;
  else
    while (state.t < options.stop.max_iterations) {
      const RoundOutcome outcome =
          step(state, problem, config, streams, step_options);
      const RoundCharge c = charge(outcome, options.cost);
      if (outcome.communicated) {
        ++trace.rounds;
        comm_since = true;
      }
      up_since += c.up_bits;
      down_since += c.down_bits;
      trace.up_bits += c.up_bits;
      trace.down_bits += c.down_bits;
      trace.total_bits = totalcom(trace.up_bits, trace.down_bits, options.cost);

      bool done = false;
      std::optional<double> metric;
      if (options.stop.target) {
        metric = stop_metric();
        if (*metric <= *options.stop.target) {
          trace.status = RunStatus::target_reached;
          done = true;
        }
      }
      if (!done && options.stop.bit_budget &&
          trace.total_bits >= *options.stop.bit_budget) {
        trace.status = RunStatus::bit_budget_exhausted;
        done = true;
      }
      if (done || state.t % every == 0 || state.t == options.stop.max_iterations) {
        MetricRecord r = measure(problem, state, ref, context());
        r.seed = seed;
        r.communicated = comm_since;
        r.up_bits = up_since;
        r.down_bits = down_since;
        r.total_bits_cum = trace.total_bits;
        trace.records.push_back(r);
        up_since = down_since = 0;
        comm_since = false;
        if (!metric) metric = from_record(r);
      }
      if (metric) {
        trace.final_metric = *metric;
        if (!done && diverged(*metric)) {
          trace.status = RunStatus::diverged;
          done = true;
        }
      }
      if (done) break;
    }

  trace.iterations = state.t;
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return trace;
}

}  // namespace bicolor
