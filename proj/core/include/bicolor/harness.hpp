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
#ifndef BICOLOR_HARNESS_HPP_
#define BICOLOR_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bicolor/algorithm.hpp"
#include "bicolor/metrics.hpp"
#include "bicolor/objective.hpp"
#include "bicolor/runner.hpp"

namespace bicolor {

/// Flat `key = value` experiment description. Strings may be quoted, lists
/// are written `[a, b, c]`, and `#` starts a comment. Unset optionals fall
/// back to the documented defaults when the experiment is built.
struct ExperimentConfig {
  // Data. An empty `dataset` selects the synthetic generator.
  std::string dataset;
  std::string synthetic = "quadratic";  // quadratic | logistic
  std::size_t synthetic_rows = 1000;
  std::size_t synthetic_dim = 10;
  double heterogeneity = 1.0;
  std::optional<std::size_t> dimension;
  std::uint64_t data_seed = 0;

  // Problem.
  std::size_t n = 5;
  std::optional<double> kappa;
  std::optional<double> mu;
  bool fold_regularizers = false;
  std::string init = "zeros";  // zeros | warm

  // Compression.
  double alpha = 1.0;
  std::string strategy = "subset_k_natural";  // | rand_K_natural | custom
  std::string uplink = "natural";    // custom: identity | natural | rand_k | rand_k+natural
  std::string downlink = "natural";
  std::optional<std::size_t> k;
  std::optional<std::size_t> K;
  std::optional<std::size_t> K_s;
  std::optional<double> omega_av;
  bool strict_float32 = false;

  // Schedule.
  std::string schedule = "constant";  // constant | decreasing
  std::optional<double> p;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> C;
  bool compare_constant = false;

  // Stepsize, in units of 1/L.
  std::optional<double> gamma;
  std::vector<double> gamma_grid = {0.25, 0.5, 1, 2, 4, 8, 16};
  std::uint64_t sweep_iters = 200;

  // Runs.
  std::vector<std::uint64_t> seeds = {0};
  std::string stop_metric = "rel_dist";  // rel_dist | rel_subopt | rel_psi
  std::optional<double> target;
  std::optional<double> bit_budget;
  std::uint64_t max_iters = 1000;
  std::uint64_t record_every = 1;
  std::string uplink_policy = "sum";  // sum | max
  bool count_index_overhead = true;
  std::string output = "out";
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical text: every key in a fixed order, unset optionals omitted.
std::string serialize(const ExperimentConfig& config);
/// 16 hex digits of FNV-1a over serialize(config).
std::string fingerprint(const ExperimentConfig& config);

struct Experiment {
  ProblemInstance problem;
  AlgoConfig algo;
  /// Stepsize in units of 1/L; algo.gamma = gamma_units / L.
  double gamma_units = 1.0;
  InitMode init;
  RunOptions options;
  /// Expected rounds are matched over options.stop.max_iterations.
  std::optional<AlgoConfig> constant_variant;
  /// Variance parameters the stepsizes came from.
  double omega = 0;
  double omega_s = 0;
};

/// Loads or generates data, sets mu from kappa, picks compressors and
/// parameters for the configured strategy.
Experiment build_experiment(const ExperimentConfig& config);

/// Stepsize in units of 1/L applied to an experiment's algorithm config.
AlgoConfig with_gamma(const Experiment& e, const AlgoConfig& algo,
                      double gamma_units);

struct SweepEntry {
  double gamma_units = 0;
  double metric = 0;  // mean final stop metric across seeds
  bool diverged = false;
  std::string evidence;
};

struct SweepResult {
  double best = 0;
  std::vector<SweepEntry> entries;
};

/// Runs every grid value for sweep_iters iterations on every seed and
/// returns the value with the smallest mean stop metric. Entries that
/// produce NaN, exceed the divergence factor, or throw are excluded.
SweepResult sweep_gamma(const Experiment& experiment,
                        const ExperimentConfig& config,
                        const ReferenceSolution& ref);

struct ExperimentResult {
  std::vector<RunTrace> traces;
  double gamma_units = 0;
  std::optional<SweepResult> sweep;
};

/// Full pipeline: build, solve the reference, tune gamma when unset, then
/// run every seed (and the matched constant-p variant when requested).
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Runs fn(0..count-1) on a pool of BICOLOR_WORKERS threads (default: the
/// hardware concurrency). Exceptions are rethrown after all tasks finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);
std::size_t worker_count();

enum class OutputFormat { csv, svg };

inline constexpr const char* kCsvHeader =
    "t,communicated,up_bits,down_bits,total_bits_cum,psi,subopt,bregman_sum,"
    "consensus_client,consensus_y,seed";

/// One row per record of every trace. Doubles use shortest round-trip form.
void write_csv(std::ostream& out, const std::vector<RunTrace>& traces);
std::vector<MetricRecord> parse_csv(std::istream& in);
/// Per (label, t): seed count, mean TotalCom and mean/min/max stop metric.
void write_summary_csv(std::ostream& out, const std::vector<RunTrace>& traces,
                       StopMetric metric);
/// Log-linear plot of the stop metric against cumulative TotalCom bits.
void write_svg(std::ostream& out, const std::vector<RunTrace>& traces,
               StopMetric metric);

/// Writes <stem>.csv and <stem>_summary.csv, or <stem>.svg, under dir.
std::vector<std::filesystem::path> emit(const std::vector<RunTrace>& traces,
                                        OutputFormat format,
                                        const std::filesystem::path& dir,
                                        const std::string& stem,
                                        StopMetric metric);

StopMetric parse_stop_metric(const std::string& name);
std::string format_double(double v);

}  // namespace bicolor

#endif  // BICOLOR_HARNESS_HPP_
