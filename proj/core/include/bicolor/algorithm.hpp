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
#ifndef BICOLOR_ALGORITHM_HPP_
#define BICOLOR_ALGORITHM_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bicolor/compressors.hpp"
#include "bicolor/objective.hpp"
#include "bicolor/rng.hpp"

namespace bicolor {

/// Communication probability p_t. Constant, or sqrt(b / (a + t)).
class PSchedule {
 public:
  enum class Kind { constant, decreasing };

  static PSchedule constant(double p);
  /// Requires b > 0 and a >= b - 1, so p_t <= 1 for t >= 1.
  static PSchedule decreasing(double a, double b);

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  double a() const { return a_; }
  double b() const { return b_; }

  /// Probability used by the coin that produces iterate t (t >= 1).
  double p_at(std::uint64_t t) const;

 private:
  PSchedule(Kind kind, double p, double a, double b)
      : kind_(kind), p_(p), a_(a), b_(b) {}
  Kind kind_;
  double p_;
  double a_;
  double b_;
};

struct AlgoConfig {
  double gamma = 0;
  double rho = 0;
  double rho_y = 0;
  double eta = 0;
  double eta_y = 0;
  std::size_t k = 0;
  PSchedule schedule = PSchedule::constant(1.0);
  std::vector<CompressorSpec> uplink_specs;
  CompressorSpec downlink_spec = CompressorSpec::identity(1);
  /// Averaged uplink variance the step sizes were derived from.
  double omega_av = 0;
  /// Round payload values to float32 before applying them.
  bool strict_float32 = false;

  /// Throws ContractViolation on a malformed configuration. The stepsize is
  /// only required to be positive; tuning grids go past 2/L on purpose.
  void validate(std::size_t n, std::size_t d) const;
};

struct AlgoState {
  std::vector<Eigen::VectorXd> x_clients;
  Eigen::VectorXd x_server;
  /// Replica of y held by each client, then the server (n + 1 entries).
  std::vector<Eigen::VectorXd> y_copies;
  std::vector<Eigen::VectorXd> u_clients;
  Eigen::VectorXd u_server;
  std::vector<Eigen::VectorXd> u_y_copies;
  std::uint64_t t = 0;

  std::size_t n() const { return x_clients.size(); }
  const Eigen::VectorXd& y() const { return y_copies.back(); }
  const Eigen::VectorXd& u_y() const { return u_y_copies.back(); }
  /// Average of the n + 1 machine iterates x_1..x_n, x_s.
  Eigen::VectorXd mean_iterate() const;
  /// ||(1/n) sum u_i + 2 u_s + u_y||_inf
  double dual_residual() const;
  /// max over duals of ||.||_inf
  double dual_scale() const;
};

struct InitMode {
  enum class Kind { zeros, warm };
  Kind kind = Kind::zeros;
  Eigen::VectorXd x0;

  static InitMode zeros() { return {}; }
  static InitMode warm(Eigen::VectorXd x0) {
    return {Kind::warm, std::move(x0)};
  }
};

/// zeros: every variable 0. warm: iterates at x0, u_i = grad f_i(x0),
/// u_y = grad g(x0), u_s = -(1/(2n)) sum u_i - u_y / 2.
AlgoState init_state(const ProblemInstance& problem, const InitMode& mode);

/// Random streams of one run. `shared` drives the coin and the subset and is
/// visible to every machine; each compressor has its own substream.
struct RunStreams {
  Rng shared;
  std::vector<Rng> uplink;
  Rng downlink;

  static RunStreams from_seed(std::uint64_t seed, std::size_t n);
};

struct MessageRecord {
  std::uint64_t bits = 0;
  std::uint64_t index_bits = 0;
  std::size_t support = 0;
};

struct RoundOutcome {
  bool communicated = false;
  std::optional<std::vector<std::uint32_t>> omega_set;
  std::vector<MessageRecord> uplink;
  MessageRecord downlink;
  double p = 0;

  std::uint64_t uplink_bits() const;
  std::uint64_t downlink_bits() const { return downlink.bits; }
};

struct StepOptions {
  /// Overrides the coin; no shared draw is consumed for it.
  std::optional<bool> force_coin;
  bool check_invariants = true;
};

/// One iteration: local corrected gradient steps on every machine, then with
/// probability p_{t+1} a compressed exchange on a shared k-subset.
RoundOutcome step(AlgoState& state, const ProblemInstance& problem,
                  const AlgoConfig& config, RunStreams& streams,
                  const StepOptions& options = {});

struct StepSizes {
  double rho;
  double rho_y;
  double eta;
  double eta_y;
};

/// rho = rho_y = 1/(2 + omega_av + 2 omega_s) and
/// eta = eta_y = C / ((1 + 2 omega + 2 omega_s)(2 + omega_av + 2 omega_s)).
/// C = 1 is the strongly convex choice; the general convex case takes C < 1.
StepSizes default_params(double omega, double omega_av, double omega_s,
                         double eta_scale = 1.0);

enum class Strategy {
  /// k = d; rand-K on the uplink and rand-K_s on the downlink.
  rand_K,
  /// k < d shared subset; K = K_s = k.
  subset_k,
};

struct CorollaryParams {
  std::size_t K_s;
  std::size_t K;
  std::size_t k;
  double p;
};

/// Accelerated parameter choices for kappa > 1. With strategy rand_K:
/// K_s = ceil(d / sqrt(kappa)), K = ceil(max(alpha, 1/n) d / sqrt(kappa)),
/// k = d, p = min(1/sqrt(eta kappa), 1). With subset_k:
/// k = ceil(d / sqrt(kappa)), p = min(d / (k sqrt(eta kappa)), 1).
CorollaryParams corollary_params(double alpha, std::size_t d, std::size_t n,
                                 double kappa, double eta, Strategy strategy);

/// p_t = sqrt(b / (a + t)) with b = ceil(1/eta) and a = b - 1.
PSchedule sqrt_decay_schedule(double eta);

/// Constant p with the same expected number of rounds over T iterations:
/// (1/T) sum_{t=1..T} p_t.
double matched_constant_p(const PSchedule& schedule, std::uint64_t T);

/// Expected rounds sum_{t=1..T} p_t.
double expected_rounds(const PSchedule& schedule, std::uint64_t T);

}  // namespace bicolor

#endif  // BICOLOR_ALGORITHM_HPP_
