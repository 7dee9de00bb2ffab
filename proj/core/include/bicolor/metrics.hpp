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
#ifndef BICOLOR_METRICS_HPP_
#define BICOLOR_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bicolor/algorithm.hpp"
#include "bicolor/objective.hpp"

namespace bicolor {

struct ReferenceSolution {
  Eigen::VectorXd x_star;
  double f_star = 0;
  /// ||grad f_i(x*)|| for each client, then f_s, then g.
  std::vector<double> grad_norms;
  std::vector<Eigen::VectorXd> u_clients;  // grad f_i(x*)
  Eigen::VectorXd u_server;                // -(1/(2n)) sum u_i - u_y / 2
  Eigen::VectorXd u_y;                     // grad g(x*)
  /// ||grad F(x*)|| at termination.
  double residual = 0;
};

struct SolverOptions {
  /// Stop when ||grad F|| <= tol * max(1, ||grad F(x0)||).
  double tol = 1e-12;
  std::size_t max_iterations = 1000000;
  std::optional<Eigen::VectorXd> x0;
};

/// Accelerated gradient with adaptive restart on F. Deterministic. Throws
/// NonConvergence carrying the achieved residual when the cap is hit.
ReferenceSolution solve_reference(const ProblemInstance& problem,
                                  const SolverOptions& options = {});

/// (1/gamma)(sum ||x_i - x*||^2 + 2n ||x_s - x*||^2 + n ||y - x*||^2)
///   + (d^2 gamma / (p^2 k^2 eta))(sum ||u_i - u_i*||^2 + n ||u_y - u_y*||^2)
double lyapunov(const AlgoState& state, const ReferenceSolution& ref,
                double gamma, double p, std::size_t k, std::size_t d,
                double eta);

/// phi(x) - phi(x_ref) - <grad phi(x_ref), x - x_ref>. Values in
/// [-1e-10, 0) are rounding and reported as 0; anything lower throws
/// ConvexityViolation.
double bregman(const Objective& phi, const VectorRef& x, const VectorRef& x_ref);

/// sum_i D_{f_i}(x_i, x*) + 2n D_{f_s}(x_s, x*) + n D_g(y, x*)
double bregman_sum(const ProblemInstance& problem, const AlgoState& state,
                   const ReferenceSolution& ref);

/// (1/gamma) sum ||x_i - x_s||^2
double consensus_client(const AlgoState& state, double gamma);
/// (n/gamma) ||x_s - y||^2
double consensus_y(const AlgoState& state, double gamma);

struct MetricRecord {
  std::uint64_t t = 0;
  bool communicated = false;
  /// Bits sent since the previous record.
  std::uint64_t up_bits = 0;
  std::uint64_t down_bits = 0;
  /// Cumulative TotalCom up to and including t.
  double total_bits_cum = 0;
  double psi = 0;
  double subopt = 0;
  double bregman_sum = 0;
  double consensus_client = 0;
  double consensus_y = 0;
  /// ||xbar - x*||^2 / ||x^0 - x*||^2 with xbar the mean iterate.
  double rel_dist = 0;
  std::uint64_t seed = 0;
};

/// Inputs of the Lyapunov weights for one measurement.
struct MeasureContext {
  double gamma;
  double p;
  std::size_t k;
  double eta;
  /// ||x^0 - x*||^2; rel_dist is 0 when this is 0.
  double initial_dist;
};

MetricRecord measure(const ProblemInstance& problem, const AlgoState& state,
                     const ReferenceSolution& ref, const MeasureContext& ctx);

/// Explicit d = 1 operators over X = (x_1..x_n, x_s, y), U = R^n, U_y = R.
/// X carries weights (1, ..., 1, 2n, n), U weight 1 and U_y weight n.
struct Operators {
  std::size_t n = 0;
  Eigen::MatrixXd D;        // n x (n + 2)
  Eigen::MatrixXd D_adj;    // (n + 2) x n
  Eigen::MatrixXd D_y;      // 1 x (n + 2)
  Eigen::MatrixXd D_y_adj;  // (n + 2) x 1
  Eigen::VectorXd weights_x;
  Eigen::VectorXd weights_u;
  double weight_u_y = 0;

  /// D_c = (D, D_y) : X -> U x U_y and its adjoint.
  Eigen::MatrixXd D_c() const;
  Eigen::MatrixXd D_c_adj() const;
};

Operators build_operators(std::size_t n);

/// Eigenvalues of a matrix self-adjoint under the diagonal weight w,
/// computed from the symmetric form W^{1/2} M W^{-1/2}. Ascending.
Eigen::VectorXd weighted_eigenvalues(const Eigen::MatrixXd& m,
                                     const Eigen::VectorXd& w);

}  // namespace bicolor

#endif  // BICOLOR_METRICS_HPP_
