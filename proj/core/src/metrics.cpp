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
#include "bicolor/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bicolor/errors.hpp"

namespace bicolor {

ReferenceSolution solve_reference(const ProblemInstance& problem,
                                  const SolverOptions& options) {
  const auto d = static_cast<Eigen::Index>(problem.d());
  Eigen::VectorXd x = options.x0 ? *options.x0 : Eigen::VectorXd::Zero(d);
  if (x.size() != d) throw ContractViolation("solver start has wrong dimension");
  // F = (1/n) sum f_i + 2 f_s + g is at most 4L smooth.
  const double step = 1.0 / (4.0 * problem.L());

  Eigen::VectorXd g(d);
  problem.gradient(x, g);
  const double threshold = options.tol * std::max(1.0, g.norm());
  Eigen::VectorXd z = x;
  Eigen::VectorXd x_prev = x;
  Eigen::VectorXd gz(d);
  double theta = 1.0;
  double residual = g.norm();
  std::size_t it = 0;
  for (; it < options.max_iterations && residual > threshold; ++it) {
    problem.gradient(z, gz);
    x_prev = x;
    x = z - step * gz;
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    // Gradient-based restart: drop momentum when it points uphill.
    if (gz.dot(x - x_prev) > 0) {
      theta = 1.0;
      z = x;
    } else {
      z = x + ((theta - 1.0) / theta_next) * (x - x_prev);
      theta = theta_next;
    }
    problem.gradient(x, g);
    residual = g.norm();
  }
  if (residual > threshold)
    throw NonConvergence("reference solver hit the iteration cap with "
                         "||grad F|| = " + std::to_string(residual),
                         residual);

  ReferenceSolution ref;
  ref.x_star = x;
  ref.f_star = problem.value(x);
  ref.residual = residual;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < problem.n(); ++i) {
    ref.u_clients.push_back(problem.client(i).gradient(x));
    ref.grad_norms.push_back(ref.u_clients.back().norm());
    sum += ref.u_clients.back();
  }
  ref.grad_norms.push_back(problem.server().gradient(x).norm());
  ref.u_y = problem.shared().gradient(x);
  ref.grad_norms.push_back(ref.u_y.norm());
  ref.u_server = -sum / (2.0 * static_cast<double>(problem.n())) - 0.5 * ref.u_y;
  return ref;
}

double lyapunov(const AlgoState& state, const ReferenceSolution& ref,
                double gamma, double p, std::size_t k, std::size_t d,
                double eta) {
  const double n = static_cast<double>(state.n());
  double primal = 0;
  for (const auto& x : state.x_clients) primal += (x - ref.x_star).squaredNorm();
  primal += 2.0 * n * (state.x_server - ref.x_star).squaredNorm();
  primal += n * (state.y() - ref.x_star).squaredNorm();
  double dual = 0;
  for (std::size_t i = 0; i < state.n(); ++i)
    dual += (state.u_clients[i] - ref.u_clients.at(i)).squaredNorm();
  dual += n * (state.u_y() - ref.u_y).squaredNorm();
  const double dk = static_cast<double>(d) / (p * static_cast<double>(k));
  return primal / gamma + dk * dk * gamma / eta * dual;
}

double bregman(const Objective& phi, const VectorRef& x, const VectorRef& x_ref) {
  const Eigen::VectorXd g = phi.gradient(x_ref);
  const double v = phi.value(x) - phi.value(x_ref) - g.dot(x - x_ref);
  if (v < -1e-10)
    throw ConvexityViolation("negative Bregman distance " + std::to_string(v), v);
  return std::max(v, 0.0);
}

double bregman_sum(const ProblemInstance& problem, const AlgoState& state,
                   const ReferenceSolution& ref) {
  const double n = static_cast<double>(problem.n());
  double s = 0;
  for (std::size_t i = 0; i < problem.n(); ++i)
    s += bregman(problem.client(i), state.x_clients[i], ref.x_star);
  s += 2.0 * n * bregman(problem.server(), state.x_server, ref.x_star);
  s += n * bregman(problem.shared(), state.y(), ref.x_star);
  return s;
}

double consensus_client(const AlgoState& state, double gamma) {
  double s = 0;
  for (const auto& x : state.x_clients) s += (x - state.x_server).squaredNorm();
  return s / gamma;
}

double consensus_y(const AlgoState& state, double gamma) {
  return static_cast<double>(state.n()) *
         (state.x_server - state.y()).squaredNorm() / gamma;
}

MetricRecord measure(const ProblemInstance& problem, const AlgoState& state,
                     const ReferenceSolution& ref, const MeasureContext& ctx) {
  MetricRecord r;
  r.t = state.t;
  r.psi = lyapunov(state, ref, ctx.gamma, ctx.p, ctx.k, problem.d(), ctx.eta);
  const Eigen::VectorXd xbar = state.mean_iterate();
  r.subopt = std::max(0.0, problem.value(xbar) - ref.f_star);
  r.bregman_sum = bregman_sum(problem, state, ref);
  r.consensus_client = consensus_client(state, ctx.gamma);
  r.consensus_y = consensus_y(state, ctx.gamma);
  r.rel_dist = ctx.initial_dist > 0
                   ? (xbar - ref.x_star).squaredNorm() / ctx.initial_dist
                   : 0.0;
  return r;
}

Eigen::MatrixXd Operators::D_c() const {
  Eigen::MatrixXd m(n + 1, n + 2);
  m << D, D_y;
  return m;
}

Eigen::MatrixXd Operators::D_c_adj() const {
  Eigen::MatrixXd m(n + 2, n + 1);
  m << D_adj, D_y_adj;
  return m;
}

Operators build_operators(std::size_t n) {
  if (n == 0) throw ContractViolation("operators need n >= 1");
  const auto N = static_cast<Eigen::Index>(n);
  const double nn = static_cast<double>(n);
  Operators op;
  op.n = n;
  op.D = Eigen::MatrixXd::Zero(N, N + 2);
  op.D_adj = Eigen::MatrixXd::Zero(N + 2, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    op.D(i, i) = 1.0;
    op.D(i, N) = -1.0;
    op.D_adj(i, i) = 1.0;
    op.D_adj(N, i) = -1.0 / (2.0 * nn);
  }
  op.D_y = Eigen::MatrixXd::Zero(1, N + 2);
  op.D_y(0, N) = -1.0;
  op.D_y(0, N + 1) = 1.0;
  op.D_y_adj = Eigen::MatrixXd::Zero(N + 2, 1);
  op.D_y_adj(N, 0) = -0.5;
  op.D_y_adj(N + 1, 0) = 1.0;
  op.weights_x = Eigen::VectorXd::Ones(N + 2);
  op.weights_x[N] = 2.0 * nn;
  op.weights_x[N + 1] = nn;
  op.weights_u = Eigen::VectorXd::Ones(N);
  op.weight_u_y = nn;
  return op;
}

Eigen::VectorXd weighted_eigenvalues(const Eigen::MatrixXd& m,
                                     const Eigen::VectorXd& w) {
  if (m.rows() != m.cols() || m.rows() != w.size())
    throw ContractViolation("weighted_eigenvalues: shape mismatch");
  const Eigen::VectorXd s = w.cwiseSqrt();
  Eigen::MatrixXd sym = s.asDiagonal() * m * s.cwiseInverse().asDiagonal();
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace bicolor
