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
#include "bicolor/algorithm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bicolor/errors.hpp"

namespace bicolor {
namespace {

// Guards ceil() against representation error when d / sqrt(kappa) is an
// exact integer in real arithmetic.
std::size_t ceil_count(double v, std::size_t lo, std::size_t hi) {
  const double c = std::ceil(v - 1e-9 * std::max(1.0, std::abs(v)));
  const auto r = static_cast<std::size_t>(std::max(c, 1.0));
  return std::clamp(r, lo, hi);
}

void require_dim(const Eigen::VectorXd& v, std::size_t d, const char* what) {
  if (static_cast<std::size_t>(v.size()) != d)
    throw ContractViolation(std::string("state: ") + what +
                            " has wrong dimension");
}

}  // namespace

PSchedule PSchedule::constant(double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw ContractViolation("constant p must lie in (0, 1]");
  return PSchedule(Kind::constant, p, 0, 0);
}

PSchedule PSchedule::decreasing(double a, double b) {
  if (!(b > 0.0) || !(a >= b - 1.0) || !std::isfinite(a))
    throw ContractViolation("decreasing schedule needs b > 0 and a >= b - 1");
  return PSchedule(Kind::decreasing, 0, a, b);
}

double PSchedule::p_at(std::uint64_t t) const {
  if (kind_ == Kind::constant) return p_;
  if (t == 0) throw ContractViolation("p_t is defined for t >= 1");
  return std::min(1.0, std::sqrt(b_ / (a_ + static_cast<double>(t))));
}

void AlgoConfig::validate(std::size_t n, std::size_t d) const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ContractViolation(std::string(name) + " must be positive");
  };
  positive(gamma, "gamma");
  positive(rho, "rho");
  positive(rho_y, "rho_y");
  positive(eta, "eta");
  positive(eta_y, "eta_y");
  if (k < 1 || k > d)
    throw ContractViolation("k must lie in [1, d], got " + std::to_string(k));
  if (uplink_specs.size() != n)
    throw ContractViolation("need one uplink compressor per client");
  for (const auto& s : uplink_specs)
    if (s.dimension() != d)
      throw ContractViolation("uplink compressor dimension differs from d");
  if (downlink_spec.dimension() != d)
    throw ContractViolation("downlink compressor dimension differs from d");
}

Eigen::VectorXd AlgoState::mean_iterate() const {
  Eigen::VectorXd m = x_server;
  for (const auto& x : x_clients) m += x;
  return m / static_cast<double>(x_clients.size() + 1);
}

double AlgoState::dual_residual() const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(u_server.size());
  for (const auto& u : u_clients) r += u;
  r /= static_cast<double>(u_clients.size());
  r += 2.0 * u_server + u_y();
  return r.size() == 0 ? 0.0 : r.lpNorm<Eigen::Infinity>();
}

double AlgoState::dual_scale() const {
  if (u_server.size() == 0) return 0.0;
  double m = std::max(u_server.lpNorm<Eigen::Infinity>(),
                      u_y().lpNorm<Eigen::Infinity>());
  for (const auto& u : u_clients) m = std::max(m, u.lpNorm<Eigen::Infinity>());
  return m;
}

AlgoState init_state(const ProblemInstance& problem, const InitMode& mode) {
  const std::size_t n = problem.n();
  const auto d = static_cast<Eigen::Index>(problem.d());
  AlgoState s;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  if (mode.kind == InitMode::Kind::zeros) {
    s.x_clients.assign(n, zero);
    s.x_server = zero;
    s.y_copies.assign(n + 1, zero);
    s.u_clients.assign(n, zero);
    s.u_server = zero;
    s.u_y_copies.assign(n + 1, zero);
    return s;
  }
  if (mode.x0.size() != d)
    throw ContractViolation("warm start has wrong dimension");
  s.x_clients.assign(n, mode.x0);
  s.x_server = mode.x0;
  s.y_copies.assign(n + 1, mode.x0);
  Eigen::VectorXd sum = zero;
  for (std::size_t i = 0; i < n; ++i) {
    s.u_clients.push_back(problem.client(i).gradient(mode.x0));
    sum += s.u_clients.back();
  }
  const Eigen::VectorXd uy = problem.shared().gradient(mode.x0);
  s.u_y_copies.assign(n + 1, uy);
  s.u_server = -sum / (2.0 * static_cast<double>(n)) - 0.5 * uy;
  return s;
}

RunStreams RunStreams::from_seed(std::uint64_t seed, std::size_t n) {
  RunStreams r{Rng::derive(seed, 0), {}, Rng::derive(seed, 1)};
  r.uplink.reserve(n);
  for (std::size_t i = 0; i < n; ++i) r.uplink.push_back(Rng::derive(seed, 2 + i));
  return r;
}

std::uint64_t RoundOutcome::uplink_bits() const {
  std::uint64_t b = 0;
  for (const auto& m : uplink) b += m.bits;
  return b;
}

RoundOutcome step(AlgoState& state, const ProblemInstance& problem,
                  const AlgoConfig& config, RunStreams& streams,
                  const StepOptions& options) {
  const std::size_t n = problem.n();
  const std::size_t d = problem.d();
  if (state.n() != n || state.y_copies.size() != n + 1 ||
      state.u_clients.size() != n || state.u_y_copies.size() != n + 1)
    throw ContractViolation("state shape does not match the problem");
  if (streams.uplink.size() != n)
    throw ContractViolation("need one uplink stream per client");
  require_dim(state.x_server, d, "x_server");
  require_dim(state.u_server, d, "u_server");

  const double gamma = config.gamma;
  const double p = config.schedule.p_at(state.t + 1);
  RoundOutcome out;
  out.p = p;

  // Local phase: every machine takes its corrected gradient step.
  Eigen::VectorXd grad(static_cast<Eigen::Index>(d));
  std::vector<Eigen::VectorXd> xh(n);
  for (std::size_t i = 0; i < n; ++i) {
    require_dim(state.x_clients[i], d, "x_i");
    problem.client(i).gradient(state.x_clients[i], grad);
    xh[i] = state.x_clients[i] - gamma * grad + gamma * state.u_clients[i];
  }
  problem.server().gradient(state.x_server, grad);
  Eigen::VectorXd xh_s = state.x_server - gamma * grad + gamma * state.u_server;
  std::vector<Eigen::VectorXd> yh(n + 1);
  for (std::size_t r = 0; r <= n; ++r) {
    problem.shared().gradient(state.y_copies[r], grad);
    yh[r] = state.y_copies[r] - gamma * grad + gamma * state.u_y_copies[r];
  }

  out.communicated = options.force_coin ? *options.force_coin
                                        : streams.shared.bernoulli(p);
  if (!out.communicated) {
    for (std::size_t i = 0; i < n; ++i) state.x_clients[i] = std::move(xh[i]);
    state.x_server = std::move(xh_s);
    for (std::size_t r = 0; r <= n; ++r) state.y_copies[r] = std::move(yh[r]);
    ++state.t;
    return out;
  }

  if (config.k < d) out.omega_set = sample_subset(streams.shared, d, config.k);
  auto run_compressor = [&](const CompressorSpec& spec,
                            const Eigen::VectorXd& diff, Rng& rng) {
    CompressedMessage m = out.omega_set
                              ? compress_restricted(spec, diff, *out.omega_set, rng)
                              : compress(spec, diff, rng);
    if (config.strict_float32) quantize_to_float32(m);
    return m;
  };

  std::vector<CompressedMessage> up;
  up.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    up.push_back(run_compressor(config.uplink_specs[i], xh[i] - yh[i],
                                streams.uplink[i]));
    out.uplink.push_back({up.back().bit_length, up.back().index_bits,
                          up.back().support_size()});
  }
  const CompressedMessage down =
      run_compressor(config.downlink_spec, xh_s - yh[n], streams.downlink);
  out.downlink = {down.bit_length, down.index_bits, down.support_size()};

  const Eigen::VectorXd cs = down.decode();
  const double scale = p * static_cast<double>(config.k) /
                       (static_cast<double>(d) * gamma);
  const double rho = config.rho;
  const double rho_y = config.rho_y;

  auto blend = [&](const Eigen::VectorXd& hat, auto&& on_subset) {
    Eigen::VectorXd x = hat;
    if (out.omega_set) {
      for (const auto j : *out.omega_set) x[j] = on_subset(j);
    } else {
      for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = on_subset(j);
    }
    return x;
  };

  // Clients, in machine order.
  Eigen::VectorXd c_bar = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd& yi = yh[i];
    const Eigen::VectorXd& xi = xh[i];
    state.x_clients[i] = blend(xi, [&](Eigen::Index j) {
      return (1.0 - rho) * xi[j] + rho * (cs[j] + yi[j]);
    });
    const Eigen::VectorXd ci = up[i].decode();
    state.u_clients[i] -= (scale * config.eta) * (ci - cs);
    c_bar += ci;
  }
  c_bar /= static_cast<double>(n);

  // Replicated shared variables, updated once per machine.
  for (std::size_t r = 0; r <= n; ++r) {
    state.y_copies[r] = yh[r] + rho_y * cs;
    state.u_y_copies[r] += (scale * config.eta_y) * cs;
  }

  // Server.
  const Eigen::VectorXd& ys = yh[n];
  const double mix = 0.5 * (rho + rho_y);
  state.x_server = blend(xh_s, [&](Eigen::Index j) {
    return (1.0 - mix) * xh_s[j] + mix * ys[j] + 0.5 * rho * c_bar[j];
  });
  state.u_server += (0.5 * scale * config.eta) * c_bar -
                    (0.5 * scale * (config.eta_y + config.eta)) * cs;
  ++state.t;

  if (options.check_invariants) {
    const double res = state.dual_residual();
    if (res > 1e-9 * (1.0 + state.dual_scale()))
      throw InvariantViolation("dual-sum constraint residual " +
                                   std::to_string(res) + " at t=" +
                                   std::to_string(state.t),
                               res);
    for (std::size_t r = 0; r < n; ++r) {
      if (state.y_copies[r] != state.y_copies[n])
        throw InvariantViolation("y replica mismatch on machine " +
                                     std::to_string(r),
                                 (state.y_copies[r] - state.y_copies[n])
                                     .lpNorm<Eigen::Infinity>());
      if (state.u_y_copies[r] != state.u_y_copies[n])
        throw InvariantViolation("u_y replica mismatch on machine " +
                                     std::to_string(r),
                                 (state.u_y_copies[r] - state.u_y_copies[n])
                                     .lpNorm<Eigen::Infinity>());
    }
  }
  return out;
}

StepSizes default_params(double omega, double omega_av, double omega_s,
                         double eta_scale) {
  if (omega < 0 || omega_av < 0 || omega_s < 0)
    throw ContractViolation("variance parameters must be nonnegative");
  if (!(eta_scale > 0.0 && eta_scale <= 1.0))
    throw ContractViolation("eta scale must lie in (0, 1]");
  const double rho = 1.0 / (2.0 + omega_av + 2.0 * omega_s);
  const double eta = eta_scale * rho / (1.0 + 2.0 * omega + 2.0 * omega_s);
  return {rho, rho, eta, eta};
}

CorollaryParams corollary_params(double alpha, std::size_t d, std::size_t n,
                                 double kappa, double eta, Strategy strategy) {
  if (!(kappa > 1.0)) throw ContractViolation("corollary params need kappa > 1");
  if (!(eta > 0.0)) throw ContractViolation("eta must be positive");
  if (d == 0 || n == 0) throw ContractViolation("d and n must be positive");
  if (!(alpha >= 0.0)) throw ContractViolation("alpha must be nonnegative");
  const double dd = static_cast<double>(d);
  const double sk = std::sqrt(kappa);
  CorollaryParams out{};
  if (strategy == Strategy::rand_K) {
    out.K_s = ceil_count(dd / sk, 1, d);
    out.K = ceil_count(std::max(alpha, 1.0 / static_cast<double>(n)) * dd / sk,
                       1, d);
    out.k = d;
    out.p = std::min(1.0 / std::sqrt(eta * kappa), 1.0);
  } else {
    out.k = ceil_count(dd / sk, 1, d);
    out.K = out.K_s = out.k;
    out.p = std::min(dd / (static_cast<double>(out.k) * std::sqrt(eta * kappa)),
                     1.0);
  }
  return out;
}

PSchedule sqrt_decay_schedule(double eta) {
  if (!(eta > 0.0)) throw ContractViolation("eta must be positive");
  const double b = std::ceil(1.0 / eta - 1e-12);
  return PSchedule::decreasing(b - 1.0, b);
}

double expected_rounds(const PSchedule& schedule, std::uint64_t T) {
  double s = 0;
  for (std::uint64_t t = 1; t <= T; ++t) s += schedule.p_at(t);
  return s;
}

double matched_constant_p(const PSchedule& schedule, std::uint64_t T) {
  if (T == 0) throw ContractViolation("matched p needs T >= 1");
  return expected_rounds(schedule, T) / static_cast<double>(T);
}

}  // namespace bicolor
