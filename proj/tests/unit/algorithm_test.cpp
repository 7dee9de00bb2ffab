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
#include <gtest/gtest.h>

#include <cmath>

#include "bicolor/algorithm.hpp"
#include "bicolor/errors.hpp"
#include "bicolor/metrics.hpp"

namespace bicolor {
namespace {

AlgoConfig identity_config(const ProblemInstance& p, double gamma) {
  AlgoConfig c;
  const auto s = default_params(0, 0, 0);
  c.gamma = gamma;
  c.rho = s.rho;
  c.rho_y = s.rho_y;
  c.eta = s.eta;
  c.eta_y = s.eta_y;
  c.k = p.d();
  c.uplink_specs.assign(p.n(), CompressorSpec::identity(p.d()));
  c.downlink_spec = CompressorSpec::identity(p.d());
  return c;
}

AlgoConfig natural_config(const ProblemInstance& p, double gamma, std::size_t k,
                          double prob) {
  AlgoConfig c = identity_config(p, gamma);
  const auto s = default_params(0.125, 0.125 / p.n(), 0.125);
  c.rho = s.rho;
  c.rho_y = s.rho_y;
  c.eta = s.eta;
  c.eta_y = s.eta_y;
  c.k = k;
  c.schedule = PSchedule::constant(prob);
  c.uplink_specs.assign(p.n(), CompressorSpec::natural(p.d()));
  c.downlink_spec = CompressorSpec::natural(p.d());
  return c;
}

TEST(DefaultParams, Examples) {
  auto s = default_params(0, 0, 0);
  EXPECT_DOUBLE_EQ(s.rho, 0.5);
  EXPECT_DOUBLE_EQ(s.rho_y, 0.5);
  EXPECT_DOUBLE_EQ(s.eta, 0.5);
  EXPECT_DOUBLE_EQ(s.eta_y, 0.5);
  s = default_params(3, 0.3, 3);
  EXPECT_DOUBLE_EQ(s.rho, 1 / 8.3);
  EXPECT_DOUBLE_EQ(s.eta, 1 / (13 * 8.3));
  s = default_params(0, 0, 0, 0.99);
  EXPECT_DOUBLE_EQ(s.eta, 0.495);
  EXPECT_DOUBLE_EQ(s.rho, 0.5);
  EXPECT_THROW(default_params(-1, 0, 0), ContractViolation);
  EXPECT_THROW(default_params(0, 0, 0, 0), ContractViolation);
}

TEST(CorollaryParams, Examples) {
  auto c = corollary_params(1.0, 300, 10, 1e4, 0.1, Strategy::rand_K);
  EXPECT_EQ(c.K_s, 3u);
  EXPECT_EQ(c.K, 3u);
  EXPECT_EQ(c.k, 300u);
  EXPECT_DOUBLE_EQ(c.p, std::min(1.0, 1 / std::sqrt(0.1 * 1e4)));
  c = corollary_params(1.0, 300, 10, 1e4, 0.1, Strategy::subset_k);
  EXPECT_EQ(c.k, 3u);
  EXPECT_DOUBLE_EQ(c.p, 1.0);
  c = corollary_params(1.0, 300, 10, 1 + 1e-9, 0.1, Strategy::rand_K);
  EXPECT_EQ(c.K_s, 300u);
  c = corollary_params(0.0, 300, 10, 1e4, 0.1, Strategy::rand_K);
  EXPECT_EQ(c.K, 1u);  // max(0, 1/10) * 3 -> 1
  c = corollary_params(1.0, 300, 1, 4e6, 0.1, Strategy::rand_K);
  EXPECT_EQ(c.K, 1u);
  EXPECT_THROW(corollary_params(1.0, 300, 10, 1.0, 0.1, Strategy::rand_K),
               ContractViolation);
}

TEST(PSchedule, Values) {
  EXPECT_EQ(PSchedule::constant(0.3).p_at(7), 0.3);
  EXPECT_THROW(PSchedule::constant(0.0), ContractViolation);
  EXPECT_THROW(PSchedule::constant(1.5), ContractViolation);
  const auto s = PSchedule::decreasing(3, 4);
  EXPECT_DOUBLE_EQ(s.p_at(1), 1.0);
  EXPECT_DOUBLE_EQ(s.p_at(5), std::sqrt(0.5));
  EXPECT_THROW(PSchedule::decreasing(1, 4), ContractViolation);
  EXPECT_THROW(s.p_at(0), ContractViolation);
  const auto t2 = sqrt_decay_schedule(0.29);
  EXPECT_EQ(t2.b(), 4.0);
  EXPECT_EQ(t2.a(), 3.0);
  EXPECT_DOUBLE_EQ(matched_constant_p(PSchedule::constant(0.4), 10), 0.4);
  EXPECT_NEAR(expected_rounds(s, 3), 1 + std::sqrt(4.0 / 5) + std::sqrt(4.0 / 6),
              1e-15);
}

TEST(InitState, ZerosAndWarm) {
  const auto q = make_synthetic_quadratic({4, 5, 1.0, 10.0, 1.0, false, 2});
  const auto z = init_state(q.problem, InitMode::zeros());
  EXPECT_EQ(z.dual_residual(), 0.0);
  EXPECT_EQ(z.y_copies.size(), 5u);
  Eigen::VectorXd x0(5);
  x0 << 1, -2, 3, 0.5, 0;
  const auto w = init_state(q.problem, InitMode::warm(x0));
  EXPECT_LE(w.dual_residual(), 1e-12);
  EXPECT_EQ(w.u_clients[2], q.problem.client(2).gradient(x0));
  EXPECT_EQ(w.u_y(), q.problem.shared().gradient(x0));
}

TEST(Step, SilentRoundTakesLocalSteps) {
  const auto q = make_synthetic_quadratic({3, 4, 1.0, 10.0, 1.0, false, 3});
  const auto& p = q.problem;
  const auto cfg = natural_config(p, 0.5, 2, 0.5);
  Eigen::VectorXd x0 = Eigen::VectorXd::LinSpaced(4, -1, 2);
  AlgoState s = init_state(p, InitMode::warm(x0));
  s.u_clients[0].array() += 0.1;
  s.u_server.array() -= 0.05 / 3;
  RunStreams rs = RunStreams::from_seed(1, 3);
  const AlgoState before = s;
  StepOptions opt;
  opt.force_coin = false;
  const auto out = step(s, p, cfg, rs, opt);
  EXPECT_FALSE(out.communicated);
  EXPECT_EQ(out.uplink_bits(), 0u);
  EXPECT_EQ(out.downlink_bits(), 0u);
  for (std::size_t i = 0; i < 3; ++i) {
    const Eigen::VectorXd expect = before.x_clients[i] -
                                   0.5 * p.client(i).gradient(before.x_clients[i]) +
                                   0.5 * before.u_clients[i];
    EXPECT_EQ(s.x_clients[i], expect);
    EXPECT_EQ(s.u_clients[i], before.u_clients[i]);
  }
  EXPECT_EQ(s.u_server, before.u_server);
  EXPECT_EQ(s.t, 1u);
}

TEST(Step, FixedPointIsStationary) {
  const auto q = make_synthetic_quadratic({3, 5, 1.0, 20.0, 1.0, false, 4});
  const auto& p = q.problem;
  const auto cfg = identity_config(p, 1.0 / p.L());
  AlgoState s = init_state(p, InitMode::warm(q.x_star));
  RunStreams rs = RunStreams::from_seed(1, 3);
  for (int t = 0; t < 5; ++t) step(s, p, cfg, rs);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_LT((s.x_clients[i] - q.x_star).norm(), 1e-13);
  EXPECT_LT((s.y() - q.x_star).norm(), 1e-13);
  EXPECT_LT((s.u_y() - p.shared().gradient(q.x_star)).norm(), 1e-13);
}

// Straight-line transcription for n = 1, identity compressors, p = 1, k = d.
TEST(Step, DeterministicSingleClientMatchesTranscription) {
  const auto q = make_synthetic_quadratic({1, 4, 1.0, 10.0, 1.0, false, 5});
  const auto& p = q.problem;
  auto cfg = identity_config(p, 0.7);
  cfg.rho = 0.3;
  cfg.rho_y = 0.4;
  cfg.eta = 0.2;
  cfg.eta_y = 0.25;
  AlgoState s = init_state(p, InitMode::zeros());
  RunStreams rs = RunStreams::from_seed(3, 1);
  Eigen::VectorXd x1 = Eigen::VectorXd::Zero(4), xs = x1, y = x1, u1 = x1,
                  us = x1, uy = x1;
  const double g = 0.7;
  for (int t = 0; t < 30; ++t) {
    step(s, p, cfg, rs);
    const Eigen::VectorXd h1 = x1 - g * p.client(0).gradient(x1) + g * u1;
    const Eigen::VectorXd hs = xs - g * p.server().gradient(xs) + g * us;
    const Eigen::VectorXd hy = y - g * p.shared().gradient(y) + g * uy;
    const Eigen::VectorXd c1 = h1 - hy;
    const Eigen::VectorXd cs = hs - hy;
    x1 = 0.7 * h1 + 0.3 * (cs + hy);
    y = hy + 0.4 * cs;
    u1 = u1 - (0.2 / g) * (c1 - cs);
    uy = uy + (0.25 / g) * cs;
    xs = (1 - 0.35) * hs + 0.35 * hy + 0.15 * c1;
    us = us + (0.2 / (2 * g)) * c1 - (0.45 / (2 * g)) * cs;
    ASSERT_LT((s.x_clients[0] - x1).lpNorm<Eigen::Infinity>(), 1e-12);
    ASSERT_LT((s.x_server - xs).lpNorm<Eigen::Infinity>(), 1e-12);
    ASSERT_LT((s.y() - y).lpNorm<Eigen::Infinity>(), 1e-12);
    ASSERT_LT((s.u_clients[0] - u1).lpNorm<Eigen::Infinity>(), 1e-12);
    ASSERT_LT((s.u_server - us).lpNorm<Eigen::Infinity>(), 1e-12);
    ASSERT_LT((s.u_y() - uy).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Step, OffSubsetCoordinatesFreezeAtHat) {
  const auto q = make_synthetic_quadratic({3, 8, 1.0, 10.0, 1.0, false, 6});
  const auto& p = q.problem;
  const auto cfg = natural_config(p, 0.8, 3, 1.0);
  AlgoState s = init_state(p, InitMode::zeros());
  RunStreams rs = RunStreams::from_seed(9, 3);
  for (int t = 0; t < 20; ++t) {
    const AlgoState before = s;
    const auto out = step(s, p, cfg, rs);
    ASSERT_TRUE(out.communicated);
    ASSERT_TRUE(out.omega_set.has_value());
    ASSERT_EQ(out.omega_set->size(), 3u);
    std::vector<bool> in(8, false);
    for (const auto j : *out.omega_set) in[j] = true;
    for (std::size_t i = 0; i < 3; ++i) {
      const Eigen::VectorXd hat = before.x_clients[i] -
                                  0.8 * p.client(i).gradient(before.x_clients[i]) +
                                  0.8 * before.u_clients[i];
      for (Eigen::Index j = 0; j < 8; ++j)
        if (!in[j]) ASSERT_EQ(s.x_clients[i][j], hat[j]);
      EXPECT_LE(out.uplink[i].support, 3u);
    }
  }
}

TEST(Step, InvariantsHoldUnderCompression) {
  const auto q = make_synthetic_quadratic({5, 12, 1.0, 30.0, 2.0, false, 7});
  const auto& p = q.problem;
  auto cfg = natural_config(p, 1.0, 4, 0.6);
  cfg.uplink_specs.assign(5, CompressorSpec::composed(CompressorSpec::natural(12),
                                                      CompressorSpec::rand_k(12, 2)));
  AlgoState s = init_state(p, InitMode::zeros());
  RunStreams rs = RunStreams::from_seed(11, 5);
  for (int t = 0; t < 500; ++t) {
    step(s, p, cfg, rs);
    for (std::size_t r = 0; r < 5; ++r) {
      ASSERT_EQ(s.y_copies[r], s.y_copies[5]);
      ASSERT_EQ(s.u_y_copies[r], s.u_y_copies[5]);
    }
    ASSERT_LE(s.dual_residual(), 1e-9 * (1 + s.dual_scale()));
  }
}

TEST(Step, DetectsBrokenDualConstraint) {
  const auto q = make_synthetic_quadratic({2, 3, 1.0, 10.0, 1.0, false, 8});
  const auto cfg = identity_config(q.problem, 0.5);
  AlgoState s = init_state(q.problem, InitMode::zeros());
  s.u_server[0] = 1.0;
  RunStreams rs = RunStreams::from_seed(1, 2);
  EXPECT_THROW(step(s, q.problem, cfg, rs), InvariantViolation);
}

TEST(Step, SameSeedSameTrajectory) {
  const auto q = make_synthetic_quadratic({3, 6, 1.0, 10.0, 1.0, false, 9});
  const auto cfg = natural_config(q.problem, 0.9, 2, 0.5);
  AlgoState a = init_state(q.problem, InitMode::zeros());
  AlgoState b = a;
  RunStreams ra = RunStreams::from_seed(42, 3);
  RunStreams rb = RunStreams::from_seed(42, 3);
  for (int t = 0; t < 100; ++t) {
    const auto oa = step(a, q.problem, cfg, ra);
    const auto ob = step(b, q.problem, cfg, rb);
    ASSERT_EQ(oa.communicated, ob.communicated);
    ASSERT_EQ(oa.uplink_bits(), ob.uplink_bits());
  }
  EXPECT_EQ(a.x_server, b.x_server);
}

TEST(AlgoConfig, Validation) {
  const auto q = make_synthetic_quadratic({2, 3, 1.0, 10.0, 1.0, false, 8});
  auto cfg = identity_config(q.problem, 0.5);
  EXPECT_NO_THROW(cfg.validate(2, 3));
  cfg.k = 4;
  EXPECT_THROW(cfg.validate(2, 3), ContractViolation);
  cfg.k = 3;
  cfg.gamma = 0;
  EXPECT_THROW(cfg.validate(2, 3), ContractViolation);
  cfg.gamma = 0.5;
  EXPECT_THROW(cfg.validate(3, 3), ContractViolation);
}

}  // namespace
}  // namespace bicolor
