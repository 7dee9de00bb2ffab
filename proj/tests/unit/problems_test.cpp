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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bicolor/dataset.hpp"
#include "bicolor/errors.hpp"
#include "bicolor/logistic.hpp"
#include "bicolor/objective.hpp"

namespace bicolor {
namespace {

SparseDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

Eigen::VectorXd central_difference(const Objective& f, const Eigen::VectorXd& x) {
  const double h = 1e-6 * (1.0 + x.norm());
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd a = x;
    Eigen::VectorXd b = x;
    a[j] += h;
    b[j] -= h;
    g[j] = (f.value(a) - f.value(b)) / (2 * h);
  }
  return g;
}

Eigen::VectorXd random_vector(Rng& rng, std::size_t d, double scale = 1.0) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(d));
  for (auto& v : x) v = scale * rng.normal();
  return x;
}

TEST(QuadraticReg, Examples) {
  const auto f = quadratic_reg(2.0, 2);
  EXPECT_EQ(f->value(Eigen::Vector2d(0, 0)), 0.0);
  EXPECT_EQ(f->gradient(Eigen::Vector2d(0, 0)), Eigen::Vector2d(0, 0));
  EXPECT_EQ(f->value(Eigen::Vector2d(1, 1)), 2.0);
  EXPECT_EQ(f->gradient(Eigen::Vector2d(1, 1)), Eigen::Vector2d(2, 2));
  EXPECT_EQ(f->smoothness(), 2.0);
  EXPECT_EQ(f->strong_convexity(), 2.0);
  const auto zero = quadratic_reg(0.0, 3);
  EXPECT_EQ(zero->value(Eigen::Vector3d(5, -1, 2)), 0.0);
  EXPECT_THROW(quadratic_reg(-1.0, 2), ContractViolation);
}

TEST(ParseLibsvm, BasicRow) {
  const auto d = parse("+1 3:0.5 7:1.2\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.rows[0].label, 1.0);
  EXPECT_EQ(d.rows[0].indices, (std::vector<std::uint32_t>{2, 6}));
  EXPECT_EQ(d.rows[0].values, (std::vector<double>{0.5, 1.2}));
  EXPECT_GE(d.d, 7u);
}

TEST(ParseLibsvm, EmptyFeatureRowAndLabelRemap) {
  const auto d = parse("-1\n0 1:2\n\n1 2:1 # comment\n");
  ASSERT_EQ(d.size(), 3u);
  EXPECT_TRUE(d.rows[0].indices.empty());
  EXPECT_EQ(d.rows[1].label, -1.0);
  EXPECT_EQ(d.rows[2].label, 1.0);
  EXPECT_EQ(d.d, 2u);
}

TEST(ParseLibsvm, ErrorsCarryLineNumber) {
  try {
    parse("1 2:a\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  try {
    parse("1 1:1\n1 3:1 2:1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("2 1:1\n"), ParseError);
  EXPECT_THROW(parse("1 0:1\n"), ParseError);
  EXPECT_THROW(parse("1 1\n"), ParseError);
}

TEST(ParseLibsvm, DimensionOverride) {
  std::istringstream in("1 3:1\n");
  EXPECT_EQ(parse_libsvm(in, 300).d, 300u);
  std::istringstream small("1 3:1\n");
  EXPECT_THROW(parse_libsvm(small, 2), ContractViolation);
}

TEST(ParseLibsvm, WriteRoundTrip) {
  const auto data = make_synthetic_logistic({50, 20, 0.3, 0.1, 4});
  std::stringstream s;
  write_libsvm(s, data);
  const auto back = parse_libsvm(s, data.d);
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    EXPECT_EQ(back.rows[r].label, data.rows[r].label);
    EXPECT_EQ(back.rows[r].indices, data.rows[r].indices);
    EXPECT_EQ(back.rows[r].values, data.rows[r].values);
  }
}

SparseDataset numbered_rows(std::size_t rows) {
  SparseDataset d;
  d.d = 1;
  for (std::size_t r = 0; r < rows; ++r)
    d.rows.push_back({1.0, {0}, {static_cast<double>(r)}});
  return d;
}

TEST(Partition, SizesAndDiscard) {
  Rng rng(1);
  const auto p10 = partition(numbered_rows(10), 3, rng);
  ASSERT_EQ(p10.shards.size(), 3u);
  for (const auto& s : p10.shards) EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(p10.discarded.size(), 1u);
  const auto p9 = partition(numbered_rows(9), 3, rng);
  EXPECT_TRUE(p9.discarded.empty());
  EXPECT_THROW(partition(numbered_rows(2), 3, rng), ContractViolation);
}

TEST(Partition, DeterministicAndPreservesMultiset) {
  Rng a(5);
  Rng b(5);
  const auto data = numbered_rows(23);
  const auto pa = partition(data, 4, a);
  const auto pb = partition(data, 4, b);
  std::vector<double> seen;
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t r = 0; r < pa.shards[s].size(); ++r) {
      EXPECT_EQ(pa.shards[s].rows[r].values, pb.shards[s].rows[r].values);
      seen.push_back(pa.shards[s].rows[r].values[0]);
    }
  for (const auto& r : pa.discarded) seen.push_back(r.values[0]);
  std::sort(seen.begin(), seen.end());
  for (std::size_t r = 0; r < 23; ++r) EXPECT_EQ(seen[r], static_cast<double>(r));
}

TEST(EstimateL, Examples) {
  SparseDataset one;
  one.d = 2;
  one.rows.push_back({1.0, {0}, {2.0}});
  EXPECT_NEAR(estimate_L(one, 0.0), 1.0, 1e-9);
  SparseDataset dup = one;
  dup.rows.push_back(one.rows[0]);
  dup.rows.push_back(one.rows[0]);
  EXPECT_NEAR(estimate_L(dup, 0.0), 1.0, 1e-9);
  EXPECT_NEAR(estimate_L(one, 5.0), 6.0, 1e-9);
  EXPECT_THROW(estimate_L(SparseDataset{}, 0.0), ContractViolation);
}

TEST(EstimateL, MatchesDenseEigenvalue) {
  const auto data = make_synthetic_logistic({80, 12, 0.5, 0.0, 9});
  const Eigen::MatrixXd a = data.matrix().toDense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a);
  const double expected = es.eigenvalues().maxCoeff() / (4.0 * 80);
  EXPECT_NEAR(estimate_L(data, 0.0), expected, 1e-8 * expected);
}

TEST(EstimateL, IterationCapCarriesEstimate) {
  const auto data = make_synthetic_logistic({80, 12, 0.5, 0.0, 9});
  try {
    estimate_L(data, 0.0, 1e-15, 1);
    FAIL();
  } catch (const NonConvergence& e) {
    EXPECT_GT(e.last_value(), 0.0);
  }
}

TEST(ScaleMu, FixedPoint) {
  const double mu = scale_mu_for_kappa(4.0, 5.0);
  EXPECT_DOUBLE_EQ(mu, 1.0);
  EXPECT_DOUBLE_EQ((4.0 + mu) / mu, 5.0);
  EXPECT_LT(scale_mu_for_kappa(4.0, 1e300), 1e-299);
  const double kappa = 4e6;
  const double m = scale_mu_for_kappa(1.0, kappa);
  EXPECT_NEAR((1.0 + m) / m, kappa, 1e-6);
  EXPECT_THROW(scale_mu_for_kappa(1.0, 1.0), ContractViolation);
}

TEST(Logistic, ZeroPoint) {
  const auto data = make_synthetic_logistic({40, 6, 0.5, 0.1, 2});
  const LogisticLoss f(data, 0.0);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
  EXPECT_NEAR(f.value(x), std::log(2.0), 1e-15);
  const Eigen::VectorXd expected =
      -(data.matrix().transpose() * data.labels()) / (2.0 * 40);
  EXPECT_LT((f.gradient(x) - expected).norm(), 1e-14);
}

TEST(Logistic, SeparableLimitAndStability) {
  SparseDataset one;
  one.d = 1;
  one.rows.push_back({1.0, {0}, {1.0}});
  const LogisticLoss f(one, 0.0);
  Eigen::VectorXd x(1);
  x[0] = 50;
  EXPECT_LT(f.value(x), 1e-20);
  x[0] = 1e6;
  EXPECT_EQ(f.value(x), 0.0);
  x[0] = -1e6;
  EXPECT_NEAR(f.value(x), 1e6, 1e-6);
  EXPECT_TRUE(std::isfinite(f.gradient(x)[0]));
}

TEST(Logistic, DimensionMismatch) {
  const auto data = make_synthetic_logistic({10, 4, 0.5, 0.1, 2});
  const LogisticLoss f(data, 0.1);
  EXPECT_THROW(f.value(Eigen::VectorXd::Zero(3)), ContractViolation);
}

TEST(Objectives, GradientMatchesFiniteDifferences) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = make_synthetic_logistic(
        {30, 8, 0.4, 0.2, static_cast<std::uint64_t>(trial)});
    const LogisticLoss f(data, 0.05 * trial);
    const Eigen::VectorXd x = random_vector(rng, 8, 2.0);
    const Eigen::VectorXd g = f.gradient(x);
    const Eigen::VectorXd fd = central_difference(f, x);
    EXPECT_LE((g - fd).norm(), 1e-5 * std::max(1.0, g.norm())) << trial;
  }
  const auto q = make_synthetic_quadratic({3, 6, 1.0, 20.0, 1.0, false, 3});
  for (std::size_t i = 0; i < 3; ++i) {
    const Eigen::VectorXd x = random_vector(rng, 6);
    const Eigen::VectorXd g = q.problem.client(i).gradient(x);
    EXPECT_LE((g - central_difference(q.problem.client(i), x)).norm(),
              1e-5 * std::max(1.0, g.norm()));
  }
}

TEST(Objectives, ConvexityAndStrongConvexity) {
  Rng rng(22);
  const auto data = make_synthetic_logistic({60, 10, 0.3, 0.1, 8});
  const double mu = 0.3;
  const LogisticLoss f(data, mu);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd x = random_vector(rng, 10, 3.0);
    const Eigen::VectorXd y = random_vector(rng, 10, 3.0);
    const double lower = f.value(x) + f.gradient(x).dot(y - x);
    EXPECT_GE(f.value(y), lower + 0.5 * mu * (y - x).squaredNorm() - 1e-10);
  }
}

TEST(SyntheticQuadratic, SpectrumAndSolution) {
  const auto q = make_synthetic_quadratic({5, 10, 2.0, 50.0, 1.0, true, 7});
  EXPECT_DOUBLE_EQ(q.problem.L(), 2.0);
  EXPECT_NEAR(q.problem.mu(), 2.0 / 50.0, 1e-12);
  EXPECT_NEAR(*q.problem.kappa(), 50.0, 1e-9);
  Eigen::VectorXd g(10);
  q.problem.gradient(q.x_star, g);
  EXPECT_LT(g.norm(), 1e-12);
}

TEST(ProblemInstance, TemplateObjective) {
  const auto q = make_synthetic_quadratic({2, 3, 1.0, 10.0, 1.0, false, 1});
  const Eigen::Vector3d x(0.3, -0.2, 1.0);
  const auto& p = q.problem;
  const double expect = 0.5 * (p.client(0).value(x) + p.client(1).value(x)) +
                        2 * p.server().value(x) + p.shared().value(x);
  EXPECT_DOUBLE_EQ(p.value(x), expect);
  EXPECT_FALSE(make_logistic_problem(
                   {make_synthetic_logistic({20, 4, 0.5, 0.1, 1})}, {})
                   .kappa());
}

TEST(LogisticProblem, KappaAndFold) {
  Rng rng(3);
  const auto data = make_synthetic_logistic({200, 15, 0.3, 0.1, 5});
  const auto shards = partition(data, 4, rng).shards;
  LogisticProblemOptions opts;
  opts.kappa = 100.0;
  const auto p = make_logistic_problem(shards, opts);
  EXPECT_NEAR(*p.kappa(), 100.0, 1e-9);
  opts.fold_regularizers = true;
  const auto folded = make_logistic_problem(shards, opts);
  const Eigen::VectorXd x = random_vector(rng, 15);
  EXPECT_NEAR(p.value(x), folded.value(x), 1e-12);
  EXPECT_EQ(folded.server().value(x), 0.0);
}

}  // namespace
}  // namespace bicolor
