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
#include "bicolor/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "bicolor/errors.hpp"

namespace bicolor {

double softplus(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LogisticLoss::LogisticLoss(const SparseDataset& shard, double mu,
                           std::optional<double> L_data)
    : a_(shard.matrix()), b_(shard.labels()), d_(shard.d), mu_(mu) {
  if (shard.size() == 0) throw ContractViolation("logistic: empty shard");
  if (mu < 0) throw ContractViolation("logistic: mu must be >= 0");
  l_data_ = L_data ? *L_data : estimate_L(shard, 0.0);
}

double LogisticLoss::value_gradient(const VectorRef& x,
                                    Eigen::Ref<Eigen::VectorXd> out) const {
  if (static_cast<std::size_t>(x.size()) != d_)
    throw ContractViolation("logistic: dimension mismatch");
  const Eigen::VectorXd margins = b_.cwiseProduct(a_ * x);
  const double m = static_cast<double>(b_.size());
  Eigen::VectorXd weights(margins.size());
  double sum = 0;
  for (Eigen::Index j = 0; j < margins.size(); ++j) {
    sum += softplus(-margins[j]);
    weights[j] = -b_[j] * sigmoid(-margins[j]) / m;
  }
  out.noalias() = a_.transpose() * weights;
  out += mu_ * x;
  return sum / m + 0.5 * mu_ * x.squaredNorm();
}

double LogisticLoss::value(const VectorRef& x) const {
  if (static_cast<std::size_t>(x.size()) != d_)
    throw ContractViolation("logistic: dimension mismatch");
  const Eigen::VectorXd margins = b_.cwiseProduct(a_ * x);
  double sum = 0;
  for (Eigen::Index j = 0; j < margins.size(); ++j) sum += softplus(-margins[j]);
  return sum / static_cast<double>(b_.size()) + 0.5 * mu_ * x.squaredNorm();
}

void LogisticLoss::gradient(const VectorRef& x,
                            Eigen::Ref<Eigen::VectorXd> out) const {
  value_gradient(x, out);
}

ProblemInstance make_logistic_problem(const std::vector<SparseDataset>& shards,
                                      const LogisticProblemOptions& options) {
  if (shards.empty()) throw ContractViolation("logistic problem: no shards");
  const std::size_t d = shards.front().d;
  std::vector<double> l_data;
  double l_max = 0;
  for (const auto& s : shards) {
    if (s.d != d) throw ContractViolation("logistic problem: shard d differs");
    l_data.push_back(estimate_L(s, 0.0));
    l_max = std::max(l_max, l_data.back());
  }
  double mu = 0;
  if (options.mu)
    mu = *options.mu;
  else if (options.kappa)
    mu = scale_mu_for_kappa(l_max, *options.kappa);

  const double client_mu = options.fold_regularizers ? 4.0 * mu : mu;
  std::vector<std::shared_ptr<const Objective>> clients;
  for (std::size_t i = 0; i < shards.size(); ++i)
    clients.push_back(
        std::make_shared<LogisticLoss>(shards[i], client_mu, l_data[i]));
  const double side_mu = options.fold_regularizers ? 0.0 : mu;
  return ProblemInstance(std::move(clients), quadratic_reg(side_mu, d),
                         quadratic_reg(side_mu, d));
}

}  // namespace bicolor
