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
#ifndef BICOLOR_LOGISTIC_HPP_
#define BICOLOR_LOGISTIC_HPP_

#include <memory>
#include <vector>

#include "bicolor/dataset.hpp"
#include "bicolor/objective.hpp"

namespace bicolor {

/// (1/m) sum_j log(1 + exp(-b_j a_j'x)) + (mu/2)||x||^2 over one shard.
class LogisticLoss final : public Objective {
 public:
  /// `L` is the data smoothness bound (without mu); estimated when absent.
  LogisticLoss(const SparseDataset& shard, double mu,
               std::optional<double> L_data = std::nullopt);

  std::size_t dimension() const override { return d_; }
  double value(const VectorRef& x) const override;
  using Objective::gradient;
  void gradient(const VectorRef& x,
                Eigen::Ref<Eigen::VectorXd> out) const override;
  double smoothness() const override { return l_data_ + mu_; }
  double strong_convexity() const override { return mu_; }

  /// Value and gradient sharing one pass over the data.
  double value_gradient(const VectorRef& x,
                        Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> a_;
  Eigen::VectorXd b_;
  std::size_t d_;
  double mu_;
  double l_data_;
};

/// log(1 + exp(z)) without overflow.
double softplus(double z);
/// 1 / (1 + exp(-z)) without overflow.
double sigmoid(double z);

struct LogisticProblemOptions {
  /// Target condition number; mu is set from the largest shard L. Ignored
  /// when `mu` is given.
  std::optional<double> kappa;
  std::optional<double> mu;
  /// Put 4 mu into every f_i and set f_s = g = 0. The full objective F is
  /// the same either way.
  bool fold_regularizers = false;
};

/// Logistic template instance with f_s = g = (mu/2)||x||^2.
ProblemInstance make_logistic_problem(const std::vector<SparseDataset>& shards,
                                      const LogisticProblemOptions& options);

}  // namespace bicolor

#endif  // BICOLOR_LOGISTIC_HPP_
