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
#ifndef BICOLOR_OBJECTIVE_HPP_
#define BICOLOR_OBJECTIVE_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace bicolor {

using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// A convex, L-smooth function on R^d with a gradient oracle. Implementations
/// are immutable and safe to evaluate concurrently.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(const VectorRef& x) const = 0;
  virtual void gradient(const VectorRef& x,
                        Eigen::Ref<Eigen::VectorXd> out) const = 0;
  /// Smoothness constant (Lipschitz constant of the gradient).
  virtual double smoothness() const = 0;
  /// Strong convexity modulus; 0 in the general convex case.
  virtual double strong_convexity() const = 0;

  Eigen::VectorXd gradient(const VectorRef& x) const {
    Eigen::VectorXd g(x.size());
    gradient(x, g);
    return g;
  }
};

/// (mu/2)||x||^2. With mu = 0 this is the zero function.
class SquaredNorm final : public Objective {
 public:
  SquaredNorm(double mu, std::size_t d);

  std::size_t dimension() const override { return d_; }
  double value(const VectorRef& x) const override;
  using Objective::gradient;
  void gradient(const VectorRef& x,
                Eigen::Ref<Eigen::VectorXd> out) const override;
  double smoothness() const override { return mu_; }
  double strong_convexity() const override { return mu_; }

 private:
  double mu_;
  std::size_t d_;
};

std::shared_ptr<const Objective> quadratic_reg(double mu, std::size_t d);

/// 0.5 x'Ax - b'x with A symmetric positive semidefinite. L and mu are the
/// extreme eigenvalues of A.
class QuadraticForm final : public Objective {
 public:
  QuadraticForm(Eigen::MatrixXd a, Eigen::VectorXd b);
  /// Declares the spectrum bounds instead of rounding them out of an
  /// eigensolver; they must agree with it to 1e-9 relative.
  QuadraticForm(Eigen::MatrixXd a, Eigen::VectorXd b, double mu, double L);

  std::size_t dimension() const override {
    return static_cast<std::size_t>(b_.size());
  }
  double value(const VectorRef& x) const override;
  using Objective::gradient;
  void gradient(const VectorRef& x,
                Eigen::Ref<Eigen::VectorXd> out) const override;
  double smoothness() const override { return lmax_; }
  double strong_convexity() const override { return lmin_; }

  const Eigen::MatrixXd& hessian() const { return a_; }
  const Eigen::VectorXd& linear() const { return b_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  double lmin_ = 0;
  double lmax_ = 0;
};

/// The template objective F(x) = (1/n) sum_i f_i(x) + 2 f_s(x) + g(x) over a
/// star network of n clients and one server. L is the largest component
/// smoothness constant and mu the smallest strong convexity modulus.
class ProblemInstance {
 public:
  ProblemInstance(std::vector<std::shared_ptr<const Objective>> clients,
                  std::shared_ptr<const Objective> server,
                  std::shared_ptr<const Objective> shared);

  std::size_t n() const { return clients_.size(); }
  std::size_t d() const { return d_; }
  double L() const { return l_; }
  double mu() const { return mu_; }
  std::optional<double> kappa() const;

  const Objective& client(std::size_t i) const { return *clients_.at(i); }
  const Objective& server() const { return *server_; }
  const Objective& shared() const { return *shared_; }

  double value(const VectorRef& x) const;
  void gradient(const VectorRef& x, Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  std::vector<std::shared_ptr<const Objective>> clients_;
  std::shared_ptr<const Objective> server_;
  std::shared_ptr<const Objective> shared_;
  std::size_t d_ = 0;
  double l_ = 0;
  double mu_ = 0;
};

struct SyntheticQuadraticSpec {
  std::size_t n = 5;
  std::size_t d = 10;
  double L = 1.0;
  double kappa = 50.0;
  /// Scale of the client linear terms; larger means more heterogeneity.
  double heterogeneity = 1.0;
  /// true: f_s = g = (mu/2)||x||^2. false: random quadratics for both.
  bool regularizer_server = true;
  std::uint64_t seed = 0;
};

/// Quadratic instance with a controlled spectrum, so L, mu and x* are known
/// in closed form. Each client Hessian has eigenvalues spanning [mu, L].
struct SyntheticQuadratic {
  ProblemInstance problem;
  Eigen::VectorXd x_star;
};

SyntheticQuadratic make_synthetic_quadratic(const SyntheticQuadraticSpec& spec);

}  // namespace bicolor

#endif  // BICOLOR_OBJECTIVE_HPP_
