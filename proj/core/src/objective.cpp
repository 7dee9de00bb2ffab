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
#include "bicolor/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bicolor/errors.hpp"
#include "bicolor/rng.hpp"

namespace bicolor {
namespace {

void check_dim(const VectorRef& x, std::size_t d, const char* who) {
  if (static_cast<std::size_t>(x.size()) != d)
    throw ContractViolation(std::string(who) + ": dimension " +
                            std::to_string(x.size()) + " != " +
                            std::to_string(d));
}

Eigen::MatrixXd random_orthogonal(std::size_t d, Rng& rng) {
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

Eigen::MatrixXd spectrum_matrix(std::size_t d, double lo, double hi, Rng& rng) {
  Eigen::VectorXd eig(d);
  for (std::size_t j = 0; j < d; ++j) eig[j] = lo + (hi - lo) * rng.uniform();
  eig[0] = lo;
  if (d > 1) eig[d - 1] = hi;
  const Eigen::MatrixXd q = random_orthogonal(d, rng);
  Eigen::MatrixXd a = q * eig.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

}  // namespace

SquaredNorm::SquaredNorm(double mu, std::size_t d) : mu_(mu), d_(d) {
  if (mu < 0) throw ContractViolation("quadratic_reg: mu must be >= 0");
}

double SquaredNorm::value(const VectorRef& x) const {
  check_dim(x, d_, "SquaredNorm");
  return 0.5 * mu_ * x.squaredNorm();
}

void SquaredNorm::gradient(const VectorRef& x,
                           Eigen::Ref<Eigen::VectorXd> out) const {
  check_dim(x, d_, "SquaredNorm");
  out = mu_ * x;
}

std::shared_ptr<const Objective> quadratic_reg(double mu, std::size_t d) {
  return std::make_shared<SquaredNorm>(mu, d);
}

QuadraticForm::QuadraticForm(Eigen::MatrixXd a, Eigen::VectorXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size())
    throw ContractViolation("QuadraticForm: shape mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a_, Eigen::EigenvaluesOnly);
  lmin_ = std::max(0.0, es.eigenvalues().minCoeff());
  lmax_ = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, lmax_))
    throw ContractViolation("QuadraticForm: Hessian is not PSD");
}

QuadraticForm::QuadraticForm(Eigen::MatrixXd a, Eigen::VectorXd b, double mu,
                             double L)
    : QuadraticForm(std::move(a), std::move(b)) {
  const double tol = 1e-9 * std::max(1.0, L);
  if (std::abs(mu - lmin_) > tol || std::abs(L - lmax_) > tol)
    throw ContractViolation("QuadraticForm: declared spectrum bounds disagree");
  lmin_ = mu;
  lmax_ = L;
}

double QuadraticForm::value(const VectorRef& x) const {
  check_dim(x, dimension(), "QuadraticForm");
  return 0.5 * x.dot(a_ * x) - b_.dot(x);
}

void QuadraticForm::gradient(const VectorRef& x,
                             Eigen::Ref<Eigen::VectorXd> out) const {
  check_dim(x, dimension(), "QuadraticForm");
  out.noalias() = a_ * x;
  out -= b_;
}

ProblemInstance::ProblemInstance(
    std::vector<std::shared_ptr<const Objective>> clients,
    std::shared_ptr<const Objective> server,
    std::shared_ptr<const Objective> shared)
    : clients_(std::move(clients)),
      server_(std::move(server)),
      shared_(std::move(shared)) {
  if (clients_.empty()) throw ContractViolation("problem needs n >= 1 clients");
  if (!server_ || !shared_) throw ContractViolation("problem: null component");
  d_ = server_->dimension();
  l_ = std::max(server_->smoothness(), shared_->smoothness());
  mu_ = std::min(server_->strong_convexity(), shared_->strong_convexity());
  for (const auto& c : clients_) {
    if (!c) throw ContractViolation("problem: null client objective");
    l_ = std::max(l_, c->smoothness());
    mu_ = std::min(mu_, c->strong_convexity());
  }
  if (shared_->dimension() != d_)
    throw ContractViolation("problem: component dimensions differ");
  for (const auto& c : clients_)
    if (c->dimension() != d_)
      throw ContractViolation("problem: component dimensions differ");
  if (!(l_ > 0)) throw ContractViolation("problem: L must be positive");
}

std::optional<double> ProblemInstance::kappa() const {
  if (mu_ > 0) return l_ / mu_;
  return std::nullopt;
}

double ProblemInstance::value(const VectorRef& x) const {
  double sum = 0;
  for (const auto& c : clients_) sum += c->value(x);
  return sum / static_cast<double>(n()) + 2.0 * server_->value(x) +
         shared_->value(x);
}

void ProblemInstance::gradient(const VectorRef& x,
                               Eigen::Ref<Eigen::VectorXd> out) const {
  Eigen::VectorXd tmp(x.size());
  out.setZero();
  for (const auto& c : clients_) {
    c->gradient(x, tmp);
    out += tmp;
  }
  out /= static_cast<double>(n());
  server_->gradient(x, tmp);
  out += 2.0 * tmp;
  shared_->gradient(x, tmp);
  out += tmp;
}

SyntheticQuadratic make_synthetic_quadratic(const SyntheticQuadraticSpec& spec) {
  if (spec.n == 0 || spec.d == 0)
    throw ContractViolation("synthetic quadratic: n and d must be positive");
  if (!(spec.kappa >= 1.0) || !(spec.L > 0))
    throw ContractViolation("synthetic quadratic: need L > 0 and kappa >= 1");
  Rng rng(spec.seed);
  const std::size_t d = spec.d;
  const double mu = spec.L / spec.kappa;

  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  std::vector<std::shared_ptr<const Objective>> clients;
  for (std::size_t i = 0; i < spec.n; ++i) {
    Eigen::MatrixXd a = spectrum_matrix(d, mu, spec.L, rng);
    Eigen::VectorXd b(d);
    for (auto& v : b) v = spec.heterogeneity * rng.normal();
    total += a / static_cast<double>(spec.n);
    rhs += b / static_cast<double>(spec.n);
    clients.push_back(
        std::make_shared<QuadraticForm>(std::move(a), std::move(b), mu, spec.L));
  }

  std::shared_ptr<const Objective> server;
  std::shared_ptr<const Objective> shared;
  if (spec.regularizer_server) {
    server = quadratic_reg(mu, d);
    shared = quadratic_reg(mu, d);
    total += 3.0 * mu * Eigen::MatrixXd::Identity(d, d);
  } else {
    Eigen::MatrixXd as = spectrum_matrix(d, mu, spec.L, rng);
    Eigen::MatrixXd ag = spectrum_matrix(d, mu, spec.L, rng);
    Eigen::VectorXd bs(d);
    Eigen::VectorXd bg(d);
    for (auto& v : bs) v = spec.heterogeneity * rng.normal();
    for (auto& v : bg) v = spec.heterogeneity * rng.normal();
    total += 2.0 * as + ag;
    rhs += 2.0 * bs + bg;
    server = std::make_shared<QuadraticForm>(std::move(as), std::move(bs), mu,
                                             spec.L);
    shared = std::make_shared<QuadraticForm>(std::move(ag), std::move(bg), mu,
                                             spec.L);
  }
  Eigen::VectorXd x_star = total.ldlt().solve(rhs);
  return SyntheticQuadratic{
      ProblemInstance(std::move(clients), std::move(server), std::move(shared)),
      std::move(x_star)};
}

}  // namespace bicolor
