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
#include "bicolor/compressors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "bicolor/errors.hpp"

namespace bicolor {
namespace {

constexpr double kMinNaturalPow = 0x1.0p-126;
constexpr double kMaxNaturalPow = 0x1.0p127;

// Candidate coordinates: either all of [0, d) or an explicit ascending set.
class Candidates {
 public:
  explicit Candidates(std::size_t d) : full_(d) {}
  explicit Candidates(std::span<const std::uint32_t> set)
      : full_(0), set_(set) {}

  std::size_t size() const { return set_.empty() ? full_ : set_.size(); }
  std::uint32_t operator[](std::size_t i) const {
    return set_.empty() ? static_cast<std::uint32_t>(i) : set_[i];
  }

 private:
  std::size_t full_;
  std::span<const std::uint32_t> set_;
};

void quantize_values(const CompressorSpec& quantizer,
                     std::vector<double>& values, Rng& rng) {
  switch (quantizer.kind()) {
    case CompressorKind::identity:
      return;
    case CompressorKind::natural:
      for (double& v : values) v = natural_round(v, rng);
      return;
    default:
      throw ContractViolation("outer compressor must be a per-value quantizer");
  }
}

void fill(const CompressorSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
          const Candidates& cand, Rng& rng, CompressedMessage& msg) {
  const std::size_t m = cand.size();
  switch (spec.kind()) {
    case CompressorKind::identity:
    case CompressorKind::natural: {
      msg.indices.resize(m);
      msg.values.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        msg.indices[i] = cand[i];
        msg.values[i] = x[cand[i]];
      }
      if (spec.kind() == CompressorKind::natural)
        quantize_values(spec, msg.values, rng);
      return;
    }
    case CompressorKind::rand_k: {
      const std::size_t kept = spec.k();
      if (kept > m)
        throw ContractViolation("rand-K: K=" + std::to_string(kept) +
                                " exceeds block size " + std::to_string(m));
      const std::vector<std::uint32_t> picks = sample_subset(rng, m, kept);
      const double scale = static_cast<double>(m) / static_cast<double>(kept);
      msg.indices.resize(kept);
      msg.values.resize(kept);
      for (std::size_t i = 0; i < kept; ++i) {
        msg.indices[i] = cand[picks[i]];
        msg.values[i] = scale * x[msg.indices[i]];
      }
      return;
    }
    case CompressorKind::composed:
      fill(spec.inner(), x, cand, rng, msg);
      quantize_values(spec.outer(), msg.values, rng);
      return;
  }
}

CompressedMessage compress_impl(const CompressorSpec& spec,
                                const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Candidates& cand, Rng& rng) {
  const std::size_t d = spec.dimension();
  if (static_cast<std::size_t>(x.size()) != d)
    throw ContractViolation("compress: input dimension " +
                            std::to_string(x.size()) + " != spec dimension " +
                            std::to_string(d));
  CompressedMessage msg;
  msg.dimension = d;
  bool all_zero = true;
  for (std::size_t i = 0; i < cand.size() && all_zero; ++i)
    all_zero = x[cand[i]] == 0.0;
  if (!all_zero) fill(spec, x, cand, rng, msg);
  msg.bit_length = encoded_bits(spec, msg.support_size(), d);
  msg.index_bits = index_bits(msg.support_size(), d);
  return msg;
}

}  // namespace

CompressorSpec CompressorSpec::identity(std::size_t d) {
  if (d == 0) throw ContractViolation("compressor dimension must be positive");
  return CompressorSpec(CompressorKind::identity, d, d);
}

CompressorSpec CompressorSpec::rand_k(std::size_t d, std::size_t k) {
  if (d == 0) throw ContractViolation("compressor dimension must be positive");
  if (k < 1 || k > d)
    throw ContractViolation("rand-K requires 1 <= K <= d, got K=" +
                            std::to_string(k) + ", d=" + std::to_string(d));
  return CompressorSpec(CompressorKind::rand_k, d, k);
}

CompressorSpec CompressorSpec::natural(std::size_t d) {
  if (d == 0) throw ContractViolation("compressor dimension must be positive");
  return CompressorSpec(CompressorKind::natural, d, d);
}

CompressorSpec CompressorSpec::composed(const CompressorSpec& outer,
                                        const CompressorSpec& inner) {
  if (outer.dimension() != inner.dimension())
    throw ContractViolation("composed compressors must share the dimension");
  if (outer.kind() != CompressorKind::identity &&
      outer.kind() != CompressorKind::natural)
    throw ContractViolation(
        "outer compressor of a composition must be identity or natural");
  CompressorSpec spec(CompressorKind::composed, inner.dimension(), inner.k());
  spec.outer_ = std::make_shared<const CompressorSpec>(outer);
  spec.inner_ = std::make_shared<const CompressorSpec>(inner);
  spec.independence_ = inner.independence_;
  return spec;
}

CompressorSpec CompressorSpec::with_independence(
    Independence independence) const {
  CompressorSpec copy = *this;
  copy.independence_ = independence;
  return copy;
}

std::size_t CompressorSpec::k() const { return k_; }

const CompressorSpec& CompressorSpec::outer() const {
  if (!outer_) throw ContractViolation("outer(): spec is not composed");
  return *outer_;
}

const CompressorSpec& CompressorSpec::inner() const {
  if (!inner_) throw ContractViolation("inner(): spec is not composed");
  return *inner_;
}

double CompressorSpec::omega_on(std::size_t block_size) const {
  switch (kind_) {
    case CompressorKind::identity:
      return 0.0;
    case CompressorKind::natural:
      return 1.0 / 8.0;
    case CompressorKind::rand_k:
      return static_cast<double>(block_size) / static_cast<double>(k_) - 1.0;
    case CompressorKind::composed:
      return (1.0 + outer_->omega_on(block_size)) *
                 (1.0 + inner_->omega_on(block_size)) -
             1.0;
  }
  return 0.0;
}

unsigned CompressorSpec::value_bits() const {
  switch (kind_) {
    case CompressorKind::natural:
      return 9;
    case CompressorKind::composed:
      return outer_->kind() == CompressorKind::identity ? inner_->value_bits()
                                                        : outer_->value_bits();
    default:
      return 32;
  }
}

bool CompressorSpec::keeps_all() const {
  switch (kind_) {
    case CompressorKind::rand_k:
      return false;
    case CompressorKind::composed:
      return inner_->keeps_all();
    default:
      return true;
  }
}

Eigen::VectorXd CompressedMessage::decode() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension));
  add_to(out);
  return out;
}

void CompressedMessage::add_to(Eigen::Ref<Eigen::VectorXd> out,
                               double scale) const {
  for (std::size_t i = 0; i < indices.size(); ++i)
    out[indices[i]] += scale * values[i];
}

CompressedMessage compress(const CompressorSpec& spec,
                           const Eigen::Ref<const Eigen::VectorXd>& x,
                           Rng& rng) {
  return compress_impl(spec, x, Candidates(spec.dimension()), rng);
}

CompressedMessage compress_restricted(
    const CompressorSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
    std::span<const std::uint32_t> omega_set, Rng& rng) {
  const std::size_t d = spec.dimension();
  for (std::size_t i = 0; i < omega_set.size(); ++i) {
    if (omega_set[i] >= d)
      throw ContractViolation("compress_restricted: index " +
                              std::to_string(omega_set[i]) + " out of range");
    if (i > 0 && omega_set[i] <= omega_set[i - 1])
      throw ContractViolation(
          "compress_restricted: subset must be strictly ascending");
  }
  if (omega_set.empty()) {
    CompressedMessage msg;
    msg.dimension = d;
    return msg;
  }
  return compress_impl(spec, x, Candidates(omega_set), rng);
}

double omega_av(std::span<const CompressorSpec> specs) {
  if (specs.empty()) throw ContractViolation("omega_av: empty compressor list");
  const double omega = specs.front().omega();
  const std::size_t d = specs.front().dimension();
  bool independent = true;
  for (const auto& s : specs) {
    if (s.dimension() != d || std::abs(s.omega() - omega) > 1e-12 * (1 + omega))
      throw ContractViolation("omega_av: compressors must share d and omega");
    independent &= s.independence() == Independence::mutually_independent;
  }
  return independent ? omega / static_cast<double>(specs.size()) : omega;
}

unsigned ceil_log2(std::uint64_t v) {
  if (v <= 1) return 0;
  return 64U - static_cast<unsigned>(std::countl_zero(v - 1));
}

std::uint64_t index_bits(std::size_t support_size, std::size_t d) {
  return support_size < d ? support_size * ceil_log2(d) : 0;
}

std::uint64_t encoded_bits(const CompressorSpec& spec,
                           std::size_t support_size, std::size_t d) {
  if (support_size > d)
    throw ContractViolation("encoded_bits: support exceeds dimension");
  return support_size * static_cast<std::uint64_t>(spec.value_bits()) +
         index_bits(support_size, d);
}

double natural_round(double v, Rng& rng) {
  if (v == 0.0) return 0.0;
  const double mag = std::abs(v);
  if (!std::isfinite(mag) || mag > kMaxNaturalPow)
    throw ContractViolation("natural compression: magnitude outside float32 "
                            "exponent range");
  double lo;
  double hi;
  if (mag < kMinNaturalPow) {
    lo = 0.0;
    hi = kMinNaturalPow;
  } else {
    int exp = 0;
    std::frexp(mag, &exp);  // mag = m * 2^exp, m in [0.5, 1)
    lo = std::ldexp(1.0, exp - 1);
    if (lo == mag) return v;
    hi = 2.0 * lo;
  }
  // P(hi) = (mag - lo) / (hi - lo) keeps the rounding unbiased.
  const double up = (mag - lo) / (hi - lo);
  const double r = rng.bernoulli(up) ? hi : lo;
  return std::signbit(v) ? -r : r;
}

void quantize_to_float32(CompressedMessage& message) {
  for (double& v : message.values) v = static_cast<double>(static_cast<float>(v));
}

}  // namespace bicolor
