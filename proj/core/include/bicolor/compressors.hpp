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
#ifndef BICOLOR_COMPRESSORS_HPP_
#define BICOLOR_COMPRESSORS_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bicolor/rng.hpp"

namespace bicolor {

enum class CompressorKind { identity, rand_k, natural, composed };

/// Which averaged-variance bound applies to a family of compressors used in
/// parallel: omega/n for mutually independent draws, omega otherwise.
enum class Independence { mutually_independent, shared_randomness };

/// Immutable description of an unbiased compressor on R^d.
///
/// Composition applies `inner` first and then `outer` to the values the inner
/// compressor kept. `outer` must be a per-value quantizer (identity or
/// natural), so the support of a composed message is the inner support.
class CompressorSpec {
 public:
  static CompressorSpec identity(std::size_t d);
  static CompressorSpec rand_k(std::size_t d, std::size_t k);
  static CompressorSpec natural(std::size_t d);
  static CompressorSpec composed(const CompressorSpec& outer,
                                 const CompressorSpec& inner);

  CompressorSpec with_independence(Independence independence) const;

  CompressorKind kind() const { return kind_; }
  std::size_t dimension() const { return dimension_; }
  /// Kept coordinate count for rand-K (the inner one when composed), else d.
  std::size_t k() const;
  Independence independence() const { return independence_; }
  const CompressorSpec& outer() const;
  const CompressorSpec& inner() const;

  /// Relative variance bound on R^d.
  double omega() const { return omega_on(dimension_); }
  /// Relative variance bound when applied to a restricted block of
  /// `block_size` coordinates (rand-K then keeps K of the block).
  double omega_on(std::size_t block_size) const;

  /// Encoded width of one transmitted value: 32 for raw floats, 9 after
  /// natural quantization.
  unsigned value_bits() const;

  /// Whether every coordinate of the candidate block is transmitted.
  bool keeps_all() const;

 private:
  CompressorSpec(CompressorKind kind, std::size_t d, std::size_t k)
      : kind_(kind), dimension_(d), k_(k) {}

  CompressorKind kind_;
  std::size_t dimension_;
  std::size_t k_;
  Independence independence_ = Independence::mutually_independent;
  std::shared_ptr<const CompressorSpec> outer_;
  std::shared_ptr<const CompressorSpec> inner_;
};

/// Sparse decoded output C(x). Indices are strictly increasing in [0, d).
struct CompressedMessage {
  std::size_t dimension = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::uint64_t bit_length = 0;
  /// Portion of bit_length spent on coordinate indices.
  std::uint64_t index_bits = 0;

  std::size_t support_size() const { return indices.size(); }
  Eigen::VectorXd decode() const;
  /// out += scale * C(x)
  void add_to(Eigen::Ref<Eigen::VectorXd> out, double scale = 1.0) const;
};

CompressedMessage compress(const CompressorSpec& spec,
                           const Eigen::Ref<const Eigen::VectorXd>& x,
                           Rng& rng);

/// Compresses x restricted to `omega_set` (ascending, distinct, within
/// [0, d)). Coordinates outside the set are absent from the output.
CompressedMessage compress_restricted(
    const CompressorSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
    std::span<const std::uint32_t> omega_set, Rng& rng);

/// Averaged relative variance of n parallel compressors sharing d and omega.
double omega_av(std::span<const CompressorSpec> specs);

/// ceil(log2(v)) for v >= 1; 0 for v <= 1.
unsigned ceil_log2(std::uint64_t v);

std::uint64_t index_bits(std::size_t support_size, std::size_t d);

/// Exact message size: value bits for every support entry, plus
/// ceil(log2 d) bits per index when the support is a strict subset.
std::uint64_t encoded_bits(const CompressorSpec& spec,
                           std::size_t support_size, std::size_t d);

/// Unbiased stochastic rounding of v to an adjacent power of two within the
/// float32 exponent range [2^-126, 2^127]. Magnitudes below 2^-126 round to
/// 0 or 2^-126; magnitudes above 2^127 are rejected.
double natural_round(double v, Rng& rng);

/// Rounds every payload value to float32 precision (strict transmission).
void quantize_to_float32(CompressedMessage& message);

}  // namespace bicolor

#endif  // BICOLOR_COMPRESSORS_HPP_
