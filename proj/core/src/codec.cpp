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
#include "bicolor/codec.hpp"

#include <bit>
#include <cmath>

#include "bicolor/errors.hpp"

namespace bicolor {
namespace {

std::uint64_t encode_natural(double v) {
  const std::uint64_t sign = std::signbit(v) ? 1 : 0;
  if (v == 0.0) return sign;
  int exp = 0;
  const double m = std::frexp(std::abs(v), &exp);
  const int biased = exp - 1 + 127;
  if (m != 0.5 || biased < 1 || biased > 254)
    throw ContractViolation("9-bit codec: value is not a float32 power of two");
  return sign | (static_cast<std::uint64_t>(biased) << 1);
}

double decode_natural(std::uint64_t code) {
  const std::uint64_t biased = code >> 1;
  const double mag =
      biased == 0 ? 0.0 : std::ldexp(1.0, static_cast<int>(biased) - 127);
  return (code & 1U) ? -mag : mag;
}

}  // namespace

void BitWriter::write(std::uint64_t value, unsigned width) {
  for (unsigned b = 0; b < width; ++b) {
    if (bits_ % 8 == 0) bytes_.push_back(0);
    if ((value >> b) & 1U)
      bytes_.back() |= static_cast<std::uint8_t>(1U << (bits_ % 8));
    ++bits_;
  }
}

std::uint64_t BitReader::read(unsigned width) {
  std::uint64_t value = 0;
  for (unsigned b = 0; b < width; ++b, ++pos_) {
    if (pos_ / 8 >= bytes_.size())
      throw ContractViolation("BitReader: read past end of stream");
    if ((bytes_[pos_ / 8] >> (pos_ % 8)) & 1U) value |= std::uint64_t{1} << b;
  }
  return value;
}

std::uint64_t header_bits(std::size_t d) { return ceil_log2(d + 1); }

EncodedMessage encode_message(const CompressorSpec& spec,
                              const CompressedMessage& message) {
  const std::size_t d = spec.dimension();
  if (message.dimension != d)
    throw ContractViolation("encode_message: dimension mismatch");
  const std::size_t support = message.support_size();
  BitWriter w;
  const auto head = static_cast<unsigned>(header_bits(d));
  w.write(support, head);
  if (support < d) {
    const unsigned width = ceil_log2(d);
    for (std::uint32_t idx : message.indices) w.write(idx, width);
  }
  const unsigned vbits = spec.value_bits();
  for (double v : message.values) {
    if (vbits == 32) {
      w.write(std::bit_cast<std::uint32_t>(static_cast<float>(v)), 32);
    } else {
      w.write(encode_natural(v), vbits);
    }
  }
  EncodedMessage out;
  out.header_bits = head;
  out.total_bits = w.bit_size();
  out.bytes = w.take();
  return out;
}

CompressedMessage decode_message(const CompressorSpec& spec,
                                 std::span<const std::uint8_t> bytes) {
  const std::size_t d = spec.dimension();
  BitReader r(bytes);
  CompressedMessage msg;
  msg.dimension = d;
  const std::size_t support =
      r.read(static_cast<unsigned>(header_bits(d)));
  if (support > d) throw ContractViolation("decode_message: support exceeds d");
  msg.indices.resize(support);
  if (support < d) {
    const unsigned width = ceil_log2(d);
    for (auto& idx : msg.indices) {
      idx = static_cast<std::uint32_t>(r.read(width));
      if (idx >= d) throw ContractViolation("decode_message: index out of range");
    }
  } else {
    for (std::size_t i = 0; i < support; ++i)
      msg.indices[i] = static_cast<std::uint32_t>(i);
  }
  const unsigned vbits = spec.value_bits();
  msg.values.resize(support);
  for (auto& v : msg.values) {
    if (vbits == 32) {
      v = std::bit_cast<float>(static_cast<std::uint32_t>(r.read(32)));
    } else {
      v = decode_natural(r.read(vbits));
    }
  }
  msg.bit_length = encoded_bits(spec, support, d);
  msg.index_bits = index_bits(support, d);
  return msg;
}

}  // namespace bicolor
