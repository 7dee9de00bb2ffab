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
#ifndef BICOLOR_CODEC_HPP_
#define BICOLOR_CODEC_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "bicolor/compressors.hpp"

namespace bicolor {

/// Little-endian bit packer: bit i of the stream is bit (i % 8) of byte i / 8.
class BitWriter {
 public:
  void write(std::uint64_t value, unsigned width);
  std::uint64_t bit_size() const { return bits_; }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint64_t read(unsigned width);
  std::uint64_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t pos_ = 0;
};

/// Serialized message. The header (support size) frames the message and is
/// not part of the charged size; body_bits() equals encoded_bits().
struct EncodedMessage {
  std::vector<std::uint8_t> bytes;
  std::uint64_t header_bits = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t body_bits() const { return total_bits - header_bits; }
};

/// Width of the support-size header: ceil(log2(d + 1)).
std::uint64_t header_bits(std::size_t d);

/// Layout: support size, then ascending indices at ceil(log2 d) bits each
/// (omitted when the support is all of [0, d)), then values at
/// spec.value_bits() each. 32-bit values are IEEE float32 patterns; 9-bit
/// values are a sign bit followed by the biased float32 exponent (0 = zero).
EncodedMessage encode_message(const CompressorSpec& spec,
                              const CompressedMessage& message);

CompressedMessage decode_message(const CompressorSpec& spec,
                                 std::span<const std::uint8_t> bytes);

}  // namespace bicolor

#endif  // BICOLOR_CODEC_HPP_
