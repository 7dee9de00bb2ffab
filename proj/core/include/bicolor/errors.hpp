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
#ifndef BICOLOR_ERRORS_HPP_
#define BICOLOR_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bicolor {

/// A caller broke a documented precondition (dimension mismatch, index out
/// of range, invalid parameter).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed LibSVM or configuration input.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// An iterative routine hit its iteration cap. Carries the last iterate's
/// quality measure (estimate or residual).
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double last_value)
      : std::runtime_error(what), last_value_(last_value) {}
  double last_value() const { return last_value_; }

 private:
  double last_value_;
};

/// An algorithm invariant (dual-sum constraint, replica equality) failed.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(const std::string& what, double magnitude)
      : std::runtime_error(what), magnitude_(magnitude) {}
  double magnitude() const { return magnitude_; }

 private:
  double magnitude_;
};

/// A Bregman distance came out negative beyond rounding tolerance.
class ConvexityViolation : public std::runtime_error {
 public:
  ConvexityViolation(const std::string& what, double value)
      : std::runtime_error(what), value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

}  // namespace bicolor

#endif  // BICOLOR_ERRORS_HPP_
