// Copyright 2026 The robust-is Authors
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

#ifndef RIS_ERROR_HPP
#define RIS_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace ris {

/// Failure categories surfaced by the library.
enum class ErrorCode {
  kInvalidInput,
  kNotPositiveDefinite,
  kDiverged,
  kDegenerateSample,
  kInsufficientTail,
  kConstantChain,
  kDivisionByZero,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kDegenerateSample: return "DegenerateSample";
    case ErrorCode::kInsufficientTail: return "InsufficientTail";
    case ErrorCode::kConstantChain: return "ConstantChain";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by iterative solvers that ran out of iterations; carries the last iterate.
template <class Payload>
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, Payload last)
      : Error(ErrorCode::kDiverged, what), last_(std::move(last)) {}

  [[nodiscard]] const Payload& last() const noexcept { return last_; }

 private:
  Payload last_;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) {
    throw Error(ErrorCode::kInvalidInput, what);
  }
}

}  // namespace ris

#endif  // RIS_ERROR_HPP
