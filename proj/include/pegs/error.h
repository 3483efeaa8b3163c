// Copyright 2026 The PeGS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PEGS_ERROR_H_
#define PEGS_ERROR_H_

#include <stdexcept>
#include <string>

namespace pegs {

// Error categories double as process exit codes for the command-line tool.
enum class ErrorCode : int {
  kUsage = 1,
  kData = 2,
  kPrivacy = 3,
  kIo = 4,
};

class PegsError : public std::runtime_error {
 public:
  PegsError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void ThrowUsage(const std::string& message) {
  throw PegsError(ErrorCode::kUsage, message);
}
[[noreturn]] inline void ThrowData(const std::string& message) {
  throw PegsError(ErrorCode::kData, message);
}
[[noreturn]] inline void ThrowPrivacy(const std::string& message) {
  throw PegsError(ErrorCode::kPrivacy, message);
}
[[noreturn]] inline void ThrowIo(const std::string& message) {
  throw PegsError(ErrorCode::kIo, message);
}

}  // namespace pegs

#endif  // PEGS_ERROR_H_
