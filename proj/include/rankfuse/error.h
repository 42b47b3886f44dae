/*
 * Copyright 2026 The rankfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RANKFUSE_ERROR_H_
#define RANKFUSE_ERROR_H_

#include <stdexcept>
#include <string>

namespace rankfuse {

// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorCode {
  kInvalidArgument,  // rejected input (bad shape, non-finite value, ...)
  kConfig,           // inconsistent configuration
  kData,             // unreadable or malformed dataset / file
  kComputation,      // numerical failure (divergence, singular system, ...)
  kBridge,           // external process protocol failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) Fail(ErrorCode::kInvalidArgument, message);
}

const char* ErrorCodeName(ErrorCode code);

}  // namespace rankfuse

#endif  // RANKFUSE_ERROR_H_
