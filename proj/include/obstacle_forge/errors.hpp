// Copyright 2026 The obstacle-forge Authors
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

#ifndef OBSTACLE_FORGE_ERRORS_HPP
#define OBSTACLE_FORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace obstacle_forge
{

enum class ErrorKind
{
  kNotFound,
  kParse,
  kValidation,
  kOutOfRange,
  kIo,
  kUsage,
  kInternal,
};

const char * to_string(ErrorKind kind);

/// Single exception type for the library. The kind decides the C status code
/// and CLI exit status; the message names the offending path / field / frame.
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string & message)
  : std::runtime_error(message), kind_(kind)
  {
  }

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string & message)
{
  throw Error(kind, message);
}

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_ERRORS_HPP
