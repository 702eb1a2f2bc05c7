// Copyright 2026 The narrmem Authors.
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

#ifndef NARRMEM_CORE_ERROR_HPP_
#define NARRMEM_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace narrmem {

// Every failure raised by the library carries a machine-readable code
// (e.g. "REPLAY_MISS", "KEY_PARSE") in addition to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string &message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string &code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace narrmem

#endif  // NARRMEM_CORE_ERROR_HPP_
