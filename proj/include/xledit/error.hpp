// Copyright 2026 The xledit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace xledit {

/// A caller broke a documented precondition (bad shape, index out of range,
/// non-scalar loss, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input data could not be used: missing file, malformed line, unknown key.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define XLEDIT_REQUIRE(cond, msg)                        \
  do {                                                   \
    if (!(cond)) throw ::xledit::ContractError(msg);     \
  } while (0)

}  // namespace xledit
