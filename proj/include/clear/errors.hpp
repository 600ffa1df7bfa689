// Copyright 2026 The cleargen authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace clear {

// Error taxonomy mirrors the CLI exit codes: usage -> 1, data -> 2, io -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : Error {
  using Error::Error;
};

// Anything wrong with inputs or intermediate state: bad manifests, invalid
// programs, composition/render precondition failures, verification mismatches.
struct DataError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Raised when a unique() node receives a set of size != 1. Callers that
// validate questions catch this; it never escapes the generation pipeline.
struct IllPosedError : DataError {
  using DataError::DataError;
};

}  // namespace clear
