// Copyright 2026 The FormGraph Authors.
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

namespace formgraph {

// Bad arguments, configuration or weights. The CLI maps these to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or layer dimensions that do not line up.
class ShapeError : public UsageError {
 public:
  using UsageError::UsageError;
};

// Malformed or inconsistent input data (annotation files, weight containers).
// The CLI maps these to exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Weight container problems: bad magic, truncated payload, manifest mismatch.
class WeightsError : public UsageError {
 public:
  using UsageError::UsageError;
};

}  // namespace formgraph
