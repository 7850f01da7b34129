// Copyright 2026 The socialfed Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace socialfed {

// Argument outside the documented range of an operation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input outside the region where a fitted model is valid.
class OutOfDomain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Configuration that makes a formula degenerate (e.g. a zero denominator).
class DegenerateConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Persisted artifact that cannot be loaded or fails validation.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Brute-force request beyond the enumeration guard.
class SizeGuard : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace socialfed
