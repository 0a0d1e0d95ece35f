// Copyright 2026 The QKFE Authors
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

namespace qkfe {

/// Base class for all library errors. The category drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  enum class Category { validation, numerical, capacity };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

/// Bad sizes, malformed inputs, unknown configuration keys.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(Category::validation, what) {}
};

/// Dimension above a configured cap.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what)
      : Error(Category::capacity, what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what)
      : Error(Category::numerical, what) {}
};

/// Exponent outside the representable floating point range.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what)
      : Error(Category::numerical, what) {}
};

/// Partition function below its numerical floor at the requested temperature.
class IllConditionedError : public Error {
 public:
  explicit IllConditionedError(const std::string& what)
      : Error(Category::numerical, what) {}
};

/// Energy distribution non-positive on the comparison window.
class WindowError : public Error {
 public:
  explicit WindowError(const std::string& what)
      : Error(Category::numerical, what) {}
};

/// Objective minimizer stuck at the edge of its search bracket.
class BracketError : public Error {
 public:
  explicit BracketError(const std::string& what)
      : Error(Category::numerical, what) {}
};

}  // namespace qkfe
