/*
 * Copyright 2026 The lostpennies Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace tlp {

// Base of every error the library throws. The CLI maps subclasses onto exit
// codes: ValidationError -> 2, ConvergenceError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied value violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An iterative method (bracket growth, root solve, quadrature, window
// growth) did not reach its tolerance within its budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A result would leave the representable floating-point range.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, double magnitude)
      : Error(what), magnitude_(magnitude) {}
  double magnitude() const noexcept { return magnitude_; }

 private:
  double magnitude_;
};

// An internal invariant that holds mathematically was observed to fail.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace tlp
