// Copyright 2026 The tqb Authors
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

namespace tqb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operator or state violates a structural invariant (Hermiticity,
/// trace, positivity, unitarity).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Dimensions do not match or do not factorize.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// The charge-basis spectrum did not converge at the requested cutoff.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A trajectory does not have the shape the requested fit expects.
class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

/// A regression design matrix is rank deficient.
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// Malformed manifest or CSV input. Carries the offending line when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A collision produced an invalid state; records where the run failed.
class CollisionError : public Error {
 public:
  CollisionError(const std::string& what, long collision_index)
      : Error("collision " + std::to_string(collision_index) + ": " + what),
        index_(collision_index) {}
  long collision_index() const noexcept { return index_; }

 private:
  long index_;
};

}  // namespace tqb
