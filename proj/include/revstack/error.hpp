// Copyright 2026 The revstack Authors.
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

#ifndef REVSTACK_ERROR_HPP_
#define REVSTACK_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace revstack {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A block or matrix does not have the shape the game dimensions require.
// `level` is the 0-based offending level, or -1 when no single level is at fault.
class DimensionError : public Error {
 public:
  DimensionError(std::string message, int level = -1)
      : Error(std::move(message)), level_(level) {}
  int level() const { return level_; }

 private:
  int level_;
};

class EquilibriumError : public Error {
 public:
  enum class Kind {
    kNoUniqueOptimum,     // singular stationarity system
    kNotAMinimum,         // stationary point with an indefinite Hessian
    kInfeasible,          // empty constraint set
    kTooManyConstraints,  // active-set enumeration bound exceeded
    kBadInput,
  };
  EquilibriumError(Kind kind, std::string message)
      : Error(std::move(message)), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Descent ran out of iterations; carries the best iterate seen.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(std::string message, Eigen::VectorXd best, double gradient_norm)
      : Error(std::move(message)), best_(std::move(best)), gradient_norm_(gradient_norm) {}
  const Eigen::VectorXd& best_iterate() const { return best_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  Eigen::VectorXd best_;
  double gradient_norm_;
};

// A strategy could not be constructed at `level` because `condition` failed.
class SynthesisError : public Error {
 public:
  SynthesisError(int level, std::string condition, std::string message)
      : Error(std::move(message)), level_(level), condition_(std::move(condition)) {}
  int level() const { return level_; }
  const std::string& condition() const { return condition_; }

 private:
  int level_;
  std::string condition_;
};

// The gradient at a point vanishes, so it defines no hyperplane.
class ZeroGradientError : public Error {
 public:
  using Error::Error;
};

// The follower region of a feasibility check is unbounded.
class UnboundedRegionError : public Error {
 public:
  using Error::Error;
};

// Malformed input document or formula. `line` and `column` are 1-based, 0
// when unknown; `path` locates the offending JSON value (e.g.
// "$.objectives[1].formula").
class ParseError : public Error {
 public:
  ParseError(std::string message, int line = 0, int column = 0, std::string path = {})
      : Error(std::move(message)), line_(line), column_(column), path_(std::move(path)) {}
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& path() const { return path_; }

 private:
  int line_;
  int column_;
  std::string path_;
};

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnknownVariableError : public ParseError {
 public:
  using ParseError::ParseError;
};

class ShapeMismatchError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace revstack

#endif  // REVSTACK_ERROR_HPP_
