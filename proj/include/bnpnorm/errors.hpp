// Copyright 2026 The bnpnorm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bnpnorm {

// Base of every error the library raises. kind() is the stable error name
// printed by the command-line tool.
class Error : public std::runtime_error {
 public:
  Error(const char* kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] const char* kind() const noexcept { return kind_; }

 private:
  const char* kind_;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("DomainError", what) {}
};

// Input data violates the DataMatrix invariants (shape, non-finite cells).
class InvalidData : public Error {
 public:
  explicit InvalidData(const std::string& what) : Error("InvalidData", what) {}
};

class SingularCovariance : public Error {
 public:
  explicit SingularCovariance(const std::string& what)
      : Error("SingularCovariance", what) {}
};

// Every raw Dirichlet-process weight underflowed; a/N is too small.
class DegenerateWeights : public Error {
 public:
  explicit DegenerateWeights(const std::string& what)
      : Error("DegenerateWeights", what) {}
};

// The prior distance sample collapsed onto a few values.
class DegenerateGrid : public Error {
 public:
  explicit DegenerateGrid(const std::string& what)
      : Error("DegenerateGrid", what) {}
};

class InvalidSpec : public Error {
 public:
  explicit InvalidSpec(const std::string& what) : Error("InvalidSpec", what) {}
};

// Test configuration out of range (bad tuning knobs).
class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string& what)
      : Error("InvalidConfig", what) {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error("EmptyInput", what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("ParseError", "line " + std::to_string(line) + ", column " +
                                std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace bnpnorm
