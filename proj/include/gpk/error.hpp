// Copyright 2026 The GPK Authors
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

#include <stdexcept>
#include <string>

namespace gpk {

// Precondition violations on caller-supplied arguments.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures caused by the data rather than by the call.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero denominators: NMSE with zero-mean signals, zero baseline statistic.
class DegenerateError : public DataError {
 public:
  using DataError::DataError;
};

// Pearson correlation with zero variance on one side.
class UndefinedCorrelation : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t row)
      : DataError("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class ConflictError : public DataError {
 public:
  using DataError::DataError;
};

// Internal-consistency check failed (imaginary residue, asymmetric kernel).
class IntegrityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HandshakeError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

}  // namespace gpk
