// Copyright 2026 The dailoc Authors
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

namespace dailoc {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Non-finite gradient or loss during optimization.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation (e.g. sigma <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Gradient check could not be carried out (e.g. non-deterministic loss).
class CheckInvalidError : public Error {
 public:
  using Error::Error;
};

// Lifecycle precondition violated (unknown device, already-known device...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Bad user input: empty datasets, unlabeled rows where labels are required.
class InputError : public Error {
 public:
  using Error::Error;
};

// RSS value outside [-100, 0] dBm.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed file content; the message carries the line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

// File content disagrees with its declared schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Building geometry cannot host the requested RP grid.
class LayoutError : public Error {
 public:
  using Error::Error;
};

// Unknown RP index, missing checkpoint, empty probe set...
class MetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dailoc
