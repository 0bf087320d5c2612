// Copyright 2026 The synthaudit Authors
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

namespace synthaudit {

// Base class for every error raised by the library. Callers that only care
// about "did the audit run" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable input files (I/O failures, ragged rows, bad JSON).
class InputError : public Error {
 public:
  using Error::Error;
};

// Tables or encodings that do not line up: names, kinds, column counts, or
// discretization provenance.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Arguments outside an operation's domain (k > m, empty tables, p > 1, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace synthaudit
