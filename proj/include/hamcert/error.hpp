// Copyright 2026 The hamcert Authors
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

namespace hamcert {

/** Base class of every error raised by the library. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** A precondition on an argument was violated (bad k, eps <= 0, ...). */
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/** Operator dimensions disagree, or exceed the dense-simulation cap. */
class DimensionError : public Error {
 public:
  using Error::Error;
};

/** Input that should be Hermitian is not, beyond tolerance. */
class NotHermitian : public Error {
 public:
  using Error::Error;
};

/** A covering net would exceed the configured member cap. */
class NetTooLarge : public Error {
 public:
  using Error::Error;
};

/** A copy budget is below what the shadow guarantee needs. */
class InsufficientCopies : public Error {
 public:
  using Error::Error;
};

/** Malformed Hamiltonian text or configuration file. */
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace hamcert
