// Copyright 2026 The rfvi Authors
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

namespace rfvi {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument: dimension mismatch, negative scale, non-finite entry.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A configuration value out of its admissible range or missing.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (e.g. oracle queried outside Y).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Polyak step requested with g+ > 0 but a zero subgradient.
class DegenerateSubgradient : public Error {
 public:
  using Error::Error;
};

// Rejection sampling produced no feasible point.
class EmptyCloud : public Error {
 public:
  using Error::Error;
};

// Operation not defined for this kind of input (e.g. summing over an
// infinite constraint family).
class Unsupported : public Error {
 public:
  using Error::Error;
};

// Solver aborted; the message carries the iteration and the cause.
class RunFailure : public Error {
 public:
  RunFailure(int iteration, const std::string& cause)
      : Error("run failed at iteration " + std::to_string(iteration) + ": " + cause),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace rfvi
