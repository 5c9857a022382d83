// Copyright 2026 The loccsim Authors.
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

namespace locc {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operands have incompatible or unsupported dimensions.
struct DimensionError : Error {
  using Error::Error;
};

// A register or operator would exceed the configured size bound.
struct SizeLimitError : Error {
  using Error::Error;
};

// A numeric parameter is outside its admissible range.
struct DomainError : Error {
  using Error::Error;
};

// A state or channel fails its defining invariants.
struct StateError : Error {
  using Error::Error;
};

// A mixed state was passed where a pure state is required.
struct PurityError : Error {
  using Error::Error;
};

// Transcripts cannot be compared (different settings or switch schedule).
struct TranscriptMismatchError : Error {
  using Error::Error;
};

// An iterative solver failed to reach its residual target.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double best)
      : Error(what), best_residual(best) {}
  double best_residual;
};

// Invalid experiment configuration.
struct ConfigError : Error {
  using Error::Error;
};

// A file could not be read, written, or parsed.
struct IoError : Error {
  using Error::Error;
};

}  // namespace locc
