// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mrlrc {

/// Parameters violate a construction constraint. The message names the
/// violated inequality or field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Not enough independent intact symbols remain; data is lost.
class Unrecoverable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation points are not P-independent.
class PIndependenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A secrecy theorem was invoked outside its hypotheses.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mrlrc
