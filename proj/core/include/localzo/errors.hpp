// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lzo {

// Invalid parameters detected at construction / configuration time.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Operation applied outside its mathematical domain (e.g. |z|-CDF of a
// distribution that is not even about zero).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Malformed external input (event files, checkpoints, config documents).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A quadrature or series that fails to converge for the requested object.
struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training diverged (NaN loss). Carries the update index of the last good
// optimizer state so a driver can report how far the run got.
struct TrainingError : std::runtime_error {
  TrainingError(const std::string& msg, long last_good_update)
      : std::runtime_error(msg), last_good_update(last_good_update) {}
  long last_good_update;
};

}  // namespace lzo
