#pragma once

#include <stdexcept>
#include <string>

namespace hotstate {

// Input-contract violations use std::invalid_argument / std::domain_error.
// NumericalError marks computations that fail despite valid inputs
// (degenerate posterior normalizer, singular information matrix, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// File and stream failures, kept separate so callers can map them to a
// distinct exit status.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hotstate
