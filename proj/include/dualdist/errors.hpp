#pragma once

#include <stdexcept>
#include <string>

namespace dualdist {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unsupported or mismatched dimensions (e.g. ambient dimension < 3).
struct DimensionError : Error {
  using Error::Error;
};

// Numerically degenerate input: rank deficiency, zero vectors, pivot
// breakdown, hyperplane through the origin, transfer degeneracy, ...
struct DegenerateError : Error {
  using Error::Error;
};

// Constraint systems with an empty solution set.
struct InfeasibleError : Error {
  using Error::Error;
};

// Too little data for a fit.
struct InsufficientDataError : Error {
  using Error::Error;
};

// Malformed input files; carries a 1-based line number (0 = unknown).
struct ParseError : Error {
  int line = 0;
  ParseError(const std::string& msg, int line_no) : Error(msg), line(line_no) {}
};

// Grid or query produced no usable result (e.g. all-zero density window).
struct EmptyResultError : Error {
  using Error::Error;
};

}  // namespace dualdist
