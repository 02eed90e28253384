#pragma once

#include <stdexcept>
#include <string>

namespace radiolab {

// Malformed graph input: self loops, duplicate edges, disconnected, bad ids.
class InvalidGraph : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller broke a documented precondition (wrong tree, bad root, etc).
class PreconditionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured resource limit was hit (brute force size, horizon, counts).
class LimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// nth_prime asked for an index beyond the configured bound.
class PrimeBoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two encodings whose order could not be certified.
class UndecidedComparison : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace radiolab
