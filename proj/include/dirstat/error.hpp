#pragma once

#include <stdexcept>
#include <string>

namespace dirstat {

// Base of everything this library throws.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (negative order,
// r outside (0,1), c <= a, ...).
class domain_error : public error {
 public:
  using error::error;
};

// Input data that cannot be processed: malformed files, dimension mismatch,
// zero-norm rows, degenerate samples (zero resultant, zero total weight).
class data_error : public error {
 public:
  using error::error;
};

// Series, continued fraction, root finder or rejection loop failed to reach
// its tolerance within the iteration cap.
class numerical_error : public error {
 public:
  using error::error;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw domain_error(msg);
}

}  // namespace detail
}  // namespace dirstat
