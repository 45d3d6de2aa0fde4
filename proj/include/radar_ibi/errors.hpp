#pragma once

#include <stdexcept>
#include <string>

namespace radar_ibi {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The input is well-formed but carries no usable information
/// (an all-zero cell, a zero-variance segment).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// File contents are inconsistent, truncated or out of order.
class DataIntegrity : public Error {
 public:
  using Error::Error;
};

/// The smoothed spectrum has no local minimum below the second harmonic.
class NoTrough : public Error {
 public:
  using Error::Error;
};

/// An estimate series and its reference share no comparable entries.
class EmptyComparison : public Error {
 public:
  using Error::Error;
};

/// An index window reaches past the end of a sequence or record.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <class E = InvalidArgument>
inline void require(bool condition, const std::string& message) {
  if (!condition) throw E(message);
}

}  // namespace detail
}  // namespace radar_ibi
