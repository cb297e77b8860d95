#pragma once

#include <stdexcept>
#include <string>

namespace eah {

/// Caller broke a documented precondition.
class contract_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// A (symbol, context) pair has no codeword in a table.
class lookup_error : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// Input is not an EAH container at all (bad magic, unknown version).
class format_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Container or bit stream is truncated or internally inconsistent.
class corrupt_stream : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const char *what) {
  if (!condition) {
    throw contract_error(what);
  }
}

inline void require_stream(bool condition, const char *what) {
  if (!condition) {
    throw corrupt_stream(what);
  }
}

inline void require_stream(bool condition, const std::string &what) {
  if (!condition) {
    throw corrupt_stream(what);
  }
}

} // namespace detail
} // namespace eah
