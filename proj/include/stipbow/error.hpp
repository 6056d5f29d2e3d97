#pragma once

#include <stdexcept>
#include <string>

namespace stipbow {

// All recoverable failures (bad input files, invalid parameter combinations,
// malformed data) are reported through this type so callers can distinguish
// them from programming errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

}  // namespace stipbow
