#pragma once

#include <stdexcept>
#include <string>

namespace nbd {

// Base for every error raised by the library. Validation failures, broken
// preconditions and failed certifications all derive from it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Brute-force routines refuse instances above their configured size cap.
class CapExceeded : public Error {
 public:
  explicit CapExceeded(const std::string& what) : Error(what) {}
};

}  // namespace nbd
