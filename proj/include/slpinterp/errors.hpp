#pragma once

#include <stdexcept>
#include <string>

namespace slpi {

// Thrown when a computation exceeds a configured resource cap (expansion
// term/degree limits, sieve interval size).  Distinct from invalid input:
// the request was well-formed but too large for this implementation.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slpi
