#pragma once

#include <stdexcept>
#include <string>

namespace qsc {

// Two keys agreed on every symbol up to the configured cap; either the cap
// is too small for the source or the source is nearly atomic.
class DepthCapExceeded : public std::runtime_error {
  public:
    explicit DepthCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

class InvalidPrefix : public std::invalid_argument {
  public:
    explicit InvalidPrefix(const std::string& what) : std::invalid_argument(what) {}
};

class ConditioningOnNull : public std::invalid_argument {
  public:
    explicit ConditioningOnNull(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace qsc
