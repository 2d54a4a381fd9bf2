#pragma once

#include <stdexcept>
#include <string>

namespace netobs {

/// Malformed or inconsistent input (files, system descriptions).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace netobs
