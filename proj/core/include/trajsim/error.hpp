#pragma once

#include <stdexcept>
#include <string>

namespace trajsim {

/// Data or contract violation (bad input file, shape mismatch, diverged
/// training, ...). The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trajsim
