#pragma once

#include <stdexcept>
#include <string>

namespace torsoseg {

// Input violates an operation's contract (bad shapes, grids, parameters).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem or container-format failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace torsoseg
