#pragma once

#include <stdexcept>
#include <string>

namespace mrt {

// Every physics-side failure derives from physics_error; the CLI maps it to
// exit status 3. Configuration problems are config_error (exit status 2).
class physics_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (negative time,
// probability outside [0,1], lower-half-plane argument, ...).
class domain_error : public physics_error {
 public:
  using physics_error::physics_error;
};

// Frequency outside a tabulated spectrum's grid.
class range_error : public physics_error {
 public:
  using physics_error::physics_error;
};

// A moment integral that does not converge for the chosen spectral model.
class divergent_moment_error : public physics_error {
 public:
  using physics_error::physics_error;
};

// The symmetric/antisymmetric split needs S(-w), which the model cannot supply.
class unsupported_decomposition_error : public physics_error {
 public:
  using physics_error::physics_error;
};

// Parameters outside the regime where a formula is defined.
class regime_error : public physics_error {
 public:
  using physics_error::physics_error;
};

// Time step too coarse for the kernel or the rates.
class resolution_error : public physics_error {
 public:
  using physics_error::physics_error;
};

class config_error : public std::runtime_error {
 public:
  config_error(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace mrt
