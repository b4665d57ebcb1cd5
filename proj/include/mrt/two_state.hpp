#pragma once

#include <string>
#include <vector>

#include "mrt/errors.hpp"

namespace mrt {

// value(t) = initial + slope * t. slope = 0 is the constant schedule.
struct LinearSchedule {
  double initial = 0.0;
  double slope = 0.0;

  double operator()(double t) const { return initial + slope * t; }
  bool is_constant() const { return slope == 0.0; }
  // integral_a^b value(t) dt
  double integral(double a, double b) const {
    return initial * (b - a) + 0.5 * slope * (b * b - a * a);
  }
};

// Tunneling amplitude Delta(t), bias eps(t) and bath temperature T of
// H = -(Delta sigma_x + eps sigma_z)/2 - sigma_z Q/2 + H_B.
struct TwoStateParams {
  LinearSchedule delta;
  LinearSchedule eps;
  double temperature = 0.0;

  static TwoStateParams constant(double delta, double eps, double temperature) {
    TwoStateParams p{{delta, 0.0}, {eps, 0.0}, temperature};
    p.validate();
    return p;
  }

  void validate() const {
    if (!(delta.initial > 0.0)) throw domain_error("Delta must be > 0");
    if (!(temperature > 0.0)) throw domain_error("temperature must be > 0");
  }

  bool is_time_invariant() const { return delta.is_constant() && eps.is_constant(); }
};

// The rate formulas are perturbative in Delta; they hold when W >> Delta.
inline constexpr double min_strong_coupling_ratio = 10.0;

inline double strong_coupling_ratio(const TwoStateParams& p, double W) { return W / p.delta.initial; }

inline std::vector<std::string> validity_warnings(const TwoStateParams& p, double W) {
  std::vector<std::string> out;
  if (strong_coupling_ratio(p, W) < min_strong_coupling_ratio)
    out.emplace_back("W/Delta < 10, perturbative regime violated");
  return out;
}

}  // namespace mrt
