#pragma once

// Closed-form incoherent tunneling rates: shifted-Gaussian MRT peaks, the
// static-noise limit, Voigt line shapes for excited-state tunneling and the
// thermally populated multi-channel rate of a double well.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string_view>
#include <vector>

#include "mrt/errors.hpp"
#include "mrt/faddeeva.hpp"
#include "mrt/two_state.hpp"

namespace mrt {

// minus: |0> -> |1>, line centred at eps = +eps_p.
// plus:  |1> -> |0>, line centred at eps = -eps_p.
enum class Direction { minus, plus };

inline double shift_sign(Direction d) { return d == Direction::minus ? -1.0 : 1.0; }

enum class LineShape { gaussian, classical, voigt, nonlocal_corrected };

inline std::string_view to_string(LineShape s) {
  switch (s) {
    case LineShape::gaussian: return "gaussian";
    case LineShape::classical: return "classical";
    case LineShape::voigt: return "voigt";
    case LineShape::nonlocal_corrected: return "nonlocal-corrected";
  }
  return "unknown";
}

struct RateCurve {
  std::vector<double> eps;
  std::vector<double> gamma_minus;
  std::vector<double> gamma_plus;
  LineShape shape = LineShape::gaussian;
};

// One level of a well: energy above the ground level, tunneling amplitude to
// its resonant partner in the other well, intrawell relaxation rate.
struct WellLevel {
  double energy;
  double delta;
  double gamma = 0.0;
};

class WellLevels {
 public:
  explicit WellLevels(std::vector<WellLevel> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw domain_error("well needs at least one level");
    if (levels_[0].energy != 0.0) throw domain_error("ground level energy must be 0");
    if (levels_[0].gamma != 0.0) throw domain_error("ground level cannot relax within its well");
    for (std::size_t n = 0; n < levels_.size(); ++n) {
      if (!(levels_[n].delta > 0.0)) throw domain_error("level tunneling amplitudes must be > 0");
      if (!(levels_[n].gamma >= 0.0)) throw domain_error("relaxation rates must be >= 0");
      if (n > 0 && !(levels_[n].energy > levels_[n - 1].energy))
        throw domain_error("level energies must be strictly increasing");
    }
  }

  const std::vector<WellLevel>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  const WellLevel& operator[](std::size_t n) const { return levels_[n]; }

  // omega_p = E_1 - E_0
  double plasma_frequency() const {
    if (levels_.size() < 2) throw domain_error("plasma frequency needs an excited level");
    return levels_[1].energy;
  }

 private:
  std::vector<WellLevel> levels_;
};

// Gamma_p = sqrt(pi/8) Delta^2 / W
inline double peak_rate(double delta, double W) {
  if (!(delta >= 0.0)) throw domain_error("peak_rate: Delta must be >= 0");
  if (!(W > 0.0)) throw domain_error("peak_rate: W must be > 0");
  return std::sqrt(std::numbers::pi / 8.0) * delta * delta / W;
}

// Gamma_{+-}(eps) = Gamma_p exp(-(eps +- eps_p)^2 / 2W^2)
inline double gaussian_rate(double delta, double eps, double W, double eps_p, Direction d) {
  const double x = eps + shift_sign(d) * eps_p;
  return peak_rate(delta, W) * std::exp(-x * x / (2.0 * W * W));
}

inline double gaussian_rate(const TwoStateParams& p, double W, double eps_p, Direction d, double t = 0.0) {
  return gaussian_rate(p.delta(t), p.eps(t), W, eps_p, d);
}

// Static (classical) noise: Gamma_- = Gamma_+ = Gamma_p exp(-eps^2 / 2W^2).
inline double classical_rate(double delta, double eps, double W) {
  return gaussian_rate(delta, eps, W, 0.0, Direction::minus);
}

inline double classical_rate(const TwoStateParams& p, double W, double t = 0.0) {
  return classical_rate(p.delta(t), p.eps(t), W);
}

// Gaussian noise of width W convolved with a Lorentzian of half-width gamma:
// sqrt(pi/8) Delta^2/W Re w((eps -+ eps_p + i gamma) / (sqrt(2) W)).
inline double voigt_rate(double delta, double W, double eps, double eps_p, double gamma,
                         Direction d = Direction::minus) {
  if (!(W > 0.0)) throw domain_error("voigt_rate: W must be > 0");
  if (!(gamma >= 0.0)) throw domain_error("voigt_rate: gamma must be >= 0");
  if (gamma == 0.0) return gaussian_rate(delta, eps, W, eps_p, d);
  const double scale = std::numbers::sqrt2 * W;
  const std::complex<double> z((eps + shift_sign(d) * eps_p) / scale, gamma / scale);
  return peak_rate(delta, W) * faddeeva(z).real();
}

enum class BoltzmannWeights {
  normalized,        // P_n = exp(-E_n/T) / sum_i exp(-E_i/T)
  ground_referenced  // P_0 = 1, P_n = exp(-E_n/T): the small-T form
};

inline std::vector<double> occupation_weights(const WellLevels& levels, double T, BoltzmannWeights how) {
  if (!(T > 0.0)) throw domain_error("temperature must be > 0");
  std::vector<double> w(levels.size());
  for (std::size_t n = 0; n < levels.size(); ++n) w[n] = std::exp(-levels[n].energy / T);
  if (how == BoltzmannWeights::normalized) {
    double z = 0.0;
    for (double v : w) z += v;
    for (double& v : w) v /= z;
  }
  return w;
}

// Delta_eff = [sum_n P_n Delta_n^2]^(1/2); with ground-referenced weights this
// is Delta_0 [1 + sum_{n>=1} (Delta_n/Delta_0)^2 exp(-E_n0/T)]^(1/2).
inline double effective_delta(const WellLevels& levels, double T,
                              BoltzmannWeights how = BoltzmannWeights::ground_referenced) {
  const auto w = occupation_weights(levels, T, how);
  const double d0 = levels[0].delta;
  double excited = 0.0;
  for (std::size_t n = 1; n < levels.size(); ++n) {
    const double r = levels[n].delta / d0;
    excited += w[n] * r * r;
  }
  return d0 * std::sqrt(w[0] + excited);
}

// T_co = omega_p / (2 ln(Delta_1/Delta_0))
inline double crossover_temperature(const WellLevels& levels) {
  if (levels.size() < 2) throw regime_error("crossover temperature needs an excited level");
  const double ratio = levels[1].delta / levels[0].delta;
  if (!(ratio > 1.0)) throw regime_error("no crossover: Delta_1 <= Delta_0");
  return levels.plasma_frequency() / (2.0 * std::log(ratio));
}

// Thermally averaged rate sum_n P_n Gamma^n. When every gamma_n is negligible
// against W all channels share one Gaussian and the sum collapses onto
// Delta_eff; otherwise each channel is a Voigt line.
inline double multichannel_rate(const WellLevels& levels, double T, double W, double eps, double eps_p,
                                Direction d = Direction::minus,
                                BoltzmannWeights how = BoltzmannWeights::normalized) {
  if (!(W > 0.0)) throw domain_error("multichannel_rate: W must be > 0");
  double max_gamma = 0.0;
  for (const auto& l : levels.levels()) max_gamma = std::max(max_gamma, l.gamma);
  if (max_gamma <= 1e-8 * W) return gaussian_rate(effective_delta(levels, T, how), eps, W, eps_p, d);
  const auto w = occupation_weights(levels, T, how);
  double total = 0.0;
  for (std::size_t n = 0; n < levels.size(); ++n)
    total += w[n] * voigt_rate(levels[n].delta, W, eps, eps_p, levels[n].gamma, d);
  return total;
}

}  // namespace mrt
