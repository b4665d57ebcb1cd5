#pragma once

// Noise spectral densities S(w) and their moments: the r.m.s. noise W, the
// reorganization shift eps_p0, the time-dependent shift eps_p(t) and the
// fluctuation-dissipation split into symmetric and antisymmetric parts.
//
// Units are whatever the caller uses for energy, with hbar = k_B = 1, so
// frequencies are energies and times are inverse energies.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mrt/errors.hpp"
#include "mrt/interpolation.hpp"
#include "mrt/quadrature.hpp"

namespace mrt {

// Flat spectrum S(w) = s0. Only meaningful for dephasing; every moment
// integral diverges.
struct WhiteNoise {
  double s0;
  double temperature = 0.0;
};

// S(w) = 2 eta w / [1 + (w/wc)^2]^2 * 1 / (1 - exp(-w/T)).
struct OhmicCutoff {
  double eta;
  double cutoff;
  double temperature;
};

// Sampled S(w), monotone-cubic interpolated, zero outside the grid. When the
// grid holds only w >= 0 and a temperature is given, S(-w) = S(w) exp(-w/T).
struct TabulatedSpectrum {
  MonotoneCubic curve;
  double temperature = 0.0;  // <= 0 means unknown
};

class SpectralModel {
 public:
  using Kind = std::variant<WhiteNoise, OhmicCutoff, TabulatedSpectrum>;

  static SpectralModel white(double s0, double temperature = 0.0) {
    if (!(s0 >= 0.0) || !std::isfinite(s0)) throw domain_error("white noise: S0 must be >= 0");
    return SpectralModel(WhiteNoise{s0, temperature});
  }

  static SpectralModel ohmic(double eta, double cutoff, double temperature) {
    if (!(eta > 0.0)) throw domain_error("ohmic spectrum: eta must be > 0");
    if (!(cutoff > 0.0)) throw domain_error("ohmic spectrum: cutoff must be > 0");
    if (!(temperature > 0.0)) throw domain_error("ohmic spectrum: temperature must be > 0");
    return SpectralModel(OhmicCutoff{eta, cutoff, temperature});
  }

  static SpectralModel tabulated(std::vector<std::pair<double, double>> points,
                                 double temperature = 0.0) {
    if (points.size() < 4) throw domain_error("tabulated spectrum: need at least 4 points");
    std::vector<double> w, s;
    w.reserve(points.size());
    s.reserve(points.size());
    for (const auto& [omega, value] : points) {
      if (!w.empty() && !(omega > w.back()))
        throw domain_error("tabulated spectrum: frequencies must be strictly increasing");
      if (!(value >= 0.0) || !std::isfinite(value))
        throw domain_error("tabulated spectrum: S(w) must be finite and >= 0");
      w.push_back(omega);
      s.push_back(value);
    }
    return SpectralModel(TabulatedSpectrum{MonotoneCubic(std::move(w), std::move(s)), temperature});
  }

  const Kind& kind() const { return kind_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&kind_);
  }

  bool is_white() const { return as<WhiteNoise>() != nullptr; }

  double temperature() const {
    return std::visit([](const auto& k) { return k.temperature; }, kind_);
  }

  // Frequency scale on which S(w) varies; sets panel widths in quadrature.
  double frequency_scale() const {
    if (const auto* o = as<OhmicCutoff>()) return std::min(o->cutoff, 2.0 * o->temperature);
    if (const auto* t = as<TabulatedSpectrum>())
      return std::max(std::abs(t->curve.front()), std::abs(t->curve.back())) / 8.0;
    return 1.0;
  }

  // Largest |w| with nonzero weight; infinity for analytic models.
  double support_end() const {
    if (const auto* t = as<TabulatedSpectrum>())
      return std::max(std::abs(t->curve.front()), std::abs(t->curve.back()));
    return std::numeric_limits<double>::infinity();
  }

 private:
  explicit SpectralModel(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

// Two-column CSV with header `omega,S`, rows ascending in omega.
inline SpectralModel load_tabulated_spectrum(const std::string& path, double temperature = 0.0) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open spectrum file '" + path + "'");
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  std::vector<std::pair<double, double>> points;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char c : line)
        if (c != ' ' && c != '\t') compact += c;
      if (compact != "omega,S") throw config_error("spectrum file: expected header 'omega,S'", lineno);
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw config_error("spectrum file: expected two columns", lineno);
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      const double omega = std::stod(a, &used);
      const double value = std::stod(b, &used);
      points.emplace_back(omega, value);
    } catch (const std::exception&) {
      throw config_error("spectrum file: malformed number", lineno);
    }
  }
  if (!header_seen) throw config_error("spectrum file: missing header 'omega,S'");
  try {
    return SpectralModel::tabulated(std::move(points), temperature);
  } catch (const physics_error& e) {
    throw config_error(std::string("spectrum file '") + path + "': " + e.what());
  }
}

struct NoiseMoments {
  double W;
  double eps_p0;
  double tau_R;
};

struct SpectralParts {
  double symmetric;
  double antisymmetric;
};

namespace spectral {

enum class Evaluation { automatic, closed_form, quadrature };

namespace detail {

// x / (1 - exp(-x)), finite at x = 0.
inline double bose_weight(double x) {
  if (std::abs(x) < 1e-8) return 1.0 + 0.5 * x;
  return x / -std::expm1(-x);
}

// x coth x, finite at x = 0.
inline double x_coth_x(double x) {
  if (std::abs(x) < 1e-6) return 1.0 + x * x / 3.0;
  return x / std::tanh(x);
}

inline double lorentz_squared(double w, double cutoff) {
  const double r = w / cutoff;
  const double d = 1.0 + r * r;
  return 1.0 / (d * d);
}

inline double tabulated_or_zero(const TabulatedSpectrum& t, double w) {
  return t.curve.contains(w) ? std::max(0.0, t.curve(w)) : 0.0;
}

enum class NegativeBranch { data, detailed_balance, none };

inline NegativeBranch negative_branch(const TabulatedSpectrum& t) {
  if (t.curve.front() < 0.0) return NegativeBranch::data;
  if (t.temperature > 0.0) return NegativeBranch::detailed_balance;
  return NegativeBranch::none;
}

// (S(w), S(-w)) for w >= 0 on a tabulated grid, zero outside.
inline std::pair<double, double> tabulated_pair(const TabulatedSpectrum& t, double w) {
  const double pos = tabulated_or_zero(t, w);
  switch (negative_branch(t)) {
    case NegativeBranch::data:
      return {pos, tabulated_or_zero(t, -w)};
    case NegativeBranch::detailed_balance:
      return {pos, pos * std::exp(-w / t.temperature)};
    case NegativeBranch::none:
      break;
  }
  return {pos, 0.0};
}

// Breakpoints |w_i| of the grid folded onto w >= 0.
inline std::vector<double> folded_breakpoints(const TabulatedSpectrum& t) {
  std::vector<double> b{0.0};
  for (double w : t.curve.abscissae()) b.push_back(std::abs(w));
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

// S_s and S_a for w >= 0, no validation.
inline SpectralParts parts(const SpectralModel& m, double w) {
  if (const auto* o = m.as<OhmicCutoff>()) {
    const double sa = o->eta * w * lorentz_squared(w, o->cutoff);
    const double ss =
        2.0 * o->temperature * o->eta * x_coth_x(w / (2.0 * o->temperature)) * lorentz_squared(w, o->cutoff);
    return {ss, sa};
  }
  if (const auto* t = m.as<TabulatedSpectrum>()) {
    const auto [pos, neg] = tabulated_pair(*t, w);
    return {0.5 * (pos + neg), 0.5 * (pos - neg)};
  }
  return {m.as<WhiteNoise>()->s0, 0.0};
}

// S_a(w)/w for w > 0, with the w -> 0 limit handled for the analytic model.
inline double antisymmetric_over_w(const SpectralModel& m, double w) {
  if (const auto* o = m.as<OhmicCutoff>()) return o->eta * lorentz_squared(w, o->cutoff);
  return parts(m, w).antisymmetric / w;
}

inline void reject_white(const SpectralModel& m, const char* what) {
  if (m.is_white())
    throw divergent_moment_error(std::string(what) + " diverges for a white spectrum");
}

// S_a(w)/w must stay finite as w -> 0; sample the limit.
inline void require_finite_at_origin(const SpectralModel& m) {
  const auto* t = m.as<TabulatedSpectrum>();
  if (t == nullptr) return;
  const double s = m.frequency_scale();
  const double g1 = std::abs(antisymmetric_over_w(m, 1e-6 * s));
  const double g2 = std::abs(antisymmetric_over_w(m, 1e-7 * s));
  if (g2 > 2.0 * g1 + std::numeric_limits<double>::min())
    throw divergent_moment_error("S(w)/w is not finite at w = 0; eps_p0 diverges");
}

inline quad::Options tolerance(double magnitude) {
  quad::Options opt;
  opt.abs_tol = std::max(1e-11 * magnitude, std::numeric_limits<double>::min());
  opt.rel_tol = 1e-12;
  return opt;
}

}  // namespace detail

inline double spectral_density(const SpectralModel& m, double w) {
  if (const auto* o = m.as<OhmicCutoff>())
    return 2.0 * o->eta * o->temperature * detail::bose_weight(w / o->temperature) *
           detail::lorentz_squared(w, o->cutoff);
  if (const auto* t = m.as<TabulatedSpectrum>()) {
    if (!t->curve.contains(w)) throw range_error("frequency outside the tabulated grid");
    return std::max(0.0, t->curve(w));
  }
  return m.as<WhiteNoise>()->s0;
}

// S_s(w) = (S(w) + S(-w))/2 and S_a(w) = (S(w) - S(-w))/2 for w >= 0.
inline SpectralParts symmetric_antisymmetric(const SpectralModel& m, double w) {
  if (!(w >= 0.0)) throw domain_error("symmetric_antisymmetric: w must be >= 0");
  if (const auto* t = m.as<TabulatedSpectrum>();
      t != nullptr && detail::negative_branch(*t) == detail::NegativeBranch::none)
    throw unsupported_decomposition_error(
        "tabulated spectrum has no negative-frequency data and no temperature");
  return detail::parts(m, w);
}

// eps_p0 = P integral dw/2pi S(w)/w.
inline double reorganization_shift(const SpectralModel& m,
                                   spectral::Evaluation how = spectral::Evaluation::automatic) {
  detail::reject_white(m, "eps_p0");
  const auto* o = m.as<OhmicCutoff>();
  if (o != nullptr && how != spectral::Evaluation::quadrature) return o->eta * o->cutoff / 4.0;
  detail::require_finite_at_origin(m);
  auto f = [&](double w) { return detail::antisymmetric_over_w(m, w); };
  quad::Options opt;
  opt.abs_tol = 1e-300;
  opt.rel_tol = 1e-12;
  if (o != nullptr) return quad::integrate_to_infinity(f, 0.0, o->cutoff, opt).value / std::numbers::pi;
  const auto& tab = *m.as<TabulatedSpectrum>();
  return quad::integrate(f, detail::folded_breakpoints(tab), opt).value / std::numbers::pi;
}

// W = sqrt(integral dw/2pi S(w)).
inline double noise_rms(const SpectralModel& m) {
  detail::reject_white(m, "W");
  auto f = [&](double w) { return detail::parts(m, w).symmetric; };
  quad::Options opt;
  opt.abs_tol = 1e-300;
  opt.rel_tol = 1e-13;
  double integral = 0.0;
  if (const auto* o = m.as<OhmicCutoff>()) {
    // Split where coth and the cutoff factor change character.
    const double a = std::min(o->cutoff, 2.0 * o->temperature);
    const double b = std::max(o->cutoff, 2.0 * o->temperature);
    integral = quad::integrate(f, 0.0, a, opt).value + quad::integrate(f, a, b, opt).value +
               quad::integrate_to_infinity(f, b, b, opt).value;
  } else {
    integral = quad::integrate(f, detail::folded_breakpoints(*m.as<TabulatedSpectrum>()), opt).value;
  }
  return std::sqrt(integral / std::numbers::pi);
}

// eps_p(t) = eps_p0 - P integral dw/2pi S(w)/w cos(wt), evaluated as the
// nonnegative integral of S_a(w)/(pi w) (1 - cos wt) over w > 0.
inline double shift_function(const SpectralModel& m, double t,
                             spectral::Evaluation how = spectral::Evaluation::automatic) {
  if (!(t >= 0.0)) throw domain_error("shift_function: t must be >= 0");
  detail::reject_white(m, "eps_p(t)");
  if (t == 0.0) return 0.0;
  const auto* o = m.as<OhmicCutoff>();
  if (o != nullptr && how != spectral::Evaluation::quadrature) {
    const double u = o->cutoff * t;
    const double eps_p0 = o->eta * o->cutoff / 4.0;
    if (u < 1e-3) return eps_p0 * u * u * (0.5 - u * (1.0 / 3.0 - u * (0.125 - u / 30.0)));
    return eps_p0 * (-std::expm1(-u) - u * std::exp(-u));
  }
  detail::require_finite_at_origin(m);
  const double scale = m.frequency_scale();
  const double eps_p0 = reorganization_shift(m);
  auto f = [&](double w) { return detail::antisymmetric_over_w(m, w) / std::numbers::pi; };
  const auto opt = detail::tolerance(eps_p0 * std::min(1.0, t * t * scale * scale));
  return quad::fourier_one_minus_cos(f, t, scale, m.support_end(), opt).value;
}

// d eps_p / dt = integral_0^inf dw/pi S_a(w) sin(wt).
inline double shift_rate(const SpectralModel& m, double t) {
  if (!(t >= 0.0)) throw domain_error("shift_rate: t must be >= 0");
  detail::reject_white(m, "d eps_p/dt");
  if (const auto* o = m.as<OhmicCutoff>()) {
    const double u = o->cutoff * t;
    return o->eta * o->cutoff / 4.0 * o->cutoff * u * std::exp(-u);
  }
  const double scale = m.frequency_scale();
  auto f = [&](double w) { return detail::parts(m, w).antisymmetric / std::numbers::pi; };
  const auto opt = detail::tolerance(reorganization_shift(m) * scale);
  return quad::fourier_sin(f, t, scale, m.support_end(), opt).value;
}

// Environment response time: 1/wc for the ohmic model; for a table, the
// inverse of the frequency below which 99% of integral S_a(w)/w dw lies.
inline double response_time(const SpectralModel& m) {
  detail::reject_white(m, "tau_R");
  if (const auto* o = m.as<OhmicCutoff>()) return 1.0 / o->cutoff;
  detail::require_finite_at_origin(m);
  const auto breaks = detail::folded_breakpoints(*m.as<TabulatedSpectrum>());
  auto f = [&](double w) { return std::abs(detail::antisymmetric_over_w(m, w)); };
  quad::Options opt;
  opt.abs_tol = 1e-300;
  opt.rel_tol = 1e-12;
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    cumulative.push_back(cumulative.back() + quad::integrate(f, breaks[i], breaks[i + 1], opt).value);
  const double target = 0.99 * cumulative.back();
  if (!(target > 0.0)) throw divergent_moment_error("tau_R: spectrum carries no antisymmetric weight");
  const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
  const auto seg = static_cast<std::size_t>(it - cumulative.begin()) - 1;
  double lo = breaks[seg], hi = breaks[seg + 1];
  const double base = cumulative[seg];
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double v = base + quad::integrate(f, breaks[seg], mid, opt).value;
    (v < target ? lo : hi) = mid;
  }
  return 1.0 / (0.5 * (lo + hi));
}

inline NoiseMoments noise_moments(const SpectralModel& m) {
  return {noise_rms(m), reorganization_shift(m), response_time(m)};
}

}  // namespace spectral
}  // namespace mrt
