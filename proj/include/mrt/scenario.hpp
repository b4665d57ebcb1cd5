#pragma once

// Dispatches a RunConfig to the library and writes the CSV artifact.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mrt/coherence.hpp"
#include "mrt/config.hpp"
#include "mrt/csv.hpp"
#include "mrt/dynamics.hpp"
#include "mrt/oracle.hpp"
#include "mrt/rates.hpp"
#include "mrt/spectral.hpp"
#include "mrt/validation.hpp"

namespace mrt {

inline constexpr const char* version = "1.0.0";

namespace scenario {

using config::RunConfig;

struct Outcome {
  int status = 0;                     // 0 ok, 1 a reported check failed
  std::vector<std::string> warnings;  // also written into the CSV
};

namespace detail {

inline const SpectralModel& need_spectrum(const RunConfig& c) {
  if (!c.spectrum) throw config_error("scenario '" + config::to_string(c.scenario) + "' needs a [spectrum] section");
  return *c.spectrum;
}

inline const config::Grid& need_grid(const std::optional<config::Grid>& g, const char* name, const RunConfig& c) {
  if (!g) throw config_error("scenario '" + config::to_string(c.scenario) + "' needs a [" + name + "] section");
  return *g;
}

inline void need_delta(const RunConfig& c) {
  if (!c.has_delta) throw config_error("missing required key 'delta' in [system]");
  if (!(c.system.delta.initial > 0.0)) throw config_error("'delta' in [system] must be > 0");
}

inline void need_temperature(const RunConfig& c) {
  if (!(c.system.temperature > 0.0)) throw config_error("'temperature' in [system] must be > 0");
}

inline double noise_width(const RunConfig& c) {
  if (c.W_override) {
    if (!(*c.W_override > 0.0)) throw config_error("'W' in [system] must be > 0");
    return *c.W_override;
  }
  return spectral::noise_rms(need_spectrum(c));
}

// Shift used by the Gaussian line: explicit value, then the spectrum's
// eps_p0, then the detailed-balance value W^2/2T.
inline double shift(const RunConfig& c, double W) {
  if (c.eps_p) return *c.eps_p;
  if (c.spectrum) return spectral::reorganization_shift(*c.spectrum);
  need_temperature(c);
  return W * W / (2.0 * c.system.temperature);
}

struct Prelude {
  std::ostream& os;
  const RunConfig& c;
  Outcome& out;

  void write(const std::vector<std::string>& warnings) {
    csv::Writer w(os);
    w.comment(std::string("mrt ") + version + " scenario=" + config::to_string(c.scenario) + " units=" + c.units);
    for (const auto& line : config::echo(c)) w.comment("cfg " + line);
    for (const auto& warning : warnings) {
      w.comment("warning: " + warning);
      out.warnings.push_back(warning);
    }
  }
};

inline std::vector<std::string> coupling_warnings(const RunConfig& c, double W) {
  if (!c.has_delta || !(W > 0.0) || !std::isfinite(W)) return {};
  return validity_warnings(c.system, W);
}

inline void envelope(const RunConfig& c, std::ostream& os, Outcome& out) {
  const auto& m = need_spectrum(c);
  const auto& g = need_grid(c.time, "time", c);
  std::vector<std::string> warnings;
  if (!m.is_white()) warnings = coupling_warnings(c, spectral::noise_rms(m));
  Prelude{os, c, out}.write(warnings);
  csv::Writer w(os);
  w.header({"t", "magnitude_ratio", "phase", "rho01_re", "rho01_im"});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g[i];
    if (t < 0.0) throw domain_error("envelope: time grid must start at t >= 0");
    const auto e = coherence::envelope(m, c.system.eps, t);
    const auto r = c.rho01_0 * std::polar(e.magnitude_ratio, e.phase);
    w.row({t, e.magnitude_ratio, e.phase, r.real(), r.imag()});
  }
}

inline void mrt_scan(const RunConfig& c, std::ostream& os, Outcome& out) {
  need_delta(c);
  const auto& g = need_grid(c.bias, "bias", c);
  const double W = noise_width(c);
  const double delta = c.system.delta.initial;
  const double eps_p = c.shape == LineShape::classical ? 0.0 : shift(c, W);

  std::function<double(double, Direction)> rate;
  switch (c.shape) {
    case LineShape::gaussian:
    case LineShape::classical:
      rate = [&](double e, Direction d) { return gaussian_rate(delta, e, W, eps_p, d); };
      break;
    case LineShape::voigt:
      if (!(c.gamma >= 0.0)) throw config_error("'gamma' in [scan] must be >= 0");
      rate = [&](double e, Direction d) { return voigt_rate(delta, W, e, eps_p, c.gamma, d); };
      break;
    case LineShape::nonlocal_corrected: {
      need_temperature(c);
      const double wc = dynamics::characteristic_frequency(need_spectrum(c));
      const double gp = peak_rate(delta, W);
      dynamics::check_nonlocal_regime(gp, wc);
      rate = [&, wc, gp](double e, Direction d) {
        return dynamics::nonlocal_first_order_rate(e, gp, wc, eps_p, W, c.system.temperature, d);
      };
      break;
    }
  }

  Prelude{os, c, out}.write(coupling_warnings(c, W));
  csv::Writer w(os);
  w.header({"eps", "gamma_minus", "gamma_plus", "shape"});
  const std::string shape(to_string(c.shape));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double e = g[i];
    w.row(std::vector<std::string>{csv::format(e), csv::format(rate(e, Direction::minus)),
                                   csv::format(rate(e, Direction::plus)), shape});
  }
}

inline void write_trajectory(std::ostream& os, const Trajectory& tr) {
  csv::Writer w(os);
  w.header({"t", "rho00", "rho11"});
  for (std::size_t i = 0; i < tr.t.size(); ++i) w.row({tr.t[i], tr.rho00[i], tr.rho11[i]});
}

inline std::pair<RateFunction, RateFunction> local_rates(const RunConfig& c, double W) {
  const double eps_p = c.local_rates == config::LocalRates::classical ? 0.0 : shift(c, W);
  auto fixed = [eps_p](double) { return eps_p; };
  return {dynamics::gaussian_rate_schedule(c.system, W, fixed, Direction::minus),
          dynamics::gaussian_rate_schedule(c.system, W, fixed, Direction::plus)};
}

inline void evolve(const RunConfig& c, std::ostream& os, Outcome& out) {
  need_delta(c);
  const auto& g = need_grid(c.time, "time", c);
  const double W = noise_width(c);
  auto warnings = coupling_warnings(c, W);

  switch (c.mode) {
    case config::EvolveMode::local: {
      const auto [gm, gp] = local_rates(c, W);
      const auto tr = dynamics::evolve_local(gm, gp, c.rho11_0, g.time());
      Prelude{os, c, out}.write(warnings);
      write_trajectory(os, tr);
      return;
    }
    case config::EvolveMode::nonlocal: {
      need_temperature(c);
      const auto tr = dynamics::evolve_nonlocal(need_spectrum(c), c.system, c.rho11_0, g.time());
      Prelude{os, c, out}.write(warnings);
      write_trajectory(os, tr);
      return;
    }
    case config::EvolveMode::short_time: {
      const auto& m = need_spectrum(c);
      if (c.rho11_0 != 0.0) throw config_error("short-time evolution starts from rho11_0 = 0");
      std::vector<dynamics::ShortTimeResult> rows;
      bool late = false;
      for (std::size_t i = 0; i < g.size(); ++i) {
        rows.push_back(dynamics::short_time_rho11(m, c.system, W, g[i]));
        late = late || rows.back().perturbative_warning;
      }
      if (late) warnings.emplace_back("t*Delta > 1, second-order result unreliable");
      Prelude{os, c, out}.write(warnings);
      csv::Writer w(os);
      w.header({"t", "rho00", "rho11", "rho11_slow_bias", "rho11_rate"});
      for (std::size_t i = 0; i < g.size(); ++i)
        w.row({g[i], 1.0 - rows[i].rho11, rows[i].rho11, rows[i].rho11_slow_bias, rows[i].rho11_rate});
      return;
    }
  }
}

inline void peak(const RunConfig& c, std::ostream& os, Outcome& out) {
  need_delta(c);
  need_temperature(c);
  const auto& m = need_spectrum(c);
  const double W = noise_width(c);
  const auto s = dynamics::peak_summary(peak_rate(c.system.delta.initial, W), dynamics::characteristic_frequency(m),
                                        shift(c, W), W, c.system.temperature);
  Prelude{os, c, out}.write(coupling_warnings(c, W));
  csv::Writer w(os);
  w.header({"gamma_peak", "eps_peak", "asymmetry", "first_order_gamma_peak", "first_order_eps_peak"});
  w.row({s.gamma_peak, s.eps_peak, s.asymmetry, s.first_order_gamma_peak, s.first_order_eps_peak});
}

inline void multichannel(const RunConfig& c, std::ostream& os, Outcome& out) {
  if (!c.levels) throw config_error("scenario 'multichannel' needs a [levels] section");
  need_temperature(c);
  const auto& g = need_grid(c.bias, "bias", c);
  const double W = noise_width(c);
  const double eps_p = shift(c, W);
  const double T = c.system.temperature;
  const double d_eff = effective_delta(*c.levels, T, c.weights);
  std::vector<std::string> warnings;
  if (W / d_eff < min_strong_coupling_ratio) warnings.emplace_back("W/Delta < 10, perturbative regime violated");
  Prelude{os, c, out}.write(warnings);
  csv::Writer w(os);
  w.header({"eps", "gamma_minus", "gamma_plus", "delta_eff"});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double e = g[i];
    w.row({e, multichannel_rate(*c.levels, T, W, e, eps_p, Direction::minus, c.weights),
           multichannel_rate(*c.levels, T, W, e, eps_p, Direction::plus, c.weights), d_eff});
  }
}

struct Check {
  std::string quantity;
  double estimate;
  double reference;
  double error;
  double tolerance;
  bool pass() const { return error <= tolerance; }
};

inline std::vector<Check> oracle_checks(const RunConfig& c) {
  std::vector<Check> checks;
  switch (c.oracle) {
    case config::OracleName::static_noise: {
      need_delta(c);
      oracle::McConfig mc;
      mc.sample_count = c.samples;
      mc.seed = c.seed;
      mc.W = noise_width(c);
      mc.delta = c.system.delta.initial;
      mc.eps = c.system.eps.initial;
      mc.probe_time = c.probe_time.value_or(10.0 / mc.W);
      mc.threads = c.threads;
      const auto est = oracle::static_noise_transition(mc);
      const double ref = classical_rate(mc.delta, mc.eps, mc.W);
      const double d = std::abs(est.rate - ref);
      checks.push_back({"rate_within_3se", est.rate, ref, d, validation::tol::mc_sigmas * est.standard_error});
      checks.push_back({"rate_within_5pct", est.rate, ref, d, validation::tol::mc_relative * ref});
      checks.push_back({"mean_probability_rate", est.mean_probability_rate, ref,
                        std::abs(est.mean_probability_rate - ref), std::numeric_limits<double>::infinity()});
      break;
    }
    case config::OracleName::convolution: {
      need_delta(c);
      const auto& g = need_grid(c.bias, "bias", c);
      const double W = noise_width(c);
      const double eps_p = shift(c, W);
      if (!(c.gamma > 0.0)) throw config_error("'gamma' in [oracle] must be > 0");
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double e = g[i];
        const double v = voigt_rate(c.system.delta.initial, W, e, eps_p, c.gamma);
        const double r = oracle::convolution_rate(c.system.delta.initial, W, e, eps_p, c.gamma);
        checks.push_back({"voigt@eps=" + csv::format(e), v, r, validation::detail::relative(v, r),
                          validation::tol::voigt_vs_convolution});
      }
      break;
    }
    case config::OracleName::refined_local: {
      need_delta(c);
      const auto& g = need_grid(c.time, "time", c);
      const auto [gm, gp] = local_rates(c, noise_width(c));
      const auto prod = dynamics::evolve_local(gm, gp, c.rho11_0, g.time());
      const auto ref = oracle::refined_reference(gm, gp, c.rho11_0, g.time());
      checks.push_back({"final_rho11", prod.rho11.back(), ref.rho11.back(), oracle::sup_distance(prod, ref), 1e-6});
      break;
    }
    case config::OracleName::refined_nonlocal: {
      need_delta(c);
      need_temperature(c);
      const auto& m = need_spectrum(c);
      if (!c.system.is_time_invariant()) throw regime_error("evolve_nonlocal requires constant Delta and eps");
      const auto k = dynamics::make_kernel(m, c.system, spectral::noise_rms(m));
      const auto tg = need_grid(c.time, "time", c).time();
      const auto prod = dynamics::evolve_volterra(k, c.rho11_0, tg);
      const auto ref = oracle::refined_reference(k, c.rho11_0, tg);
      const double order = oracle::convergence_order(k, c.rho11_0, tg);
      checks.push_back({"final_rho11", prod.rho11.back(), ref.rho11.back(), oracle::sup_distance(prod, ref),
                        std::numeric_limits<double>::infinity()});
      checks.push_back({"convergence_order", order, 2.0, std::abs(order - 2.0), 0.2});
      break;
    }
  }
  return checks;
}

inline void oracle_report(const RunConfig& c, std::ostream& os, Outcome& out) {
  const auto checks = oracle_checks(c);
  std::vector<std::string> warnings;
  if (c.has_delta && (c.W_override || (c.spectrum && !c.spectrum->is_white())))
    warnings = coupling_warnings(c, noise_width(c));
  Prelude{os, c, out}.write(warnings);
  csv::Writer w(os);
  w.header({"quantity", "estimate", "reference", "error", "tolerance", "pass"});
  for (const auto& k : checks) {
    w.row(std::vector<std::string>{k.quantity, csv::format(k.estimate), csv::format(k.reference),
                                   csv::format(k.error), csv::format(k.tolerance), k.pass() ? "1" : "0"});
    if (!k.pass()) out.status = 1;
  }
}

}  // namespace detail

// Runs one scenario, writing the CSV to `os`.
inline Outcome run(const RunConfig& c, std::ostream& os) {
  Outcome out;
  switch (c.scenario) {
    case config::Scenario::envelope: detail::envelope(c, os, out); break;
    case config::Scenario::mrt_scan: detail::mrt_scan(c, os, out); break;
    case config::Scenario::evolve: detail::evolve(c, os, out); break;
    case config::Scenario::peak: detail::peak(c, os, out); break;
    case config::Scenario::multichannel: detail::multichannel(c, os, out); break;
    case config::Scenario::oracle: detail::oracle_report(c, os, out); break;
  }
  return out;
}

// Acceptance suite as CSV; no timings so repeated runs compare byte for byte.
inline Outcome validate(std::uint64_t seed, std::ostream& os) {
  Outcome out;
  const auto rows = validation::run_all(seed);
  csv::Writer(os).comment(std::string("mrt ") + version + " validate seed=" + std::to_string(seed));
  validation::write_csv(os, rows);
  for (const auto& r : rows)
    if (!r.pass) out.status = 1;
  return out;
}

}  // namespace scenario
}  // namespace mrt
