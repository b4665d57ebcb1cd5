#pragma once

// Acceptance suite. Each criterion reduces to one scalar figure of merit
// compared against a fixed bound; every tolerance lives in this file.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mrt/csv.hpp"
#include "mrt/dynamics.hpp"
#include "mrt/oracle.hpp"
#include "mrt/rates.hpp"
#include "mrt/spectral.hpp"

namespace mrt::validation {

struct Criterion {
  int id;
  std::string name;
  double value;  // figure of merit, the worst case over sub-checks
  double limit;  // pass when value <= limit
  bool pass;
  std::string detail;
};

namespace tol {
inline constexpr double fdt = 1e-3;
inline constexpr double shift_crossover = 1e-6;
inline constexpr double detailed_balance = 1e-12;
inline constexpr double mc_sigmas = 3.0;
inline constexpr double mc_relative = 0.05;
inline constexpr double voigt_vs_convolution = 1e-8;
inline constexpr double voigt_area = 1e-6;
inline constexpr double voigt_gaussian_limit = 1e-6;  // in units of Gamma_p
inline constexpr double volterra_constant = 1e-6;
inline constexpr double volterra_order_low = 1.8;
inline constexpr double volterra_order_high = 2.2;
inline constexpr double trace = 1e-12;
inline constexpr double enhancement_low = 0.05;
inline constexpr double enhancement_high = 0.2;
inline constexpr double asymmetry_floor = 1e-6;  // "nonzero" at Gamma_p/omega_c = 0.1
inline constexpr double asymmetry_small = 1e-3;  // at Gamma_p/omega_c = 1e-3
inline constexpr double short_time_slope = 0.01;
inline constexpr double multichannel = 1e-12;
}  // namespace tol

namespace detail {

inline double relative(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

inline Criterion make(int id, std::string name, double value, double limit, std::string detail = {}) {
  return {id, std::move(name), value, limit, value <= limit, std::move(detail)};
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = i + 1 == n ? b : a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace detail

// 1. Low-frequency fluctuation-dissipation identity W^2 = 2 T eps_p0.
inline Criterion fdt_identity() {
  const auto m = SpectralModel::ohmic(1.0, 0.01, 1.0);
  const double W = spectral::noise_rms(m);
  const double dev = std::abs(W * W - 2.0 * 1.0 * spectral::reorganization_shift(m)) / (W * W);
  return detail::make(1, "fdt-identity", dev, tol::fdt, "omega_c/T = 0.01");
}

// 2. Quadrature eps_p(t) against the closed form, omega_c t in [0, 20].
inline Criterion shift_crossover() {
  const double wc = 0.5;
  const auto m = SpectralModel::ohmic(2.0, wc, 1.0);
  double worst = 0.0;
  for (double u : detail::linspace(0.0, 20.0, 50)) {
    const double t = u / wc;
    const double q = spectral::shift_function(m, t, spectral::Evaluation::quadrature);
    const double c = spectral::shift_function(m, t, spectral::Evaluation::closed_form);
    worst = std::max(worst, detail::relative(q, c));
  }
  return detail::make(2, "shift-crossover", worst, tol::shift_crossover, "50 points");
}

// 3. ln(Gamma_-/Gamma_+) = eps/T with eps_p = W^2/2T.
inline Criterion detailed_balance() {
  const double W = 1.3, T = 0.7, delta = 0.05;
  const double eps_p = W * W / (2.0 * T);
  double worst = 0.0;
  for (double e : detail::linspace(-5.0 * W, 5.0 * W, 201)) {
    const double gm = gaussian_rate(delta, e, W, eps_p, Direction::minus);
    const double gp = gaussian_rate(delta, e, W, eps_p, Direction::plus);
    worst = std::max(worst, std::abs(std::log(gm / gp) - e / T));
  }
  return detail::make(3, "detailed-balance", worst, tol::detailed_balance, "eps in [-5W, 5W]");
}

// 4. Static-noise Monte Carlo against Gamma_p exp(-eps^2/2W^2).
inline Criterion static_noise_mc(std::uint64_t seed) {
  const double W = 1.0, delta = 0.01;
  double worst = 0.0;  // max over eps of max(|d|/(3 se), |d|/(0.05 ref))
  std::ostringstream info;
  for (double e : {0.0, W, 2.0 * W}) {
    oracle::McConfig c;
    c.sample_count = 100000;
    c.seed = seed;
    c.W = W;
    c.delta = delta;
    c.eps = e;
    c.probe_time = 10.0 / W;
    const auto est = oracle::static_noise_transition(c);
    const double ref = classical_rate(delta, e, W);
    const double d = std::abs(est.rate - ref);
    worst = std::max({worst, d / (tol::mc_sigmas * est.standard_error), d / (tol::mc_relative * ref)});
    info << "eps/W=" << e / W << ":" << csv::format(est.rate / ref) << ' ';
  }
  return detail::make(4, "static-noise-monte-carlo", worst, 1.0, info.str() + "(ratio to reference)");
}

// 5. Faddeeva line shape against direct convolution; area; gamma -> 0.
inline Criterion voigt_consistency() {
  const double delta = 0.02, W = 1.0, eps_p = 0.8;
  const double gp = peak_rate(delta, W);
  double conv = 0.0, area = 0.0;
  for (double g : {0.1, 1.0, 10.0}) {
    for (double e : detail::linspace(eps_p - 6.0 * W, eps_p + 6.0 * W, 49)) {
      const double ref = oracle::convolution_rate(delta, W, e, eps_p, g);
      conv = std::max(conv, detail::relative(voigt_rate(delta, W, e, eps_p, g), ref));
    }
    auto f = [&](double e) { return voigt_rate(delta, W, e, eps_p, g); };
    quad::Options opt;
    opt.abs_tol = 1e-16 * gp;
    opt.rel_tol = 1e-12;
    const double lo = eps_p - 8.0 * W - g, hi = eps_p + 8.0 * W + g;
    const double total = quad::integrate_to_infinity([&](double x) { return f(lo - (x - lo)); }, lo, W + g, opt).value +
                         quad::integrate(f, {lo, eps_p - W, eps_p, eps_p + W, hi}, opt).value +
                         quad::integrate_to_infinity(f, hi, W + g, opt).value;
    area = std::max(area, detail::relative(total, std::numbers::pi * delta * delta / 2.0));
  }
  double limit = 0.0;
  for (double e : detail::linspace(eps_p - 6.0 * W, eps_p + 6.0 * W, 97))
    limit = std::max(limit, std::abs(voigt_rate(delta, W, e, eps_p, 1e-8 * W) -
                                     gaussian_rate(delta, e, W, eps_p, Direction::minus)) / gp);
  const double worst = std::max({conv / tol::voigt_vs_convolution, area / tol::voigt_area,
                                 limit / tol::voigt_gaussian_limit});
  std::ostringstream info;
  info << "convolution=" << csv::format(conv) << " area=" << csv::format(area)
       << " gaussian-limit=" << csv::format(limit);
  return detail::make(5, "voigt-consistency", worst, 1.0, info.str());
}

// 6. Volterra solver: constant-kernel closed form, convergence order, trace.
inline Criterion volterra_solver() {
  const double gm = 0.3, gp = 0.1;
  const TimeGrid g{0.0, 5.0 / (gm + gp) * 2.0, 4000};
  const auto tr = dynamics::evolve_volterra(KernelSpec::constant(gm, gp), 0.0, g);
  double closed = 0.0, trace = 0.0;
  const double pinf = gm / (gm + gp);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    closed = std::max(closed, std::abs(tr.rho11[i] - pinf * (1.0 - std::exp(-(gm + gp) * tr.t[i]))));
    trace = std::max(trace, std::abs(tr.rho00[i] + tr.rho11[i] - 1.0));
  }

  // Gamma_p/omega_c = 0.05 on an ohmic bath.
  const double wc = 0.2;
  const auto m = SpectralModel::ohmic(1.0, wc, 1.0);
  const double W = spectral::noise_rms(m);
  const double delta = std::sqrt(0.05 * wc * W / std::sqrt(std::numbers::pi / 8.0));
  const auto p = TwoStateParams::constant(delta, spectral::reorganization_shift(m), 1.0);
  const auto k = dynamics::make_kernel(m, p, W);
  const TimeGrid gn{0.0, 200.0, 400};
  const double order = oracle::convergence_order(k, 0.0, gn);
  const auto tn = dynamics::evolve_volterra(k, 0.0, gn);
  for (std::size_t i = 0; i < tn.t.size(); ++i) trace = std::max(trace, std::abs(tn.rho00[i] + tn.rho11[i] - 1.0));

  const double order_dev = std::abs(order - 2.0) / (tol::volterra_order_high - 2.0);
  const double worst = std::max({closed / tol::volterra_constant, order_dev, trace / tol::trace});
  std::ostringstream info;
  info << "closed-form=" << csv::format(closed) << " order=" << csv::format(order) << " trace=" << csv::format(trace);
  return detail::make(6, "volterra-solver", worst, 1.0, info.str());
}

// 7. Peak enhancement and asymmetry of the first-order corrected line.
inline Criterion nonlocal_peak() {
  // eps_p0 = 18 = W^2/2T with W = 6, T = 1, omega_c = 0.01.
  const double wc = 0.01, T = 1.0;
  const auto m = SpectralModel::ohmic(4.0 * 18.0 / wc, wc, T);
  const double W = spectral::noise_rms(m);
  auto summary = [&](double ratio) {
    const double delta = std::sqrt(ratio * wc * W / std::sqrt(std::numbers::pi / 8.0));
    return dynamics::peak_summary(m, TwoStateParams::constant(delta, 0.0, T), W);
  };
  const double gp_big = 0.1 * wc;
  const auto big = summary(0.1);
  const auto tiny = summary(1e-3);
  const double enhancement = big.gamma_peak / gp_big - 1.0;
  const double mid = 0.5 * (tol::enhancement_low + tol::enhancement_high);
  const double half = 0.5 * (tol::enhancement_high - tol::enhancement_low);
  const bool nonzero = std::abs(big.asymmetry) > tol::asymmetry_floor;
  const double worst = std::max({std::abs(enhancement - mid) / half, std::abs(tiny.asymmetry) / tol::asymmetry_small,
                                 nonzero ? 0.0 : 2.0});
  std::ostringstream info;
  info << "enhancement=" << csv::format(enhancement) << " asymmetry(0.1)=" << csv::format(big.asymmetry)
       << " asymmetry(1e-3)=" << csv::format(tiny.asymmetry);
  return detail::make(7, "nonlocal-peak", worst, 1.0, info.str());
}

// 8. Slope of the double-quadrature rho11 against Lambda_-(t) at t = 10/W.
inline Criterion short_time() {
  const auto m = SpectralModel::ohmic(0.5, 0.05, 1.0);
  const double W = spectral::noise_rms(m);
  const auto p = TwoStateParams::constant(W / 100.0, 0.3 * W, 1.0);
  const double t = 10.0 / W, h = 0.05 / W;
  const double slope = (dynamics::short_time_rho11(m, p, W, t + h).rho11 -
                        dynamics::short_time_rho11(m, p, W, t - h).rho11) / (2.0 * h);
  const double lam = dynamics::lambda_pm(m, p, W, t, Direction::minus);
  return detail::make(8, "short-time-slope", std::abs(slope / lam - 1.0), tol::short_time_slope,
                      "t = 10/W, W/Delta = 100");
}

// 9. Channel sum against the Delta_eff shortcut; Delta_eff at T_co.
inline Criterion multichannel() {
  const WellLevels three({{0.0, 0.01}, {1.0, 0.3}, {1.7, 2.0}});
  const double W = 4.0, eps_p = 1.5;
  double worst = 0.0;
  for (double T : {0.1, 0.5, 2.0})
    for (double e : detail::linspace(-10.0, 10.0, 41))
      worst = std::max(worst, detail::relative(oracle::channel_sum_rate(three, T, W, e, eps_p),
                                               multichannel_rate(three, T, W, e, eps_p)));
  const WellLevels two({{0.0, 0.01}, {1.0, 1.0}});
  const double tco = crossover_temperature(two);
  const double at_tco = detail::relative(effective_delta(two, tco), 0.01 * std::numbers::sqrt2);
  std::ostringstream info;
  info << "channel-sum=" << csv::format(worst) << " delta-eff(T_co)=" << csv::format(at_tco);
  return detail::make(9, "multichannel", std::max(worst, at_tco), tol::multichannel, info.str());
}

inline std::vector<Criterion> run_physics(std::uint64_t seed) {
  return {fdt_identity(), shift_crossover(), detailed_balance(), static_noise_mc(seed), voigt_consistency(),
          volterra_solver(), nonlocal_peak(), short_time(), multichannel()};
}

inline void write_csv(std::ostream& os, const std::vector<Criterion>& rows) {
  csv::Writer w(os);
  w.header({"criterion", "name", "value", "limit", "pass"});
  for (const auto& c : rows)
    w.row(std::vector<std::string>{std::to_string(c.id), c.name, csv::format(c.value), csv::format(c.limit),
                                   c.pass ? "1" : "0"});
}

// 10. The whole suite twice at one seed must serialize identically.
inline std::vector<Criterion> run_all(std::uint64_t seed) {
  auto first = run_physics(seed);
  const auto second = run_physics(seed);
  std::ostringstream a, b;
  write_csv(a, first);
  write_csv(b, second);
  const bool same = a.str() == b.str();
  first.push_back(detail::make(10, "determinism", same ? 0.0 : 1.0, 0.0, "two runs, same seed"));
  return first;
}

}  // namespace mrt::validation
