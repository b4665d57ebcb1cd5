#pragma once

// Population dynamics of the incoherent two-state system.
//
// The diagonal element obeys the time-nonlocal equation
//   d rho11/dt = integral_{t0}^t [K_-(t-s) rho00(s) - K_+(t-s) rho11(s)] ds
// with K(tau) = dLambda/dtau theta(tau) + Lambda(0) delta(tau) and
// Lambda_{+-}(tau) = Gamma_p exp(-(eps +- eps_p(tau))^2 / 2W^2). The delta
// part acts as an instantaneous local rate; the smooth part is a memory
// integral over the history since the initialization time t0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>

#include "mrt/errors.hpp"
#include "mrt/faddeeva.hpp"
#include "mrt/quadrature.hpp"
#include "mrt/rates.hpp"
#include "mrt/spectral.hpp"
#include "mrt/two_state.hpp"

namespace mrt {

// Uniform grid start, start + h, ..., stop with `steps` intervals.
struct TimeGrid {
  double start = 0.0;
  double stop = 1.0;
  std::size_t steps = 100;

  double step() const { return (stop - start) / static_cast<double>(steps); }
  std::size_t size() const { return steps + 1; }
  double operator[](std::size_t i) const {
    return i == steps ? stop : start + static_cast<double>(i) * step();
  }
  void validate() const {
    if (steps < 1) throw domain_error("time grid needs at least 2 points");
    if (!(stop > start)) throw domain_error("time grid must be increasing");
  }
};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> rho00;
  std::vector<double> rho11;

  void push(double time, double p11) {
    t.push_back(time);
    rho11.push_back(p11);
    rho00.push_back(1.0 - p11);
  }
};

using RateFunction = std::function<double(double)>;

// Lambda_{+-}(tau) and their derivatives.
struct KernelSpec {
  RateFunction lambda_minus;
  RateFunction lambda_plus;
  RateFunction dlambda_minus;
  RateFunction dlambda_plus;
  double lambda_minus_inf = 0.0;
  double lambda_plus_inf = 0.0;
  double response_time = std::numeric_limits<double>::infinity();

  double lambda(Direction d, double tau) const {
    return d == Direction::minus ? lambda_minus(tau) : lambda_plus(tau);
  }
  double dlambda(Direction d, double tau) const {
    return d == Direction::minus ? dlambda_minus(tau) : dlambda_plus(tau);
  }
  // Weight of the delta function at tau = 0.
  double delta_weight(Direction d) const { return lambda(d, 0.0); }
  double asymptote(Direction d) const { return d == Direction::minus ? lambda_minus_inf : lambda_plus_inf; }

  // Time-independent rates: the memory part vanishes.
  static KernelSpec constant(double gamma_minus, double gamma_plus) {
    auto c = [](double v) { return [v](double) { return v; }; };
    auto zero = [](double) { return 0.0; };
    return {c(gamma_minus), c(gamma_plus), zero, zero, gamma_minus, gamma_plus,
            std::numeric_limits<double>::infinity()};
  }
};

namespace dynamics {

// Lambda_{+-}(tau) = Gamma_p exp(-(eps +- eps_p(tau))^2 / 2W^2)
inline double lambda_pm(const SpectralModel& m, const TwoStateParams& p, double W, double tau, Direction d) {
  if (!(tau >= 0.0)) throw domain_error("lambda_pm: tau must be >= 0");
  return gaussian_rate(p.delta.initial, p.eps.initial, W, spectral::shift_function(m, tau), d);
}

// Kernel for an arbitrary shift history eps_p(tau) with derivative eps_p'(tau).
inline KernelSpec make_kernel(const TwoStateParams& p, double W, RateFunction shift, RateFunction shift_rate,
                              double eps_p_inf, double response_time) {
  const double delta = p.delta.initial;
  const double eps = p.eps.initial;
  auto lam = [=](Direction d) {
    return [=](double tau) { return gaussian_rate(delta, eps, W, shift(tau), d); };
  };
  // dLambda/dtau = -Lambda (eps +- eps_p) (+- eps_p') / W^2
  auto dlam = [=](Direction d) {
    return [=](double tau) {
      const double s = shift_sign(d);
      const double ep = shift(tau);
      const double x = eps + s * ep;
      return -gaussian_rate(delta, eps, W, ep, d) * x * s * shift_rate(tau) / (W * W);
    };
  };
  return {lam(Direction::minus),
          lam(Direction::plus),
          dlam(Direction::minus),
          dlam(Direction::plus),
          gaussian_rate(delta, eps, W, eps_p_inf, Direction::minus),
          gaussian_rate(delta, eps, W, eps_p_inf, Direction::plus),
          response_time};
}

inline KernelSpec make_kernel(const SpectralModel& m, const TwoStateParams& p, double W) {
  return make_kernel(
      p, W, [m](double tau) { return spectral::shift_function(m, tau); },
      [m](double tau) { return spectral::shift_rate(m, tau); }, spectral::reorganization_shift(m),
      spectral::response_time(m));
}

// Shift frozen at one value: the kernel has no memory part.
inline KernelSpec frozen_kernel(const TwoStateParams& p, double W, double eps_p) {
  return make_kernel(
      p, W, [eps_p](double) { return eps_p; }, [](double) { return 0.0; }, eps_p,
      std::numeric_limits<double>::infinity());
}

// integral_0^t K(tau) dtau = Lambda(0) + integral_0^t dLambda/dtau dtau, which
// reproduces Lambda(t).
inline double kernel_integral(const KernelSpec& k, double t, Direction d) {
  if (!(t >= 0.0)) throw domain_error("kernel_integral: t must be >= 0");
  quad::Options opt;
  opt.abs_tol = 1e-15 * std::max(k.delta_weight(d), k.asymptote(d));
  opt.rel_tol = 1e-12;
  auto f = [&](double tau) { return k.dlambda(d, tau); };
  const double scale = std::isfinite(k.response_time) ? k.response_time : std::max(t, 1e-300);
  std::vector<double> breaks{0.0};
  for (double b = scale; b < t; b += scale) breaks.push_back(b);
  breaks.push_back(t);
  return k.delta_weight(d) + quad::integrate(f, breaks, opt).value;
}

inline void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw domain_error("rho11(0) must lie in [0, 1]");
}

// Product-trapezoid solution of the nonlocal equation on a uniform grid.
// With p = rho11 and Lambda = Lambda_- + Lambda_+ the equation reads
//   p'(t) = Lambda_-(t) - Lambda(0) p(t) - integral_0^t Lambda'(t-s) p(s) ds,
// which is linear in p, so each implicit trapezoid step is solved in closed
// form. O(N^2) history sum.
inline Trajectory evolve_volterra(const KernelSpec& k, double rho11_0, const TimeGrid& grid) {
  check_probability(rho11_0);
  grid.validate();
  const std::size_t n_pts = grid.size();
  const double h = grid.step();

  std::vector<double> lam_minus(n_pts), dlam(n_pts);
  double lam_max = 0.0;
  for (std::size_t i = 0; i < n_pts; ++i) {
    const double tau = static_cast<double>(i) * h;
    lam_minus[i] = k.lambda_minus(tau);
    const double lp = k.lambda_plus(tau);
    dlam[i] = k.dlambda_minus(tau) + k.dlambda_plus(tau);
    lam_max = std::max({lam_max, lam_minus[i], lp});
  }
  const double h_max = std::min(0.1 * k.response_time, lam_max > 0.0 ? 0.1 / lam_max : h);
  if (h > h_max * (1.0 + 1e-12))
    throw resolution_error("time step " + std::to_string(h) + " exceeds limit " + std::to_string(h_max));

  const double lam0 = k.lambda_minus(0.0) + k.lambda_plus(0.0);
  std::vector<double> p(n_pts);
  p[0] = rho11_0;
  double f_prev = lam_minus[0] - lam0 * p[0];
  const double lhs = 1.0 + 0.5 * h * (lam0 + 0.5 * h * dlam[0]);
  for (std::size_t n = 0; n + 1 < n_pts; ++n) {
    // History sum at t_{n+1} without the unknown endpoint.
    double hist = 0.5 * dlam[n + 1] * p[0];
    for (std::size_t j = 1; j <= n; ++j) hist += dlam[n + 1 - j] * p[j];
    const double rhs_known = lam_minus[n + 1] - h * hist;
    p[n + 1] = (p[n] + 0.5 * h * (f_prev + rhs_known)) / lhs;
    f_prev = rhs_known - (lam0 + 0.5 * h * dlam[0]) * p[n + 1];
  }

  Trajectory out;
  out.t.reserve(n_pts);
  out.rho00.reserve(n_pts);
  out.rho11.reserve(n_pts);
  for (std::size_t i = 0; i < n_pts; ++i) out.push(grid[i], p[i]);
  return out;
}

// Nonlocal evolution for a time-invariant Hamiltonian, history from grid.start.
inline Trajectory evolve_nonlocal(const SpectralModel& m, const TwoStateParams& p, double rho11_0,
                                  const TimeGrid& grid) {
  if (!p.is_time_invariant())
    throw regime_error("evolve_nonlocal requires constant Delta and eps");
  check_probability(rho11_0);
  const double W = spectral::noise_rms(m);
  return evolve_volterra(make_kernel(m, p, W), rho11_0, grid);
}

struct LocalSolverOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
};

// d rho11/dt = Gamma_-(t) rho00 - Gamma_+(t) rho11 with an adaptive
// Dormand-Prince integrator (dense output at the grid points).
inline Trajectory evolve_local(const RateFunction& rate_minus, const RateFunction& rate_plus, double rho11_0,
                               const TimeGrid& grid, const LocalSolverOptions& opt = {}) {
  check_probability(rho11_0);
  grid.validate();
  using State = std::array<double, 1>;
  auto rhs = [&](const State& x, State& dxdt, double t) {
    const double gm = rate_minus(t);
    const double gp = rate_plus(t);
    if (gm < 0.0 || gp < 0.0) throw domain_error("evolve_local: rates must be >= 0");
    dxdt[0] = gm * (1.0 - x[0]) - gp * x[0];
  };
  std::vector<double> times(grid.size());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = grid[i];

  Trajectory out;
  State x{rho11_0};
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_dense_output(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), 0.01 * grid.step(),
                       [&](const State& s, double t) { out.push(t, s[0]); });
  return out;
}

inline RateFunction constant_rate(double g) {
  return [g](double) { return g; };
}

// Gamma_{+-}(t) = Gamma_p(t) exp(-(eps(t) +- eps_p(t))^2 / 2W^2) with a
// caller-chosen eps_p(t), e.g. eps_p0 for a fast bath or 0 for static noise.
inline RateFunction gaussian_rate_schedule(const TwoStateParams& p, double W, RateFunction eps_p, Direction d) {
  return [=](double t) { return gaussian_rate(p, W, eps_p(t), d, t); };
}

// Gamma_{+-} to lowest order in Gamma_p/omega_c:
//   Gamma_p e^{-(eps +- eps_p0)^2/2W^2}
//   * {1 + (2 Gamma_p/omega_c) e^{-eps^2/2W^2} (e^{-eps_p0^2/2W^2} cosh(eps/2T) - 1)}
inline double nonlocal_first_order_rate(double eps, double gamma_p, double omega_c, double eps_p0, double W,
                                        double T, Direction d) {
  const double x = eps + shift_sign(d) * eps_p0;
  const double w2 = 2.0 * W * W;
  const double correction =
      2.0 * gamma_p / omega_c * std::exp(-eps * eps / w2) *
      (std::exp(-eps_p0 * eps_p0 / w2) * std::cosh(eps / (2.0 * T)) - 1.0);
  return gamma_p * std::exp(-x * x / w2) * (1.0 + correction);
}

struct NonlocalRates {
  double gamma_minus;  // first-order formula
  double gamma_plus;
  double memory_exact;     // integral_0^inf [Lambda(inf) - Lambda(tau)] dtau
  double memory_estimate;  // [Lambda(inf) - Lambda(0)] / omega_c
  double exact_minus;      // Lambda_-(inf) / (1 - memory_exact)
  double exact_plus;
};

inline double characteristic_frequency(const SpectralModel& m) { return 1.0 / spectral::response_time(m); }

inline void check_nonlocal_regime(double gamma_p, double omega_c) {
  if (!(gamma_p / omega_c < 0.5))
    throw regime_error("Gamma_p/omega_c must be < 0.5 for the nonlocal correction");
}

inline double memory_integral(const SpectralModel& m, const TwoStateParams& p, double W) {
  const auto k = make_kernel(m, p, W);
  const double inf = k.lambda_minus_inf + k.lambda_plus_inf;
  auto f = [&](double tau) { return inf - k.lambda_minus(tau) - k.lambda_plus(tau); };
  quad::Options opt;
  opt.abs_tol = 1e-14 * inf * k.response_time;
  opt.rel_tol = 1e-11;
  // The shift settles within a few tens of tau_R; beyond 256 tau_R the
  // integrand is rounding noise.
  std::vector<double> breaks{0.0};
  for (double b = 0.25; b <= 256.0; b *= 2.0) breaks.push_back(b * k.response_time);
  return quad::integrate(f, breaks, opt).value;
}

inline NonlocalRates nonlocal_corrected_rates(const SpectralModel& m, const TwoStateParams& p, double W) {
  const double gp = peak_rate(p.delta.initial, W);
  const double wc = characteristic_frequency(m);
  check_nonlocal_regime(gp, wc);
  const double eps = p.eps.initial;
  const double ep0 = spectral::reorganization_shift(m);
  const double T = p.temperature;

  NonlocalRates r{};
  r.gamma_minus = nonlocal_first_order_rate(eps, gp, wc, ep0, W, T, Direction::minus);
  r.gamma_plus = nonlocal_first_order_rate(eps, gp, wc, ep0, W, T, Direction::plus);

  const double inf_m = gaussian_rate(p.delta.initial, eps, W, ep0, Direction::minus);
  const double inf_p = gaussian_rate(p.delta.initial, eps, W, ep0, Direction::plus);
  const double at_zero = 2.0 * gaussian_rate(p.delta.initial, eps, W, 0.0, Direction::minus);
  r.memory_estimate = (inf_m + inf_p - at_zero) / wc;
  r.memory_exact = memory_integral(m, p, W);
  if (!(r.memory_exact < 1.0)) throw regime_error("nonlocal rate denominator is not positive");
  r.exact_minus = inf_m / (1.0 - r.memory_exact);
  r.exact_plus = inf_p / (1.0 - r.memory_exact);
  return r;
}

struct PeakSummary {
  double gamma_peak;
  double eps_peak;
  double asymmetry;  // standardized third central moment of the line
  double first_order_gamma_peak;  // Gamma_p (1 + Gamma_p/omega_c)
  double first_order_eps_peak;    // eps_p0 (1 + 2 Gamma_p/omega_c e^{-eps_p0^2/2W^2})
};

// Line-shape summary of the first-order corrected Gamma_-(eps) (or Gamma_+),
// given the bath response frequency omega_c.
inline PeakSummary peak_summary(double gamma_p, double omega_c, double eps_p0, double W, double T,
                                Direction d = Direction::minus) {
  check_nonlocal_regime(gamma_p, omega_c);
  auto rate = [&](double e) { return nonlocal_first_order_rate(e, gamma_p, omega_c, eps_p0, W, T, d); };
  const double center = -shift_sign(d) * eps_p0;

  // Coarse scan, then Brent refinement around the best sample.
  const double lo = center - 10.0 * W;
  const double hi = center + 10.0 * W;
  constexpr int samples = 2001;
  double best_e = lo, best_v = -1.0;
  for (int i = 0; i < samples; ++i) {
    const double e = lo + (hi - lo) * i / (samples - 1);
    const double v = rate(e);
    if (v > best_v) best_v = v, best_e = e;
  }
  const double cell = (hi - lo) / (samples - 1);
  const auto [e_peak, neg_peak] = boost::math::tools::brent_find_minima(
      [&](double e) { return -rate(e); }, best_e - cell, best_e + cell, 52);

  // Moments over a window wide enough that the tails are below 1e-40.
  quad::Options opt;
  opt.abs_tol = 1e-300;
  opt.rel_tol = 1e-12;
  std::vector<double> sorted{center - 16.0 * W, center - 4.0 * W, center, center + 4.0 * W, center + 16.0 * W};
  if (std::abs(center) < 16.0 * W) sorted.push_back(0.0);  // the correction term is centred at eps = 0
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const double area = quad::integrate(rate, sorted, opt).value;
  const double mean = quad::integrate([&](double e) { return e * rate(e); }, sorted, opt).value / area;
  auto central = [&](int power) {
    return quad::integrate([&](double e) { return std::pow(e - mean, power) * rate(e); }, sorted, opt).value /
           area;
  };
  const double var = central(2);
  const double third = central(3);

  PeakSummary s{};
  s.gamma_peak = -neg_peak;
  s.eps_peak = e_peak;
  s.asymmetry = third / std::pow(var, 1.5);
  s.first_order_gamma_peak = gamma_p * (1.0 + gamma_p / omega_c);
  s.first_order_eps_peak = center * (1.0 + 2.0 * gamma_p / omega_c * std::exp(-eps_p0 * eps_p0 / (2.0 * W * W)));
  return s;
}

inline PeakSummary peak_summary(const SpectralModel& m, const TwoStateParams& p, double W) {
  return peak_summary(peak_rate(p.delta.initial, W), characteristic_frequency(m),
                      spectral::reorganization_shift(m), W, p.temperature);
}

struct ShortTimeResult {
  double rho11;            // double quadrature over (tau', tau)
  double rho11_slow_bias;  // eps, Delta frozen over 1/W, inner integral closed form
  double rho11_rate;       // integral_0^t Gamma_p e^{-(eps - eps_p)^2/2W^2}
  bool perturbative_warning;  // t Delta > 1
};

namespace detail {

// integral_0^a exp(-alpha tau^2) cos(b tau) dtau through the Faddeeva function.
inline double truncated_gaussian_cosine(double alpha, double b, double a) {
  const double sa = std::sqrt(alpha);
  const double u = sa * a;
  const double v = b / (2.0 * sa);
  const std::complex<double> w = faddeeva({v, u});
  const std::complex<double> phase = std::polar(1.0, 2.0 * u * v);
  const double value = std::exp(-v * v) - std::exp(-u * u) * (phase * w).real();
  return std::sqrt(std::numbers::pi) / (2.0 * sa) * value;
}

inline quad::Options short_time_tolerance(double scale) {
  quad::Options opt;
  opt.abs_tol = 1e-14 * scale;
  opt.rel_tol = 1e-11;
  return opt;
}

}  // namespace detail

// rho11(t) for an initial |0>, to second order in Delta:
//   (1/4) integral_0^t dtau' integral_{-t~}^{t~} dtau Delta(tau'+tau/2) Delta(tau'-tau/2)
//   exp(-W^2 tau^2/2 - i(eps_p(tau') tau - integral_{-tau/2}^{tau/2} eps(tau'+s) ds)),
// t~ = min(2tau', 2(t - tau')). The integrand is even in tau.
inline ShortTimeResult short_time_rho11(const SpectralModel& m, const TwoStateParams& p, double W, double t) {
  if (!(t >= 0.0)) throw domain_error("short_time_rho11: t must be >= 0");
  if (!(W > 0.0)) throw domain_error("short_time_rho11: W must be > 0");
  ShortTimeResult r{0.0, 0.0, 0.0, t * std::abs(p.delta.initial) > 1.0};
  if (t == 0.0) return r;

  const double d0 = std::max(std::abs(p.delta(0.0)), std::abs(p.delta(t)));
  const double size = d0 * d0 * t / W;
  auto inner_integrand = [&](double tau_c, double ep, double tau) {
    const double dd = p.delta(tau_c + 0.5 * tau) * p.delta(tau_c - 0.5 * tau);
    const double phase = ep * tau - p.eps.integral(tau_c - 0.5 * tau, tau_c + 0.5 * tau);
    return dd * std::exp(-0.5 * W * W * tau * tau) * std::cos(phase);
  };
  auto inner_range = [&](double tau_c) { return std::min(2.0 * tau_c, 2.0 * (t - tau_c)); };

  const auto inner_opt = detail::short_time_tolerance(d0 * d0 / W);
  auto outer = [&](double tau_c) {
    const double ep = spectral::shift_function(m, tau_c);
    const double a = inner_range(tau_c);
    // Beyond ~40/W the Gaussian factor is below e^{-800}.
    const double cut = std::min(a, 40.0 / W);
    auto g = [&](double tau) { return inner_integrand(tau_c, ep, tau); };
    std::vector<double> breaks{0.0};
    for (double b = 2.0 / W; b < cut; b += 2.0 / W) breaks.push_back(b);
    breaks.push_back(cut);
    return 0.5 * quad::integrate(g, breaks, inner_opt).value;
  };
  const auto outer_opt = detail::short_time_tolerance(size);
  std::vector<double> outer_breaks{0.0, 0.5 * t, t};
  r.rho11 = quad::integrate(outer, outer_breaks, outer_opt).value;

  const double alpha = 0.5 * W * W;
  auto slow = [&](double tau_c) {
    const double dl = p.delta(tau_c);
    const double b = p.eps(tau_c) - spectral::shift_function(m, tau_c);
    return 0.5 * dl * dl * detail::truncated_gaussian_cosine(alpha, b, inner_range(tau_c));
  };
  r.rho11_slow_bias = quad::integrate(slow, outer_breaks, outer_opt).value;

  auto rate = [&](double tau_c) {
    return gaussian_rate(p.delta(tau_c), p.eps(tau_c), W, spectral::shift_function(m, tau_c), Direction::minus);
  };
  r.rho11_rate = quad::integrate(rate, 0.0, t, outer_opt).value;
  return r;
}

// d rho11/dt of the double integral:
//   (1/2) integral_0^t Delta(t) Delta(t - tau) e^{-W^2 tau^2/2}
//   cos(eps_p(t - tau/2) tau - integral_{t-tau}^{t} eps) dtau.
inline double short_time_rate(const SpectralModel& m, const TwoStateParams& p, double W, double t) {
  if (!(t >= 0.0)) throw domain_error("short_time_rate: t must be >= 0");
  if (t == 0.0) return 0.0;
  auto g = [&](double tau) {
    const double tau_c = t - 0.5 * tau;
    const double phase = spectral::shift_function(m, tau_c) * tau - p.eps.integral(t - tau, t);
    return p.delta(t) * p.delta(t - tau) * std::exp(-0.5 * W * W * tau * tau) * std::cos(phase);
  };
  const double cut = std::min(t, 40.0 / W);
  std::vector<double> breaks{0.0};
  for (double b = 2.0 / W; b < cut; b += 2.0 / W) breaks.push_back(b);
  breaks.push_back(cut);
  return 0.5 * quad::integrate(g, breaks, detail::short_time_tolerance(p.delta(t) * p.delta(t) / W)).value;
}

}  // namespace dynamics
}  // namespace mrt
