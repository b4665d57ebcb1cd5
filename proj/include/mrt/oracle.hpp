#pragma once

// Brute-force references: Monte Carlo over static Gaussian noise, direct
// Gaussian-Lorentzian convolution and refined-step reruns of the solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

#include "mrt/dynamics.hpp"
#include "mrt/errors.hpp"
#include "mrt/quadrature.hpp"
#include "mrt/random.hpp"
#include "mrt/rates.hpp"

namespace mrt::oracle {

struct McConfig {
  std::uint64_t sample_count = 100000;
  std::uint64_t seed = 0;
  double W = 1.0;
  double delta = 0.01;
  double eps = 0.0;
  double probe_time = 10.0;
  unsigned threads = 1;

  void validate() const {
    if (sample_count < 1) throw config_error("sample_count must be >= 1");
    if (!(W > 0.0)) throw config_error("W must be > 0");
    if (!(delta >= 0.0)) throw config_error("delta must be >= 0");
    if (threads < 1) throw config_error("threads must be >= 1");
    // 1/W << t << 1/Delta
    const double lo = 5.0 / W;
    const double hi = delta > 0.0 ? 0.2 / delta : std::numeric_limits<double>::infinity();
    if (!(probe_time >= lo * (1.0 - 1e-12) && probe_time <= hi * (1.0 + 1e-12)))
      throw config_error("probe_time must lie in [5/W, 0.2/Delta]");
  }
};

struct McEstimate {
  double rate;             // <dP1/dt> at the probe time
  double standard_error;
  double mean_probability_rate;  // <P1(t)>/t
  double mean_probability_error;
  std::uint64_t samples;
};

// Fixed-order pairwise sum, so the result never depends on how the terms
// were produced.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace detail {

// Closed two-level system with fixed static offset Q, starting in |0>:
//   P1(t) = Delta^2/Omega^2 sin^2(Omega t/2), Omega^2 = Delta^2 + (eps+Q)^2.
struct RabiSample {
  double probability;
  double slope;
};

inline RabiSample rabi(double delta, double detuning, double t) {
  const double omega = std::hypot(delta, detuning);
  if (omega == 0.0) return {0.0, 0.0};
  const double s = std::sin(0.5 * omega * t);
  const double ratio = delta * delta / (omega * omega);
  return {ratio * s * s, 0.5 * delta * delta * std::sin(omega * t) / omega};
}

inline double mean_and_error(std::span<const double> v, double& error) {
  const double n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v) / n;
  std::vector<double> dev(v.size());
  std::transform(v.begin(), v.end(), dev.begin(), [mean](double x) { return (x - mean) * (x - mean); });
  error = v.size() > 1 ? std::sqrt(pairwise_sum(dev) / (n - 1.0) / n) : 0.0;
  return mean;
}

}  // namespace detail

// Averages the exact Rabi evolution over Q ~ N(0, W^2). The primary estimate
// is the transition rate <dP1/dt> at the probe time; <P1>/t is reported too
// but carries an O(1/(W t)) offset from the initial transient.
inline McEstimate static_noise_transition(const McConfig& c) {
  c.validate();
  const std::size_t n = c.sample_count;
  std::vector<double> prob(n), slope(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double q = c.W * random::normal_pair(c.seed, i)[0];
      const auto s = detail::rabi(c.delta, c.eps + q, c.probe_time);
      prob[i] = s.probability;
      slope[i] = s.slope;
    }
  };
  const std::size_t threads = std::min<std::size_t>(c.threads, n);
  if (threads <= 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(work, n * k / threads, n * (k + 1) / threads);
  }

  McEstimate e{};
  e.samples = n;
  e.rate = detail::mean_and_error(slope, e.standard_error);
  double perr = 0.0;
  e.mean_probability_rate = detail::mean_and_error(prob, perr) / c.probe_time;
  e.mean_probability_error = perr / c.probe_time;
  return e;
}

// integral de' Gamma_p e^{-(e' -+ eps_p)^2/2W^2} (gamma/pi) / ((eps - e')^2 + gamma^2)
// by direct quadrature, with breakpoints on the Gaussian (W) and the
// Lorentzian (gamma, 10 gamma, ...) scales and both tails mapped to infinity.
inline double convolution_rate(double delta, double W, double eps, double eps_p, double gamma,
                               Direction d = Direction::minus) {
  if (!(gamma > 0.0)) throw domain_error("convolution_reference: gamma must be > 0");
  if (!(W > 0.0)) throw domain_error("convolution_reference: W must be > 0");
  const double center = -shift_sign(d) * eps_p;  // Gaussian peak in e'
  const double gp = peak_rate(delta, W);
  auto f = [&](double e) {
    const double x = e - center;
    const double y = eps - e;
    return gp * std::exp(-x * x / (2.0 * W * W)) * gamma / (std::numbers::pi * (y * y + gamma * gamma));
  };
  std::vector<double> breaks{eps};
  for (int k = -12; k <= 12; k += 2) breaks.push_back(center + k * W);
  for (double s = gamma; s < 40.0 * (W + std::abs(eps - center)); s *= 10.0) {
    breaks.push_back(eps - s);
    breaks.push_back(eps + s);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  quad::Options opt;
  opt.abs_tol = 1e-24 * gp;
  opt.rel_tol = 1e-13;
  const double lo = breaks.front(), hi = breaks.back();
  const double tail = std::max(W, gamma);
  return quad::integrate_to_infinity([&](double x) { return f(2.0 * lo - x); }, lo, tail, opt).value +
         quad::integrate(f, breaks, opt).value + quad::integrate_to_infinity(f, hi, tail, opt).value;
}

inline RateCurve convolution_reference(double delta, double W, const std::vector<double>& eps_grid, double eps_p,
                                       double gamma) {
  RateCurve c;
  c.shape = LineShape::voigt;
  c.eps = eps_grid;
  for (double e : eps_grid) {
    c.gamma_minus.push_back(convolution_rate(delta, W, e, eps_p, gamma, Direction::minus));
    c.gamma_plus.push_back(convolution_rate(delta, W, e, eps_p, gamma, Direction::plus));
  }
  return c;
}

// Brute-force multi-channel sum sum_n P_n Gamma^n, one Voigt (or Gaussian)
// line per level.
inline double channel_sum_rate(const WellLevels& levels, double T, double W, double eps, double eps_p,
                               Direction d = Direction::minus,
                               BoltzmannWeights how = BoltzmannWeights::normalized) {
  const auto w = occupation_weights(levels, T, how);
  double total = 0.0;
  for (std::size_t n = 0; n < levels.size(); ++n)
    total += w[n] * voigt_rate(levels[n].delta, W, eps, eps_p, levels[n].gamma, d);
  return total;
}

inline constexpr std::size_t refinement = 16;

inline TimeGrid refined(const TimeGrid& g, std::size_t factor = refinement) {
  return {g.start, g.stop, g.steps * factor};
}

inline Trajectory subsample(const Trajectory& fine, std::size_t factor, std::size_t coarse_points) {
  Trajectory out;
  for (std::size_t i = 0; i < coarse_points; ++i) out.push(fine.t[i * factor], fine.rho11[i * factor]);
  return out;
}

// Volterra scheme rerun at 1/16 the step, reported on the original grid.
inline Trajectory refined_reference(const KernelSpec& k, double rho11_0, const TimeGrid& grid) {
  return subsample(dynamics::evolve_volterra(k, rho11_0, refined(grid)), refinement, grid.size());
}

// Classical RK4 for the local equation with 16 substeps per grid interval;
// independent of the adaptive production integrator.
inline Trajectory refined_reference(const RateFunction& rate_minus, const RateFunction& rate_plus, double rho11_0,
                                    const TimeGrid& grid, std::size_t substeps = refinement) {
  dynamics::check_probability(rho11_0);
  grid.validate();
  auto f = [&](double t, double p) {
    const double gm = rate_minus(t), gp = rate_plus(t);
    if (gm < 0.0 || gp < 0.0) throw domain_error("refined_reference: rates must be >= 0");
    return gm * (1.0 - p) - gp * p;
  };
  Trajectory out;
  double p = rho11_0;
  out.push(grid[0], p);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double t0 = grid[i];
    const double h = (grid[i + 1] - t0) / static_cast<double>(substeps);
    for (std::size_t s = 0; s < substeps; ++s) {
      const double t = t0 + static_cast<double>(s) * h;
      const double k1 = f(t, p);
      const double k2 = f(t + 0.5 * h, p + 0.5 * h * k1);
      const double k3 = f(t + 0.5 * h, p + 0.5 * h * k2);
      const double k4 = f(t + h, p + h * k3);
      p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.push(grid[i + 1], p);
  }
  return out;
}

inline double sup_distance(const Trajectory& a, const Trajectory& b) {
  if (a.rho11.size() != b.rho11.size()) throw domain_error("trajectories differ in length");
  double d = 0.0;
  for (std::size_t i = 0; i < a.rho11.size(); ++i) d = std::max(d, std::abs(a.rho11[i] - b.rho11[i]));
  return d;
}

// Empirical order from runs at h, h/2, h/4 compared on the coarse grid:
// log2(|p_h - p_{h/2}| / |p_{h/2} - p_{h/4}|).
inline double convergence_order(const KernelSpec& k, double rho11_0, const TimeGrid& grid) {
  const auto p1 = dynamics::evolve_volterra(k, rho11_0, grid);
  const auto p2 = subsample(dynamics::evolve_volterra(k, rho11_0, refined(grid, 2)), 2, grid.size());
  const auto p4 = subsample(dynamics::evolve_volterra(k, rho11_0, refined(grid, 4)), 4, grid.size());
  return std::log2(sup_distance(p1, p2) / sup_distance(p2, p4));
}

}  // namespace mrt::oracle
