#pragma once

// Adaptive Gauss-Kronrod quadrature plus the Fourier-type panel integrators
// used by the spectral moments and the dephasing envelope.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace mrt::quad {

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 1e-11;
  std::size_t max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;

  Result& operator+=(const Result& other) {
    value += other.value;
    error += other.error;
    evaluations += other.evaluations;
    return *this;
  }
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kronrod_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kronrod_weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208703293309, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> gauss_weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kronrod_weights[10];
  double gauss = 0.0;
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kronrod_nodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kronrod_weights[j] * pair;
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

// Globally adaptive 21-point Gauss-Kronrod on [a, b]. The interval with the
// largest error estimate is bisected until the summed estimate meets the
// tolerance or the interval budget runs out.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  if (a == b) return {};
  if (b < a) {
    Result r = integrate(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk21(f, a, b);
  double total = first.value;
  double total_err = first.error;
  std::size_t evals = 21;
  heap.push(first);
  while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) &&
         heap.size() < opt.max_intervals) {
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    auto left = detail::gk21(f, worst.a, mid);
    auto right = detail::gk21(f, mid, worst.b);
    evals += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  return {total, total_err, evals};
}

// Integrate over consecutive breakpoints, which must be sorted.
template <class F>
Result integrate(F&& f, const std::vector<double>& breakpoints, const Options& opt = {}) {
  Result r;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    r += integrate(f, breakpoints[i], breakpoints[i + 1], opt);
  return r;
}

// Integral over [a, inf). [a, a + scale] is integrated directly and the rest
// through x = a + scale / u, u in (0, 1].
template <class F>
Result integrate_to_infinity(F&& f, double a, double scale, const Options& opt = {}) {
  Result r = integrate(f, a, a + scale, opt);
  auto mapped = [&](double u) {
    const double x = a + scale / u;
    if (!std::isfinite(x)) return 0.0;
    return f(x) * scale / (u * u);
  };
  r += integrate(mapped, 0.0, 1.0, opt);
  return r;
}

// I(t) = integral_0^end f(w) (1 - cos w t) dw, with end = infinity when
// `support_end` is not finite. (1 - cos) is evaluated as 2 sin^2(wt/2), so f
// may be singular like 1/w^2 at the origin. `scale` is the frequency scale on
// which f varies.
//
// Oscillatory case: panels end on zeros of the weight, and for the infinite
// range the panel sweep stops once the oscillating remainder of the tail,
// about |f'(W)|/t^2, is below the tolerance; what remains is integral_W^inf f.
template <class F>
Result fourier_one_minus_cos(F&& f, double t, double scale,
                             double support_end = std::numeric_limits<double>::infinity(),
                             const Options& opt = {}) {
  if (t == 0.0) return {};
  auto g = [&](double w) {
    const double s = std::sin(0.5 * w * t);
    return 2.0 * s * s * f(w);
  };
  const double period = 2.0 * std::numbers::pi / t;
  const double end = support_end;
  const bool finite = std::isfinite(end);
  Options panel_opt = opt;
  panel_opt.abs_tol = opt.abs_tol * 1e-2;

  // Head [0, w0]: whole periods covering at least 8 scales, with breakpoints
  // at scale * 2^k and at the zeros of the weight.
  const double w0 = std::min(end, period * std::ceil(8.0 * scale / period));
  std::vector<double> head{0.0, w0};
  for (double b = scale / 64.0; b < w0; b *= 2.0) head.push_back(b);
  if (period < w0 && w0 / period < 1e6)
    for (double b = period; b < w0; b += period) head.push_back(b);
  std::sort(head.begin(), head.end());
  head.erase(std::unique(head.begin(), head.end()), head.end());
  Result r = integrate(g, head, panel_opt);
  if (w0 >= end) return r;

  // Period-wide panels, then the smooth remainder once the oscillating tail,
  // about |f'(w)|/t^2, is below the tolerance.
  constexpr std::size_t max_panels = 2'000'000;
  for (std::size_t k = 0; k < max_panels; ++k) {
    const double lo = w0 + static_cast<double>(k) * period;
    const double hi = lo + period;
    if (finite && hi >= end) {
      r += integrate(g, lo, end, panel_opt);
      return r;
    }
    r += integrate(g, lo, hi, panel_opt);
    if (finite) continue;
    const double d = 1e-4 * hi;
    const double slope = std::abs(f(hi + d) - f(hi - d)) / (2.0 * d);
    if (slope / (t * t) < 1e-3 * opt.abs_tol) {
      r += integrate_to_infinity(f, hi, hi, opt);
      return r;
    }
  }
  return r;
}

// integral_0^end f(w) sin(w t) dw over a finite support, panels ending on the
// zeros of the sine.
template <class F>
Result fourier_sin(F&& f, double t, double scale, double support_end, const Options& opt = {}) {
  if (t == 0.0 || support_end <= 0.0) return {};
  auto g = [&](double w) { return f(w) * std::sin(w * t); };
  const double half_period = std::numbers::pi / t;
  const double width =
      half_period / std::max(1.0, std::ceil(half_period / scale));
  Options panel_opt = opt;
  panel_opt.abs_tol = opt.abs_tol * 1e-2;
  Result r;
  for (std::size_t k = 0;; ++k) {
    const double lo = static_cast<double>(k) * width;
    if (lo >= support_end) break;
    r += integrate(g, lo, std::min(lo + width, support_end), panel_opt);
  }
  return r;
}

}  // namespace mrt::quad
