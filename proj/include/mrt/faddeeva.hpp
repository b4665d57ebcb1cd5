#pragma once

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) on the closed upper half plane.
//
// Regions:
//   |z| < 1                       Maclaurin series sum (iz)^n / Gamma(n/2 + 1)
//   |z| >= 10 and Im z >= 0.01,
//   or Im z >= 8                  Laplace continued fraction
//   otherwise                     Weideman's 40-term rational expansion
// On the real axis Re w(x) = exp(-x^2) is returned exactly.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>

#include "mrt/errors.hpp"

namespace mrt {

namespace faddeeva_detail {

inline constexpr std::size_t weideman_terms = 40;

struct WeidemanTable {
  double L;
  std::array<double, weideman_terms> a;  // a[k] multiplies Z^k
};

// Coefficients from the discrete Fourier transform of
// exp(-t^2)(L^2 + t^2) sampled at t = L tan(theta/2).
inline WeidemanTable make_weideman_table() {
  constexpr std::size_t N = weideman_terms;
  constexpr std::size_t M = 2 * N;
  constexpr std::size_t M2 = 2 * M;
  WeidemanTable table{};
  table.L = std::sqrt(static_cast<double>(N) / std::numbers::sqrt2);
  const double L = table.L;

  // f[j] for k = j - M, j = 0..M2-1, with f(k = -M) = 0.
  std::array<double, M2> f{};
  for (std::size_t j = 1; j < M2; ++j) {
    const double k = static_cast<double>(j) - static_cast<double>(M);
    const double theta = k * std::numbers::pi / static_cast<double>(M);
    const double t = L * std::tan(theta / 2.0);
    f[j] = std::exp(-t * t) * (L * L + t * t);
  }
  // fftshift, then the real part of the forward DFT.
  std::array<double, M2> shifted{};
  for (std::size_t j = 0; j < M2; ++j) shifted[j] = f[(j + M) % M2];
  for (std::size_t m = 1; m <= N; ++m) {
    double re = 0.0;
    for (std::size_t j = 0; j < M2; ++j)
      re += shifted[j] * std::cos(2.0 * std::numbers::pi * static_cast<double>(j * m % M2) /
                                  static_cast<double>(M2));
    table.a[m - 1] = re / static_cast<double>(M2);
  }
  return table;
}

inline const WeidemanTable& weideman_table() {
  static const WeidemanTable table = make_weideman_table();
  return table;
}

inline std::complex<double> weideman(std::complex<double> z) {
  const auto& tab = weideman_table();
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> denom = tab.L - i * z;
  const std::complex<double> Z = (tab.L + i * z) / denom;
  std::complex<double> p = 0.0;
  for (std::size_t k = weideman_terms; k-- > 0;) p = p * Z + tab.a[k];
  return 2.0 * p / (denom * denom) + (1.0 / std::sqrt(std::numbers::pi)) / denom;
}

inline std::complex<double> maclaurin(std::complex<double> z) {
  const std::complex<double> iz(-z.imag(), z.real());
  const std::complex<double> iz2 = iz * iz;
  // Even terms (iz)^{2k}/k!, odd terms (iz)^{2k+1}/Gamma(k + 3/2).
  std::complex<double> even = 1.0;
  std::complex<double> odd = iz * (2.0 / std::sqrt(std::numbers::pi));
  std::complex<double> sum = even + odd;
  for (int k = 1; k < 200; ++k) {
    even *= iz2 / static_cast<double>(k);
    odd *= iz2 / (static_cast<double>(k) + 0.5);
    sum += even + odd;
    if (std::abs(even) + std::abs(odd) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// w(z) = (i/sqrt(pi)) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...)))).
inline std::complex<double> continued_fraction(std::complex<double> z) {
  std::complex<double> r = 0.0;
  for (int k = 60; k >= 1; --k) r = (0.5 * k) / (z - r);
  return std::complex<double>(0.0, 1.0 / std::sqrt(std::numbers::pi)) / (z - r);
}

}  // namespace faddeeva_detail

// Complex error function w(z) for Im z >= 0.
inline std::complex<double> faddeeva(std::complex<double> z) {
  const double x = z.real();
  const double y = z.imag();
  if (!(y >= 0.0)) throw domain_error("faddeeva: Im z must be >= 0");
  const double r = std::abs(z);

  std::complex<double> w;
  if (r < 1.0)
    w = faddeeva_detail::maclaurin(z);
  else if (y >= 8.0 || (r >= 10.0 && y >= 0.01))
    w = faddeeva_detail::continued_fraction(z);
  else
    w = faddeeva_detail::weideman(z);

  if (y == 0.0) w.real(std::exp(-x * x));
  return w;
}

}  // namespace mrt
