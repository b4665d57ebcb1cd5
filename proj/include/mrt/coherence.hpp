#pragma once

// Pure dephasing of the off-diagonal element rho_01(t) at zeroth order in
// Delta: a phase from the bias schedule times a Gaussian-noise envelope.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "mrt/errors.hpp"
#include "mrt/quadrature.hpp"
#include "mrt/spectral.hpp"
#include "mrt/two_state.hpp"

namespace mrt {

struct DephasingResult {
  double t;
  double magnitude_ratio;  // |rho01(t) / rho01(0)|
  double phase;            // -integral_0^t eps(t') dt'
};

namespace coherence {

// integral dw/pi S(w) sin^2(wt/2) / w^2, folded onto w > 0 as
// integral_0^inf dw/pi S_s(w) (1 - cos wt) / w^2.
inline double dephasing_exponent(const SpectralModel& m, double t) {
  if (!(t >= 0.0)) throw domain_error("dephasing_exponent: t must be >= 0");
  if (t == 0.0) return 0.0;
  if (const auto* w = m.as<WhiteNoise>()) return 0.5 * w->s0 * t;

  const double W = spectral::noise_rms(m);
  const double scale = m.frequency_scale();
  // Rough size of the result: W^2 t^2/2 at short times, linear growth later.
  const double magnitude = 0.5 * W * W * t * t / (1.0 + t * scale);
  auto f = [&](double w) { return spectral::detail::parts(m, w).symmetric / (std::numbers::pi * w * w); };
  const auto opt = spectral::detail::tolerance(magnitude);
  const double exponent = quad::fourier_one_minus_cos(f, t, scale, m.support_end(), opt).value;
  if (!std::isfinite(exponent)) throw divergent_moment_error("dephasing exponent does not converge");
  return std::max(0.0, exponent);
}

inline DephasingResult envelope(const SpectralModel& m, const LinearSchedule& eps, double t) {
  return {t, std::exp(-dephasing_exponent(m, t)), -eps.integral(0.0, t)};
}

// rho01(t) = rho01(0) exp(-i integral_0^t eps) exp(-dephasing_exponent(t)).
inline std::complex<double> offdiag_element(std::complex<double> rho01_0, const LinearSchedule& eps,
                                            const SpectralModel& m, double t) {
  if (std::abs(rho01_0) > 0.5 + 1e-15)
    throw domain_error("offdiag_element: |rho01(0)| must be <= 1/2");
  const auto e = envelope(m, eps, t);
  return rho01_0 * std::polar(e.magnitude_ratio, e.phase);
}

}  // namespace coherence
}  // namespace mrt
