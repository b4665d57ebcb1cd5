#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mrt/faddeeva.hpp"
#include "mrt/interpolation.hpp"
#include "mrt/quadrature.hpp"
#include "mrt/random.hpp"

using namespace mrt;
using cd = std::complex<double>;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }
double rel(cd a, cd b) { return std::abs(a - b) / std::abs(b); }

// w(z) = (i/pi) integral e^{-t^2}/(z - t) dt for Im z > 0, by the trapezoid
// rule, which converges geometrically for this analytic integrand.
cd faddeeva_by_trapezoid(cd z) {
  const double h = 0.01;
  cd sum = 0.0;
  for (int k = -1000; k <= 1000; ++k) {
    const double t = k * h;
    sum += std::exp(-t * t) / (z - t);
  }
  return cd(0.0, 1.0 / std::numbers::pi) * sum * h;
}

}  // namespace

TEST(Quadrature, KronrodWeightsIntegrateConstants) {
  double s = quad::detail::kronrod_weights[10];
  for (int j = 0; j < 10; ++j) s += 2.0 * quad::detail::kronrod_weights[j];
  EXPECT_NEAR(s, 2.0, 1e-15);
  double g = 0.0;
  for (double w : quad::detail::gauss_weights) g += 2.0 * w;
  EXPECT_NEAR(g, 2.0, 1e-15);
}

TEST(Quadrature, PolynomialsAndSmoothFunctions) {
  auto r = quad::integrate([](double x) { return x * x * x * x; }, 0.0, 2.0);
  EXPECT_NEAR(r.value, 32.0 / 5.0, 1e-13);
  r = quad::integrate([](double x) { return std::exp(-x) * std::sin(3.0 * x); }, 0.0, 20.0);
  EXPECT_NEAR(r.value, (3.0 - std::exp(-20.0) * (std::sin(60.0) + 3.0 * std::cos(60.0))) / 10.0, 1e-12);
}

TEST(Quadrature, EndpointSingularity) {
  auto r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(Quadrature, InfiniteRange) {
  auto r = quad::integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, std::numbers::pi / 2.0, 1e-11);
}

TEST(Quadrature, OneMinusCosineWeight) {
  // integral_0^inf (1 - cos wt) / (1 + w^2) dw = (pi/2)(1 - e^{-t})
  for (double t : {0.1, 1.0, 7.0, 60.0}) {
    auto r = quad::fourier_one_minus_cos([](double w) { return 1.0 / (1.0 + w * w); }, t, 1.0);
    EXPECT_NEAR(r.value, std::numbers::pi / 2.0 * (1.0 - std::exp(-t)), 1e-9) << "t=" << t;
  }
}

TEST(Quadrature, SineWeight) {
  // integral_0^L w sin(wt) dw = (sin(Lt) - Lt cos(Lt)) / t^2
  const double L = 10.0;
  for (double t : {0.5, 2.0, 25.0}) {
    auto r = quad::fourier_sin([](double w) { return w; }, t, 1.0, L);
    EXPECT_NEAR(r.value, (std::sin(L * t) - L * t * std::cos(L * t)) / (t * t), 1e-10) << "t=" << t;
  }
}

TEST(Interpolation, ReproducesNodesAndStaysMonotone) {
  MonotoneCubic c({0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 0.0, 1.0, 1.0, 5.0});
  EXPECT_DOUBLE_EQ(c(2.0), 1.0);
  for (double x = 0.0; x <= 4.0; x += 0.01) {
    EXPECT_GE(c(x), -1e-15);
    if (x > 1.0 && x < 2.0) {
      EXPECT_LE(c(x), 1.0 + 1e-15);
    }
  }
  EXPECT_TRUE(c.contains(3.5));
  EXPECT_FALSE(c.contains(4.5));
}

TEST(Faddeeva, Origin) { EXPECT_EQ(faddeeva({0.0, 0.0}), cd(1.0, 0.0)); }

TEST(Faddeeva, ImaginaryAxisIsScaledErfc) {
  EXPECT_NEAR(faddeeva({0.0, 1.0}).real(), 0.427583576155807, 1e-15);
  for (double y : {0.1, 0.7, 2.5, 6.0, 20.0}) {
    const cd w = faddeeva({0.0, y});
    EXPECT_LT(rel(w.real(), std::exp(y * y) * std::erfc(y)), 1e-13) << y;
    EXPECT_EQ(w.imag(), 0.0);
  }
}

TEST(Faddeeva, HighPrecisionReferenceValues) {
  // Reference values to 17 digits from an arbitrary-precision evaluation of
  // exp(-z^2) erfc(-iz).
  struct Case {
    double x, y, re, im;
  };
  const Case cases[] = {
      {0.5, 0.5, 0.53315670791217491, 0.23048823138445841},
      {2.0, 0.1, 0.040201398161451289, 0.33158268733456308},
      {-3.0, 0.001, 0.00020197242455732031, -0.20115654204559758},
      {5.0, 5.0, 0.056965439888176979, 0.055838742775391028},
      {12.0, 0.5, 0.0019762436764948046, 0.04709755696226781},
      {0.3, 9.0, 0.062240608471617326, 0.0020498554978223059},
      {1.5, 0.0, 0.10539922456186434, 0.48322733014076906},
      {6.1, 2.2, 0.030446869385269063, 0.082361785240523602},
      {30.0, 1e-06, 6.2792502413109281e-10, 0.018816784868660707},
  };
  for (const auto& c : cases) {
    const cd w = faddeeva({c.x, c.y});
    EXPECT_LT(rel(w, cd(c.re, c.im)), 1e-13) << c.x << "+" << c.y << "i";
  }
}

TEST(Faddeeva, AgreesWithIntegralRepresentation) {
  for (double x : {-7.0, -2.5, -0.4, 0.0, 0.9, 3.3, 8.0})
    for (double y : {0.5, 1.0, 3.0, 9.0, 15.0})
      EXPECT_LT(rel(faddeeva({x, y}), faddeeva_by_trapezoid({x, y})), 1e-10) << x << "+" << y << "i";
}

TEST(Faddeeva, RealAxisRealPartIsGaussian) {
  for (double x : {-4.0, -1.0, 0.2, 2.0, 11.0}) EXPECT_DOUBLE_EQ(faddeeva({x, 0.0}).real(), std::exp(-x * x));
}

TEST(Faddeeva, ReflectionSymmetry) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> ux(-15.0, 15.0), uy(0.0, 12.0);
  for (int i = 0; i < 2000; ++i) {
    const cd z(ux(gen), uy(gen));
    const cd a = faddeeva(-std::conj(z));
    const cd b = std::conj(faddeeva(z));
    EXPECT_LT(std::abs(a - b), 1e-15 * std::abs(b) + 1e-300);
  }
}

TEST(Faddeeva, ContinuousAcrossRegionBoundaries) {
  // |z| = 1 (series / rational), |z| = 10 and y = 8 (rational / fraction).
  for (double phi = 0.05; phi < std::numbers::pi; phi += 0.3) {
    for (double r : {1.0, 10.0}) {
      const cd in = std::polar(r * (1.0 - 1e-12), phi), out = std::polar(r * (1.0 + 1e-12), phi);
      EXPECT_LT(rel(faddeeva(in), faddeeva(out)), 1e-11);
    }
  }
  EXPECT_LT(rel(faddeeva({3.0, 8.0 - 1e-12}), faddeeva({3.0, 8.0 + 1e-12})), 1e-11);
}

TEST(Faddeeva, LowerHalfPlaneRejected) { EXPECT_THROW(faddeeva({1.0, -0.1}), domain_error); }

TEST(Random, PhiloxKnownAnswers) {
  // Published known-answer vectors for Philox4x32-10.
  auto r = random::philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(r, (random::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  r = random::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(r, (random::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  r = random::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(r, (random::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Random, NormalMoments) {
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    for (double z : random::normal_pair(11, i)) {
      s1 += z;
      s2 += z * z;
      s4 += z * z * z * z;
    }
  }
  const double m = 2.0 * n;
  EXPECT_NEAR(s1 / m, 0.0, 5.0 / std::sqrt(m));
  EXPECT_NEAR(s2 / m, 1.0, 5.0 * std::sqrt(2.0 / m));
  EXPECT_NEAR(s4 / m, 3.0, 5.0 * std::sqrt(96.0 / m));
}

TEST(Random, StreamsDependOnSeedAndIndexOnly) {
  EXPECT_EQ(random::normal_pair(5, 123), random::normal_pair(5, 123));
  EXPECT_NE(random::normal_pair(5, 123), random::normal_pair(6, 123));
  EXPECT_NE(random::normal_pair(5, 123), random::normal_pair(5, 124));
}
