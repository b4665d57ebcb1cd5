#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mrt/oracle.hpp"

using namespace mrt;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

oracle::McConfig mc(std::uint64_t n, std::uint64_t seed, double eps = 0.0) {
  oracle::McConfig c;
  c.sample_count = n;
  c.seed = seed;
  c.W = 1.0;
  c.delta = 0.01;
  c.eps = eps;
  c.probe_time = 10.0;
  return c;
}
}  // namespace

TEST(PairwiseSum, ExactForSmallIntegers) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(oracle::pairwise_sum(v), 499500.0);
  EXPECT_EQ(oracle::pairwise_sum(std::span<const double>{}), 0.0);
}

TEST(MonteCarlo, NoTunnelingNoTransitions) {
  auto c = mc(1000, 1);
  c.delta = 0.0;
  const auto e = oracle::static_noise_transition(c);
  EXPECT_EQ(e.rate, 0.0);
  EXPECT_EQ(e.mean_probability_rate, 0.0);
}

TEST(MonteCarlo, RecoversGaussianRate) {
  const auto e = oracle::static_noise_transition(mc(100000, 2024));
  const double gp = peak_rate(0.01, 1.0);
  EXPECT_LT(std::abs(e.rate - gp), 3.0 * e.standard_error);
  EXPECT_LT(rel(e.rate, gp), 0.05);
}

TEST(MonteCarlo, OffResonanceSuppression) {
  const auto e = oracle::static_noise_transition(mc(400000, 99, 2.0));
  const double gp = peak_rate(0.01, 1.0);
  EXPECT_LT(rel(e.rate / gp, std::exp(-2.0)), 0.1);
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  auto c = mc(20000, 7);
  const auto a = oracle::static_noise_transition(c);
  c.threads = 4;
  const auto b = oracle::static_noise_transition(c);
  c.threads = 3;
  const auto d = oracle::static_noise_transition(c);
  EXPECT_EQ(a.rate, b.rate);
  EXPECT_EQ(a.standard_error, b.standard_error);
  EXPECT_EQ(a.mean_probability_rate, d.mean_probability_rate);
  const auto other = oracle::static_noise_transition(mc(20000, 8));
  EXPECT_NE(a.rate, other.rate);
}

TEST(MonteCarlo, ErrorScalesAsInverseRootN) {
  const double s1 = oracle::static_noise_transition(mc(10000, 5)).standard_error;
  const double s4 = oracle::static_noise_transition(mc(40000, 5)).standard_error;
  const double s16 = oracle::static_noise_transition(mc(160000, 5)).standard_error;
  EXPECT_NEAR(s1 / s4, 2.0, 0.4);
  EXPECT_NEAR(s4 / s16, 2.0, 0.4);
}

TEST(MonteCarlo, RejectsBadConfig) {
  auto c = mc(100, 1);
  c.sample_count = 0;
  EXPECT_THROW(oracle::static_noise_transition(c), config_error);
  c = mc(100, 1);
  c.probe_time = 1.0;  // below 5/W
  EXPECT_THROW(oracle::static_noise_transition(c), config_error);
  c.probe_time = 100.0;  // above 0.2/Delta
  EXPECT_THROW(oracle::static_noise_transition(c), config_error);
  c = mc(100, 1);
  c.threads = 0;
  EXPECT_THROW(oracle::static_noise_transition(c), config_error);
}

TEST(Convolution, NarrowLorentzianIsGaussian) {
  for (double e : {-1.0, 0.5, 2.0})
    EXPECT_LT(rel(oracle::convolution_rate(0.1, 1.0, e, 0.5, 1e-9),
                  gaussian_rate(0.1, e, 1.0, 0.5, Direction::minus)),
              1e-6);
}

TEST(Convolution, ReferenceCurveMatchesVoigt) {
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(-6.0 + 12.0 * i / 49.0);
  const auto c = oracle::convolution_reference(0.1, 1.0, grid, 1.0, 0.3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LT(rel(c.gamma_minus[i], voigt_rate(0.1, 1.0, grid[i], 1.0, 0.3, Direction::minus)), 1e-8);
    EXPECT_LT(rel(c.gamma_plus[i], voigt_rate(0.1, 1.0, grid[i], 1.0, 0.3, Direction::plus)), 1e-8);
  }
  EXPECT_THROW(oracle::convolution_rate(0.1, 1.0, 0.0, 0.0, 0.0), domain_error);
}

TEST(RefinedReference, RungeKuttaConstantRates) {
  const TimeGrid g{0.0, 10.0, 20};
  const auto tr = oracle::refined_reference(dynamics::constant_rate(0.4), dynamics::constant_rate(0.1), 0.0, g);
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(tr.rho11[i], 0.8 * (1.0 - std::exp(-0.5 * tr.t[i])), 1e-9);
}

TEST(RefinedReference, VolterraRefinementReducesError) {
  const TimeGrid g{0.0, 20.0, 100};
  const auto k = KernelSpec::constant(0.3, 0.2);
  const auto coarse = dynamics::evolve_volterra(k, 0.0, g);
  const auto fine = oracle::refined_reference(k, 0.0, g);
  Trajectory exact;
  for (std::size_t i = 0; i < g.size(); ++i) exact.push(g[i], 0.6 * (1.0 - std::exp(-0.5 * g[i])));
  const double ec = oracle::sup_distance(coarse, exact), ef = oracle::sup_distance(fine, exact);
  // Second order: 16x finer step, ~256x smaller error.
  EXPECT_GT(ec / ef, 150.0);
  EXPECT_LT(ec / ef, 400.0);
}
