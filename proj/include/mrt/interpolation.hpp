#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mrt {

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes with
// the Fritsch-Butland harmonic mean). Between two nonnegative samples the
// curve stays nonnegative, so an interpolated spectrum never dips below zero.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size()) throw std::invalid_argument("MonotoneCubic: size mismatch");
    if (x_.size() < 2) throw std::invalid_argument("MonotoneCubic: need at least two points");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("MonotoneCubic: abscissae must increase");

    const std::size_t n = x_.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    slope_.assign(n, 0.0);
    if (n == 2) {
      slope_[0] = slope_[1] = delta[0];
      return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  const std::vector<double>& abscissae() const { return x_; }
  const std::vector<double>& ordinates() const { return y_; }

  bool contains(double x) const { return x >= x_.front() && x <= x_.back(); }

  // Caller guarantees contains(x).
  double operator()(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i >= x_.size() - 1) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
  }

 private:
  // Three-point end formula, limited to keep the end interval monotone.
  static double end_slope(double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3.0 * d0)) return 3.0 * d0;
    return d;
  }

  std::vector<double> x_, y_, slope_;
};

}  // namespace mrt
