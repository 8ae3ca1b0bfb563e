#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "landbubble/errors.hpp"

namespace landbubble::numerics {

// Natural cubic spline through (knot_times, knot_values) on [0, horizon],
// used to parameterize discrete time paths by a handful of knots.
// Evaluation at a knot reproduces the knot value exactly.
class SplinePath {
 public:
  SplinePath(std::vector<int> knot_times, std::vector<double> knot_values, int horizon)
      : times_(std::move(knot_times)), values_(std::move(knot_values)), horizon_(horizon) {
    const std::size_t n = times_.size();
    if (n < 2) throw ParameterError("SplinePath: need at least two knots");
    if (values_.size() != n) throw ParameterError("SplinePath: times/values size mismatch");
    if (times_.front() != 0 || times_.back() != horizon)
      throw ParameterError("SplinePath: knots must start at 0 and end at horizon");
    for (std::size_t i = 1; i < n; ++i)
      if (times_[i] <= times_[i - 1])
        throw ParameterError("SplinePath: knot times must be strictly increasing");
    compute_second_derivatives();
  }

  int horizon() const { return horizon_; }
  const std::vector<int>& knot_times() const { return times_; }
  const std::vector<double>& knot_values() const { return values_; }

  double operator()(double t) const {
    const std::size_t n = times_.size();
    if (t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    std::size_t j = 1;
    while (j < n - 1 && t > times_[j]) ++j;
    double h = static_cast<double>(times_[j] - times_[j - 1]);
    double a = (times_[j] - t) / h;
    double b = (t - times_[j - 1]) / h;
    return a * values_[j - 1] + b * values_[j] +
           ((a * a * a - a) * m2_[j - 1] + (b * b * b - b) * m2_[j]) * h * h / 6.0;
  }

  // Values at every integer t in 0..horizon.
  std::vector<double> sample() const {
    std::vector<double> out(static_cast<std::size_t>(horizon_) + 1);
    for (int t = 0; t <= horizon_; ++t) out[static_cast<std::size_t>(t)] = (*this)(t);
    return out;
  }

 private:
  void compute_second_derivatives() {
    const std::size_t n = times_.size();
    m2_.assign(n, 0.0);
    if (n == 2) return;  // linear
    // Thomas algorithm for the natural-spline tridiagonal system.
    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double h0 = static_cast<double>(times_[i] - times_[i - 1]);
      double h1 = static_cast<double>(times_[i + 1] - times_[i]);
      sub[i] = h0;
      diag[i] = 2.0 * (h0 + h1);
      sup[i] = h1;
      rhs[i] = 6.0 * ((values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m2_[i] = (rhs[i] - sup[i] * (i + 2 < n ? m2_[i + 1] : 0.0)) / diag[i];
      if (i == 1) break;
    }
  }

  std::vector<int> times_;
  std::vector<double> values_;
  int horizon_;
  std::vector<double> m2_;  // second derivatives at knots (natural: ends are 0)
};

}  // namespace landbubble::numerics
