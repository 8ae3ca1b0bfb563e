#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "landbubble/errors.hpp"

namespace landbubble::numerics {

// Hill tail-index estimate from the top ceil(top_fraction * N) order
// statistics: zeta_hat = k / sum_{i<=k} log(X_(i) / X_(k+1)).
// Scale-invariant: multiplying all samples by c > 0 leaves it unchanged.
inline double hill_estimator(const std::vector<double>& samples, double top_fraction = 0.01) {
  if (samples.empty()) throw ParameterError("hill_estimator: empty sample");
  if (!(top_fraction > 0.0) || top_fraction > 0.5)
    throw ParameterError("hill_estimator: top_fraction must be in (0, 0.5]");
  for (double s : samples)
    if (!(s > 0.0)) throw DomainError("hill_estimator: samples must be positive");

  const std::size_t n = samples.size();
  const std::size_t k = static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(n)));
  if (k < 10) throw TooFewSamples("hill_estimator: top count below 10");
  if (k + 1 > n) throw TooFewSamples("hill_estimator: not enough samples beyond the tail cut");

  std::vector<double> top(samples);
  std::nth_element(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k), top.end(),
                   std::greater<double>());
  const double threshold = top[k];  // X_(k+1), the (k+1)-th largest
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(top[i] / threshold);
  if (!(sum > 0.0))
    throw DegenerateSample("hill_estimator: zero log-spacings (degenerate tail)");
  return static_cast<double>(k) / sum;
}

}  // namespace landbubble::numerics
