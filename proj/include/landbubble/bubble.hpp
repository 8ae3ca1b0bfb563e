#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "landbubble/errors.hpp"

namespace landbubble::bubble {

// Arrow-Debreu deflators q_0 = 1, q_{t+1} = q_t / R_t.
struct DeflatorSeries {
  std::vector<double> q;
};

inline DeflatorSeries deflators(const std::vector<double>& rates) {
  DeflatorSeries out;
  out.q.reserve(rates.size() + 1);
  out.q.push_back(1.0);
  for (double r : rates) {
    if (!(r > 0.0) || !std::isfinite(r))
      throw DomainError("deflators: gross rates must be positive");
    out.q.push_back(out.q.back() / r);
  }
  return out;
}

enum class TailMode { truncate, geometric_extrapolate };

// Present value of rents beyond time t: V_t = (1/q_t) sum_{s>=1} q_{t+s} r_{t+s}.
// The infinite tail is either dropped (lower bound) or extrapolated assuming
// the terminal geometric growth of rents against the terminal rate, both
// estimated from the last 10 observations.
inline double fundamental_value(const std::vector<double>& rents, const std::vector<double>& rates,
                                int t, TailMode tail_mode = TailMode::geometric_extrapolate) {
  const std::size_t S = rents.size();
  if (rates.size() + 1 < S)
    throw ParameterError("fundamental_value: need rates for every period but the last");
  if (t < 0 || static_cast<std::size_t>(t) + 1 >= S)
    throw SeriesTooShort("fundamental_value: no observations beyond t");
  const std::size_t available = S - 1 - static_cast<std::size_t>(t);
  const int window = 10;
  if (tail_mode == TailMode::geometric_extrapolate && available < window + 1)
    throw SeriesTooShort("fundamental_value: extrapolation needs 11 observations beyond t");

  DeflatorSeries defl = deflators(std::vector<double>(rates.begin(), rates.begin() + S - 1));
  const double qt = defl.q[static_cast<std::size_t>(t)];
  double value = 0.0;
  for (std::size_t s = static_cast<std::size_t>(t) + 1; s < S; ++s)
    value += defl.q[s] * rents[s];
  value /= qt;
  if (tail_mode == TailMode::truncate) return value;

  // Terminal geometric growth of rents and terminal rate (log averages).
  double growth = std::pow(rents[S - 1] / rents[S - 1 - window], 1.0 / window);
  double log_rate = 0.0;
  for (std::size_t s = S - 1 - window; s < S - 1; ++s) log_rate += std::log(rates[s]);
  double rate = std::exp(log_rate / window);
  if (!(growth < rate))
    throw TailNotSummable("fundamental_value: terminal rent growth >= terminal rate");
  double ratio = growth / rate;
  double tail = (defl.q[S - 1] / qt) * rents[S - 1] * ratio / (1.0 - ratio);
  return value + tail;
}

enum class Classification { fundamental, bubbly, inconclusive };

inline std::string to_string(Classification c) {
  switch (c) {
    case Classification::fundamental: return "fundamental";
    case Classification::bubbly: return "bubbly";
    default: return "inconclusive";
  }
}

struct BubbleVerdict {
  Classification classification = Classification::inconclusive;
  std::vector<double> partial_sums;  // cumulative sums of rent/price from t = 1
  double fitted_ratio = 0.0;         // geometric ratio of successive rent/price terms
  double tvc_estimate = 0.0;         // lim q_T P_T proxy: P_0 / prod(1 + d_t)
  bool degenerate = false;           // all rents zero
  double margin = 0.0;
};

struct MontrucchioOptions {
  double margin = 0.02;  // finite-sample classification band around ratio 1
  double floor = 1e-8;   // "bounded away from zero" cutoff for rent/price terms
};

// Classifies a price/rent series by the convergence of sum rent_t / price_t:
// the series is bubbly iff the sum converges. A geometric ratio is fitted to
// log(rent/price) over the final half; ratio < 1 - margin reads as a
// convergent (bubbly) tail, ratio within the margin with terms bounded away
// from zero reads as fundamental, anything else is inconclusive.
inline BubbleVerdict montrucchio_test(const std::vector<double>& rents,
                                      const std::vector<double>& prices,
                                      MontrucchioOptions options = {}) {
  if (rents.size() != prices.size())
    throw ParameterError("montrucchio_test: rents/prices size mismatch");
  if (rents.size() < 20) throw SeriesTooShort("montrucchio_test: need at least 20 periods");
  for (double p : prices)
    if (!(p > 0.0)) throw DomainError("montrucchio_test: prices must be positive");
  for (double r : rents)
    if (r < 0.0) throw DomainError("montrucchio_test: rents must be nonnegative");

  BubbleVerdict verdict;
  verdict.margin = options.margin;
  const std::size_t S = rents.size();
  std::vector<double> terms(S - 1);
  double running = 0.0;
  verdict.partial_sums.reserve(S - 1);
  for (std::size_t t = 1; t < S; ++t) {
    terms[t - 1] = rents[t] / prices[t];
    running += terms[t - 1];
    verdict.partial_sums.push_back(running);
  }
  verdict.tvc_estimate = prices[0];
  for (double d : terms) verdict.tvc_estimate /= 1.0 + d;

  if (running == 0.0) {
    // Zero dividends: the sum trivially converges.
    verdict.degenerate = true;
    verdict.classification = Classification::bubbly;
    verdict.fitted_ratio = 0.0;
    return verdict;
  }

  // Least-squares fit of log(term) ~ a + t log(ratio) over the final half.
  const std::size_t lo = (S - 1) / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  double min_term = std::numeric_limits<double>::infinity();
  for (std::size_t i = lo; i < terms.size(); ++i) {
    if (!(terms[i] > 0.0)) continue;
    double x = static_cast<double>(i + 1);
    double y = std::log(terms[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
    min_term = std::min(min_term, terms[i]);
  }
  if (n < 5) {
    verdict.degenerate = true;
    verdict.classification = Classification::bubbly;  // final half essentially zero
    verdict.fitted_ratio = 0.0;
    return verdict;
  }
  double slope = (static_cast<double>(n) * sxy - sx * sy) / (static_cast<double>(n) * sxx - sx * sx);
  verdict.fitted_ratio = std::exp(slope);

  if (verdict.fitted_ratio < 1.0 - options.margin) {
    verdict.classification = Classification::bubbly;
  } else if (std::abs(verdict.fitted_ratio - 1.0) <= options.margin && min_term > options.floor) {
    verdict.classification = Classification::fundamental;
  } else {
    verdict.classification = Classification::inconclusive;
  }
  return verdict;
}

}  // namespace landbubble::bubble
