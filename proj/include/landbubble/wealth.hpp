#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "landbubble/economy.hpp"
#include "landbubble/errors.hpp"
#include "landbubble/numerics/hill.hpp"
#include "landbubble/numerics/quadrature.hpp"
#include "landbubble/numerics/root_finding.hpp"
#include "landbubble/open_economy.hpp"

namespace landbubble::wealth {

using open_economy::Regime;

inline constexpr double kDefaultSurvival = 0.975;

// Relative-wealth multiplicative process of a trend-stationary equilibrium
// with exponential productivity: s' = (1 + c g(z)) s with survival
// probability upsilon, reset to 1 otherwise, where c = 1 - beta R in the
// fundamental regime and 1 - beta in the bubbly one.
struct WealthProcessSpec {
  Regime regime = Regime::fundamental;
  double R = 1.0;
  double m = 0.92;
  double beta = 0.95;
  double lambda = 1.0;
  double upsilon = kDefaultSurvival;
  double pi_R = 0.0;   // risk premium at R
  double gamma = 2.302585092994046;  // exponential decay rate of Phi

  double blend_coef() const { return regime == Regime::fundamental ? 1.0 - beta * R : 1.0 - beta; }
  double jump_prob() const { return std::exp(-gamma * R / m); }

  void validate() const {
    if (!(R >= 1.0)) throw ParameterError("WealthProcessSpec: R must be >= 1");
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("WealthProcessSpec: beta in (0,1)");
    if (!(upsilon > 0.0 && upsilon < 1.0)) throw ParameterError("WealthProcessSpec: upsilon in (0,1)");
    if (!(m > 0.0) || !(gamma > 0.0)) throw ParameterError("WealthProcessSpec: m, gamma positive");
    if (!(pi_R > 0.0)) throw ParameterError("WealthProcessSpec: pi(R) must be positive");
    if (regime == Regime::fundamental && !(beta * R < 1.0))
      throw ParameterError("WealthProcessSpec: fundamental regime needs beta R < 1");
  }
};

inline WealthProcessSpec make_wealth_spec(const economy::EconomyParams& econ,
                                          const open_economy::TrendStationaryEquilibrium& eq) {
  auto exp_dist = std::dynamic_pointer_cast<const economy::ExponentialDistribution>(econ.dist);
  if (!exp_dist)
    throw ParameterError("make_wealth_spec: wealth layer requires the exponential distribution");
  WealthProcessSpec spec;
  spec.regime = eq.regime;
  spec.R = eq.R;
  spec.m = economy::asymptotic_mpk(econ.tech);
  spec.beta = econ.beta;
  spec.lambda = econ.lambda;
  spec.upsilon = econ.upsilon.value_or(kDefaultSurvival);
  spec.gamma = exp_dist->decay_rate();
  spec.pi_R = open_economy::risk_premium(econ, eq.R);
  spec.validate();
  return spec;
}

// g(z) = max{0, m z - R} / pi(R) - 1; mean zero under Phi by construction.
inline double growth_shock(const WealthProcessSpec& spec, double z) {
  if (!(spec.pi_R > 0.0)) throw DomainError("growth_shock: pi(R) must be positive");
  return std::max(0.0, spec.m * z - spec.R) / spec.pi_R - 1.0;
}

// Moment function rho(zeta) = upsilon E[(1 + c g(z))^zeta], evaluated with
// 15-point Gauss-Laguerre in log space:
//   rho/(upsilon beta^zeta) = R^zeta (1-p) + p int (R + (lambda m/gamma) x)^zeta e^{-x} dx   (G = 1)
//   rho/(upsilon beta^zeta) = (1-p) + p int (1 + (lambda m/(gamma R)) x)^zeta e^{-x} dx      (G > 1)
// with p = e^{-gamma R/m}.
inline double rho_of_zeta(const WealthProcessSpec& spec, double zeta) {
  if (!(zeta >= 0.0)) throw DomainError("rho_of_zeta: zeta must be >= 0");
  spec.validate();
  static const auto rule = numerics::gauss_laguerre(15);
  const double p = spec.jump_prob();
  const bool fundamental = spec.regime == Regime::fundamental;
  const double level = fundamental ? spec.R : 1.0;
  const double slope = fundamental ? spec.lambda * spec.m / spec.gamma
                                   : spec.lambda * spec.m / (spec.gamma * spec.R);

  // log-sum-exp over the atom at no-jump and the quadrature nodes
  double max_log = std::log1p(-p) + zeta * std::log(level);
  std::vector<double> logs;
  logs.reserve(rule.nodes.size() + 1);
  logs.push_back(max_log);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double li = std::log(p) + std::log(rule.weights[i]) +
                zeta * std::log(level + slope * rule.nodes[i]);
    logs.push_back(li);
    if (li > max_log) max_log = li;
  }
  double sum = 0.0;
  for (double li : logs) sum += std::exp(li - max_log);
  double log_rho = std::log(spec.upsilon) + zeta * std::log(spec.beta) + max_log + std::log(sum);
  if (log_rho > 700.0) return std::numeric_limits<double>::infinity();
  return std::exp(log_rho);
}

struct ParetoSolution {
  double zeta = 0.0;
  double residual = 0.0;
  Regime regime = Regime::fundamental;
  double R = 1.0;
  std::optional<double> mc_estimate;
  std::optional<std::pair<double, double>> mc_ci;
};

// Unique zeta > 1 with rho(zeta) = 1: rho(1) = upsilon < 1 and rho is convex
// and divergent, so double upward from 1 until rho > 1 and bisect.
inline ParetoSolution solve_pareto_exponent(const WealthProcessSpec& spec) {
  auto g = [&](double zeta) { return rho_of_zeta(spec, zeta) - 1.0; };
  double lo = 1.0;
  double f_lo = g(lo);
  if (!(f_lo < 0.0))
    throw DomainError("solve_pareto_exponent: rho(1) >= 1, check upsilon < 1");
  double hi = 2.0;
  double f_hi = g(hi);
  int doublings = 0;
  while (!(f_hi > 0.0)) {
    if (!std::isfinite(f_hi))
      throw NoRoot("solve_pareto_exponent: moments diverge before rho crosses 1");
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = g(hi);
    if (++doublings > 60) throw NoRoot("solve_pareto_exponent: rho never crosses 1");
  }
  double zeta = numerics::find_root(g, numerics::Bracket{lo, hi, f_lo, f_hi}, 1e-13);
  ParetoSolution sol;
  sol.zeta = zeta;
  sol.residual = std::abs(g(zeta));
  sol.regime = spec.regime;
  sol.R = spec.R;
  return sol;
}

// ---------------------------------------------------------------------------
// Monte Carlo panel with perpetual-youth resets.
// ---------------------------------------------------------------------------

// One-period wealth multiplier: base with probability 1 - jump_prob, and
// base + jump_coef * E with E ~ Exp(1) otherwise.
struct MultiplicativeShock {
  double base = 1.0;
  double jump_prob = 0.0;
  double jump_coef = 0.0;
};

inline MultiplicativeShock shock_model(const WealthProcessSpec& spec) {
  spec.validate();
  const double c = spec.blend_coef();
  const double p = spec.jump_prob();
  // 1 + c g(z) = (1 - c) + c X/pi with X | jump ~ (m/gamma) Exp(1) and
  // pi = (m/gamma) p, so the jump multiplier is (1 - c) + (c/p) E.
  return {1.0 - c, p, c / p};
}

struct PanelResult {
  std::vector<double> samples;  // terminal relative-wealth cross-section
  double hill = 0.0;            // Hill estimate from the top 1%
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1), strictly interior.
inline double uniform01(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

// Simulates N independent chains for T periods. Each chain derives its own
// RNG stream from (seed, chain index), so results do not depend on the
// thread schedule.
inline PanelResult simulate_panel(const MultiplicativeShock& shock, double upsilon,
                                  std::int64_t N, int T, std::uint64_t seed,
                                  double hill_top_fraction = 0.01) {
  if (N < 1 || T < 1) throw ParameterError("simulate_panel: N and T must be positive");
  if (!(upsilon > 0.0 && upsilon < 1.0))
    throw ParameterError("simulate_panel: upsilon must be in (0,1)");
  if (!(shock.jump_prob >= 0.0 && shock.jump_prob <= 1.0) || !(shock.base >= 0.0))
    throw ParameterError("simulate_panel: invalid shock model");

  PanelResult result;
  result.samples.assign(static_cast<std::size_t>(N), 1.0);

  auto run_block = [&](std::int64_t begin, std::int64_t end) {
    const double death_prob = 1.0 - upsilon;
    for (std::int64_t i = begin; i < end; ++i) {
      std::mt19937_64 eng(detail::splitmix64(seed ^ detail::splitmix64(static_cast<std::uint64_t>(i) + 1)));
      double s = 1.0;
      for (int t = 0; t < T; ++t) {
        if (detail::uniform01(eng) < death_prob) {
          s = 1.0;
          continue;
        }
        double u = detail::uniform01(eng);
        if (u < shock.jump_prob) {
          double e = -std::log(u / shock.jump_prob);  // Exp(1) given the jump
          s *= shock.base + shock.jump_coef * e;
        } else {
          s *= shock.base;
        }
      }
      result.samples[static_cast<std::size_t>(i)] = s;
    }
  };

  unsigned hw = std::thread::hardware_concurrency();
  std::int64_t n_threads = std::min<std::int64_t>(std::max(1u, hw), 16);
  n_threads = std::min(n_threads, N);
  if (n_threads <= 1) {
    run_block(0, N);
  } else {
    std::vector<std::thread> workers;
    std::int64_t chunk = (N + n_threads - 1) / n_threads;
    for (std::int64_t b = 0; b < n_threads; ++b) {
      std::int64_t begin = b * chunk;
      std::int64_t end = std::min(N, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back(run_block, begin, end);
    }
    for (auto& w : workers) w.join();
  }

  try {
    result.hill = numerics::hill_estimator(result.samples, hill_top_fraction);
  } catch (const DomainError&) {
    // Degenerate cross-sections (all equal) or tiny panels have no tail
    // estimate; the raw samples are still returned.
    result.hill = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

inline PanelResult simulate_wealth_panel(const WealthProcessSpec& spec, std::int64_t N, int T,
                                         std::uint64_t seed) {
  return simulate_panel(shock_model(spec), spec.upsilon, N, T, seed);
}

// Asymptotic 95% band for a Hill estimate from k tail observations.
inline std::pair<double, double> hill_confidence(double hill, std::int64_t tail_count) {
  double half = 1.96 * hill / std::sqrt(static_cast<double>(tail_count));
  return {hill - half, hill + half};
}

}  // namespace landbubble::wealth
