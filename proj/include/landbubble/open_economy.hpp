#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "landbubble/economy.hpp"
#include "landbubble/errors.hpp"
#include "landbubble/numerics/root_finding.hpp"

namespace landbubble::open_economy {

using economy::EconomyParams;

enum class Regime { fundamental, bubbly };

inline std::string to_string(Regime r) {
  return r == Regime::fundamental ? "fundamental" : "bubbly";
}

// Risk premium on unlevered capital investment,
// pi(R) = int max{0, m z - R} dPhi(z) = m PE(R/m) - R (1 - Phi(R/m)).
// For the exponential distribution this reduces to (m/gamma) e^{-gamma R/m}.
inline double risk_premium(const EconomyParams& econ, double R) {
  if (!(R > 0.0)) throw DomainError("risk_premium: R must be positive");
  const double m = economy::asymptotic_mpk(econ.tech);
  const double zcut = R / m;
  double value = m * econ.dist->partial_expectation(zcut) - R * (1.0 - econ.dist->cdf(zcut));
  return std::max(value, 0.0);
}

// The Lemma psi functions whose level 1/lambda pins the trend-stationary
// interest rate: psi_f(R) = beta pi(R) / (1 - beta R) on [1, 1/beta),
// psi_b(R) = (beta/(1-beta)) pi(R)/R on [1, inf). Both equal 1/lambda_bar
// at R = 1.
inline double psi(const EconomyParams& econ, double R, Regime regime) {
  if (regime == Regime::fundamental) {
    if (!(R >= 1.0 && R < 1.0 / econ.beta))
      throw DomainError("psi: fundamental branch needs R in [1, 1/beta)");
    return econ.beta * risk_premium(econ, R) / (1.0 - econ.beta * R);
  }
  if (!(R >= 1.0)) throw DomainError("psi: bubbly branch needs R >= 1");
  return econ.beta / (1.0 - econ.beta) * risk_premium(econ, R) / R;
}

struct TrendStationaryEquilibrium {
  Regime regime = Regime::fundamental;
  double R = 1.0;           // gross risk-free rate
  double G = 1.0;           // gross growth rate (R in the bubbly regime)
  double zbar = 0.0;        // investment threshold R/m
  double alpha_coef = 0.0;  // beta (lambda Phi(zbar) + 1 - lambda)
  double B = 0.0;           // constant external savings
  double bubble_coef = 0.0;       // P_t = bubble_coef R^t + fundamental_level
  double fundamental_level = 0.0; // D / (R - 1)
  double residual = 0.0;          // defining-equation residual
  double K0 = 0.0;
  double D = 0.0;

  double price(int t) const { return bubble_coef * std::pow(R, t) + fundamental_level; }
  double fundamental_value() const { return fundamental_level; }
};

struct TrendOptions {
  double threshold_tol = 1e-8;  // |lambda - lambda_bar| knife-edge exclusion
};

// The unique trend-stationary equilibrium of the two-sector large open
// economy: fundamental (R solves beta(R + lambda pi(R)) = 1, G = 1) when
// lambda < lambda_bar, bubbly (the same expression equals R = G > 1) when
// lambda > lambda_bar.
inline TrendStationaryEquilibrium solve_trend_stationary(const EconomyParams& econ, double K0,
                                                         double D,
                                                         const TrendOptions& options = {}) {
  if (!(K0 > 0.0)) throw DomainError("solve_trend_stationary: K0 must be positive");
  if (!(D > 0.0)) throw DomainError("solve_trend_stationary: D must be positive");
  auto report = economy::check_assumptions(econ);
  if (!report.a1_ok)
    throw AssumptionViolation("solve_trend_stationary: productivity distribution violates Assumption 1");
  if (!report.a3_ok)
    throw AssumptionViolation("solve_trend_stationary: beta E[mZ | mZ >= 1] <= 1");

  const double lam_bar = economy::leverage_threshold(econ);
  if (std::abs(econ.lambda - lam_bar) < options.threshold_tol)
    throw AtThreshold("solve_trend_stationary: lambda at the leverage threshold (knife edge)");

  const double m = economy::asymptotic_mpk(econ.tech);
  const double target = 1.0 / econ.lambda;
  TrendStationaryEquilibrium eq;
  eq.K0 = K0;
  eq.D = D;

  if (econ.lambda < lam_bar) {
    eq.regime = Regime::fundamental;
    auto g = [&](double R) { return psi(econ, R, Regime::fundamental) - target; };
    double hi = 1.0 / econ.beta - 1e-9;
    eq.R = numerics::find_root(g, numerics::make_bracket(g, 1.0, hi), 1e-13);
    // Newton polish on the defining equation beta (R + lambda pi(R)) = 1;
    // pi'(R) = -(1 - Phi(R/m)).
    for (int i = 0; i < 3; ++i) {
      double h = econ.beta * (eq.R + econ.lambda * risk_premium(econ, eq.R)) - 1.0;
      double hp = econ.beta * (1.0 - econ.lambda * (1.0 - econ.dist->cdf(eq.R / m)));
      if (hp != 0.0) eq.R -= h / hp;
    }
    eq.G = 1.0;
    eq.B = 0.0;
    eq.residual = std::abs(econ.beta * (eq.R + econ.lambda * risk_premium(econ, eq.R)) - 1.0);
    eq.bubble_coef = 0.0;
  } else {
    eq.regime = Regime::bubbly;
    auto g = [&](double R) { return psi(econ, R, Regime::bubbly) - target; };
    auto bracket = numerics::try_bracket_upward([&](double R) { return target - psi(econ, R, Regime::bubbly); },
                                                1.0, 2.0);
    if (!bracket) throw NoConvergence("solve_trend_stationary: failed to bracket the bubbly rate");
    eq.R = numerics::find_root(g, numerics::make_bracket(g, bracket->lo, bracket->hi), 1e-13);
    for (int i = 0; i < 3; ++i) {
      double h = econ.beta * (eq.R + econ.lambda * risk_premium(econ, eq.R)) - eq.R;
      double hp = econ.beta * (1.0 - econ.lambda * (1.0 - econ.dist->cdf(eq.R / m))) - 1.0;
      if (hp != 0.0) eq.R -= h / hp;
    }
    eq.G = eq.R;
    eq.residual = std::abs(econ.beta * (eq.R + econ.lambda * risk_premium(econ, eq.R)) - eq.R);
  }

  eq.zbar = eq.R / m;
  eq.alpha_coef = econ.beta * (econ.lambda * econ.dist->cdf(eq.zbar) + 1.0 - econ.lambda);
  eq.fundamental_level = D / (eq.R - 1.0);
  if (eq.regime == Regime::bubbly) {
    eq.B = -D / (eq.R - 1.0);
    eq.bubble_coef = eq.alpha_coef / (1.0 - eq.alpha_coef) * m * K0;
  }
  return eq;
}

struct RatePoint {
  double lambda;
  double R;
  double G;
  Regime regime;
};

// Equilibrium rate across a leverage grid (the V-shaped R(lambda) curve).
inline std::vector<RatePoint> rate_curve(const EconomyParams& tmpl,
                                         const std::vector<double>& lambda_grid, double K0,
                                         double D) {
  std::vector<RatePoint> out;
  out.reserve(lambda_grid.size());
  for (double lam : lambda_grid) {
    if (!(lam >= 1.0)) throw DomainError("rate_curve: grid values must be >= 1");
    EconomyParams econ = tmpl;
    econ.lambda = lam;
    auto eq = solve_trend_stationary(econ, K0, D);
    out.push_back({lam, eq.R, eq.G, eq.regime});
  }
  return out;
}

}  // namespace landbubble::open_economy
