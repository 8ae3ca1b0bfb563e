#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <variant>

#include "landbubble/errors.hpp"
#include "landbubble/numerics/quadrature.hpp"
#include "landbubble/numerics/root_finding.hpp"

namespace landbubble::economy {

// ---------------------------------------------------------------------------
// Technologies. Depreciation is folded in: F(K, X) = f(K, X) + (1 - delta) K,
// and all quantities below are per unit of land (X = 1).
// ---------------------------------------------------------------------------

struct CesTechnology {
  double A = 1.0;      // TFP
  double alpha = 0.5;  // capital share
  double rho = 1.0;    // inverse elasticity of substitution; rho == 1 is Cobb-Douglas
  double delta = 0.08; // depreciation

  void validate() const {
    if (!(A > 0.0)) throw ParameterError("CES technology: A must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("CES technology: alpha must be in (0,1)");
    if (!(rho > 0.0)) throw ParameterError("CES technology: rho must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("CES technology: delta must be in (0,1)");
  }
};

struct TwoSectorLinearTechnology {
  double m = 0.92;  // capital return slope, F(K, X) = m K + D X
  double D = 1.0;   // constant land rent

  void validate() const {
    if (!(m > 0.0)) throw ParameterError("two-sector technology: m must be > 0");
    if (!(D > 0.0)) throw ParameterError("two-sector technology: D must be > 0");
  }
};

using Technology = std::variant<CesTechnology, TwoSectorLinearTechnology>;

inline void validate(const Technology& tech) {
  std::visit([](const auto& t) { t.validate(); }, tech);
}

struct ProductionPoint {
  double F;    // F(K, 1)
  double F_K;  // marginal product of capital, depreciation included
  double F_X;  // marginal product of land == land rent
  double rent() const { return F_X; }
};

// F(K,1), marginal products and rent at capital K. Satisfies the Euler
// identity F = K F_K + F_X by homogeneity.
inline ProductionPoint eval_production(const Technology& tech, double K) {
  if (!(K > 0.0) || !std::isfinite(K)) throw DomainError("eval_production: K must be positive");
  if (const auto* lin = std::get_if<TwoSectorLinearTechnology>(&tech)) {
    return {lin->m * K + lin->D, lin->m, lin->D};
  }
  const auto& c = std::get<CesTechnology>(tech);
  if (c.rho == 1.0) {
    double f = c.A * std::pow(K, c.alpha);
    return {f + (1.0 - c.delta) * K,
            c.alpha * f / K + (1.0 - c.delta),
            (1.0 - c.alpha) * f};
  }
  // inner = alpha K^{1-rho} + 1-alpha, f = A inner^{1/(1-rho)}
  double inner = c.alpha * std::pow(K, 1.0 - c.rho) + (1.0 - c.alpha);
  double f = c.A * std::exp(std::log(inner) / (1.0 - c.rho));
  double shell = c.A * std::exp(std::log(inner) * c.rho / (1.0 - c.rho));  // A inner^{rho/(1-rho)}
  return {f + (1.0 - c.delta) * K,
          c.alpha * shell * std::pow(K, -c.rho) + (1.0 - c.delta),
          (1.0 - c.alpha) * shell};
}

// Asymptotic marginal product of capital m = lim_{K->inf} F(K,1)/K.
inline double asymptotic_mpk(const Technology& tech) {
  if (const auto* lin = std::get_if<TwoSectorLinearTechnology>(&tech)) return lin->m;
  const auto& c = std::get<CesTechnology>(tech);
  if (c.rho >= 1.0) return 1.0 - c.delta;
  return c.A * std::pow(c.alpha, 1.0 / (1.0 - c.rho)) + 1.0 - c.delta;
}

// Elasticity of substitution between capital and land in F at (K, 1),
// sigma = -dlog(K/X) / dlog(F_K/F_X), by central differences in log K.
inline double elasticity_sigma(const Technology& tech, double K) {
  if (!(K > 0.0) || !std::isfinite(K)) throw DomainError("elasticity_sigma: K must be positive");
  const double h = 1e-5;
  auto log_ratio = [&](double u) {
    auto p = eval_production(tech, std::exp(u));
    return std::log(p.F_K / p.F_X);
  };
  double u = std::log(K);
  double dg = log_ratio(u + h) - log_ratio(u - h);
  if (std::abs(dg) < 1e-14) return std::numeric_limits<double>::infinity();
  return -2.0 * h / dg;
}

// K -> inf limit of the elasticity: 1/rho (rho < 1), 1/alpha (rho == 1),
// +inf otherwise (including the linear technology).
inline double sigma_limit(const Technology& tech) {
  if (std::holds_alternative<TwoSectorLinearTechnology>(tech))
    return std::numeric_limits<double>::infinity();
  const auto& c = std::get<CesTechnology>(tech);
  if (c.rho < 1.0) return 1.0 / c.rho;
  if (c.rho == 1.0) return 1.0 / c.alpha;
  return std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Productivity distributions on [0, inf). Only the exponential family ships
// closed forms; other absolutely continuous cdfs can subclass and rely on
// the quadrature/bisection fallbacks.
// ---------------------------------------------------------------------------

class ProductivityDistribution {
 public:
  virtual ~ProductivityDistribution() = default;

  virtual double cdf(double z) const = 0;
  virtual double pdf(double z) const = 0;
  virtual double mean() const = 0;
  virtual bool has_unbounded_support() const = 0;
  virtual bool is_absolutely_continuous() const { return true; }

  // int_zbar^inf z dPhi(z). Fallback: Gauss-Laguerre after rescaling by the
  // hazard rate at zbar; exact when the tail is exponential.
  virtual double partial_expectation(double zbar) const {
    if (!(zbar >= 0.0)) throw DomainError("partial_expectation: zbar must be >= 0");
    double surv = 1.0 - cdf(zbar);
    if (surv <= 0.0) return 0.0;
    double hazard = pdf(zbar) / surv;
    if (!(hazard > 0.0)) hazard = 1.0;
    auto rule = numerics::gauss_laguerre(32);
    return rule.integrate([&](double x) {
             double z = zbar + x / hazard;
             return z * pdf(z) * std::exp(x) / hazard;
           });
  }

  // Phi^{-1}(p). Fallback: bisection on the cdf.
  virtual double quantile(double p) const {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("quantile: p must be in [0,1)");
    if (p <= cdf(0.0)) return 0.0;
    auto g = [&](double z) { return cdf(z) - p; };
    auto bracket = numerics::try_bracket_upward(g, 0.0, std::max(1.0, 2.0 * mean()));
    if (!bracket) throw DomainError("quantile: failed to bracket");
    return numerics::find_root(g, *bracket, 1e-13);
  }
};

// Phi(z) = 1 - e^{-gamma z}.
class ExponentialDistribution final : public ProductivityDistribution {
 public:
  explicit ExponentialDistribution(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw ParameterError("ExponentialDistribution: gamma must be positive");
  }

  double decay_rate() const { return gamma_; }
  double cdf(double z) const override { return z <= 0.0 ? 0.0 : -std::expm1(-gamma_ * z); }
  double pdf(double z) const override { return z < 0.0 ? 0.0 : gamma_ * std::exp(-gamma_ * z); }
  double mean() const override { return 1.0 / gamma_; }
  bool has_unbounded_support() const override { return true; }

  // (zbar + 1/gamma) e^{-gamma zbar}
  double partial_expectation(double zbar) const override {
    if (!(zbar >= 0.0)) throw DomainError("partial_expectation: zbar must be >= 0");
    return (zbar + 1.0 / gamma_) * std::exp(-gamma_ * zbar);
  }

  double quantile(double p) const override {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("quantile: p must be in [0,1)");
    return -std::log1p(-p) / gamma_;
  }

 private:
  double gamma_;
};

using DistPtr = std::shared_ptr<const ProductivityDistribution>;

inline DistPtr exponential_dist(double gamma) {
  return std::make_shared<ExponentialDistribution>(gamma);
}

inline double partial_expectation(const ProductivityDistribution& dist, double zbar) {
  return dist.partial_expectation(zbar);
}

// ---------------------------------------------------------------------------
// Parameter bundle and assumption checks.
// ---------------------------------------------------------------------------

struct EconomyParams {
  double beta = 0.95;    // discount factor
  double lambda = 1.0;   // leverage limit
  Technology tech = CesTechnology{};
  DistPtr dist = exponential_dist(-std::log(0.1));
  std::optional<double> upsilon;  // survival probability (wealth module only)

  void validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("EconomyParams: beta must be in (0,1)");
    if (!(lambda >= 1.0)) throw ParameterError("EconomyParams: lambda must be >= 1");
    economy::validate(tech);
    if (!dist) throw ParameterError("EconomyParams: missing productivity distribution");
    if (upsilon && !(*upsilon > 0.0 && *upsilon <= 1.0))
      throw ParameterError("EconomyParams: upsilon must be in (0,1]");
  }
};

struct AssumptionReport {
  bool a1_ok = false;     // Phi absolutely continuous, unbounded support, finite mean
  bool a2_ok = false;     // production regularity and m > 0
  bool a3_ok = false;     // beta E[mZ | mZ >= 1] > 1
  bool a4_ok = false;     // asymptotic elasticity of substitution > 1
  double a3_value = 0.0;  // left side of the a3 inequality
  double sigma_limit = 0.0;
};

// Leverage threshold: lambda_bar = (1-beta)/beta / int_{1/m}^inf (m z - 1) dPhi(z).
// For the exponential distribution this equals ((1-beta)/beta)(gamma/m)e^{gamma/m}.
inline double leverage_threshold(const EconomyParams& econ) {
  econ.validate();
  const double m = asymptotic_mpk(econ.tech);
  const double zcut = 1.0 / m;
  double denom = m * econ.dist->partial_expectation(zcut) - (1.0 - econ.dist->cdf(zcut));
  if (!(denom > 0.0) || !std::isfinite(denom))
    throw DegenerateDistribution("leverage_threshold: excess-return integral is not positive");
  return (1.0 - econ.beta) / econ.beta / denom;
}

inline AssumptionReport check_assumptions(const EconomyParams& econ) {
  econ.validate();
  AssumptionReport report;
  const auto& dist = *econ.dist;
  report.a1_ok = dist.has_unbounded_support() && dist.is_absolutely_continuous() &&
                 std::isfinite(dist.mean());
  const double m = asymptotic_mpk(econ.tech);
  report.a2_ok = m > 0.0;
  const double zcut = 1.0 / m;
  double surv = 1.0 - dist.cdf(zcut);
  report.a3_value = surv > 0.0
                        ? econ.beta * m * dist.partial_expectation(zcut) / surv
                        : 0.0;
  report.a3_ok = report.a3_value > 1.0;
  report.sigma_limit = economy::sigma_limit(econ.tech);
  report.a4_ok = report.sigma_limit > 1.0;
  return report;
}

}  // namespace landbubble::economy
