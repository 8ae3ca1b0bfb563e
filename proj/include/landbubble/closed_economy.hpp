#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "landbubble/economy.hpp"
#include "landbubble/errors.hpp"
#include "landbubble/numerics/nelder_mead.hpp"
#include "landbubble/numerics/root_finding.hpp"
#include "landbubble/numerics/spline.hpp"

namespace landbubble::closed_economy {

using economy::EconomyParams;

struct StateVars {
  double K;     // aggregate capital
  double zbar;  // productivity threshold for investing
};

namespace detail {

// Savings-share coefficient b(zbar) = beta (lambda Phi(zbar) + 1 - lambda).
// The state is valid iff b > 0, i.e. zbar > Phi^{-1}(1 - 1/lambda).
inline double savings_coef(const EconomyParams& econ, double zbar) {
  return econ.beta * (econ.lambda * econ.dist->cdf(zbar) + 1.0 - econ.lambda);
}

inline double zbar_lower_bound(const EconomyParams& econ) {
  return econ.dist->quantile(1.0 - 1.0 / econ.lambda);
}

}  // namespace detail

struct WealthPrice {
  double W;
  double P;
};

// Aggregate wealth and land price as functions of the state:
// W = F(K,1) / (1 - b), P = b/(1-b) F(K,1).
inline WealthPrice wealth_price_maps(const EconomyParams& econ, StateVars s) {
  if (!(s.K > 0.0)) throw DomainError("wealth_price_maps: K must be positive");
  double b = detail::savings_coef(econ, s.zbar);
  if (!(b > 0.0))
    throw DomainError("wealth_price_maps: zbar at or below Phi^{-1}(1 - 1/lambda), price not positive");
  if (!(b < 1.0)) throw DomainError("wealth_price_maps: savings coefficient denominator not positive");
  double F = economy::eval_production(econ.tech, s.K).F;
  return {F / (1.0 - b), b / (1.0 - b) * F};
}

// Next-period aggregate capital K' = beta lambda W(K, zbar) int_zbar^inf z dPhi.
inline double step_capital(const EconomyParams& econ, StateVars s) {
  auto wp = wealth_price_maps(econ, s);
  return econ.beta * econ.lambda * wp.W * econ.dist->partial_expectation(s.zbar);
}

// The threshold consistent with next-period prices: the fixed-point residual
// builder for the transition solver.
inline double implied_threshold(const EconomyParams& econ, StateVars s_t, StateVars s_next) {
  auto wp_t = wealth_price_maps(econ, s_t);
  auto wp_next = wealth_price_maps(econ, s_next);
  auto prod_next = economy::eval_production(econ.tech, s_next.K);
  double denom = prod_next.F_K * wp_t.P;
  if (!(denom > 0.0)) throw DomainError("implied_threshold: nonpositive denominator");
  return (wp_next.P + prod_next.F_X) / denom;
}

// ---------------------------------------------------------------------------
// Long-run growth rate: the root of Psi(v, lambda) with G = m v.
// ---------------------------------------------------------------------------

struct GrowthSolution {
  double G;         // gross long-run growth rate
  double v;         // G / m, the asymptotic productivity threshold
  double lambda;
  double residual;  // |Psi(v, lambda)| at the root
  bool expanding;   // G > 1, i.e. lambda > lambda_bar
};

inline double growth_psi(const EconomyParams& econ, double v) {
  return v * (1.0 - detail::savings_coef(econ, v)) -
         econ.beta * econ.lambda * econ.dist->partial_expectation(v);
}

inline GrowthSolution solve_growth_rate(const EconomyParams& econ) {
  auto report = economy::check_assumptions(econ);
  if (!report.a3_ok)
    throw AssumptionViolation("solve_growth_rate: beta E[mZ | mZ >= 1] <= 1");
  auto psi = [&](double v) { return growth_psi(econ, v); };
  // Psi(0,.) < 0 and dPsi/dv >= 1 - beta > 0, so double upward until positive.
  auto bracket = numerics::try_bracket_upward(psi, 1e-12, 1.0);
  if (!bracket) throw NoConvergence("solve_growth_rate: failed to bracket the Psi root");
  double v = numerics::find_root(psi, *bracket, 1e-14);
  double m = economy::asymptotic_mpk(econ.tech);
  GrowthSolution sol;
  sol.v = v;
  sol.G = m * v;
  sol.lambda = econ.lambda;
  sol.residual = std::abs(psi(v));
  sol.expanding = sol.G > 1.0;
  return sol;
}

// Local eigenvalues of the linearized dynamics around the balanced-growth
// path: (1/G, 1 + b(1-b) / (beta lambda zbar phi(zbar))) with zbar = G/m.
inline std::pair<double, double> saddle_eigenvalues(const EconomyParams& econ,
                                                    const GrowthSolution& g) {
  if (!(g.G > 1.0)) throw DomainError("saddle_eigenvalues: requires G > 1");
  double zbar = g.v;
  double b = detail::savings_coef(econ, zbar);
  if (!(b > 0.0 && b < 1.0)) throw DomainError("saddle_eigenvalues: b outside (0,1)");
  double dens = econ.dist->pdf(zbar);
  if (!(dens > 0.0)) throw DomainError("saddle_eigenvalues: zero density at zbar");
  return {1.0 / g.G, 1.0 + b * (1.0 - b) / (econ.beta * econ.lambda * zbar * dens)};
}

// ---------------------------------------------------------------------------
// Steady state (lambda < lambda_bar): the two-step procedure of first solving
// the capital equation K = C(zbar) F(K,1) in closed form, then the threshold
// equation by a bracket scan.
// ---------------------------------------------------------------------------

struct SteadyState {
  double K = 0.0;
  double zbar = 0.0;
  double W = 0.0;
  double P = 0.0;
  double R = 0.0;
  double residual_K = 0.0;
  double residual_z = 0.0;
  std::vector<double> zbar_candidates;  // all roots found by the bracket scan
};

namespace detail {

inline double capital_coef(const EconomyParams& econ, double zbar) {
  return econ.beta * econ.lambda * econ.dist->partial_expectation(zbar) /
         (1.0 - savings_coef(econ, zbar));
}

// Steady-state capital K(zbar) solving K = C F(K,1); +inf when no finite
// solution exists.
inline double steady_capital(const EconomyParams& econ, double zbar) {
  double C = capital_coef(econ, zbar);
  if (!(C > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  if (const auto* lin = std::get_if<economy::TwoSectorLinearTechnology>(&econ.tech)) {
    if (C * lin->m >= 1.0) return std::numeric_limits<double>::infinity();
    return C * lin->D / (1.0 - C * lin->m);
  }
  const auto& c = std::get<economy::CesTechnology>(econ.tech);
  if (C * (1.0 - c.delta) >= 1.0) return std::numeric_limits<double>::infinity();
  double x = (1.0 - C * (1.0 - c.delta)) / (C * c.A);
  if (c.rho == 1.0) return std::pow(x, 1.0 / (c.alpha - 1.0));
  double base = (std::pow(x, 1.0 - c.rho) - c.alpha) / (1.0 - c.alpha);
  if (!(base > 0.0)) return std::numeric_limits<double>::infinity();
  return std::pow(base, 1.0 / (c.rho - 1.0));
}

// Residual of the steady-state threshold equation at (zbar, K(zbar)).
inline double steady_threshold_residual(const EconomyParams& econ, double zbar) {
  double K = steady_capital(econ, zbar);
  if (!std::isfinite(K) || !(K > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  double b = savings_coef(econ, zbar);
  if (!(b > 0.0 && b < 1.0)) return std::numeric_limits<double>::quiet_NaN();
  auto prod = economy::eval_production(econ.tech, K);
  double rhs = (1.0 / prod.F_K) * (1.0 + (1.0 - b) / b * prod.F_X / prod.F);
  return zbar - rhs;
}

}  // namespace detail

inline SteadyState solve_steady_state(const EconomyParams& econ) {
  double lam_bar = economy::leverage_threshold(econ);
  if (econ.lambda >= lam_bar)
    throw NoSteadyState("solve_steady_state: lambda >= lambda_bar, dynamics has no steady state");

  double z_lo = detail::zbar_lower_bound(econ);
  // Scan upward from the lower bound; the residual is +inf-like for large
  // zbar (K -> 0), so all crossings live in a bounded window.
  double z_hi = std::max(econ.dist->quantile(1.0 - 1e-9), z_lo + 1.0);
  const int scan_points = 800;
  auto resid = [&](double z) { return detail::steady_threshold_residual(econ, z); };

  SteadyState ss;
  double prev_z = std::numeric_limits<double>::quiet_NaN();
  double prev_r = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i <= scan_points; ++i) {
    double frac = static_cast<double>(i) / scan_points;
    double z = z_lo + 1e-8 + frac * (z_hi - z_lo);
    double r = resid(z);
    if (std::isfinite(prev_r) && std::isfinite(r) && prev_r * r < 0.0) {
      double root = numerics::find_root(resid, numerics::Bracket{prev_z, z, prev_r, r}, 1e-14);
      ss.zbar_candidates.push_back(root);
    }
    prev_z = z;
    prev_r = r;
  }
  if (ss.zbar_candidates.empty())
    throw NoSteadyState("solve_steady_state: no interior root of the threshold equation found");

  ss.zbar = ss.zbar_candidates.front();
  ss.K = detail::steady_capital(econ, ss.zbar);
  auto wp = wealth_price_maps(econ, {ss.K, ss.zbar});
  ss.W = wp.W;
  ss.P = wp.P;
  auto prod = economy::eval_production(econ.tech, ss.K);
  ss.R = ss.zbar * prod.F_K;
  ss.residual_K = std::abs(ss.K - detail::capital_coef(econ, ss.zbar) * prod.F) / ss.K;
  ss.residual_z = std::abs(detail::steady_threshold_residual(econ, ss.zbar));
  return ss;
}

// ---------------------------------------------------------------------------
// Transition paths.
// ---------------------------------------------------------------------------

struct PathPoint {
  int t = 0;
  double K = 0.0;
  double zbar = 0.0;
  double W = 0.0;
  double P = 0.0;
  double rent = 0.0;
  double R = 0.0;
  double price_rent = 0.0;
  std::optional<double> V;  // fundamental value, filled by callers
  std::string regime;
};

struct ScheduleSegment {
  int start = 0;
  EconomyParams econ;
};

// One belief segment solved under permanence.
struct PermanentSolution {
  std::vector<double> zbar;  // 0..T
  std::vector<double> K;     // 0..T+1
  double objective = 0.0;    // sum_t (zbar_new - zbar)^2
  double terminal_zbar = 0.0;
  bool expanding = false;    // lambda > lambda_bar segment
  bool converged = false;
};

struct EquilibriumPath {
  std::vector<PathPoint> points;
  std::vector<ScheduleSegment> schedule;  // belief segments (MIT-shock stitching)
  std::vector<PermanentSolution> segment_solutions;
  double equilibrium_error = 0.0;         // max over segments of sum_t (zbar_new - zbar)^2
  bool converged = false;

  const EconomyParams& econ_at(int t) const {
    std::size_t seg = 0;
    while (seg + 1 < schedule.size() && t >= schedule[seg + 1].start) ++seg;
    return schedule[seg].econ;
  }

  // Fail-closed internal identities: W = F + P, price_rent = P/rent, and the
  // no-arbitrage link R_t = (P_{t+1} + rent_{t+1}) / P_t within belief
  // segments (it does not hold across surprise dates).
  void validate(double tol_wealth = 1e-9, double tol_rate = 1e-8) const {
    if (points.empty()) throw DomainError("EquilibriumPath: empty path");
    if (schedule.empty()) throw DomainError("EquilibriumPath: missing schedule");
    std::set<int> boundaries;
    for (const auto& seg : schedule) boundaries.insert(seg.start);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      const auto& econ = econ_at(p.t);
      auto prod = economy::eval_production(econ.tech, p.K);
      if (std::abs(p.W - (prod.F + p.P)) > tol_wealth * std::abs(p.W))
        throw DomainError("EquilibriumPath: W != F + P");
      if (std::abs(p.price_rent - p.P / p.rent) > tol_wealth * std::abs(p.price_rent))
        throw DomainError("EquilibriumPath: price_rent mismatch");
      if (i + 1 < points.size() && !boundaries.count(points[i + 1].t)) {
        const auto& q = points[i + 1];
        double implied = (q.P + q.rent) / p.P;
        if (std::abs(p.R - implied) > tol_rate * std::abs(p.R))
          throw DomainError("EquilibriumPath: R_t != (P_{t+1} + rent_{t+1}) / P_t");
      }
    }
  }
};

struct TransitionOptions {
  int min_horizon = 200;   // per-segment belief horizon
  int knots = 10;          // spline knots per segment (terminal knot pinned)
  double tol = 1e-10;      // required equilibrium error (sum of squares)
  int newton_max_iter = 60;
  int nm_max_iter = 6000;
};

namespace detail {

// Doubling knot times {0,1,2,4,...} clipped to [0,T]; adjusted to exactly
// `count` knots with the last pinned at T.
inline std::vector<int> knot_times(int T, int count) {
  std::set<int> times{0, T};
  int v = 1;
  while (v < T && static_cast<int>(times.size()) < count) {
    times.insert(v);
    v *= 2;
  }
  while (static_cast<int>(times.size()) > count) times.erase(std::prev(times.end(), 2));
  while (static_cast<int>(times.size()) < count) {
    // insert the (rounded) geometric midpoint of the widest gap
    int best_a = 0, best_b = T, width = 0;
    int prev = -1;
    for (int t : times) {
      if (prev >= 0 && t - prev > width) {
        width = t - prev;
        best_a = prev;
        best_b = t;
      }
      prev = t;
    }
    if (width <= 1) break;
    int mid = (best_a + best_b) / 2;
    times.insert(mid);
  }
  return {times.begin(), times.end()};
}

struct ForwardPass {
  std::vector<double> residual;  // 0..T-1
  std::vector<double> K;         // 0..T+1
  bool valid = false;
  double objective = std::numeric_limits<double>::infinity();
};

inline ForwardPass forward_pass(const EconomyParams& econ, const std::vector<double>& zbar,
                                double K0) {
  ForwardPass out;
  const std::size_t T = zbar.size() - 1;
  const double z_lo = zbar_lower_bound(econ);
  for (double z : zbar)
    if (!(z > z_lo) || !std::isfinite(z)) return out;
  out.K.resize(T + 2);
  out.K[0] = K0;
  for (std::size_t t = 0; t <= T; ++t) {
    out.K[t + 1] = step_capital(econ, {out.K[t], zbar[t]});
    if (!std::isfinite(out.K[t + 1]) || !(out.K[t + 1] > 0.0)) return out;
  }
  out.residual.resize(T);
  double obj = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    double znew =
        implied_threshold(econ, {out.K[t], zbar[t]}, {out.K[t + 1], zbar[t + 1]});
    out.residual[t] = znew - zbar[t];
    obj += out.residual[t] * out.residual[t];
  }
  out.valid = true;
  out.objective = obj;
  return out;
}

}  // namespace detail

// Solves the equilibrium path for a single parameter regime believed
// permanent: guess {zbar_t} parameterized by spline knots, minimize the
// equilibrium error (simplex stage), then polish the full sequence with a
// damped Newton step on the residual system. The terminal threshold is
// pinned at the regime's asymptote: the steady-state zbar when
// lambda < lambda_bar, G/m otherwise.
inline PermanentSolution solve_permanent(const EconomyParams& econ, double K0, int T, int J,
                                         const TransitionOptions& options = {}) {
  if (!(K0 > 0.0)) throw DomainError("solve_permanent: K0 must be positive");
  if (T < 4) throw ParameterError("solve_permanent: horizon too short");
  J = std::min(std::max(J, 3), T);

  double lam_bar = economy::leverage_threshold(econ);
  PermanentSolution sol;
  sol.expanding = econ.lambda > lam_bar;
  if (sol.expanding) {
    sol.terminal_zbar = solve_growth_rate(econ).v;
  } else {
    sol.terminal_zbar = solve_steady_state(econ).zbar;
  }

  const double z_lo = detail::zbar_lower_bound(econ);
  auto times = detail::knot_times(T, J);
  const std::size_t n_free = times.size() - 1;  // all but the pinned terminal knot

  auto build = [&](const std::vector<double>& free_values) {
    std::vector<double> values(free_values);
    values.push_back(sol.terminal_zbar);
    return numerics::SplinePath(std::vector<int>(times), std::move(values), T).sample();
  };
  auto objective = [&](const std::vector<double>& free_values) {
    for (double v : free_values)
      if (!(v > z_lo)) return 1e8 + 1e8 * (z_lo - v < 1 ? (z_lo - v) * (z_lo - v) : 1.0);
    auto pass = detail::forward_pass(econ, build(free_values), K0);
    return pass.valid ? pass.objective : 1e8;
  };

  // Stage 1: simplex over the knot values from a constant guess.
  std::vector<double> knots(n_free, sol.terminal_zbar);
  auto nm = numerics::minimize(objective, knots, 1e-10, options.nm_max_iter);
  std::vector<double> zbar = build(nm.x);

  // Stage 2: Newton on the full residual system, terminal value pinned.
  auto pass = detail::forward_pass(econ, zbar, K0);
  if (!pass.valid) throw NoConvergence("solve_permanent: simplex stage left the valid region");
  const std::size_t n = static_cast<std::size_t>(T);
  for (int iter = 0; iter < options.newton_max_iter; ++iter) {
    if (pass.objective <= 1e-26) break;
    Eigen::MatrixXd jac(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t t = 0; t < n; ++t) rhs(t) = -pass.residual[t];
    for (std::size_t j = 0; j < n; ++j) {
      double h = 1e-7 * std::max(1.0, std::abs(zbar[j]));
      std::vector<double> z2(zbar);
      z2[j] += h;
      auto p2 = detail::forward_pass(econ, z2, K0);
      if (!p2.valid) {
        z2[j] = zbar[j] - h;
        p2 = detail::forward_pass(econ, z2, K0);
        h = -h;
        if (!p2.valid) throw NoConvergence("solve_permanent: Jacobian evaluation failed");
      }
      for (std::size_t t = 0; t < n; ++t)
        jac(t, j) = (p2.residual[t] - pass.residual[t]) / h;
    }
    Eigen::VectorXd step = jac.partialPivLu().solve(rhs);
    double damp = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls) {
      std::vector<double> z2(zbar);
      for (std::size_t t = 0; t < n; ++t) z2[t] += damp * step(t);
      auto p2 = detail::forward_pass(econ, z2, K0);
      if (p2.valid && p2.objective < pass.objective) {
        zbar = std::move(z2);
        pass = std::move(p2);
        improved = true;
        break;
      }
      damp *= 0.5;
    }
    if (!improved) break;
  }

  sol.zbar = std::move(zbar);
  sol.K = pass.K;
  sol.objective = pass.objective;
  sol.converged = pass.objective <= options.tol;
  return sol;
}

// Solves a time-indexed parameter schedule by MIT-shock stitching: each
// belief segment is solved under permanence from the realized capital stock
// at its start date, and surprises re-initialize capital only.
inline EquilibriumPath solve_transition(const std::vector<ScheduleSegment>& schedule, double K0,
                                        int T, int J, const TransitionOptions& options = {}) {
  if (schedule.empty()) throw ParameterError("solve_transition: empty schedule");
  if (schedule.front().start != 0) throw ParameterError("solve_transition: first segment must start at 0");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i].start <= schedule[i - 1].start)
      throw ParameterError("solve_transition: segment starts must be strictly increasing");
  if (schedule.back().start >= T)
    throw ParameterError("solve_transition: last segment starts beyond the horizon");

  EquilibriumPath path;
  path.schedule = schedule;
  path.converged = true;
  double K_run = K0;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& seg = schedule[i];
    const int seg_end = (i + 1 < schedule.size()) ? schedule[i + 1].start : T;
    const int window = seg_end - seg.start;
    const int horizon = std::max({options.min_horizon, window + 1, T - seg.start});
    auto sol = solve_permanent(seg.econ, K_run, horizon, J, options);
    path.converged = path.converged && sol.converged;
    path.equilibrium_error = std::max(path.equilibrium_error, sol.objective);

    const int keep = (i + 1 < schedule.size()) ? window : window + 1;
    for (int tau = 0; tau < keep; ++tau) {
      PathPoint p;
      p.t = seg.start + tau;
      p.K = sol.K[static_cast<std::size_t>(tau)];
      p.zbar = sol.zbar[static_cast<std::size_t>(tau)];
      auto wp = wealth_price_maps(seg.econ, {p.K, p.zbar});
      p.W = wp.W;
      p.P = wp.P;
      auto prod = economy::eval_production(seg.econ.tech, p.K);
      p.rent = prod.F_X;
      p.R = p.zbar * economy::eval_production(seg.econ.tech, sol.K[static_cast<std::size_t>(tau) + 1]).F_K;
      p.price_rent = p.P / p.rent;
      p.regime = sol.expanding ? "bubbly" : "fundamental";
      path.points.push_back(std::move(p));
    }
    K_run = sol.K[static_cast<std::size_t>(window)];
    path.segment_solutions.push_back(std::move(sol));
  }
  return path;
}

}  // namespace landbubble::closed_economy
