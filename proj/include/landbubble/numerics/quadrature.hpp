#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "landbubble/errors.hpp"

namespace landbubble::numerics {

// Fixed-node rule for integrals of the form int_0^inf f(x) e^{-x} dx.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (int i = 0; i < order; ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

namespace detail {

// Laguerre polynomial L_n and L_{n-1} at x via the three-term recurrence.
inline std::pair<double, double> laguerre_pair(int n, double x) {
  double p0 = 1.0, p1 = 1.0 - x;
  if (n == 0) return {p0, 0.0};
  for (int k = 1; k < n; ++k) {
    double p2 = ((2.0 * k + 1.0 - x) * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};  // (L_n, L_{n-1})
}

}  // namespace detail

// Gauss-Laguerre nodes and weights for weight e^{-x} on (0, inf), exact on
// polynomials up to degree 2*order-1. Nodes are found by Newton iteration
// from the standard initial guesses; weights use w_i = x_i / ((n+1) L_{n+1}(x_i))^2.
inline QuadratureRule gauss_laguerre(int order) {
  if (order < 1 || order > 128) {
    std::ostringstream msg;
    msg << "gauss_laguerre: unsupported order " << order << " (want 1..128)";
    throw UnsupportedOrder(msg.str());
  }
  const int n = order;
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * n);
    } else {
      double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - rule.nodes[i - 2]);
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      auto [pn, pnm1] = detail::laguerre_pair(n, z);
      pp = n * (pn - pnm1) / z;  // L_n'(z) = n (L_n - L_{n-1}) / z
      double dz = pn / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    auto [pnp1, pn_at_root] = detail::laguerre_pair(n + 1, z);
    (void)pn_at_root;
    rule.nodes[i] = z;
    double denom = (n + 1.0) * pnp1;
    rule.weights[i] = z / (denom * denom);
  }
  return rule;
}

}  // namespace landbubble::numerics
