#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "landbubble/errors.hpp"

namespace landbubble::numerics {

struct MinimizeResult {
  std::vector<double> x;
  double fx = 0.0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
};

// Derivative-free Nelder-Mead simplex minimizer with the adaptive
// coefficients of Gao & Han for higher dimensions. Never throws on
// non-convergence: the best point found so far is returned with
// converged == false.
template <class F>
MinimizeResult minimize(F&& f, std::vector<double> x0, double tol = 1e-10,
                        int max_iter = 0) {
  const std::size_t n = x0.size();
  if (n == 0) throw ParameterError("minimize: empty initial point");
  if (!(tol > 0.0)) throw ParameterError("minimize: tol must be positive");
  if (max_iter <= 0) max_iter = 400 * static_cast<int>(n) + 400;

  const double dim = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = (n > 2) ? 1.0 + 2.0 / dim : 2.0;         // expansion
  const double gamma = (n > 2) ? 0.75 - 1.0 / (2.0 * dim) : 0.5;  // contraction
  const double delta = (n > 2) ? 1.0 - 1.0 / dim : 0.5;           // shrink

  MinimizeResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    double v = f(x);
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    return v;
  };

  if (!std::isfinite(eval(x0)))
    throw ParameterError("minimize: objective not finite at the initial point");
  --result.evaluations;  // counted again below

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    double h = 0.05 * std::abs(x0[i]);
    if (h == 0.0) h = 0.00025;
    simplex[i + 1][i] += h;
  }
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  for (int iter = 0; iter < max_iter; ++iter) {
    result.iterations = iter;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });

    // Simplex diameter relative to the best vertex.
    double size = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        size = std::max(size, std::abs(simplex[order[i]][k] - simplex[order[0]][k]));
    if (size <= tol) {
      result.converged = true;
      break;
    }

    const std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
    }
    for (std::size_t k = 0; k < n; ++k) centroid[k] /= dim;

    auto point_along = [&](double coef) {
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k)
        p[k] = centroid[k] + coef * (centroid[k] - simplex[worst][k]);
      return p;
    };

    std::vector<double> xr = point_along(alpha);
    double fr = eval(xr);
    if (fr < fv[best]) {
      std::vector<double> xe = point_along(alpha * beta);
      double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        simplex[worst] = std::move(xr);
        fv[worst] = fr;
      }
    } else if (fr < fv[second_worst]) {
      simplex[worst] = std::move(xr);
      fv[worst] = fr;
    } else {
      bool outside = fr < fv[worst];
      std::vector<double> xc = point_along(outside ? alpha * gamma : -gamma);
      double fc = eval(xc);
      if (fc < std::min(fr, fv[worst])) {
        simplex[worst] = std::move(xc);
        fv[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k)
            simplex[i][k] = simplex[best][k] + delta * (simplex[i][k] - simplex[best][k]);
          fv[i] = eval(simplex[i]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  result.x = simplex[best];
  result.fx = fv[best];
  return result;
}

}  // namespace landbubble::numerics
