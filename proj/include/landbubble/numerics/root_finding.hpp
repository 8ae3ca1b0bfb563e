#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <utility>

#include "landbubble/errors.hpp"

namespace landbubble::numerics {

// A sign-change interval for a scalar function.
struct Bracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;

  bool valid() const {
    return lo < hi && std::isfinite(f_lo) && std::isfinite(f_hi) &&
           ((f_lo < 0.0 && f_hi > 0.0) || (f_lo > 0.0 && f_hi < 0.0));
  }
};

template <class F>
Bracket make_bracket(F&& f, double lo, double hi) {
  Bracket b{lo, hi, f(lo), f(hi)};
  if (!b.valid()) {
    std::ostringstream msg;
    msg << "invalid bracket [" << lo << ", " << hi << "]: f(lo)=" << b.f_lo
        << ", f(hi)=" << b.f_hi;
    throw InvalidBracket(msg.str());
  }
  return b;
}

// Expands [lo, hi] upward by repeated doubling of the width until f changes
// sign. Returns nullopt when no sign change is found within max_doublings.
template <class F>
std::optional<Bracket> try_bracket_upward(F&& f, double lo, double hi,
                                          int max_doublings = 200) {
  double f_lo = f(lo);
  if (f_lo == 0.0) return Bracket{lo, std::nextafter(lo, hi), f_lo, f_lo};
  double width = hi - lo;
  if (!(width > 0.0)) return std::nullopt;
  for (int i = 0; i < max_doublings; ++i) {
    double f_hi = f(hi);
    Bracket b{lo, hi, f_lo, f_hi};
    if (b.valid() || f_hi == 0.0) return Bracket{lo, hi, f_lo, f_hi};
    width *= 2.0;
    hi = lo + width;
    if (!std::isfinite(hi)) break;
  }
  return std::nullopt;
}

// Bracketing scalar root finder: bisection with inverse-quadratic/secant
// acceleration (Brent-style step guards). The returned root always lies
// inside the initial bracket. Terminates when |f| <= tol or the interval
// width shrinks below max(tol, a few ulps).
template <class F>
double find_root(F&& f, Bracket bracket, double tol = 1e-12, int max_iter = 200) {
  if (!bracket.valid()) {
    if (bracket.f_lo == 0.0) return bracket.lo;
    if (bracket.f_hi == 0.0) return bracket.hi;
    throw InvalidBracket("find_root: bracket endpoints do not straddle a sign change");
  }
  if (!(tol > 0.0)) throw ParameterError("find_root: tol must be positive");

  double a = bracket.lo, b = bracket.hi;
  double fa = bracket.f_lo, fb = bracket.f_hi;
  double c = a, fc = fa;  // previous best, for inverse-quadratic steps

  for (int iter = 0; iter < max_iter; ++iter) {
    // Keep b as the endpoint with the smaller residual.
    if (std::abs(fa) < std::abs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
    if (fb == 0.0 || std::abs(fb) <= tol) return b;
    double width = std::abs(b - a);
    double scale = std::abs(b) + std::abs(a);
    if (width <= tol || width <= 4.0 * 2.22e-16 * scale) return b;

    double step = 0.5 * (a + b) - b;  // bisection default
    // Interpolated candidate: inverse quadratic when the three function
    // values are distinct, secant otherwise. Accept only interior steps
    // that shrink the interval meaningfully.
    double s = b;
    bool have_candidate = false;
    if (fa != fb && fb != fc && fa != fc) {
      s = b * fa * fc / ((fb - fa) * (fb - fc)) +
          a * fb * fc / ((fa - fb) * (fa - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
      have_candidate = true;
    } else if (fa != fb) {
      s = b - fb * (b - a) / (fb - fa);
      have_candidate = true;
    }
    if (have_candidate && (s - a) * (s - b) < 0.0 && std::abs(s - b) < 0.75 * width) {
      step = s - b;
    }
    double min_step = std::min(0.5 * tol, 0.25 * width);
    if (std::abs(step) < min_step) step = (a > b) ? min_step : -min_step;

    double x = b + step;
    double fx = f(x);
    c = b;
    fc = fb;
    if ((fx < 0.0) == (fa < 0.0)) {
      a = x;  // sign change stays on [x, b]
      fa = fx;
    } else {
      b = x;  // sign change stays on [a, x]
      fb = fx;
    }
  }
  throw NoConvergence("find_root: no convergence within max_iter");
}

}  // namespace landbubble::numerics
