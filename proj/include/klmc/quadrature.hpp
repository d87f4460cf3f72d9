// Adaptive Simpson quadrature, used as the independent oracle for the kernel
// coefficient integrals.
#pragma once

#include <cmath>
#include <functional>

namespace klmc {

namespace detail {
inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_rec(const std::function<double(double)>& f, double a, double fa,
                           double b, double fb, double m, double fm, double whole,
                           double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Integrates f over [a, b] to absolute tolerance ~tol (callers scale tol by
// the expected magnitude for a relative criterion).
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int max_depth = 40) {
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = detail::simpson(a, fa, b, fb, fm);
  return detail::adaptive_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace klmc
