#pragma once

#include "cdrodeo/errors.hpp"

#include <cmath>
#include <functional>

namespace cdrodeo {
namespace quadrature {

namespace detail {

template<typename F>
double adaptive_simpson_rec(const F& f,
                            double a, double b,
                            double fa, double fm, double fb,
                            double whole, double tol, int depth,
                            double& err_accum)
{
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    err_accum += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1, err_accum) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1, err_accum);
}

} // namespace detail

//! Adaptive Simpson integration of f over [a, b]. The interval is first
//! cut into uniform panels so narrow features cannot slip between the
//! nodes of the opening estimate, then each panel is refined adaptively.
//!
//! Throws NonConvergence when the accumulated error estimate exceeds the
//! requested tolerance (recursion exhausted before the panels converged).
template<typename F>
double integrate(const F& f, double a, double b, double tol = 1e-10,
                 int max_depth = 48, int panels = 64)
{
  double total = 0.0;
  double err = 0.0;
  const double panel_tol = tol / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + (b - a) * p / panels;
    const double hi = a + (b - a) * (p + 1) / panels;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += detail::adaptive_simpson_rec(f, lo, hi, flo, fmid, fhi, whole,
                                          panel_tol, max_depth, err);
  }
  if (!(err <= tol * 16.0 + 1e-300) || std::isnan(total)) {
    throw NonConvergence("quadrature error estimate above tolerance");
  }
  return total;
}

//! Supremum of |f| over [a, b]: dense scan followed by golden-section
//! refinement around the best bracket.
template<typename F>
double sup_abs(const F& f, double a, double b, int scan_points = 20001)
{
  double best = 0.0;
  double best_t = a;
  const double step = (b - a) / (scan_points - 1);
  for (int i = 0; i < scan_points; ++i) {
    const double t = a + i * step;
    const double v = std::abs(f(t));
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  double lo = std::max(a, best_t - step);
  double hi = std::min(b, best_t + step);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = std::abs(f(x1));
  double f2 = std::abs(f(x2));
  for (int it = 0; it < 200 && (hi - lo) > 1e-14; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = std::abs(f(x2));
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = std::abs(f(x1));
    }
  }
  return std::max({best, f1, f2});
}

} // namespace quadrature
} // namespace cdrodeo
