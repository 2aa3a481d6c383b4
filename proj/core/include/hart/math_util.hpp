#pragma once

#include <cmath>
#include <functional>

namespace hart {

inline constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
inline constexpr double sqrt2 = 1.4142135623730950488016887;

/// Density floor guarding divisions; anything below is treated as underflow.
inline constexpr double density_floor = 1e-300;

/// Standard normal density.
inline double normal_pdf(double x) {
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

/// N(0, s^2) density.
inline double normal_pdf_scaled(double x, double s) {
  const double u = x / s;
  return inv_sqrt_2pi * std::exp(-0.5 * u * u) / s;
}

/// Standard normal CDF via erfc (accurate in both tails).
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / sqrt2);
}

/// Standard normal survival function Phi_bar(x) = P(Z > x).
inline double normal_sf(double x) {
  return 0.5 * std::erfc(x / sqrt2);
}

/// Standard normal quantile, Phi^-1(p) for p in (0,1).
double normal_quantile(double p);

/// 256-point Gauss-Legendre integral of f over [a, b].
double gauss_legendre_256(const std::function<double(double)>& f, double a, double b);

/// Adaptive Gauss-Kronrod (15-point base rule) integral of f over [a, b],
/// absolute tolerance 1e-8.
double gauss_kronrod_15(const std::function<double(double)>& f, double a, double b);

/// Solves f(x) = target by bisection on [lo, hi] where f is monotone
/// decreasing. Verifies the bracket (f(lo) >= target >= f(hi)) and the
/// monotone orientation, throwing hart::domain_error otherwise.
/// Bisection runs to |hi - lo| <= tol.
double bisect_decreasing(const std::function<double(double)>& f, double lo,
                         double hi, double target, double tol);

/// Same contract for monotone increasing f.
double bisect_increasing(const std::function<double(double)>& f, double lo,
                         double hi, double target, double tol);

} // namespace hart
