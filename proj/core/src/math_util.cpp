#include "hart/math_util.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "hart/errors.hpp"

namespace hart {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw domain_error("normal_quantile: p must lie in (0,1)");
  // Phi^-1(p) = -sqrt(2) erfc_inv(2p)
  return -sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double gauss_legendre_256(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 256>::integrate(f, a, b);
}

double gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 12, 1e-8);
}

namespace {

double bisect_impl(const std::function<double(double)>& f, double lo, double hi,
                   double target, double tol, bool decreasing) {
  if (!(lo < hi)) throw domain_error("bisect: empty bracket");
  const double flo = f(lo);
  const double fhi = f(hi);
  const bool bracketed = decreasing ? (flo >= target && target >= fhi)
                                    : (flo <= target && target <= fhi);
  if (!bracketed)
    throw domain_error("bisect: target not bracketed on the given interval");
  if ((decreasing && flo < fhi) || (!decreasing && flo > fhi))
    throw domain_error("bisect: function orientation contradicts monotonicity");
  double a = lo, b = hi;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    const bool go_right = decreasing ? (fm > target) : (fm < target);
    if (go_right)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

} // namespace

double bisect_decreasing(const std::function<double(double)>& f, double lo,
                         double hi, double target, double tol) {
  return bisect_impl(f, lo, hi, target, tol, true);
}

double bisect_increasing(const std::function<double(double)>& f, double lo,
                         double hi, double target, double tol) {
  return bisect_impl(f, lo, hi, target, tol, false);
}

} // namespace hart
