#include "hart/oracle_calc.hpp"

#include <cmath>

#include "hart/errors.hpp"
#include "hart/math_util.hpp"

namespace hart {

void validate_toy_model(const ToyModel& m) {
  if (!(m.pi > 0.0 && m.pi < 1.0))
    throw domain_error("toy model: pi must lie in (0,1)");
  if (!(m.mu_a > 0.0)) throw domain_error("toy model: mu_a must be positive");
  if (!(m.sigma_lo > 0.0) || !(m.sigma_hi > m.sigma_lo))
    throw domain_error("toy model: require 0 < sigma_lo < sigma_hi");
  if (!(m.alpha > 0.0 && m.alpha < 1.0))
    throw domain_error("toy model: alpha must lie in (0,1)");
}

namespace {

// Average of fn(sigma) over sigma ~ Uniform(lo, hi).
double scale_average(const ToyModel& m, const std::function<double(double)>& fn) {
  const double width = m.sigma_hi - m.sigma_lo;
  return gauss_legendre_256(fn, m.sigma_lo, m.sigma_hi) / width;
}

double mfdr_p(const ToyModel& m, double t) {
  const double num = 2.0 * (1.0 - m.pi) * normal_sf(t);
  const double alt = scale_average(m, [&](double s) {
    return normal_sf(t + m.mu_a / s) + normal_sf(t - m.mu_a / s);
  });
  const double den = num + m.pi * alt;
  return den > 0.0 ? num / den : 0.0;
}

double mfdr_z(const ToyModel& m, double t) {
  const double num = (1.0 - m.pi) * normal_sf(t);
  const double alt =
      scale_average(m, [&](double s) { return normal_sf(t - m.mu_a / s); });
  const double den = num + m.pi * alt;
  return den > 0.0 ? num / den : 0.0;
}

double mfdr_full(const ToyModel& m, double lambda) {
  const double num = (1.0 - m.pi) * scale_average(m, [&](double s) {
    return normal_sf(toy_z_threshold_at(m, lambda, s));
  });
  const double alt = scale_average(m, [&](double s) {
    return normal_sf(toy_z_threshold_at(m, lambda, s) - m.mu_a / s);
  });
  const double den = num + m.pi * alt;
  return den > 0.0 ? num / den : 0.0;
}

constexpr double bisect_tol = 1e-9;

} // namespace

double toy_threshold_p(const ToyModel& m) {
  validate_toy_model(m);
  if (mfdr_p(m, 0.0) <= m.alpha) return 0.0;
  return bisect_decreasing([&](double t) { return mfdr_p(m, t); }, 0.0, 20.0,
                           m.alpha, bisect_tol);
}

double toy_threshold_z(const ToyModel& m) {
  validate_toy_model(m);
  if (mfdr_z(m, 0.0) <= m.alpha) return 0.0;
  return bisect_decreasing([&](double t) { return mfdr_z(m, t); }, 0.0, 20.0,
                           m.alpha, bisect_tol);
}

double toy_z_threshold_at(const ToyModel& m, double lambda, double sigma) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw domain_error("toy_z_threshold_at: lambda must lie in (0,1)");
  if (!(sigma > 0.0))
    throw domain_error("toy_z_threshold_at: sigma must be positive");
  const double logit =
      std::log(lambda * m.pi / ((1.0 - lambda) * (1.0 - m.pi)));
  return (m.mu_a * m.mu_a - 2.0 * sigma * sigma * logit) / (2.0 * m.mu_a * sigma);
}

double toy_lambda_star(const ToyModel& m) {
  validate_toy_model(m);
  const double lo = 1e-9;
  const double hi = 1.0 - 1e-9;
  if (mfdr_full(m, hi) <= m.alpha) return hi;
  return bisect_increasing([&](double l) { return mfdr_full(m, l); }, lo, hi,
                           m.alpha, bisect_tol);
}

ToyAveragePowers toy_average_powers(const ToyModel& m) {
  validate_toy_model(m);
  ToyAveragePowers out;
  const double t_p = toy_threshold_p(m);
  const double t_z = toy_threshold_z(m);
  const double lambda_star = toy_lambda_star(m);
  out.ap_p = scale_average(m, [&](double s) {
    return normal_sf(t_p + m.mu_a / s) + normal_sf(t_p - m.mu_a / s);
  });
  out.ap_z =
      scale_average(m, [&](double s) { return normal_sf(t_z - m.mu_a / s); });
  out.ap_full = scale_average(m, [&](double s) {
    return normal_sf(toy_z_threshold_at(m, lambda_star, s) - m.mu_a / s);
  });
  return out;
}

ToyOracleReport toy_report(const ToyModel& m) {
  validate_toy_model(m);
  ToyOracleReport out;
  out.t_p = toy_threshold_p(m);
  out.p_cut = 2.0 * normal_sf(out.t_p);
  out.t_z = toy_threshold_z(m);
  {
    // z-scale local fdr at the one-sided threshold.
    const double f0 = (1.0 - m.pi) * normal_pdf(out.t_z);
    const double f1 = scale_average(
        m, [&](double s) { return normal_pdf(out.t_z - m.mu_a / s); });
    out.lfdr_cut_z = f0 / (f0 + m.pi * f1);
  }
  out.lambda_star = toy_lambda_star(m);
  const ToyAveragePowers ap = toy_average_powers(m);
  out.ap_p = ap.ap_p;
  out.ap_z = ap.ap_z;
  out.ap_full = ap.ap_full;
  return out;
}

} // namespace hart
