#pragma once

namespace hart {

/// Point-mass alternative mu_a with sigma ~ U[sigma_lo, sigma_hi]; the model
/// for which the oracle thresholds and powers have closed forms.
struct ToyModel {
  double pi = 0.1;
  double mu_a = 2.0;
  double sigma_lo = 0.5;
  double sigma_hi = 4.0;
  double alpha = 0.1;
};

/// Thresholds and average powers of the three oracle rules.
struct ToyOracleReport {
  double t_p = 0.0;        // two-sided |z| threshold
  double p_cut = 0.0;      // 2 Phi_bar(t_p)
  double t_z = 0.0;        // one-sided z threshold
  double lfdr_cut_z = 0.0; // z-scale Lfdr value at t_z
  double lambda_star = 0.0;
  double ap_p = 0.0;
  double ap_z = 0.0;
  double ap_full = 0.0;
};

/// Validates the model (0 < lo < hi, pi in (0,1), mu_a > 0, alpha in (0,1)),
/// throwing hart::domain_error otherwise.
void validate_toy_model(const ToyModel& model);

/// Smallest t with
///   2(1-pi)Phi_bar(t) / [2(1-pi)Phi_bar(t)
///     + pi Int {Phi_bar(t + mu_a/s) + Phi_bar(t - mu_a/s)} dG(s)] <= alpha,
/// by bisection on the monotone-decreasing ratio over t in (0, 20).
double toy_threshold_p(const ToyModel& model);

/// One-sided analogue: root of
///   (1-pi)Phi_bar(t) / [(1-pi)Phi_bar(t) + pi Int Phi_bar(t - mu_a/s) dG(s)] = alpha.
double toy_threshold_z(const ToyModel& model);

/// Per-sigma z-threshold equivalent to the posterior-probability cut lambda:
///   t(lambda, s) = [mu_a^2 - 2 s^2 log{lambda pi / ((1-lambda)(1-pi))}] / (2 mu_a s).
double toy_z_threshold_at(const ToyModel& model, double lambda, double sigma);

/// Largest lambda whose marginal FDR functional stays <= alpha; bisection on
/// the monotone-increasing functional over lambda in (1e-9, 1 - 1e-9).
double toy_lambda_star(const ToyModel& model);

struct ToyAveragePowers {
  double ap_p = 0.0;
  double ap_z = 0.0;
  double ap_full = 0.0;
};

/// The three average-power integrals over G(sigma).
ToyAveragePowers toy_average_powers(const ToyModel& model);

/// Full report (thresholds, cuts, lambda*, powers).
ToyOracleReport toy_report(const ToyModel& model);

} // namespace hart
