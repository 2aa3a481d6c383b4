#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hart/estimation.hpp"
#include "hart/model.hpp"

namespace hart {

enum class Procedure { HART, BH, AZ, OR_FULL, OR_Z, OR_P };

std::string procedure_name(Procedure p);

/// Outcome of a thresholding procedure: binary rejection vector, rejection
/// count, and the realized cutoff on the procedure's native statistic
/// (NaN when nothing is rejected).
struct DecisionSet {
  std::vector<std::uint8_t> reject;
  std::size_t k = 0;
  double threshold = 0.0;
  Procedure procedure = Procedure::HART;
  double alpha = 0.0;
};

/// Step-up rule on posterior-null-probability statistics: sort increasingly
/// (stable in the original index), take the largest k whose running mean
/// stays <= alpha, reject those k.
DecisionSet step_up(const std::vector<double>& tstats, double alpha,
                    Procedure tag = Procedure::HART);

/// Benjamini-Hochberg on p-values: k = max{j : p_(j) <= j alpha / m}.
DecisionSet bh(const std::vector<double>& pvalues, double alpha);

/// Adaptive z-value rule: Lfdr_i = min{(1-pi_hat) phi(z_i/sigma0)/sigma0 /
/// f_kde(z_i), 1} with the caller-supplied kernel bandwidth h, then step-up.
DecisionSet az(const std::vector<double>& zvalues, double alpha, double pi_hat,
               double sigma0, double h);

/// Data-driven procedure: step-up on the estimation pipeline's statistics;
/// sigma-filtered items are reported as not rejected.
DecisionSet hart_procedure(const std::vector<TestItem>& data, double alpha,
                           const EstimateOptions& opts = {});

/// Oracle procedures for fully known models (Gaussian noise required).
DecisionSet oracle_full(const std::vector<TestItem>& data, const MixtureModel& model,
                        double alpha);
DecisionSet oracle_z(const std::vector<double>& zvalues, const MixtureModel& model,
                     double alpha);
/// Fixed two-sided rule |z| >= t_p with t_p from the closed-form calculator;
/// requires a point-mass effect and uniform scale with lo > 0.
DecisionSet oracle_p(const std::vector<double>& zvalues, const MixtureModel& model,
                     double alpha);

/// Two-sided tail probability under a N(0, sigma0^2) null.
double pvalue_from_z(double z, double sigma0);

} // namespace hart
