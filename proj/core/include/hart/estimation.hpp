#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hart/model.hpp"

namespace hart {

/// Kernel bandwidth pair for the bivariate estimator. h_x acts as a relative
/// bandwidth: the x-kernel at sample point j uses h_x * sigma_j.
struct Bandwidths {
  double h_x = 1.0;
  double h_sigma = 1.0;
  bool fallback_x = false;     // degenerate-spread fallback was taken
  bool fallback_sigma = false;
};

/// Sample points plus estimation weights for the weighted KDE.
struct WeightedSample {
  std::vector<TestItem> items;
  std::vector<double> weights;
};

enum class TStatStage { pilot, refined };

/// Estimated posterior-null-probability statistics plus the estimation state
/// they were produced with.
struct TStatVector {
  std::vector<double> t;
  double pi_hat = 0.0;
  Bandwidths bandwidths;
  TStatStage stage = TStatStage::pilot;
  bool jackknife = false;
};

/// Fitted null scale from the central part of the z histogram.
struct EmpiricalNull {
  double sigma0 = 1.0;
  double coverage = 0.99;
};

struct EstimateOptions {
  double lambda = 0.5;              // Storey threshold
  bool jackknife = true;            // leave-self-out in refinement passes
  double null_scale = 1.0;          // analysis null scale sigma0
  std::optional<double> sigma_filter; // drop items with sigma < cap
};

/// Storey's non-null proportion estimate, clamped to [0,1].
double storey_pi(const std::vector<double>& pvalues, double lambda);

/// Per-coordinate Silverman rule h = 0.9 * min(sd, IQR/1.34) * n^{-1/5} on
/// the x and sigma coordinates of the given items. Degenerate coordinates
/// (n < 2 or zero spread) fall back to h = 0.1 * (max - min + 1) with the
/// corresponding fallback flag set.
Bandwidths silverman_bandwidths(const std::vector<TestItem>& subset);

/// One-dimensional Silverman rule on raw values; same fallback policy.
double silverman_h(const std::vector<double>& values, bool* fallback = nullptr);

/// Weighted bivariate kernel density estimate at (x, sigma):
///   f(x | sigma) = sum_j [w_j phi_{h_sigma}(sigma - sigma_j) /
///                         sum_k w_k phi_{h_sigma}(sigma - sigma_k)]
///                  * phi_{h_x sigma_j}(x - x_j).
/// The sigma-weights are normalized internally, so scaling all weights by a
/// positive constant leaves the value unchanged.
double weighted_bivariate_kde(double x, double sigma, const WeightedSample& sample,
                              const Bandwidths& h);

/// Pilot statistics T^(0)_j = min{(1-pi_hat) f_{0,sigma_j}(x_j) / f*(x_j|sigma_j), 1}
/// where f* is the all-ones-weights estimator (no leave-out).
TStatVector pilot_tstats(const std::vector<TestItem>& data, double pi_hat,
                         const Bandwidths& h, double null_scale);

/// Two refinement passes: weights 1 - T^(0) give f1^(0) and T^(1); weights
/// 1 - T^(1) give f1^(1) and the final
///   T_i = (1-pi_hat) f_{0,sigma_i}(x_i) /
///         [(1-pi_hat) f_{0,sigma_i}(x_i) + pi_hat f1^(1)(x_i|sigma_i)].
/// With jackknife=true every self-evaluation excludes the point's own pair.
TStatVector refine_tstats(const std::vector<TestItem>& data, const TStatVector& pilot,
                          double pi_hat, const Bandwidths& h, double null_scale,
                          bool jackknife);

/// Result of the full pipeline including the index bookkeeping of the
/// optional sigma filter.
struct EstimateResult {
  TStatVector stats;              // aligned to retained items
  std::vector<std::size_t> retained; // indices into the original data
  std::vector<std::size_t> filtered; // dropped by sigma_filter
  bool bandwidth_subset_fallback = false; // {P < pi_hat} was empty/degenerate
};

/// Full estimation pipeline: p-values under the configured null, Storey
/// pi_hat, bandwidths from the {P_i < pi_hat} subset (fitted on standardized
/// folded x-coordinates; see README), pilot pass, two refinement passes.
EstimateResult estimate_tstats(const std::vector<TestItem>& data,
                               const EstimateOptions& opts = {});

/// Null scale fitted from the central `coverage` mass of the z sample:
/// truncated-sample sd divided by the analytic truncated-normal sd factor
/// sqrt(1 - 2 b phi(b) / (2 Phi(b) - 1)), b = Phi^-1((1+coverage)/2).
/// Requires n >= 100.
EmpiricalNull empirical_null(const std::vector<double>& zvalues,
                             double coverage = 0.99);

/// Standard Gaussian-kernel density estimate (1/(n h)) sum phi((z - z_j)/h).
double univariate_kde(double z, const std::vector<double>& sample, double h);

// Batch helpers shared by the pipeline, the procedures layer, and tests.
namespace detail {

/// Evaluates the weighted bivariate KDE at every sample point (self-
/// evaluation), optionally excluding the point's own pair (jackknife).
/// All-ones weights reproduce the unweighted estimator.
std::vector<double> kde_self_eval(const std::vector<double>& x,
                                  const std::vector<double>& sigma,
                                  const std::vector<double>& w,
                                  const Bandwidths& h, bool jackknife);

/// Univariate KDE evaluated at every sample point, O(n^2) with row
/// parallelism.
std::vector<double> univariate_kde_self_eval(const std::vector<double>& z, double h);

} // namespace detail

} // namespace hart
