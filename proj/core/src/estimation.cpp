#include "hart/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hart/errors.hpp"
#include "hart/math_util.hpp"
#include "hart/parallel.hpp"

namespace hart {

namespace {

// Kernel exponents beyond this are treated as exact zeros (exp(-700) range).
constexpr double kernel_cutoff = 1400.0;

double sample_sd(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(n);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / double(n - 1));
}

// Linear-interpolation quantile on a sorted vector (type-7 convention).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * double(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = pos - double(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct CoordinateSpread {
  double h = 0.0;
  bool fallback = false;
};

// h = 0.9 * min(sd, IQR/1.34) * n^{-1/5}; degenerate coordinates fall back to
// h = 0.1 * (max - min + 1).
CoordinateSpread silverman_coordinate(std::vector<double> v) {
  CoordinateSpread out;
  const std::size_t n = v.size();
  double lo = 0.0, hi = 0.0;
  if (!v.empty()) {
    auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    lo = *mn;
    hi = *mx;
  }
  double spread = 0.0;
  if (n >= 2) {
    const double sd = sample_sd(v);
    std::sort(v.begin(), v.end());
    const double iqr = quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
    spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  }
  if (n < 2 || spread <= 0.0) {
    out.h = 0.1 * (hi - lo + 1.0);
    out.fallback = true;
    return out;
  }
  out.h = 0.9 * spread * std::pow(double(n), -0.2);
  return out;
}

} // namespace

double storey_pi(const std::vector<double>& pvalues, double lambda) {
  if (pvalues.empty()) throw domain_error("storey_pi: empty p-value vector");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw domain_error("storey_pi: lambda must lie in (0,1)");
  std::size_t above = 0;
  for (double p : pvalues) above += (p > lambda);
  const double est =
      1.0 - double(above) / (double(pvalues.size()) * (1.0 - lambda));
  return std::clamp(est, 0.0, 1.0);
}

Bandwidths silverman_bandwidths(const std::vector<TestItem>& subset) {
  std::vector<double> xs, ss;
  xs.reserve(subset.size());
  ss.reserve(subset.size());
  for (const auto& it : subset) {
    xs.push_back(it.x);
    ss.push_back(it.sigma);
  }
  const CoordinateSpread hx = silverman_coordinate(std::move(xs));
  const CoordinateSpread hs = silverman_coordinate(std::move(ss));
  Bandwidths out;
  out.h_x = hx.h;
  out.h_sigma = hs.h;
  out.fallback_x = hx.fallback;
  out.fallback_sigma = hs.fallback;
  return out;
}

double silverman_h(const std::vector<double>& values, bool* fallback) {
  const CoordinateSpread c = silverman_coordinate(values);
  if (fallback) *fallback = c.fallback;
  return c.h;
}

double weighted_bivariate_kde(double x, double sigma, const WeightedSample& sample,
                              const Bandwidths& h) {
  const std::size_t n = sample.items.size();
  if (n == 0 || sample.weights.size() != n)
    throw domain_error("weighted_bivariate_kde: sample and weights must align");
  if (!(h.h_x > 0.0) || !(h.h_sigma > 0.0))
    throw domain_error("weighted_bivariate_kde: bandwidths must be positive");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = sample.weights[i];
    if (wi == 0.0) continue;
    const double ds = (sigma - sample.items[i].sigma) / h.h_sigma;
    const double a = ds * ds;
    if (a > kernel_cutoff) continue;
    const double ks = wi * std::exp(-0.5 * a);
    den += ks;
    const double hxi = h.h_x * sample.items[i].sigma;
    const double dx = (x - sample.items[i].x) / hxi;
    const double b = dx * dx;
    if (b > kernel_cutoff) continue;
    num += ks * std::exp(-0.5 * b) * inv_sqrt_2pi / hxi;
  }
  if (!(den > 0.0)) {
    std::ostringstream msg;
    msg << "weighted_bivariate_kde: all effective weights zero at (" << x << ", "
        << sigma << ")";
    throw estimation_error(msg.str());
  }
  return num / den;
}

namespace detail {

std::vector<double> kde_self_eval(const std::vector<double>& x,
                                  const std::vector<double>& sigma,
                                  const std::vector<double>& w,
                                  const Bandwidths& h, bool jackknife) {
  const std::size_t n = x.size();
  std::vector<double> inv_hx(n), xnorm(n);
  for (std::size_t i = 0; i < n; ++i) {
    inv_hx[i] = 1.0 / (h.h_x * sigma[i]);
    xnorm[i] = inv_sqrt_2pi * inv_hx[i];
  }
  const double inv_hs = 1.0 / h.h_sigma;
  std::vector<double> out(n, 0.0);
  parallel_for(n, [&](std::size_t j) {
    const double xj = x[j];
    const double sj = sigma[j];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (jackknife && i == j) continue;
      const double wi = w[i];
      if (wi == 0.0) continue;
      const double ds = (sj - sigma[i]) * inv_hs;
      const double a = ds * ds;
      if (a > kernel_cutoff) continue;
      const double ks = wi * std::exp(-0.5 * a);
      den += ks;
      const double dx = (xj - x[i]) * inv_hx[i];
      const double b = dx * dx;
      if (b > kernel_cutoff) continue;
      num += ks * std::exp(-0.5 * b) * xnorm[i];
    }
    out[j] = den > 0.0 ? num / den : 0.0;
  });
  return out;
}

std::vector<double> univariate_kde_self_eval(const std::vector<double>& z, double h) {
  const std::size_t n = z.size();
  const double inv_h = 1.0 / h;
  const double norm = inv_sqrt_2pi * inv_h / double(n);
  std::vector<double> out(n, 0.0);
  parallel_for(n, [&](std::size_t j) {
    const double zj = z[j];
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (zj - z[i]) * inv_h;
      const double a = d * d;
      if (a > kernel_cutoff) continue;
      acc += std::exp(-0.5 * a);
    }
    out[j] = acc * norm;
  });
  return out;
}

} // namespace detail

namespace {

std::vector<double> split_x(const std::vector<TestItem>& data) {
  std::vector<double> v(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) v[i] = data[i].x;
  return v;
}

std::vector<double> split_sigma(const std::vector<TestItem>& data) {
  std::vector<double> v(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) v[i] = data[i].sigma;
  return v;
}

std::vector<double> null_densities(const std::vector<TestItem>& data,
                                   double null_scale) {
  std::vector<double> f0(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    f0[i] = null_density(data[i].x, data[i].sigma, null_scale);
  return f0;
}

} // namespace

TStatVector pilot_tstats(const std::vector<TestItem>& data, double pi_hat,
                         const Bandwidths& h, double null_scale) {
  if (data.size() < 2) throw domain_error("pilot_tstats: need at least 2 items");
  const std::vector<double> x = split_x(data);
  const std::vector<double> sigma = split_sigma(data);
  const std::vector<double> ones(data.size(), 1.0);
  const std::vector<double> fstar = detail::kde_self_eval(x, sigma, ones, h, false);
  const std::vector<double> f0 = null_densities(data, null_scale);
  TStatVector out;
  out.t.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double denom = std::max(fstar[i], density_floor);
    out.t[i] = std::min((1.0 - pi_hat) * f0[i] / denom, 1.0);
  }
  out.pi_hat = pi_hat;
  out.bandwidths = h;
  out.stage = TStatStage::pilot;
  out.jackknife = false;
  return out;
}

TStatVector refine_tstats(const std::vector<TestItem>& data, const TStatVector& pilot,
                          double pi_hat, const Bandwidths& h, double null_scale,
                          bool jackknife) {
  if (pilot.stage != TStatStage::pilot)
    throw domain_error("refine_tstats: input stage must be pilot");
  if (pilot.t.size() != data.size())
    throw domain_error("refine_tstats: pilot/data length mismatch");
  const std::size_t n = data.size();
  const std::vector<double> x = split_x(data);
  const std::vector<double> sigma = split_sigma(data);
  const std::vector<double> f0 = null_densities(data, null_scale);

  auto weights_from = [&](const std::vector<double>& t) {
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = std::clamp(1.0 - t[i], 0.0, 1.0);
      total += w[i];
    }
    if (!(total > 0.0))
      throw estimation_error("refine_tstats: all refined weights are zero");
    return w;
  };

  auto ratio_pass = [&](const std::vector<double>& f1) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double num = (1.0 - pi_hat) * f0[i];
      const double den = num + pi_hat * f1[i];
      t[i] = den > density_floor ? std::clamp(num / den, 0.0, 1.0) : 1.0;
    }
    return t;
  };

  const std::vector<double> w0 = weights_from(pilot.t);
  const std::vector<double> f1_0 = detail::kde_self_eval(x, sigma, w0, h, jackknife);
  const std::vector<double> t1 = ratio_pass(f1_0);
  const std::vector<double> w1 = weights_from(t1);
  const std::vector<double> f1_1 = detail::kde_self_eval(x, sigma, w1, h, jackknife);

  TStatVector out;
  out.t = ratio_pass(f1_1);
  out.pi_hat = pi_hat;
  out.bandwidths = h;
  out.stage = TStatStage::refined;
  out.jackknife = jackknife;
  return out;
}

EstimateResult estimate_tstats(const std::vector<TestItem>& data,
                               const EstimateOptions& opts) {
  if (data.size() < 10)
    throw domain_error("estimate_tstats: need at least 10 items");
  if (!(opts.null_scale > 0.0))
    throw domain_error("estimate_tstats: null_scale must be positive");

  EstimateResult result;
  result.retained.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i].sigma > 0.0))
      throw domain_error("estimate_tstats: sigma must be positive");
    if (opts.sigma_filter && data[i].sigma < *opts.sigma_filter)
      result.filtered.push_back(i);
    else
      result.retained.push_back(i);
  }
  if (result.retained.size() < 10)
    throw domain_error("estimate_tstats: fewer than 10 items after sigma filter");

  std::vector<TestItem> kept;
  kept.reserve(result.retained.size());
  for (std::size_t idx : result.retained) kept.push_back(data[idx]);
  const std::size_t n = kept.size();

  // p-values under the configured null.
  std::vector<double> absz(n), pvals(n);
  for (std::size_t i = 0; i < n; ++i) {
    absz[i] = std::abs(kept[i].x / (kept[i].sigma * opts.null_scale));
    pvals[i] = std::erfc(absz[i] / sqrt2);
  }
  const double pi_hat = storey_pi(pvals, opts.lambda);

  if (pi_hat <= 0.0) {
    // Nothing estimably non-null; every statistic saturates at 1.
    result.stats.t.assign(n, 1.0);
    result.stats.pi_hat = 0.0;
    result.stats.stage = TStatStage::refined;
    result.stats.jackknife = opts.jackknife;
    return result;
  }
  if (pi_hat >= 1.0) {
    result.stats.t.assign(n, 0.0);
    result.stats.pi_hat = 1.0;
    result.stats.stage = TStatStage::refined;
    result.stats.jackknife = opts.jackknife;
    return result;
  }

  // Bandwidths from the {P_i < pi_hat} subset. h_x is fitted on the folded
  // standardized coordinate |x/(sigma*sigma0)| because it enters the kernel
  // as a relative factor on sigma_j; h_sigma on the raw sigma coordinate.
  std::vector<TestItem> bw_subset;
  for (std::size_t i = 0; i < n; ++i) {
    if (pvals[i] < pi_hat)
      bw_subset.push_back(TestItem{absz[i], kept[i].sigma, 0.0, 0.0});
  }
  if (bw_subset.size() < 2) {
    result.bandwidth_subset_fallback = true;
    bw_subset.clear();
    for (std::size_t i = 0; i < n; ++i)
      bw_subset.push_back(TestItem{absz[i], kept[i].sigma, 0.0, 0.0});
  }
  const Bandwidths h = silverman_bandwidths(bw_subset);

  const TStatVector pilot = pilot_tstats(kept, pi_hat, h, opts.null_scale);
  result.stats = refine_tstats(kept, pilot, pi_hat, h, opts.null_scale,
                               opts.jackknife);
  return result;
}

EmpiricalNull empirical_null(const std::vector<double>& zvalues, double coverage) {
  if (zvalues.size() < 100)
    throw domain_error("empirical_null: need at least 100 z-values");
  if (!(coverage > 0.0 && coverage < 1.0))
    throw domain_error("empirical_null: coverage must lie in (0,1)");
  std::vector<double> sorted = zvalues;
  std::sort(sorted.begin(), sorted.end());
  const double tail = 0.5 * (1.0 - coverage);
  const double lo = quantile_sorted(sorted, tail);
  const double hi = quantile_sorted(sorted, 1.0 - tail);
  std::vector<double> central;
  central.reserve(sorted.size());
  for (double z : sorted)
    if (z >= lo && z <= hi) central.push_back(z);
  const double sd = sample_sd(central);
  if (!(sd > 0.0))
    throw domain_error("empirical_null: degenerate central sample");
  const double b = normal_quantile(0.5 * (1.0 + coverage));
  const double factor =
      std::sqrt(1.0 - 2.0 * b * normal_pdf(b) / (2.0 * normal_cdf(b) - 1.0));
  EmpiricalNull out;
  out.sigma0 = sd / factor;
  out.coverage = coverage;
  return out;
}

double univariate_kde(double z, const std::vector<double>& sample, double h) {
  if (sample.empty()) throw domain_error("univariate_kde: empty sample");
  if (!(h > 0.0)) throw domain_error("univariate_kde: bandwidth must be positive");
  double acc = 0.0;
  for (double s : sample) {
    const double d = (z - s) / h;
    const double a = d * d;
    if (a > kernel_cutoff) continue;
    acc += std::exp(-0.5 * a);
  }
  return acc * inv_sqrt_2pi / (h * double(sample.size()));
}

} // namespace hart
