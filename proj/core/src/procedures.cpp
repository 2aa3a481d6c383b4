#include "hart/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hart/errors.hpp"
#include "hart/estimation.hpp"
#include "hart/math_util.hpp"
#include "hart/model.hpp"
#include "hart/oracle_calc.hpp"
#include "hart/parallel.hpp"

namespace hart {

std::string procedure_name(Procedure p) {
  switch (p) {
    case Procedure::HART: return "hart";
    case Procedure::BH: return "bh";
    case Procedure::AZ: return "az";
    case Procedure::OR_FULL: return "or-full";
    case Procedure::OR_Z: return "or-z";
    case Procedure::OR_P: return "or-p";
  }
  return "unknown";
}

namespace {

void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw domain_error(std::string(who) + ": alpha must lie in (0,1)");
}

// Indices sorted ascending by (value, original index); the index tiebreak makes
// the ordering deterministic under ties.
std::vector<std::size_t> sorted_order(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (v[a] != v[b]) return v[a] < v[b];
    return a < b;
  });
  return order;
}

} // namespace

DecisionSet step_up(const std::vector<double>& tstats, double alpha, Procedure tag) {
  check_alpha(alpha, "step_up");
  for (double t : tstats)
    if (!(t >= 0.0 && t <= 1.0))
      throw domain_error("step_up: statistics must lie in [0,1]");
  const std::size_t m = tstats.size();
  DecisionSet out;
  out.procedure = tag;
  out.alpha = alpha;
  out.reject.assign(m, 0);
  out.k = 0;
  out.threshold = std::numeric_limits<double>::quiet_NaN();
  if (m == 0) return out;
  const std::vector<std::size_t> order = sorted_order(tstats);
  double running = 0.0;
  std::size_t k = 0;
  for (std::size_t j = 0; j < m; ++j) {
    running += tstats[order[j]];
    if (running <= alpha * double(j + 1)) k = j + 1;
  }
  out.k = k;
  if (k > 0) {
    out.threshold = tstats[order[k - 1]];
    for (std::size_t j = 0; j < k; ++j) out.reject[order[j]] = 1;
  }
  return out;
}

DecisionSet bh(const std::vector<double>& pvalues, double alpha) {
  check_alpha(alpha, "bh");
  for (double p : pvalues)
    if (!(p >= 0.0 && p <= 1.0))
      throw domain_error("bh: p-values must lie in [0,1]");
  const std::size_t m = pvalues.size();
  DecisionSet out;
  out.procedure = Procedure::BH;
  out.alpha = alpha;
  out.reject.assign(m, 0);
  out.k = 0;
  out.threshold = std::numeric_limits<double>::quiet_NaN();
  if (m == 0) return out;
  const std::vector<std::size_t> order = sorted_order(pvalues);
  std::size_t k = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (pvalues[order[j]] <= alpha * double(j + 1) / double(m)) k = j + 1;
  }
  out.k = k;
  if (k > 0) {
    out.threshold = pvalues[order[k - 1]];
    for (std::size_t j = 0; j < k; ++j) out.reject[order[j]] = 1;
  }
  return out;
}

DecisionSet az(const std::vector<double>& zvalues, double alpha, double pi_hat,
               double sigma0, double h) {
  check_alpha(alpha, "az");
  if (zvalues.size() < 10) throw domain_error("az: need at least 10 z-values");
  if (!(sigma0 > 0.0)) throw domain_error("az: sigma0 must be positive");
  if (!(h > 0.0)) throw domain_error("az: bandwidth must be positive");
  if (!(pi_hat >= 0.0 && pi_hat <= 1.0))
    throw domain_error("az: pi_hat must lie in [0,1]");
  const std::vector<double> fz = detail::univariate_kde_self_eval(zvalues, h);
  std::vector<double> lfdr(zvalues.size());
  for (std::size_t i = 0; i < zvalues.size(); ++i) {
    const double f0 = normal_pdf_scaled(zvalues[i], sigma0);
    const double den = std::max(fz[i], density_floor);
    lfdr[i] = std::min((1.0 - pi_hat) * f0 / den, 1.0);
  }
  return step_up(lfdr, alpha, Procedure::AZ);
}

DecisionSet hart_procedure(const std::vector<TestItem>& data, double alpha,
                           const EstimateOptions& opts) {
  check_alpha(alpha, "hart_procedure");
  const EstimateResult est = estimate_tstats(data, opts);
  const DecisionSet inner = step_up(est.stats.t, alpha, Procedure::HART);
  DecisionSet out;
  out.procedure = Procedure::HART;
  out.alpha = alpha;
  out.k = inner.k;
  out.threshold = inner.threshold;
  out.reject.assign(data.size(), 0);
  for (std::size_t j = 0; j < est.retained.size(); ++j)
    out.reject[est.retained[j]] = inner.reject[j];
  return out;
}

DecisionSet oracle_full(const std::vector<TestItem>& data, const MixtureModel& model,
                        double alpha) {
  check_alpha(alpha, "oracle_full");
  if (model.noise != NoiseKind::gaussian)
    throw domain_error("oracle_full: requires gaussian noise");
  std::vector<double> t(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    t[i] = true_lfdr_full(data[i].x, data[i].sigma, model);
  });
  return step_up(t, alpha, Procedure::OR_FULL);
}

DecisionSet oracle_z(const std::vector<double>& zvalues, const MixtureModel& model,
                     double alpha) {
  check_alpha(alpha, "oracle_z");
  if (model.noise != NoiseKind::gaussian)
    throw domain_error("oracle_z: requires gaussian noise");
  std::vector<double> t(zvalues.size());
  parallel_for(zvalues.size(), [&](std::size_t i) {
    t[i] = true_lfdr_z(zvalues[i], model);
  });
  return step_up(t, alpha, Procedure::OR_Z);
}

DecisionSet oracle_p(const std::vector<double>& zvalues, const MixtureModel& model,
                     double alpha) {
  check_alpha(alpha, "oracle_p");
  if (model.noise != NoiseKind::gaussian)
    throw domain_error("oracle_p: requires gaussian noise");
  const auto* effect = std::get_if<PointMass>(&model.effect);
  const auto* scale = std::get_if<UniformScale>(&model.scale);
  if (!effect || !scale || !(scale->lo > 0.0))
    throw domain_error(
        "oracle_p: requires a point-mass effect and uniform scale with lo > 0");
  ToyModel toy;
  toy.pi = model.pi;
  toy.mu_a = effect->mu;
  toy.sigma_lo = scale->lo;
  toy.sigma_hi = scale->hi;
  toy.alpha = alpha;
  const double t_p = toy_threshold_p(toy);
  DecisionSet out;
  out.procedure = Procedure::OR_P;
  out.alpha = alpha;
  out.threshold = t_p;
  out.reject.assign(zvalues.size(), 0);
  out.k = 0;
  for (std::size_t i = 0; i < zvalues.size(); ++i) {
    if (std::abs(zvalues[i]) >= t_p) {
      out.reject[i] = 1;
      ++out.k;
    }
  }
  return out;
}

double pvalue_from_z(double z, double sigma0) {
  if (!(sigma0 > 0.0)) throw domain_error("pvalue_from_z: sigma0 must be positive");
  return std::erfc(std::abs(z) / (sigma0 * sqrt2));
}

} // namespace hart
