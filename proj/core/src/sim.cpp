#include "hart/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <variant>

#include "hart/errors.hpp"
#include "hart/estimation.hpp"
#include "hart/math_util.hpp"
#include "hart/procedures.hpp"
#include "hart/rng.hpp"

namespace hart {

std::size_t dependence_block_size(std::size_t m) {
  if (m >= 4000) return 4000;
  return std::max<std::size_t>(1, std::min<std::size_t>(m / 5, 4000));
}

namespace {

enum Stream : std::uint64_t { theta_stream = 0, mu_stream = 1, sigma_stream = 2, noise_stream = 3 };

void validate_config(const ScenarioConfig& cfg) {
  if (cfg.m < 1) throw config_error("scenario: m must be at least 1");
  if (cfg.reps < 1) throw config_error("scenario: reps must be at least 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw config_error("scenario: alpha must lie in (0,1)");
  if (!(cfg.model.pi >= 0.0 && cfg.model.pi <= 1.0))
    throw config_error("scenario: pi must lie in [0,1]");
  if (!(cfg.model.null_scale > 0.0))
    throw config_error("scenario: null_scale must be positive");
  if (cfg.replicates_per_unit < 1)
    throw config_error("scenario: replicates_per_unit must be at least 1");
  if (cfg.replicates_per_unit > 1 && cfg.dependence != Dependence::independent)
    throw config_error("scenario: replicates and dependence cannot be combined");
  if (cfg.dependence != Dependence::independent &&
      cfg.model.noise != NoiseKind::gaussian)
    throw config_error("scenario: dependence requires gaussian noise");
  if (!(cfg.lambda > 0.0 && cfg.lambda < 1.0))
    throw config_error("scenario: lambda must lie in (0,1)");
  if (!(cfg.coverage > 0.0 && cfg.coverage < 1.0))
    throw config_error("scenario: coverage must lie in (0,1)");
  std::visit(
      [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UniformScale>) {
          if (!(s.lo >= 0.0) || !(s.hi > s.lo))
            throw config_error("scenario: uniform scale requires 0 <= lo < hi");
        } else if constexpr (std::is_same_v<S, TwoValuesScale>) {
          if (!(s.a > 0.0) || !(s.b > 0.0))
            throw config_error("scenario: two-value scales must be positive");
        } else {
          if (!(s.value > 0.0))
            throw config_error("scenario: fixed scale must be positive");
        }
      },
      cfg.model.scale);
}

void validate_procedure(const ScenarioConfig& cfg, Procedure p) {
  const bool oracle =
      p == Procedure::OR_FULL || p == Procedure::OR_Z || p == Procedure::OR_P;
  if (!oracle) return;
  std::ostringstream msg;
  msg << "procedure " << procedure_name(p);
  if (cfg.model.noise != NoiseKind::gaussian)
    throw config_error(msg.str() + " requires gaussian noise");
  if (!cfg.sigma_known)
    throw config_error(msg.str() + " requires known sigma");
  if (p == Procedure::OR_P) {
    const auto* effect = std::get_if<PointMass>(&cfg.model.effect);
    const auto* scale = std::get_if<UniformScale>(&cfg.model.scale);
    if (!effect || !scale || !(scale->lo > 0.0))
      throw config_error(msg.str() +
                         " requires a point-mass effect and uniform scale with lo > 0");
  }
}

double draw_uniform(std::mt19937_64& eng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(eng);
}

double draw_sigma(const ScaleLaw& law, std::mt19937_64& eng) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UniformScale>) {
          double v = 0.0;
          do {
            v = s.lo + (s.hi - s.lo) * draw_uniform(eng);
          } while (!(v > 0.0));
          return v;
        } else if constexpr (std::is_same_v<S, TwoValuesScale>) {
          return draw_uniform(eng) < 0.5 ? s.a : s.b;
        } else {
          return s.value;
        }
      },
      law);
}

double draw_effect(const EffectLaw& law, std::mt19937_64& eng) {
  return std::visit(
      [&](const auto& e) -> double {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, PointMass>) {
          return e.mu;
        } else if constexpr (std::is_same_v<E, TwoPointMass>) {
          return draw_uniform(eng) < e.w1 ? e.mu1 : e.mu2;
        } else if constexpr (std::is_same_v<E, GaussianMixture>) {
          double u = draw_uniform(eng);
          double total = 0.0;
          for (const auto& c : e.components) total += c.weight;
          double acc = 0.0;
          const GaussianMixtureComponent* pick = &e.components.back();
          for (const auto& c : e.components) {
            acc += c.weight / total;
            if (u < acc) {
              pick = &c;
              break;
            }
          }
          return pick->mean + pick->sd * std::normal_distribution<double>()(eng);
        } else {
          return 0.0;
        }
      },
      law);
}

double draw_noise(NoiseKind kind, std::mt19937_64& eng) {
  if (kind == NoiseKind::student_t5)
    return std::student_t_distribution<double>(5.0)(eng);
  return std::normal_distribution<double>()(eng);
}

// Cholesky factor of the banded correlation with first/second off-diagonals
// 0.5 and 0.4; only three diagonals are nonzero.
struct BandedCholesky {
  std::vector<double> d0, d1, d2;
};

BandedCholesky banded_cholesky(std::size_t n) {
  BandedCholesky L;
  L.d0.assign(n, 0.0);
  L.d1.assign(n, 0.0);
  L.d2.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double l2 = 0.0, l1 = 0.0;
    if (i >= 2) l2 = 0.4 / L.d0[i - 2];
    if (i >= 1) {
      const double cross = (i >= 2) ? l2 * L.d1[i - 1] : 0.0;
      l1 = (0.5 - cross) / L.d0[i - 1];
    }
    const double diag2 = 1.0 - l1 * l1 - l2 * l2;
    if (!(diag2 > 0.0))
      throw estimation_error("banded correlation is not positive definite");
    L.d2[i] = l2;
    L.d1[i] = l1;
    L.d0[i] = std::sqrt(diag2);
  }
  return L;
}

void apply_dependence(std::vector<double>& eps, Dependence dep, std::size_t m) {
  if (dep == Dependence::independent) return;
  const std::size_t block = std::min(dependence_block_size(m), m);
  if (block < 2) return;
  if (dep == Dependence::banded_block) {
    const BandedCholesky L = banded_cholesky(block);
    std::vector<double> out(block);
    for (std::size_t i = 0; i < block; ++i) {
      double v = L.d0[i] * eps[i];
      if (i >= 1) v += L.d1[i] * eps[i - 1];
      if (i >= 2) v += L.d2[i] * eps[i - 2];
      out[i] = v;
    }
    std::copy(out.begin(), out.end(), eps.begin());
  } else {
    const double rho = 0.5;
    const double scale = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 1; i < block; ++i)
      eps[i] = rho * eps[i - 1] + scale * eps[i];
  }
}

} // namespace

std::pair<std::vector<TestItem>, TruthVector> generate_scenario(
    const ScenarioConfig& cfg, std::size_t rep_index) {
  validate_config(cfg);
  const std::size_t m = cfg.m;
  const std::size_t reps_per_unit = cfg.replicates_per_unit;

  std::mt19937_64 theta_eng = make_engine(cfg.seed, rep_index, theta_stream);
  std::mt19937_64 mu_eng = make_engine(cfg.seed, rep_index, mu_stream);
  std::mt19937_64 sigma_eng = make_engine(cfg.seed, rep_index, sigma_stream);
  std::mt19937_64 noise_eng = make_engine(cfg.seed, rep_index, noise_stream);

  TruthVector truth(m, 0);
  std::vector<double> mu(m, 0.0), sigma(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    truth[i] = draw_uniform(theta_eng) < cfg.model.pi ? 1 : 0;
    sigma[i] = draw_sigma(cfg.model.scale, sigma_eng);
    mu[i] = truth[i] ? draw_effect(cfg.model.effect, mu_eng) : 0.0;
  }

  std::vector<TestItem> items(m);
  const double ns = cfg.model.null_scale;
  if (reps_per_unit == 1) {
    std::vector<double> eps(m);
    for (std::size_t i = 0; i < m; ++i) eps[i] = draw_noise(cfg.model.noise, noise_eng);
    apply_dependence(eps, cfg.dependence, m);
    for (std::size_t i = 0; i < m; ++i) {
      const double x = mu[i] + sigma[i] * ns * eps[i];
      items[i].x = x;
      items[i].sigma = sigma[i];
      items[i].z = x / sigma[i];
      items[i].p = pvalue_from_z(items[i].z, 1.0);
    }
  } else {
    const double root_n = std::sqrt(double(reps_per_unit));
    std::vector<double> y(reps_per_unit);
    for (std::size_t i = 0; i < m; ++i) {
      const double per_copy_mean = mu[i] / root_n;
      double mean = 0.0;
      for (std::size_t r = 0; r < reps_per_unit; ++r) {
        y[r] = per_copy_mean + sigma[i] * ns * draw_noise(cfg.model.noise, noise_eng);
        mean += y[r];
      }
      mean /= double(reps_per_unit);
      double ss = 0.0;
      for (std::size_t r = 0; r < reps_per_unit; ++r)
        ss += (y[r] - mean) * (y[r] - mean);
      const double sd = std::sqrt(ss / double(reps_per_unit - 1));
      const double x = root_n * mean;
      const double s = cfg.sigma_known ? sigma[i] : sd;
      items[i].x = x;
      items[i].sigma = s;
      items[i].z = x / s;
      items[i].p = pvalue_from_z(items[i].z, 1.0);
    }
  }
  return {std::move(items), std::move(truth)};
}

double fdp(const DecisionSet& decisions, const TruthVector& truth) {
  if (decisions.reject.size() != truth.size())
    throw domain_error("fdp: decision/truth length mismatch");
  std::size_t rejected = 0, false_rejected = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (decisions.reject[i]) {
      ++rejected;
      if (!truth[i]) ++false_rejected;
    }
  }
  return double(false_rejected) / double(std::max<std::size_t>(rejected, 1));
}

double average_power(const DecisionSet& decisions, const TruthVector& truth) {
  if (decisions.reject.size() != truth.size())
    throw domain_error("average_power: decision/truth length mismatch");
  std::size_t alternatives = 0, discovered = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      ++alternatives;
      if (decisions.reject[i]) ++discovered;
    }
  }
  return double(discovered) / double(std::max<std::size_t>(alternatives, 1));
}

RunSummary run_experiment(const ScenarioConfig& cfg) {
  validate_config(cfg);
  if (cfg.procedures.empty())
    throw config_error("run_experiment: no procedures requested");
  for (Procedure p : cfg.procedures) validate_procedure(cfg, p);

  RunSummary summary;
  summary.reps.reserve(cfg.reps * cfg.procedures.size());
  if (cfg.dependence != Dependence::independent && cfg.m < 4000) {
    std::ostringstream msg;
    msg << "dependence block reduced to " << dependence_block_size(cfg.m)
        << " of " << cfg.m << " items";
    summary.diagnostics.push_back(msg.str());
  }

  struct Accumulator {
    std::vector<double> fdps, aps;
    std::size_t total_rejections = 0;
    std::size_t total_false = 0;
  };
  std::vector<Accumulator> acc(cfg.procedures.size());

  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    auto [items, truth] = generate_scenario(cfg, rep);
    std::vector<double> z(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) z[i] = items[i].z;

    double sigma0 = 1.0;
    if (cfg.null_mode == NullMode::empirical)
      sigma0 = empirical_null(z, cfg.coverage).sigma0;

    std::vector<double> pvals(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
      pvals[i] = pvalue_from_z(z[i], sigma0);

    for (std::size_t pi = 0; pi < cfg.procedures.size(); ++pi) {
      const Procedure proc = cfg.procedures[pi];
      DecisionSet dec;
      switch (proc) {
        case Procedure::HART: {
          EstimateOptions opts;
          opts.lambda = cfg.lambda;
          opts.jackknife = cfg.jackknife;
          opts.null_scale = sigma0;
          opts.sigma_filter = cfg.sigma_filter;
          dec = hart_procedure(items, cfg.alpha, opts);
          break;
        }
        case Procedure::BH:
          dec = bh(pvals, cfg.alpha);
          break;
        case Procedure::AZ: {
          const double pi_hat = storey_pi(pvals, cfg.lambda);
          const double h = silverman_h(z);
          dec = az(z, cfg.alpha, pi_hat, sigma0, h);
          break;
        }
        case Procedure::OR_FULL:
          dec = oracle_full(items, cfg.model, cfg.alpha);
          break;
        case Procedure::OR_Z:
          dec = oracle_z(z, cfg.model, cfg.alpha);
          break;
        case Procedure::OR_P:
          dec = oracle_p(z, cfg.model, cfg.alpha);
          break;
      }
      RepRecord rec;
      rec.rep = rep;
      rec.procedure = proc;
      rec.fdp = fdp(dec, truth);
      rec.ap = average_power(dec, truth);
      rec.rejections = 0;
      rec.false_rejections = 0;
      for (std::size_t i = 0; i < truth.size(); ++i) {
        if (dec.reject[i]) {
          ++rec.rejections;
          if (!truth[i]) ++rec.false_rejections;
        }
      }
      summary.reps.push_back(rec);
      acc[pi].fdps.push_back(rec.fdp);
      acc[pi].aps.push_back(rec.ap);
      acc[pi].total_rejections += rec.rejections;
      acc[pi].total_false += rec.false_rejections;
    }
  }

  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
  };
  auto se_of = [&](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / double(v.size() - 1)) / std::sqrt(double(v.size()));
  };

  for (std::size_t pi = 0; pi < cfg.procedures.size(); ++pi) {
    ProcedureSummary ps;
    ps.procedure = cfg.procedures[pi];
    ps.fdr = mean_of(acc[pi].fdps);
    ps.fdr_se = se_of(acc[pi].fdps);
    ps.ap = mean_of(acc[pi].aps);
    ps.ap_se = se_of(acc[pi].aps);
    ps.mean_rejections = double(acc[pi].total_rejections) / double(cfg.reps);
    ps.mfdr = acc[pi].total_rejections > 0
                  ? double(acc[pi].total_false) / double(acc[pi].total_rejections)
                  : 0.0;
    summary.procedures.push_back(ps);
  }
  return summary;
}

} // namespace hart
