#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "hart/errors.hpp"
#include "hart/model.hpp"
#include "hart/oracle_calc.hpp"
#include "hart/procedures.hpp"
#include "hart/sim.hpp"

using namespace hart;

namespace {

// Exhaustive reference: the largest k whose k smallest statistics average at
// most alpha, with ties broken by original index.
std::size_t brute_step_up_k(std::vector<double> t, double alpha) {
  std::sort(t.begin(), t.end());
  std::size_t best = 0;
  double sum = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    sum += t[j];
    if (sum <= alpha * double(j + 1)) best = j + 1;
  }
  return best;
}

std::size_t brute_bh_k(std::vector<double> p, double alpha) {
  std::sort(p.begin(), p.end());
  const double m = double(p.size());
  std::size_t best = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] <= alpha * double(j + 1) / m) best = j + 1;
  }
  return best;
}

std::vector<double> random_stats(std::mt19937_64& eng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> grid(0, 10);
  std::bernoulli_distribution tie(0.5);
  std::vector<double> v(n);
  for (auto& x : v) x = tie(eng) ? 0.1 * grid(eng) : u(eng);
  return v;
}

} // namespace

TEST_CASE("step-up rule on posterior statistics") {
  DecisionSet d = step_up({0.01, 0.04, 0.10, 0.30}, 0.1);
  CHECK(d.k == 3);
  CHECK(d.threshold == doctest::Approx(0.10).epsilon(1e-14));
  CHECK(d.reject == std::vector<std::uint8_t>{1, 1, 1, 0});

  DecisionSet none = step_up({0.5, 0.5, 0.5}, 0.1);
  CHECK(none.k == 0);
  CHECK(std::isnan(none.threshold));
  CHECK(none.reject == std::vector<std::uint8_t>{0, 0, 0});

  DecisionSet single = step_up({0.2}, 0.2);
  CHECK(single.k == 1);

  DecisionSet empty = step_up({}, 0.1);
  CHECK(empty.k == 0);
  CHECK(empty.reject.empty());

  CHECK_THROWS_AS(step_up({-0.1, 0.5}, 0.1), domain_error);
  CHECK_THROWS_AS(step_up({0.5, 1.1}, 0.1), domain_error);
  CHECK_THROWS_AS(step_up({0.5}, 0.0), domain_error);
  CHECK_THROWS_AS(step_up({0.5}, 1.0), domain_error);
}

TEST_CASE("step-up agrees with the exhaustive rule and is maximal") {
  std::mt19937_64 eng(2024);
  std::uniform_int_distribution<std::size_t> nsize(1, 12);
  std::uniform_real_distribution<double> ua(0.02, 0.5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = nsize(eng);
    const double alpha = ua(eng);
    std::vector<double> t = random_stats(eng, n);
    DecisionSet d = step_up(t, alpha);
    CHECK(d.k == brute_step_up_k(t, alpha));
    CHECK(std::size_t(std::count(d.reject.begin(), d.reject.end(), 1)) == d.k);

    // Rejected statistics average at most alpha; adding the next smallest
    // would break the constraint.
    std::vector<double> sorted = t;
    std::sort(sorted.begin(), sorted.end());
    if (d.k > 0) {
      const double mean_rej =
          std::accumulate(sorted.begin(), sorted.begin() + d.k, 0.0) / double(d.k);
      CHECK(mean_rej <= alpha + 1e-12);
    }
    if (d.k < n) {
      const double mean_next =
          std::accumulate(sorted.begin(), sorted.begin() + d.k + 1, 0.0) / double(d.k + 1);
      CHECK(mean_next > alpha);
    }

    // Lowering any one statistic cannot shrink the rejection set size.
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<double> lowered = t;
    lowered[pick(eng)] *= 0.5;
    CHECK(step_up(lowered, alpha).k >= d.k);
  }
}

TEST_CASE("Benjamini-Hochberg rule") {
  DecisionSet d = bh({0.01, 0.02, 0.04, 0.9}, 0.1);
  CHECK(d.k == 3);
  CHECK(d.threshold == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(d.reject == std::vector<std::uint8_t>{1, 1, 1, 0});

  DecisionSet none = bh(std::vector<double>(6, 1.0), 0.1);
  CHECK(none.k == 0);

  DecisionSet single = bh({0.1}, 0.1);
  CHECK(single.k == 1);

  CHECK_THROWS_AS(bh({0.5, 1.5}, 0.1), domain_error);
  CHECK_THROWS_AS(bh({-0.1}, 0.1), domain_error);

  std::mt19937_64 eng(555);
  std::uniform_int_distribution<std::size_t> nsize(1, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = nsize(eng);
    std::vector<double> p = random_stats(eng, n);
    DecisionSet dd = bh(p, 0.1);
    CHECK(dd.k == brute_bh_k(p, 0.1));
    CHECK(std::size_t(std::count(dd.reject.begin(), dd.reject.end(), 1)) == dd.k);
  }
}

TEST_CASE("adaptive z-value rule stays quiet under the null") {
  std::size_t all_zero = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> z(2000), p(2000);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = nd(eng);
      p[i] = pvalue_from_z(z[i], 1.0);
    }
    const double pi_hat = storey_pi(p, 0.5);
    DecisionSet d = az(z, 0.1, pi_hat, 1.0, silverman_h(z));
    if (d.k == 0) ++all_zero;
  }
  CHECK(all_zero >= 18);

  CHECK_THROWS_AS(az(std::vector<double>(5, 0.0), 0.1, 0.1, 1.0, 0.3), domain_error);
}

TEST_CASE("oracle rules") {
  MixtureModel toy;
  toy.pi = 0.1;
  toy.effect = PointMass{2.0};
  toy.scale = UniformScale{0.5, 4.0};

  ScenarioConfig cfg;
  cfg.model = toy;
  cfg.m = 50000;
  cfg.seed = 9;
  auto [items, truth] = generate_scenario(cfg, 0);
  std::vector<double> z(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) z[i] = items[i].z;

  ToyModel tm;
  tm.pi = 0.1;
  tm.mu_a = 2.0;
  tm.sigma_lo = 0.5;
  tm.sigma_hi = 4.0;
  tm.alpha = 0.1;

  // Realized one-sided z cutoff of the z-scale oracle approaches its
  // analytic threshold.
  DecisionSet dz = oracle_z(z, toy, 0.1);
  REQUIRE(dz.k > 0);
  double min_rejected = 1e9;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (dz.reject[i]) min_rejected = std::min(min_rejected, z[i]);
  }
  CHECK(min_rejected == doctest::Approx(toy_threshold_z(tm)).epsilon(0.03 / 3.1));

  // The p-value oracle is the fixed two-sided rule at its analytic cutoff.
  DecisionSet dp = oracle_p(z, toy, 0.1);
  const double t_p = toy_threshold_p(tm);
  CHECK(dp.threshold == doctest::Approx(t_p).epsilon(1e-12));
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(bool(dp.reject[i]) == (std::abs(z[i]) >= t_p));
  }

  // Full oracle rejects nothing when nothing is non-null.
  MixtureModel null_model = toy;
  null_model.pi = 0.0;
  std::vector<TestItem> few(items.begin(), items.begin() + 200);
  DecisionSet df = oracle_full(few, null_model, 0.1);
  CHECK(df.k == 0);

  MixtureModel heavy = toy;
  heavy.noise = NoiseKind::student_t5;
  CHECK_THROWS_AS(oracle_full(few, heavy, 0.1), domain_error);
  CHECK_THROWS_AS(oracle_z(z, heavy, 0.1), domain_error);

  MixtureModel wrong_scale = toy;
  wrong_scale.scale = TwoValuesScale{1.0, 3.0};
  CHECK_THROWS_AS(oracle_p(z, wrong_scale, 0.1), domain_error);
}

TEST_CASE("marginal FDR of fixed posterior cutoffs is nondecreasing") {
  MixtureModel toy;
  toy.pi = 0.1;
  toy.effect = PointMass{2.0};
  toy.scale = UniformScale{0.0, 4.0};
  ScenarioConfig cfg;
  cfg.model = toy;
  cfg.m = 500;

  const std::vector<double> cuts{0.05, 0.15, 0.30};
  std::vector<double> false_sum(cuts.size(), 0.0), rej_sum(cuts.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    cfg.seed = seed;
    auto [items, truth] = generate_scenario(cfg, 0);
    for (std::size_t i = 0; i < items.size(); ++i) {
      const double t = true_lfdr_full(items[i].x, items[i].sigma, toy);
      for (std::size_t c = 0; c < cuts.size(); ++c) {
        if (t <= cuts[c]) {
          rej_sum[c] += 1.0;
          if (!truth[i]) false_sum[c] += 1.0;
        }
      }
    }
  }
  std::vector<double> mfdr(cuts.size());
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    REQUIRE(rej_sum[c] > 0.0);
    mfdr[c] = false_sum[c] / rej_sum[c];
  }
  CHECK(mfdr[0] <= mfdr[1] + 1e-12);
  CHECK(mfdr[1] <= mfdr[2] + 1e-12);
}

TEST_CASE("data-driven procedure bookkeeping") {
  ScenarioConfig cfg;
  cfg.model.pi = 0.1;
  cfg.model.effect = PointMass{3.0};
  cfg.model.scale = UniformScale{0.5, 3.0};
  cfg.m = 500;
  cfg.seed = 1;
  auto [items, truth] = generate_scenario(cfg, 0);

  DecisionSet d1 = hart_procedure(items, 0.1);
  DecisionSet d2 = hart_procedure(items, 0.1);
  CHECK(d1.reject == d2.reject);
  CHECK(d1.k == d2.k);
  CHECK(std::size_t(std::count(d1.reject.begin(), d1.reject.end(), 1)) == d1.k);
  CHECK(d1.procedure == Procedure::HART);

  // Items dropped by the sigma filter are never rejected.
  EstimateOptions opts;
  opts.sigma_filter = 1.0;
  DecisionSet df = hart_procedure(items, 0.1, opts);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].sigma < 1.0) CHECK(df.reject[i] == 0);
  }
}

TEST_CASE("two-sided p-values from z") {
  CHECK(pvalue_from_z(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pvalue_from_z(1.959964, 1.0) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(pvalue_from_z(3.43, 1.0) == doctest::Approx(0.0006035812492172747).epsilon(1e-9));
  CHECK(pvalue_from_z(-1.959964, 1.0) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(pvalue_from_z(2.0, 2.0) == doctest::Approx(pvalue_from_z(1.0, 1.0)).epsilon(1e-13));
  CHECK_THROWS_AS(pvalue_from_z(1.0, 0.0), domain_error);
}

TEST_CASE("procedure names") {
  CHECK(procedure_name(Procedure::HART) == "hart");
  CHECK(procedure_name(Procedure::BH) == "bh");
  CHECK(procedure_name(Procedure::AZ) == "az");
  CHECK(procedure_name(Procedure::OR_FULL) == "or-full");
  CHECK(procedure_name(Procedure::OR_Z) == "or-z");
  CHECK(procedure_name(Procedure::OR_P) == "or-p");
}
