#include "doctest.h"

#include <cmath>

#include "hart/errors.hpp"
#include "hart/math_util.hpp"
#include "hart/model.hpp"

using namespace hart;

TEST_CASE("null density") {
  CHECK(null_density(0.0, 1.0, 1.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(null_density(0.0, 2.0, 1.0) == doctest::Approx(0.19947114020071635).epsilon(1e-14));
  CHECK(null_density(2.0, 1.3, 1.0) == doctest::Approx(0.09397422369424545).epsilon(1e-12));
  // The null scale multiplies sigma.
  CHECK(null_density(2.0, 1.0, 1.3) == doctest::Approx(null_density(2.0, 1.3, 1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(null_density(0.0, 0.0, 1.0), domain_error);
  CHECK_THROWS_AS(null_density(0.0, -1.0, 1.0), domain_error);
  CHECK_THROWS_AS(null_density(0.0, 1.0, 0.0), domain_error);
}

TEST_CASE("alternative density under each effect law") {
  // Point mass mu=2: N(2, sigma^2).
  CHECK(alt_density(2.0, 0.5, PointMass{2.0}) == doctest::Approx(0.7978845608028654).epsilon(1e-12));
  CHECK(alt_density(0.0, 1.0, PointMass{2.0}) == doctest::Approx(0.05399096651318806).epsilon(1e-12));

  // Gaussian mixture convolves component variance with noise variance.
  GaussianMixture gm{{{0.5, -1.5, 0.1}, {0.5, 2.0, 0.1}}};
  CHECK(alt_density(0.0, 1.0, gm) == doctest::Approx(0.09255789018129457).epsilon(1e-12));
  // Cross-check against quadrature over the effect law.
  auto conv = [&](double x, double s) {
    auto f = [&](double mu) {
      double g = 0.5 * normal_pdf_scaled(mu + 1.5, 0.1) + 0.5 * normal_pdf_scaled(mu - 2.0, 0.1);
      return g * normal_pdf_scaled(x - mu, s);
    };
    return gauss_kronrod_15(f, -4.0, 4.5);
  };
  for (double x : {-1.0, 0.3, 2.2}) {
    CHECK(alt_density(x, 0.8, gm) == doctest::Approx(conv(x, 0.8)).epsilon(1e-7));
  }

  // Two-point law is the weighted sum of shifted normals.
  TwoPointMass tp{-1.0, 3.0, 0.25};
  double direct = 0.25 * normal_pdf_scaled(0.5 + 1.0, 1.2) + 0.75 * normal_pdf_scaled(0.5 - 3.0, 1.2);
  CHECK(alt_density(0.5, 1.2, tp) == doctest::Approx(direct).epsilon(1e-13));

  CHECK_THROWS_AS(alt_density(0.0, 1.0, ZeroEffect{}), domain_error);
  CHECK_THROWS_AS(alt_density(0.0, 0.0, PointMass{2.0}), domain_error);
}

TEST_CASE("mixture density and pinned example") {
  MixtureModel m;
  m.pi = 0.1;
  m.effect = PointMass{2.0};
  m.scale = UniformScale{0.5, 4.0};
  CHECK(mixture_density(2.0, 0.5, m) == doctest::Approx(0.08002935048666335).epsilon(1e-12));

  MixtureModel null_only = m;
  null_only.pi = 0.0;
  CHECK(mixture_density(1.3, 0.7, null_only) ==
        doctest::Approx(null_density(1.3, 0.7, 1.0)).epsilon(1e-14));
  MixtureModel alt_only = m;
  alt_only.pi = 1.0;
  CHECK(mixture_density(2.0, 0.5, alt_only) == doctest::Approx(0.7978845608028654).epsilon(1e-12));

  // Mixture dominates its null component and integrates to one in x.
  for (double x : {-2.0, 0.0, 1.0, 3.5}) {
    CHECK(mixture_density(x, 1.5, m) >= (1.0 - m.pi) * null_density(x, 1.5, 1.0));
  }
  auto dens = [&](double x) { return mixture_density(x, 2.0, m); };
  CHECK(gauss_kronrod_15(dens, -30.0, 30.0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("posterior null probability given (x, sigma)") {
  MixtureModel m;
  m.pi = 0.1;
  m.effect = PointMass{2.0};
  m.scale = UniformScale{0.5, 4.0};

  CHECK(true_lfdr_full(2.0, 0.5, m) == doctest::Approx(0.00301007573986169).epsilon(1e-10));
  // Where null and alternative densities coincide (x = mu/2), T = 1 - pi.
  CHECK(true_lfdr_full(1.0, 1.0, m) == doctest::Approx(0.9).epsilon(1e-13));
  CHECK(true_lfdr_full(1.0, 2.7, m) == doctest::Approx(0.9).epsilon(1e-13));

  MixtureModel null_only = m;
  null_only.pi = 0.0;
  CHECK(true_lfdr_full(3.0, 1.0, null_only) == doctest::Approx(1.0).epsilon(1e-15));

  // Bounds hold across a grid.
  for (double x = -6.0; x <= 6.0; x += 0.75) {
    for (double s : {0.6, 1.0, 2.5}) {
      double t = true_lfdr_full(x, s, m);
      CHECK(t >= 0.0);
      CHECK(t <= 1.0);
    }
  }

  // Deep-tail underflow reports 1 with the flag set.
  bool uf = false;
  double t = true_lfdr_full(1e6, 1.0, m, &uf);
  CHECK(t == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(uf);
}

TEST_CASE("posterior null probability is location-scale equivariant") {
  GaussianMixture gm{{{0.4, -1.0, 0.3}, {0.6, 1.8, 0.5}}};
  MixtureModel m;
  m.pi = 0.2;
  m.effect = gm;
  m.scale = UniformScale{0.5, 4.0};

  const double c = 2.0;
  GaussianMixture gm2{{{0.4, -2.0, 0.6}, {0.6, 3.6, 1.0}}};
  MixtureModel m2 = m;
  m2.effect = gm2;
  for (double x : {-1.5, 0.2, 2.4}) {
    for (double s : {0.7, 1.9}) {
      CHECK(true_lfdr_full(c * x, c * s, m2) ==
            doctest::Approx(true_lfdr_full(x, s, m)).epsilon(1e-12));
    }
  }
}

TEST_CASE("marginal z density") {
  MixtureModel m;
  m.pi = 0.1;
  m.effect = PointMass{2.0};
  m.scale = UniformScale{0.5, 4.0};

  CHECK(marginal_z_density(0.0, m) == doctest::Approx(0.3816532711320325).epsilon(1e-7));

  MixtureModel null_only = m;
  null_only.pi = 0.0;
  for (double z : {-2.0, 0.0, 1.3}) {
    CHECK(marginal_z_density(z, null_only) == doctest::Approx(normal_pdf(z)).epsilon(1e-12));
  }

  // Zero alternative mean makes z-marginal exactly standard normal.
  MixtureModel central = m;
  central.effect = PointMass{0.0};
  CHECK(marginal_z_density(1.1, central) == doctest::Approx(normal_pdf(1.1)).epsilon(1e-7));

  // Fixed scale collapses the scale integral.
  MixtureModel fixed = m;
  fixed.scale = FixedScale{1.7};
  double direct = 0.9 * normal_pdf(1.5) + 0.1 * normal_pdf(1.5 - 2.0 / 1.7);
  CHECK(marginal_z_density(1.5, fixed) == doctest::Approx(direct).epsilon(1e-12));

  // Two-values scale is the even mixture of the two conditionals.
  MixtureModel tv = m;
  tv.scale = TwoValuesScale{1.0, 3.0};
  double d2 = 0.9 * normal_pdf(1.5) +
              0.1 * (0.5 * normal_pdf(1.5 - 2.0) + 0.5 * normal_pdf(1.5 - 2.0 / 3.0));
  CHECK(marginal_z_density(1.5, tv) == doctest::Approx(d2).epsilon(1e-12));

  auto dens = [&](double z) { return marginal_z_density(z, m); };
  CHECK(gauss_legendre_256(dens, -12.0, 12.0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("z-scale posterior null probability") {
  MixtureModel m;
  m.pi = 0.1;
  m.effect = PointMass{2.0};
  m.scale = UniformScale{0.5, 4.0};

  CHECK(true_lfdr_z(3.13, m) == doctest::Approx(0.23818817635628495).epsilon(1e-5));

  MixtureModel null_only = m;
  null_only.pi = 0.0;
  CHECK(true_lfdr_z(2.0, null_only) == doctest::Approx(1.0).epsilon(1e-15));

  // Zero alternative mean: f1(z) = f0(z), so the posterior is 1 - pi.
  MixtureModel central = m;
  central.effect = PointMass{0.0};
  CHECK(true_lfdr_z(0.8, central) == doctest::Approx(0.9).epsilon(1e-7));

  bool uf = false;
  CHECK(true_lfdr_z(1e6, m, &uf) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(uf);
}
