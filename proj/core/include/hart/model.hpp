#pragma once

#include <cstdint>
#include <variant>
#include <vector>

namespace hart {

/// One hypothesis: observed effect x, noise level sigma, derived z = x/sigma
/// and two-sided p-value.
struct TestItem {
  double x = 0.0;
  double sigma = 1.0;
  double z = 0.0;
  double p = 1.0;
};

/// theta_i = 1 iff hypothesis i is non-null.
using TruthVector = std::vector<std::uint8_t>;

// Effect-size laws for the non-null mean mu.
struct PointMass {
  double mu;
};
struct TwoPointMass {
  double mu1;
  double mu2;
  double w1; // probability of mu1
};
struct GaussianMixtureComponent {
  double weight;
  double mean;
  double sd;
};
struct GaussianMixture {
  std::vector<GaussianMixtureComponent> components;
};
struct ZeroEffect {};
using EffectLaw = std::variant<PointMass, TwoPointMass, GaussianMixture, ZeroEffect>;

// Noise-scale laws for sigma.
struct UniformScale {
  double lo; // >= 0; the generator redraws the measure-zero sigma <= 0 event
  double hi;
};
struct TwoValuesScale {
  double a;
  double b;
};
struct FixedScale {
  double value;
};
using ScaleLaw = std::variant<UniformScale, TwoValuesScale, FixedScale>;

enum class NoiseKind { gaussian, student_t5 };

/// Two-group mixture over (mu, sigma): with probability pi the item carries a
/// non-null mean drawn from the effect law; noise is sigma * null_scale *
/// (standardized noise).
struct MixtureModel {
  double pi = 0.1;
  EffectLaw effect = PointMass{2.0};
  ScaleLaw scale = UniformScale{0.0, 4.0};
  NoiseKind noise = NoiseKind::gaussian;
  double null_scale = 1.0;
};

/// f_{0,sigma}(x): density of N(0, (sigma*null_scale)^2) at x.
double null_density(double x, double sigma, double null_scale);

/// f_{1,sigma}(x): effect-law-averaged Gaussian convolution. Zero effect law
/// is a domain error (no alternative defined).
double alt_density(double x, double sigma, const EffectLaw& effect,
                   double null_scale = 1.0);

/// f_sigma(x) = (1-pi) f_0 + pi f_1.
double mixture_density(double x, double sigma, const MixtureModel& model);

/// T(x, sigma) = (1-pi) f_{0,sigma}(x) / f_sigma(x), clamped to [0,1].
/// If f_sigma underflows, returns 1 and sets *underflow when provided.
double true_lfdr_full(double x, double sigma, const MixtureModel& model,
                      bool* underflow = nullptr);

/// Marginal z-value density f(z) = (1-pi) f_0(z) + pi f_1(z), integrating
/// the conditional z-density over the scale law (adaptive quadrature for
/// uniform scale). Requires bounded scale support.
double marginal_z_density(double z, const MixtureModel& model);

/// Lfdr(z) = (1-pi) f_0(z) / f(z), clamped to [0,1]; underflow handled as in
/// true_lfdr_full.
double true_lfdr_z(double z, const MixtureModel& model, bool* underflow = nullptr);

} // namespace hart
