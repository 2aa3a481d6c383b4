#include "hart/model.hpp"

#include <algorithm>
#include <cmath>

#include "hart/errors.hpp"
#include "hart/math_util.hpp"

namespace hart {

namespace {

double floored(double v) { return std::max(v, density_floor); }

/// Conditional density of z = x/sigma given sigma: the effect contributes a
/// mean shift mu/sigma on the z scale, Gaussian-mixture sds shrink by sigma.
double alt_z_density_given_sigma(double z, double sigma, const EffectLaw& effect,
                                 double null_scale) {
  struct Visitor {
    double z, sigma, ns;
    double operator()(const PointMass& e) const {
      return normal_pdf_scaled(z - e.mu / sigma, ns);
    }
    double operator()(const TwoPointMass& e) const {
      return e.w1 * normal_pdf_scaled(z - e.mu1 / sigma, ns) +
             (1.0 - e.w1) * normal_pdf_scaled(z - e.mu2 / sigma, ns);
    }
    double operator()(const GaussianMixture& e) const {
      double f = 0.0;
      for (const auto& c : e.components) {
        const double s = std::sqrt(ns * ns + (c.sd / sigma) * (c.sd / sigma));
        f += c.weight * normal_pdf_scaled(z - c.mean / sigma, s);
      }
      return f;
    }
    double operator()(const ZeroEffect&) const {
      return normal_pdf_scaled(z, ns);
    }
  };
  return std::visit(Visitor{z, sigma, null_scale}, effect);
}

} // namespace

double null_density(double x, double sigma, double null_scale) {
  if (!(sigma > 0.0) || !(null_scale > 0.0))
    throw domain_error("null_density: sigma and null_scale must be positive");
  return floored(normal_pdf_scaled(x, sigma * null_scale));
}

double alt_density(double x, double sigma, const EffectLaw& effect,
                   double null_scale) {
  if (!(sigma > 0.0))
    throw domain_error("alt_density: sigma must be positive");
  if (std::holds_alternative<ZeroEffect>(effect))
    throw domain_error("alt_density: zero effect law has no alternative density");
  const double s = sigma * null_scale;
  struct Visitor {
    double x, s;
    double operator()(const PointMass& e) const {
      return normal_pdf_scaled(x - e.mu, s);
    }
    double operator()(const TwoPointMass& e) const {
      return e.w1 * normal_pdf_scaled(x - e.mu1, s) +
             (1.0 - e.w1) * normal_pdf_scaled(x - e.mu2, s);
    }
    double operator()(const GaussianMixture& e) const {
      double f = 0.0;
      for (const auto& c : e.components) {
        const double sc = std::sqrt(s * s + c.sd * c.sd);
        f += c.weight * normal_pdf_scaled(x - c.mean, sc);
      }
      return f;
    }
    double operator()(const ZeroEffect&) const { return 0.0; }
  };
  return floored(std::visit(Visitor{x, s}, effect));
}

double mixture_density(double x, double sigma, const MixtureModel& model) {
  const double f0 = null_density(x, sigma, model.null_scale);
  if (model.pi == 0.0) return f0;
  const double f1 = alt_density(x, sigma, model.effect, model.null_scale);
  return floored((1.0 - model.pi) * f0 + model.pi * f1);
}

double true_lfdr_full(double x, double sigma, const MixtureModel& model,
                      bool* underflow) {
  if (underflow) *underflow = false;
  const double f0 = normal_pdf_scaled(x, sigma * model.null_scale);
  double f = (1.0 - model.pi) * f0;
  if (model.pi > 0.0)
    f += model.pi * alt_density(x, sigma, model.effect, model.null_scale);
  if (f < density_floor) {
    if (underflow) *underflow = true;
    return 1.0;
  }
  return std::clamp((1.0 - model.pi) * f0 / f, 0.0, 1.0);
}

double marginal_z_density(double z, const MixtureModel& model) {
  const double ns = model.null_scale;
  const double f0 = normal_pdf_scaled(z, ns);
  if (model.pi == 0.0) return floored(f0);
  struct ScaleVisitor {
    double z, ns;
    const EffectLaw* effect;
    double operator()(const UniformScale& s) const {
      if (!(s.hi > s.lo) || !std::isfinite(s.hi))
        throw domain_error("marginal_z_density: uniform scale needs bounded lo < hi");
      const double width = s.hi - s.lo;
      auto integrand = [&](double sig) {
        if (sig <= 0.0) return 0.0; // sigma -> 0 slice vanishes for nonzero effects
        return alt_z_density_given_sigma(z, sig, *effect, ns);
      };
      return gauss_kronrod_15(integrand, s.lo, s.hi) / width;
    }
    double operator()(const TwoValuesScale& s) const {
      return 0.5 * alt_z_density_given_sigma(z, s.a, *effect, ns) +
             0.5 * alt_z_density_given_sigma(z, s.b, *effect, ns);
    }
    double operator()(const FixedScale& s) const {
      return alt_z_density_given_sigma(z, s.value, *effect, ns);
    }
  };
  const double f1 = std::visit(ScaleVisitor{z, ns, &model.effect}, model.scale);
  return floored((1.0 - model.pi) * f0 + model.pi * f1);
}

double true_lfdr_z(double z, const MixtureModel& model, bool* underflow) {
  if (underflow) *underflow = false;
  const double f0 = normal_pdf_scaled(z, model.null_scale);
  const double f = marginal_z_density(z, model);
  if (f <= density_floor && (1.0 - model.pi) * f0 <= density_floor) {
    if (underflow) *underflow = true;
    return 1.0;
  }
  return std::clamp((1.0 - model.pi) * f0 / f, 0.0, 1.0);
}

} // namespace hart
