#include "lyapinit/analytic.hpp"

#include <cmath>
#include <string>

#include "lyapinit/errors.hpp"

namespace lyapinit {

std::string_view to_string(EnsembleKind kind) {
  return kind == EnsembleKind::GaussianIID ? "gaussian" : "orthogonal";
}

EnsembleKind parse_ensemble_kind(std::string_view name) {
  if (name == "gaussian") return EnsembleKind::GaussianIID;
  if (name == "orthogonal") return EnsembleKind::ScaledOrthogonal;
  throw UsageError("unknown ensemble '" + std::string(name) + "' (expected gaussian or orthogonal)");
}

EnsembleSpec EnsembleSpec::gaussian(int d, double sigma) {
  EnsembleSpec spec{EnsembleKind::GaussianIID, d, sigma};
  spec.validate();
  return spec;
}

EnsembleSpec EnsembleSpec::orthogonal(int d, double eta) {
  EnsembleSpec spec{EnsembleKind::ScaledOrthogonal, d, eta};
  spec.validate();
  return spec;
}

void EnsembleSpec::validate() const {
  if (d < 1) throw DomainError("ensemble width must be >= 1");
  if (!std::isfinite(scale) || scale <= 0.0) throw DomainError("ensemble scale must be finite and positive");
}

namespace analytic {

namespace {

void check_alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha == 0.0) throw DomainError("slope alpha must be finite and nonzero");
}

void check_scale(double scale, const char* name) {
  if (!std::isfinite(scale) || scale <= 0.0) {
    throw DomainError(std::string(name) + " must be finite and positive");
  }
}

void check_width(int d) {
  if (d < 1) throw DomainError("width d must be >= 1");
}

double i_one(int d, const quad::QuadSettings& settings) {
  return quad::integral_I(d, ActivationSlopes(1.0, 1.0), settings);
}

}  // namespace

AsymptoticCoefficients asymptotic_coefficients(double alpha) {
  check_alpha(alpha);
  const double a2 = alpha * alpha;
  const double mu = 0.5 * (1.0 + a2);
  const double tau_sq = 0.25 * (5.0 - 2.0 * a2 + 5.0 * a2 * a2);
  return {tau_sq / (mu * mu), mu, tau_sq};
}

double lambda_gaussian(int d, double alpha, double sigma, const quad::QuadSettings& settings) {
  check_alpha(alpha);
  check_scale(sigma, "sigma");
  return std::log(sigma) + quad::integral_I(d, alpha, settings);
}

double lambda_orthogonal(int d, double alpha, double eta, const quad::QuadSettings& settings) {
  check_alpha(alpha);
  check_scale(eta, "eta");
  return std::log(eta) + quad::integral_I(d, alpha, settings) - i_one(d, settings);
}

double lambda(const EnsembleSpec& ensemble, double alpha, const quad::QuadSettings& settings) {
  ensemble.validate();
  return ensemble.kind == EnsembleKind::GaussianIID ? lambda_gaussian(ensemble.d, alpha, ensemble.scale, settings)
                                                    : lambda_orthogonal(ensemble.d, alpha, ensemble.scale, settings);
}

double sigma_crit(int d, double alpha, const quad::QuadSettings& settings) {
  check_alpha(alpha);
  return std::exp(-quad::integral_I(d, alpha, settings));
}

double eta_crit(int d, double alpha, const quad::QuadSettings& settings) {
  check_alpha(alpha);
  return std::exp(i_one(d, settings) - quad::integral_I(d, alpha, settings));
}

double sigma_he(int d, double alpha) {
  check_width(d);
  check_alpha(alpha);
  return std::sqrt(2.0 / (d * (1.0 + alpha * alpha)));
}

double lambda_he(int d, double alpha, const quad::QuadSettings& settings) {
  return lambda_gaussian(d, alpha, sigma_he(d, alpha), settings);
}

double critical_scale(EnsembleKind kind, int d, double alpha, const quad::QuadSettings& settings) {
  return kind == EnsembleKind::GaussianIID ? sigma_crit(d, alpha, settings) : eta_crit(d, alpha, settings);
}

double asymptotic_I(int d, double alpha, ExpansionVariant variant) {
  check_width(d);
  const auto c = asymptotic_coefficients(alpha);
  const double denom = variant == ExpansionVariant::corrected ? 4.0 * d : 2.0 * d;
  return 0.5 * std::log(d * c.mu_x) - c.c_alpha / denom;
}

double asymptotic_lambda_gaussian(int d, double alpha, double sigma, ExpansionVariant variant) {
  check_scale(sigma, "sigma");
  return std::log(sigma) + asymptotic_I(d, alpha, variant);
}

double asymptotic_lambda_orthogonal(int d, double alpha, double eta, ExpansionVariant variant) {
  check_width(d);
  check_scale(eta, "eta");
  const auto c = asymptotic_coefficients(alpha);
  const double head = 0.5 * std::log(eta * eta * c.mu_x);
  if (variant == ExpansionVariant::corrected) return head - (c.c_alpha - 2.0) / (4.0 * d);
  return head - (c.c_alpha + 2.0) / (2.0 * d);
}

double mgf_phi_sq(double t, const ActivationSlopes& slopes) {
  require_leaky(slopes);
  const double u1 = 1.0 - 2.0 * slopes.alpha1() * slopes.alpha1() * t;
  const double u2 = 1.0 - 2.0 * slopes.alpha2() * slopes.alpha2() * t;
  if (!std::isfinite(t) || !(u1 > 0.0) || !(u2 > 0.0)) {
    throw DomainError("mgf_phi_sq: t must be below min(1/(2 a1^2), 1/(2 a2^2))");
  }
  return 0.5 * (1.0 / std::sqrt(u1) + 1.0 / std::sqrt(u2));
}

LyapunovReport report(const EnsembleSpec& ensemble, double alpha, const quad::QuadSettings& settings,
                      ExpansionVariant variant) {
  ensemble.validate();
  check_alpha(alpha);
  const int d = ensemble.d;

  LyapunovReport r;
  r.ensemble = ensemble;
  r.alpha = alpha;
  r.I_alpha = quad::integral_I(d, alpha, settings);
  r.I_one = i_one(d, settings);
  r.sigma_crit = std::exp(-r.I_alpha);
  r.eta_crit = std::exp(r.I_one - r.I_alpha);
  r.sigma_he = sigma_he(d, alpha);
  r.lambda_he = std::log(r.sigma_he) + r.I_alpha;
  r.lambda_orth_unscaled = r.I_alpha - r.I_one;
  r.c_alpha = asymptotic_coefficients(alpha).c_alpha;
  if (ensemble.kind == EnsembleKind::GaussianIID) {
    r.lambda = std::log(ensemble.scale) + r.I_alpha;
    r.asymptotic_lambda = asymptotic_lambda_gaussian(d, alpha, ensemble.scale, variant);
  } else {
    r.lambda = std::log(ensemble.scale) + r.I_alpha - r.I_one;
    r.asymptotic_lambda = asymptotic_lambda_orthogonal(d, alpha, ensemble.scale, variant);
  }
  r.asymptotic_residual = r.lambda - r.asymptotic_lambda;
  return r;
}

}  // namespace analytic
}  // namespace lyapinit
