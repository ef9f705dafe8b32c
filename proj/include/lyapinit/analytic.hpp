#pragma once

#include <string>
#include <string_view>

#include "lyapinit/quad.hpp"
#include "lyapinit/slopes.hpp"

namespace lyapinit {

enum class EnsembleKind { GaussianIID, ScaledOrthogonal };

std::string_view to_string(EnsembleKind kind);
/// Accepts "gaussian" or "orthogonal". Throws UsageError otherwise.
EnsembleKind parse_ensemble_kind(std::string_view name);

/// Weight distribution: i.i.d. N(0, scale^2) entries, or Haar on scale * O(d).
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::GaussianIID;
  int d = 1;
  double scale = 1.0;

  static EnsembleSpec gaussian(int d, double sigma);
  static EnsembleSpec orthogonal(int d, double eta);

  /// Throws DomainError unless d >= 1 and scale is finite and positive.
  void validate() const;
};

struct LyapunovReport {
  EnsembleSpec ensemble;
  double alpha = 0.0;
  double lambda = 0.0;
  double I_alpha = 0.0;
  double I_one = 0.0;
  double sigma_crit = 0.0;
  double eta_crit = 0.0;
  double sigma_he = 0.0;
  double lambda_he = 0.0;
  double lambda_orth_unscaled = 0.0;
  double asymptotic_lambda = 0.0;  // large-d approximation for this ensemble
  double asymptotic_residual = 0.0;
  double c_alpha = 0.0;
};

/// Moments of phi(Z)^2 for Z ~ N(0,1), phi = max(x, alpha x).
struct AsymptoticCoefficients {
  double c_alpha;  // tau_sq / mu_x^2
  double mu_x;     // (1 + alpha^2) / 2
  double tau_sq;   // (5 - 2 alpha^2 + 5 alpha^4) / 4
};

/// Which 1/d coefficient to use in the large-width expansions.
/// `corrected` (-C/(4d)) agrees with the quadrature to O(d^-2);
/// `as_stated` (-C/(2d)) is kept for comparison and is off by C/(4d).
enum class ExpansionVariant { corrected, as_stated };

namespace analytic {

AsymptoticCoefficients asymptotic_coefficients(double alpha);

double lambda_gaussian(int d, double alpha, double sigma, const quad::QuadSettings& settings = {});
double lambda_orthogonal(int d, double alpha, double eta, const quad::QuadSettings& settings = {});
double lambda(const EnsembleSpec& ensemble, double alpha, const quad::QuadSettings& settings = {});

/// exp(-I(d, alpha)): the Gaussian standard deviation with zero exponent.
double sigma_crit(int d, double alpha, const quad::QuadSettings& settings = {});
/// exp(I(d, 1) - I(d, alpha)): the orthogonal scale with zero exponent.
double eta_crit(int d, double alpha, const quad::QuadSettings& settings = {});
/// He scale sqrt(2 / (d (1 + alpha^2))). No quadrature.
double sigma_he(int d, double alpha);
double lambda_he(int d, double alpha, const quad::QuadSettings& settings = {});
double critical_scale(EnsembleKind kind, int d, double alpha, const quad::QuadSettings& settings = {});

double asymptotic_I(int d, double alpha, ExpansionVariant variant = ExpansionVariant::corrected);
double asymptotic_lambda_gaussian(int d, double alpha, double sigma,
                                  ExpansionVariant variant = ExpansionVariant::corrected);
double asymptotic_lambda_orthogonal(int d, double alpha, double eta,
                                    ExpansionVariant variant = ExpansionVariant::corrected);

/// E[exp(t phi(Z)^2)] = ((1 - 2 a1^2 t)^{-1/2} + (1 - 2 a2^2 t)^{-1/2}) / 2
/// for t < min(1 / (2 a1^2), 1 / (2 a2^2)).
double mgf_phi_sq(double t, const ActivationSlopes& slopes);

LyapunovReport report(const EnsembleSpec& ensemble, double alpha, const quad::QuadSettings& settings = {},
                      ExpansionVariant variant = ExpansionVariant::corrected);

}  // namespace analytic
}  // namespace lyapinit
