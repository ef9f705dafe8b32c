#include "lyapinit/quad.hpp"

#include <cmath>
#include <string>

namespace lyapinit::quad {

namespace {

constexpr double kLogWindowLower = -40.0;
// Keeps e^{s_max} and the squared slopes inside double range.
constexpr double kMinSlopeSq = 1e-260;
constexpr double kLogWindowSpan = 40.0;

void check_width(int d) {
  if (d < 1 || d > kMaxWidth) {
    throw DomainError("width d must lie in [1, " + std::to_string(kMaxWidth) + "], got " + std::to_string(d));
  }
}

// (1 + x)^{-1/2} - 1, accurate for small x.
double inv_sqrt_1p_minus_1(double x) { return std::expm1(-0.5 * std::log1p(x)); }

// e^{-t} - M(t)^d with M(t) = ((1 + 2 a1^2 t)^{-1/2} + (1 + 2 a2^2 t)^{-1/2}) / 2.
// Both terms tend to 1 as t -> 0, so the difference is formed through expm1.
double numerator(double t, int d, double a1sq, double a2sq) {
  const double m_minus_1 = 0.5 * (inv_sqrt_1p_minus_1(2.0 * a1sq * t) + inv_sqrt_1p_minus_1(2.0 * a2sq * t));
  double log_power;
  if (m_minus_1 > -0.5) {
    log_power = d * std::log1p(m_minus_1);
  } else {
    const double m = 0.5 * (1.0 / std::sqrt(1.0 + 2.0 * a1sq * t) + 1.0 / std::sqrt(1.0 + 2.0 * a2sq * t));
    log_power = d * std::log(m);
  }
  const double gap = -t - log_power;
  if (std::abs(gap) < 1.0) {
    return std::exp(log_power) * std::expm1(gap);
  }
  return std::exp(-t) - std::exp(log_power);
}

double taylor_limit(int d, double a1sq, double a2sq) { return 0.5 * (0.5 * d * (a1sq + a2sq) - 1.0); }

}  // namespace

void QuadSettings::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw DomainError("quadrature tolerances must be positive");
  }
  if (max_subdivisions < 1) {
    throw DomainError("max_subdivisions must be at least 1");
  }
}

double integrand_I(double t, int d, const ActivationSlopes& slopes) {
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError("integrand_I requires finite t >= 0");
  }
  check_width(d);
  require_leaky(slopes);
  const double a1sq = slopes.alpha1() * slopes.alpha1();
  const double a2sq = slopes.alpha2() * slopes.alpha2();
  if (t == 0.0) return taylor_limit(d, a1sq, a2sq);
  return numerator(t, d, a1sq, a2sq) / (2.0 * t);
}

double log_window_upper(const ActivationSlopes& slopes) {
  require_leaky(slopes);
  const double max_sq = std::max(slopes.alpha1() * slopes.alpha1(), slopes.alpha2() * slopes.alpha2());
  if (slopes.min_sq() < kMinSlopeSq || max_sq > 1.0 / kMinSlopeSq) {
    throw DomainError("integral_I supports slope magnitudes in [1e-130, 1e130]");
  }
  return std::max(kLogWindowSpan, kLogWindowSpan + std::log(1.0 / slopes.min_sq()));
}

QuadResult integral_I_detailed(int d, const ActivationSlopes& slopes, const QuadSettings& settings) {
  check_width(d);
  require_leaky(slopes);
  const double a1sq = slopes.alpha1() * slopes.alpha1();
  const double a2sq = slopes.alpha2() * slopes.alpha2();
  const double s_lo = kLogWindowLower;
  const double s_hi = log_window_upper(slopes);

  // dt / t = ds, so the transformed integrand is numerator / 2 with no singularity.
  auto g = [&](double s) { return 0.5 * numerator(std::exp(s), d, a1sq, a2sq); };
  const int initial = static_cast<int>(std::ceil((s_hi - s_lo) / 2.0));
  QuadResult r = integrate(g, s_lo, s_hi, settings, initial);

  // Below s_lo the integrand is limit * t; above s_hi it is
  // -(1/2t) ((|a1|^-1 + |a2|^-1) / (2 sqrt(2t)))^d.
  const double lower_tail = taylor_limit(d, a1sq, a2sq) * std::exp(s_lo);
  const double inv_sum = 1.0 / std::abs(slopes.alpha1()) + 1.0 / std::abs(slopes.alpha2());
  const double log_base = std::log(inv_sum) - std::log(2.0) - 0.5 * (std::log(2.0) + s_hi);
  const double upper_tail = -std::exp(d * log_base) / d;
  r.value += lower_tail + upper_tail;
  return r;
}

double frullani_log(double x, const QuadSettings& settings) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("frullani_log requires finite x > 0");
  }
  const double log_x = std::log(x);
  const double s_lo = kLogWindowLower - std::max(0.0, log_x);
  const double s_hi = 7.0 + std::max(0.0, -log_x);  // e^{-e^7} is far below double resolution
  auto g = [x](double s) {
    const double t = std::exp(s);
    const double u = (x - 1.0) * t;
    if (std::abs(u) < 1.0) return -std::exp(-t) * std::expm1(-u);
    return std::exp(-t) - std::exp(-x * t);
  };
  const int initial = static_cast<int>(std::ceil((s_hi - s_lo) / 2.0));
  QuadResult r = integrate(g, s_lo, s_hi, settings, initial);
  return r.value + (x - 1.0) * std::exp(s_lo);
}

}  // namespace lyapinit::quad
