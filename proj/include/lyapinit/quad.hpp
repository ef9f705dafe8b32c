#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "lyapinit/errors.hpp"
#include "lyapinit/slopes.hpp"

namespace lyapinit::quad {

struct QuadSettings {
  double rel_tol = 1e-12;
  double abs_tol = 1e-11;
  int max_subdivisions = 2000;

  /// Throws DomainError when a tolerance is non-positive or the panel cap is < 1.
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes on [-1, 1], QUADPACK qk15 constants.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel kronrod15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) quadrature of f over [lo, hi].
///
/// The interval starts as `initial_panels` equal pieces; the panel with the
/// largest error estimate is bisected until the summed estimate drops below
/// max(abs_tol, rel_tol * |value|). Exceeding max_subdivisions panels throws
/// AccuracyError with the best estimate attached.
template <typename F>
QuadResult integrate(F&& f, double lo, double hi, const QuadSettings& settings = {},
                     int initial_panels = 1) {
  settings.validate();
  initial_panels = std::clamp(initial_panels, 1, settings.max_subdivisions);

  std::priority_queue<detail::Panel> panels;
  double value = 0.0;
  double error = 0.0;
  const double width = (hi - lo) / initial_panels;
  for (int k = 0; k < initial_panels; ++k) {
    const double a = lo + k * width;
    const double b = (k + 1 == initial_panels) ? hi : a + width;
    auto p = detail::kronrod15(f, a, b);
    value += p.value;
    error += p.error;
    panels.push(p);
  }

  int count = initial_panels;
  auto target = [&] { return std::max(settings.abs_tol, settings.rel_tol * std::abs(value)); };
  while (error > target()) {
    if (count + 1 > settings.max_subdivisions) {
      throw AccuracyError("quadrature did not converge within the subdivision limit", value, error);
    }
    const detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto left = detail::kronrod15(f, worst.lo, mid);
    auto right = detail::kronrod15(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }

  // Re-sum from the panels to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  return {value, error, count};
}

/// Integrand of I(d, alpha1, alpha2):
///   [e^{-t} - 2^{-d} ((1 + 2 a1^2 t)^{-1/2} + (1 + 2 a2^2 t)^{-1/2})^d] / (2t).
/// At t = 0 returns the limit (d (a1^2 + a2^2) / 2 - 1) / 2.
double integrand_I(double t, int d, const ActivationSlopes& slopes);

/// Upper end of the log-time window: max(40, 40 + ln(1 / min(a1^2, a2^2))).
double log_window_upper(const ActivationSlopes& slopes);

/// I(d, alpha1, alpha2), integrated in s = ln t over [-40, log_window_upper]
/// with the leading-order contributions of both truncated tails added back.
QuadResult integral_I_detailed(int d, const ActivationSlopes& slopes, const QuadSettings& settings = {});

inline double integral_I(int d, const ActivationSlopes& slopes, const QuadSettings& settings = {}) {
  return integral_I_detailed(d, slopes, settings).value;
}

/// Shorthand for I(d, 1, alpha).
inline double integral_I(int d, double alpha, const QuadSettings& settings = {}) {
  return integral_I(d, ActivationSlopes::leaky(alpha), settings);
}

/// ln(x) evaluated as the Frullani integral of (e^{-t} - e^{-x t}) / t.
double frullani_log(double x, const QuadSettings& settings = {});

inline constexpr int kMaxWidth = 4096;

}  // namespace lyapinit::quad
