#pragma once

#include <algorithm>

#include <Eigen/Core>

namespace lyapinit {

/// The pair (alpha1, alpha2) of the generalized Leaky ReLU
/// phi(x) = max(alpha1 * x, alpha2 * x).
///
/// Both slopes must be nonzero. The one exception is ReLU, (1, 0), which can
/// only be built through relu() and is accepted by the forward simulation
/// alone; every quadrature or exponent routine rejects it.
class ActivationSlopes {
 public:
  ActivationSlopes(double alpha1, double alpha2);

  /// Canonical single-slope form max(x, alpha x).
  static ActivationSlopes leaky(double alpha) { return {1.0, alpha}; }
  static ActivationSlopes relu();

  double alpha1() const noexcept { return alpha1_; }
  double alpha2() const noexcept { return alpha2_; }
  bool is_leaky() const noexcept { return alpha1_ != 0.0 && alpha2_ != 0.0; }

  /// min(alpha1^2, alpha2^2)
  double min_sq() const noexcept;

  double apply(double x) const noexcept { return std::max(alpha1_ * x, alpha2_ * x); }

  /// Componentwise activation as an Eigen expression.
  template <typename Derived>
  auto apply(const Eigen::MatrixBase<Derived>& v) const {
    return (alpha1_ * v).cwiseMax(alpha2_ * v);
  }

 private:
  struct Unchecked {};
  ActivationSlopes(double a1, double a2, Unchecked) : alpha1_(a1), alpha2_(a2) {}

  double alpha1_;
  double alpha2_;
};

/// Throws DomainError unless both slopes are nonzero.
void require_leaky(const ActivationSlopes& slopes);

}  // namespace lyapinit
