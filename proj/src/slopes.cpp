#include "lyapinit/slopes.hpp"

#include <cmath>
#include <string>

#include "lyapinit/errors.hpp"

namespace lyapinit {

ActivationSlopes::ActivationSlopes(double alpha1, double alpha2) : alpha1_(alpha1), alpha2_(alpha2) {
  if (!std::isfinite(alpha1) || !std::isfinite(alpha2)) {
    throw DomainError("activation slopes must be finite");
  }
  if (alpha1 == 0.0 || alpha2 == 0.0) {
    throw DomainError("activation slopes must be nonzero (got " + std::to_string(alpha1) + ", " +
                      std::to_string(alpha2) + ")");
  }
}

ActivationSlopes ActivationSlopes::relu() { return ActivationSlopes(1.0, 0.0, Unchecked{}); }

double ActivationSlopes::min_sq() const noexcept {
  return std::min(alpha1_ * alpha1_, alpha2_ * alpha2_);
}

void require_leaky(const ActivationSlopes& slopes) {
  if (!slopes.is_leaky()) {
    throw DomainError("this operation requires nonzero slopes; ReLU is only valid in the forward simulation");
  }
}

}  // namespace lyapinit
