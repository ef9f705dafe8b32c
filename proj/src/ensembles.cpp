#include "lyapinit/ensembles.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>

#include "lyapinit/errors.hpp"

namespace lyapinit {

void WeightStack::validate() const {
  if (d < 1) throw UsageError("weight stack width must be >= 1");
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const Matrix& m = matrices[i];
    if (m.rows() != d || m.cols() != d) {
      throw UsageError("layer " + std::to_string(i) + " is not " + std::to_string(d) + "x" + std::to_string(d));
    }
    if (!m.allFinite()) throw UsageError("layer " + std::to_string(i) + " has non-finite entries");
  }
}

namespace ensembles {

namespace {

void check_width(int d) {
  if (d < 1) throw DomainError("matrix width must be >= 1");
}

void check_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) throw DomainError(std::string(name) + " must be finite and positive");
}

constexpr int kHaarRetries = 5;

// Row-major fill so the draw sequence matches the serialized layout.
void fill_gaussian(Matrix& m, int d, double sigma, RngStream& rng) {
  m.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = sigma * rng.normal();
}

}  // namespace

Matrix sample_gaussian_matrix(int d, double sigma, RngStream& rng) {
  check_width(d);
  check_positive(sigma, "sigma");
  Matrix m;
  fill_gaussian(m, d, sigma, rng);
  return m;
}

Matrix sample_haar_orthogonal(int d, double eta, RngStream& rng) {
  check_width(d);
  check_positive(eta, "eta");
  for (int attempt = 0; attempt <= kHaarRetries; ++attempt) {
    const Matrix g = sample_gaussian_matrix(d, 1.0, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    const auto diag = qr.matrixQR().diagonal();
    if ((diag.array() == 0.0).any()) continue;
    Matrix q = qr.householderQ();
    q *= diag.array().sign().matrix().asDiagonal();
    return eta * q;
  }
  throw InternalError("Haar sampler: QR broke down on repeated draws");
}

Vector sample_unit_sphere(int d, RngStream& rng) {
  check_width(d);
  Vector v(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v(i) = rng.normal();
    norm = v.norm();
  } while (!(norm > 1e-300));
  return v / norm;
}

Matrix sample_uniform_positive_matrix(int d, double a, RngStream& rng) {
  check_width(d);
  check_positive(a, "a");
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.uniform(0.0, a);
  return m;
}

Matrix sample(const EnsembleSpec& ensemble, RngStream& rng) {
  Matrix m;
  sample_into(ensemble, rng, m);
  return m;
}

void sample_into(const EnsembleSpec& ensemble, RngStream& rng, Matrix& out) {
  ensemble.validate();
  if (ensemble.kind == EnsembleKind::GaussianIID) {
    fill_gaussian(out, ensemble.d, ensemble.scale, rng);
  } else {
    out = sample_haar_orthogonal(ensemble.d, ensemble.scale, rng);
  }
}

WeightStack sample_stack(const EnsembleSpec& ensemble, int depth, RngStream& rng) {
  if (depth < 1) throw DomainError("depth must be >= 1");
  WeightStack stack;
  stack.d = ensemble.d;
  stack.ensemble = ensemble;
  stack.seed = {rng.master_seed(), rng.stream_id()};
  stack.matrices.reserve(depth);
  for (int k = 0; k < depth; ++k) stack.matrices.push_back(sample(ensemble, rng));
  return stack;
}

}  // namespace ensembles
}  // namespace lyapinit
