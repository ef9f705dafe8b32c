#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "lyapinit/analytic.hpp"
#include "lyapinit/rng.hpp"

namespace lyapinit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SeedInfo {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;
};

/// An ordered list of depth d x d weight matrices plus provenance.
struct WeightStack {
  int d = 0;
  std::vector<Matrix> matrices;
  EnsembleSpec ensemble;
  SeedInfo seed;
  nlohmann::json diagnostics = nlohmann::json::object();

  int depth() const noexcept { return static_cast<int>(matrices.size()); }

  /// Throws UsageError when a matrix is not d x d or has non-finite entries.
  void validate() const;
};

namespace ensembles {

/// d x d matrix of i.i.d. N(0, sigma^2) entries.
Matrix sample_gaussian_matrix(int d, double sigma, RngStream& rng);

/// eta * Q with Q Haar-distributed on the full orthogonal group O(d), built
/// from the QR factorization of a standard Gaussian matrix with the columns of
/// Q multiplied by the signs of diag(R).
Matrix sample_haar_orthogonal(int d, double eta, RngStream& rng);

/// Uniform point on the unit sphere S^{d-1}.
Vector sample_unit_sphere(int d, RngStream& rng);

/// d x d matrix of i.i.d. Unif[0, a] entries.
Matrix sample_uniform_positive_matrix(int d, double a, RngStream& rng);

/// One draw from the ensemble.
Matrix sample(const EnsembleSpec& ensemble, RngStream& rng);

/// Same draw as sample(), written into `out` (resized as needed). Gaussian
/// draws reuse the storage.
void sample_into(const EnsembleSpec& ensemble, RngStream& rng, Matrix& out);

/// `depth` consecutive draws from one stream.
WeightStack sample_stack(const EnsembleSpec& ensemble, int depth, RngStream& rng);

}  // namespace ensembles

/// JSON document with 17 significant digits per float:
/// { "d", "depth", "ensemble": {"kind", "scale"}, "seed": {"master", "stream"},
///   "matrices": [[row-major floats], ...], "diagnostics": {...} }
std::string to_json_string(const WeightStack& stack, int indent = 2);
WeightStack weight_stack_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const WeightStack& stack);

/// nlohmann::json::dump, except that every floating-point number is written
/// with 17 significant digits.
std::string dump_json17(const nlohmann::json& doc, int indent = 2);

}  // namespace lyapinit
