#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "lyapinit/analytic.hpp"
#include "lyapinit/ensembles.hpp"

namespace lyapinit {

/// Distribution of network inputs used to probe candidate stacks.
struct InputDistribution {
  enum class Kind { UniformSphere, UniformBox, FixedSet };

  Kind kind = Kind::UniformSphere;
  int d = 1;
  double lo = -1.0;  // UniformBox bounds, per coordinate
  double hi = 1.0;
  std::vector<Vector> vectors;  // FixedSet members

  static InputDistribution uniform_sphere(int d);
  static InputDistribution uniform_box(int d, double lo, double hi);
  static InputDistribution fixed_set(std::vector<Vector> vectors);

  void validate() const;

  /// Probe number `index`. FixedSet cycles through its members; the random
  /// kinds redraw until the vector is nonzero.
  Vector draw(RngStream& rng, std::size_t index) const;
};

/// How "closest to 1" is measured for the probe mean m = E[|X_l|].
enum class SelectionMetric { log_distance, linear_distance };  // |ln m| or |m - 1|

std::string_view to_string(SelectionMetric metric);

struct CandidateDiagnostics {
  int candidate_count = 0;
  std::vector<double> per_candidate_norm_estimate;  // m per candidate
  std::vector<double> per_candidate_score;
  int selected_index = 0;
  double selection_score = 0.0;
  int probe_inputs = 0;
  double mean_raw_input_norm = 0.0;
  SelectionMetric metric = SelectionMetric::log_distance;
};

struct SampledInitOptions {
  std::optional<int> candidate_count;  // default ceil(2 sqrt(depth))
  int probe_inputs = 256;
  SelectionMetric metric = SelectionMetric::log_distance;
  unsigned workers = 0;
  quad::QuadSettings quad_settings{};
};

struct SampledInit {
  WeightStack stack;
  CandidateDiagnostics diagnostics;
};

namespace initgen {

/// ceil(2 sqrt(depth)).
int default_candidate_count(int depth);

/// Samples `depth` matrices at the critical scale sigma_crit or eta_crit.
WeightStack lyapunov_init(int d, int depth, double alpha, EnsembleKind kind, RngStream& rng,
                          const quad::QuadSettings& settings = {});

/// Draws candidate stacks at the critical scale from streams (seed, 0..k-1),
/// estimates m = E[|X_depth|] for each on a shared set of unit-normalized
/// probe inputs, and keeps the candidate whose score is smallest (ties go to
/// the lower index).
SampledInit sampled_lyapunov_init(int d, int depth, double alpha, EnsembleKind kind,
                                  const InputDistribution& inputs, const SampledInitOptions& options,
                                  std::uint64_t seed);

/// Score of a probe mean under `metric`. Means built from log-norms beyond
/// +-700 are reported as +inf by the caller.
double selection_score(double norm_mean, SelectionMetric metric);

nlohmann::json to_json(const CandidateDiagnostics& diag);

}  // namespace initgen
}  // namespace lyapinit
