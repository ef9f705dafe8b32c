#include "lyapinit/initgen.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lyapinit/dynamics.hpp"
#include "lyapinit/errors.hpp"
#include "lyapinit/stats.hpp"

namespace lyapinit {

namespace {

constexpr std::uint64_t kProbeStreamTag = 0x70726f6265ull;  // "probe"
constexpr double kLogNormClamp = 700.0;

}  // namespace

InputDistribution InputDistribution::uniform_sphere(int d) {
  InputDistribution dist;
  dist.d = d;
  dist.validate();
  return dist;
}

InputDistribution InputDistribution::uniform_box(int d, double lo, double hi) {
  InputDistribution dist;
  dist.kind = Kind::UniformBox;
  dist.d = d;
  dist.lo = lo;
  dist.hi = hi;
  dist.validate();
  return dist;
}

InputDistribution InputDistribution::fixed_set(std::vector<Vector> vectors) {
  InputDistribution dist;
  dist.kind = Kind::FixedSet;
  dist.d = vectors.empty() ? 0 : static_cast<int>(vectors.front().size());
  dist.vectors = std::move(vectors);
  dist.validate();
  return dist;
}

void InputDistribution::validate() const {
  if (d < 1) throw UsageError("input distribution width must be >= 1");
  switch (kind) {
    case Kind::UniformSphere:
      break;
    case Kind::UniformBox:
      if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw UsageError("input box needs lo < hi");
      if (lo >= 0.0 && lo == hi) throw UsageError("input box collapses to a point");
      break;
    case Kind::FixedSet:
      if (vectors.empty()) throw UsageError("fixed input set is empty");
      for (const Vector& v : vectors) {
        if (v.size() != d) throw UsageError("fixed input vectors must all have dimension d");
        if (!(v.norm() > 0.0) || !v.allFinite()) throw UsageError("fixed input vectors must be nonzero and finite");
      }
      break;
  }
}

Vector InputDistribution::draw(RngStream& rng, std::size_t index) const {
  switch (kind) {
    case Kind::UniformSphere:
      return ensembles::sample_unit_sphere(d, rng);
    case Kind::UniformBox: {
      Vector v(d);
      do {
        for (int i = 0; i < d; ++i) v(i) = rng.uniform(lo, hi);
      } while (!(v.norm() > 0.0));
      return v;
    }
    case Kind::FixedSet:
      return vectors[index % vectors.size()];
  }
  throw InternalError("unhandled input distribution kind");
}

std::string_view to_string(SelectionMetric metric) {
  return metric == SelectionMetric::log_distance ? "log" : "linear";
}

namespace initgen {

int default_candidate_count(int depth) {
  if (depth < 1) throw UsageError("depth must be >= 1");
  return static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(depth))));
}

WeightStack lyapunov_init(int d, int depth, double alpha, EnsembleKind kind, RngStream& rng,
                          const quad::QuadSettings& settings) {
  if (d < 1 || depth < 1) throw UsageError("width and depth must be >= 1");
  const double scale = analytic::critical_scale(kind, d, alpha, settings);
  const EnsembleSpec spec = kind == EnsembleKind::GaussianIID ? EnsembleSpec::gaussian(d, scale)
                                                              : EnsembleSpec::orthogonal(d, scale);
  WeightStack stack = ensembles::sample_stack(spec, depth, rng);
  stack.diagnostics = {{"method", "lyapunov"}, {"alpha", alpha}, {"critical_scale", scale}};
  return stack;
}

double selection_score(double norm_mean, SelectionMetric metric) {
  if (!std::isfinite(norm_mean) || !(norm_mean > 0.0)) return std::numeric_limits<double>::infinity();
  return metric == SelectionMetric::log_distance ? std::abs(std::log(norm_mean)) : std::abs(norm_mean - 1.0);
}

SampledInit sampled_lyapunov_init(int d, int depth, double alpha, EnsembleKind kind,
                                  const InputDistribution& inputs, const SampledInitOptions& options,
                                  std::uint64_t seed) {
  if (d < 1 || depth < 1) throw UsageError("width and depth must be >= 1");
  inputs.validate();
  if (inputs.d != d) throw UsageError("input distribution width does not match d");
  if (options.probe_inputs < 1) throw UsageError("probe_inputs must be >= 1");
  const int count = options.candidate_count.value_or(default_candidate_count(depth));
  if (count < 1) throw UsageError("candidate_count must be >= 1");

  const auto slopes = ActivationSlopes::leaky(alpha);
  const double scale = analytic::critical_scale(kind, d, alpha, options.quad_settings);
  const EnsembleSpec spec = kind == EnsembleKind::GaussianIID ? EnsembleSpec::gaussian(d, scale)
                                                              : EnsembleSpec::orthogonal(d, scale);

  // One probe set shared by every candidate; inputs are normalized to unit
  // length and their raw norms kept for the record.
  std::vector<Vector> probes;
  probes.reserve(options.probe_inputs);
  double raw_norm_sum = 0.0;
  {
    RngStream probe_rng(seed, derived_stream_id(kProbeStreamTag, 0));
    for (int i = 0; i < options.probe_inputs; ++i) {
      Vector x = inputs.draw(probe_rng, static_cast<std::size_t>(i));
      const double n = x.norm();
      raw_norm_sum += n;
      probes.push_back(x / n);
    }
  }

  std::vector<WeightStack> stacks(count);
  std::vector<double> means(count), scores(count);
  parallel_for(static_cast<std::size_t>(count), options.workers, [&](std::size_t c) {
    RngStream rng(seed, c);
    stacks[c] = ensembles::sample_stack(spec, depth, rng);
    double sum = 0.0;
    bool clamped = false;
    for (const Vector& x : probes) {
      const Trajectory traj = dynamics::forward(stacks[c], x, slopes);
      if (!(std::abs(traj.log_norm) <= kLogNormClamp)) {
        clamped = true;
        break;
      }
      sum += std::exp(traj.log_norm);
    }
    means[c] = clamped ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(probes.size());
    scores[c] = clamped ? std::numeric_limits<double>::infinity() : selection_score(means[c], options.metric);
  });

  int best = -1;
  for (int c = 0; c < count; ++c) {
    if (std::isfinite(scores[c]) && (best < 0 || scores[c] < scores[best])) best = c;
  }
  if (best < 0) throw InternalError("sampled initialization: no candidate produced a finite norm estimate");

  CandidateDiagnostics diag;
  diag.candidate_count = count;
  diag.per_candidate_norm_estimate = means;
  diag.per_candidate_score = scores;
  diag.selected_index = best;
  diag.selection_score = scores[best];
  diag.probe_inputs = options.probe_inputs;
  diag.mean_raw_input_norm = raw_norm_sum / options.probe_inputs;
  diag.metric = options.metric;

  SampledInit out{std::move(stacks[best]), diag};
  out.stack.diagnostics = to_json(diag);
  out.stack.diagnostics["method"] = "sampled_lyapunov";
  out.stack.diagnostics["alpha"] = alpha;
  out.stack.diagnostics["critical_scale"] = scale;
  return out;
}

nlohmann::json to_json(const CandidateDiagnostics& diag) {
  nlohmann::json scores = nlohmann::json::array();
  for (double s : diag.per_candidate_score) scores.push_back(std::isfinite(s) ? nlohmann::json(s) : nlohmann::json());
  nlohmann::json means = nlohmann::json::array();
  for (double m : diag.per_candidate_norm_estimate) means.push_back(std::isfinite(m) ? nlohmann::json(m) : nlohmann::json());
  return {
      {"candidate_count", diag.candidate_count},
      {"per_candidate_norm_estimate", std::move(means)},
      {"per_candidate_score", std::move(scores)},
      {"selected_index", diag.selected_index},
      {"selection_score", diag.selection_score},
      {"selection_metric", std::string(to_string(diag.metric))},
      {"probe_inputs", diag.probe_inputs},
      {"mean_raw_input_norm", diag.mean_raw_input_norm},
  };
}

}  // namespace initgen
}  // namespace lyapinit
