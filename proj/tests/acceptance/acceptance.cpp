// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyapinit/analytic.hpp"
#include "lyapinit/dynamics.hpp"
#include "lyapinit/ensembles.hpp"
#include "lyapinit/quad.hpp"
#include "lyapinit/table.hpp"
#include "oracles.hpp"

namespace {

using namespace lyapinit;
using nlohmann::json;

constexpr unsigned kWorkers = 1;
constexpr unsigned kReplayWorkers = 4;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Every Monte-Carlo run is kept so it can be replayed with another worker count.
struct McRun {
  std::string name;
  std::function<json(unsigned)> body;
  std::string first_output;
};

std::vector<McRun> g_runs;

json record(std::string name, std::function<json(unsigned)> body) {
  json out = body(kWorkers);
  g_runs.push_back({std::move(name), std::move(body), dump_json17(out)});
  return out;
}

json estimate_json(const MCEstimate& e) { return {{"mean", e.mean}, {"std_error", e.std_error}, {"trials", e.trials}}; }

RunConfig config(std::uint64_t seed, unsigned workers) {
  RunConfig c;
  c.seed = seed;
  c.workers = workers;
  return c;
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

void fail(Outcome& o, const std::string& what) {
  o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what;
}

Outcome lookup_tables() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t cells = 0;
  for (const char* alpha_text : {"0.1", "0.01", "0.001"}) {
    const double alpha = std::stod(alpha_text);
    for (const auto& ref : oracle::load_table(oracle::table_path(alpha_text))) {
      const TableRow r = table::row(ref.d, alpha);
      const double got[] = {r.I_alpha, r.I_one, r.lambda_he, r.lambda_orth, r.sigma_he, r.sigma_crit, r.eta_crit};
      for (std::size_t c = 0; c < 7; ++c, ++cells) {
        const double units = std::abs(got[c] - ref.value[c]) * 1e7;
        worst = std::max(worst, units);
        if (units > 2.0 + 1e-6) fail(o, fmt("alpha=%s d=%d col=%zu off by %.2f units", alpha_text, ref.d, c, units));
      }
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (seconds > 60.0) fail(o, fmt("took %.1f s", seconds));
  if (cells != 3 * 35 * 7) fail(o, fmt("expected 735 cells, compared %zu", cells));
  if (o.pass) o.detail = fmt("%zu cells, worst %.2f units in the 7th decimal, %.2f s", cells, worst, seconds);
  return o;
}

Outcome closed_forms() {
  Outcome o;
  const double base = -0.5 * (std::numbers::egamma + std::numbers::ln2);
  double worst = std::abs(quad::integral_I(1, ActivationSlopes(1.0, 1.0)) - base);
  for (double alpha : {0.1, 0.01, 0.001}) {
    worst = std::max(worst, std::abs(quad::integral_I(1, ActivationSlopes(1.0, alpha)) - (base + 0.5 * std::log(alpha))));
  }
  if (worst > 1e-8) fail(o, fmt("max error %.3g", worst));
  else o.detail = fmt("max error %.3g", worst);
  return o;
}

Outcome frullani() {
  Outcome o;
  double worst = 0.0;
  for (double x : {0.01, 0.5, 2.0, 10.0, 1e6}) {
    const double rel = std::abs(quad::frullani_log(x) - std::log(x)) / std::abs(std::log(x));
    worst = std::max(worst, rel);
  }
  if (worst > 1e-8) fail(o, fmt("max relative error %.3g", worst));
  else o.detail = fmt("max relative error %.3g", worst);
  return o;
}

Outcome mc_quadrature_agreement() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst_z = 0.0;
  std::uint64_t seed = 4000;
  for (int d : {2, 5, 10}) {
    for (double alpha : {0.1, 0.01, 0.001}) {
      for (EnsembleKind kind : {EnsembleKind::GaussianIID, EnsembleKind::ScaledOrthogonal}) {
        const EnsembleSpec spec =
            kind == EnsembleKind::GaussianIID ? EnsembleSpec::gaussian(d, 1.0) : EnsembleSpec::orthogonal(d, 1.0);
        const auto slopes = ActivationSlopes::leaky(alpha);
        const std::uint64_t s = seed++;
        const json r = record(fmt("single-step d=%d alpha=%g %s", d, alpha, std::string(to_string(kind)).c_str()),
                              [=](unsigned w) {
                                return estimate_json(
                                    dynamics::estimate_lambda_single_step(spec, slopes, 100000, config(s, w)));
                              });
        const double z = std::abs(r["mean"].get<double>() - analytic::lambda(spec, alpha)) / r["std_error"].get<double>();
        worst_z = std::max(worst_z, z);
        if (z > 3.0) fail(o, fmt("single-step d=%d alpha=%g %s at %.2f SE", d, alpha,
                                 std::string(to_string(kind)).c_str(), z));
      }
    }
  }
  const auto slopes = ActivationSlopes::leaky(0.1);
  for (double sigma : {analytic::sigma_he(2, 0.1), analytic::sigma_crit(2, 0.1)}) {
    const EnsembleSpec spec = EnsembleSpec::gaussian(2, sigma);
    const std::uint64_t s = seed++;
    const json r = record(fmt("deep sigma=%.7f", sigma), [=](unsigned w) {
      return estimate_json(dynamics::estimate_lambda_deep(spec, slopes, 500, 200, config(s, w)));
    });
    const double z = std::abs(r["mean"].get<double>() - analytic::lambda_gaussian(2, 0.1, sigma)) /
                     r["std_error"].get<double>();
    worst_z = std::max(worst_z, z);
    if (z > 3.0) fail(o, fmt("deep sigma=%.7f at %.2f SE", sigma, z));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (seconds > 120.0) fail(o, fmt("took %.1f s", seconds));
  if (o.pass) o.detail = fmt("20 runs, worst |z| = %.2f, %.1f s", worst_z, seconds);
  return o;
}

Outcome critical_construction() {
  Outcome o;
  double worst_z = 0.0;
  std::uint64_t seed = 5000;
  const auto slopes = ActivationSlopes::leaky(0.1);
  for (EnsembleKind kind : {EnsembleKind::GaussianIID, EnsembleKind::ScaledOrthogonal}) {
    for (int d : {2, 8}) {
      const double scale = analytic::critical_scale(kind, d, 0.1);
      const EnsembleSpec spec =
          kind == EnsembleKind::GaussianIID ? EnsembleSpec::gaussian(d, scale) : EnsembleSpec::orthogonal(d, scale);
      const std::uint64_t s = seed++;
      const json r = record(fmt("critical d=%d %s", d, std::string(to_string(kind)).c_str()), [=](unsigned w) {
        return estimate_json(dynamics::estimate_lambda_deep(spec, slopes, 1000, 200, config(s, w)));
      });
      const double z = std::abs(r["mean"].get<double>()) / r["std_error"].get<double>();
      worst_z = std::max(worst_z, z);
      if (z > 3.0) fail(o, fmt("d=%d %s at %.2f SE from 0", d, std::string(to_string(kind)).c_str(), z));
    }
  }
  if (o.pass) o.detail = fmt("4 runs, worst |z| = %.2f", worst_z);
  return o;
}

Outcome clt_shape() {
  Outcome o;
  const double sigma = analytic::sigma_crit(2, 0.1);
  const EnsembleSpec spec = EnsembleSpec::gaussian(2, sigma);
  const auto slopes = ActivationSlopes::leaky(0.1);
  const double lambda = analytic::lambda_gaussian(2, 0.1, sigma);
  std::vector<double> gammas;
  double skew = 0.0, kurt = 0.0;
  std::uint64_t seed = 6000;
  for (int depth : {128, 256, 512}) {
    const std::uint64_t s = seed++;
    const json r = record(fmt("clt depth=%d", depth), [=](unsigned w) {
      const CLTReport c = dynamics::estimate_clt(spec, slopes, depth, 100000, lambda, config(s, w));
      return json{{"gamma_hat", c.gamma_hat}, {"skewness", c.skewness}, {"excess_kurtosis", c.excess_kurtosis},
                  {"mean", c.mean}};
    });
    gammas.push_back(r["gamma_hat"].get<double>());
    if (depth == 256) {
      skew = r["skewness"].get<double>();
      kurt = r["excess_kurtosis"].get<double>();
    }
  }
  if (!(std::abs(skew) < 0.05)) fail(o, fmt("skewness %.4f", skew));
  if (!(std::abs(kurt) < 0.1)) fail(o, fmt("excess kurtosis %.4f", kurt));
  const auto [lo, hi] = std::minmax_element(gammas.begin(), gammas.end());
  const double spread = (*hi - *lo) / *lo;
  if (!(spread < 0.05)) fail(o, fmt("gamma_hat spread %.2f%%", 100 * spread));
  if (o.pass) {
    o.detail = fmt("skew %.4f, kurtosis %.4f, gamma_hat %.4f/%.4f/%.4f (spread %.2f%%)", skew, kurt, gammas[0],
                   gammas[1], gammas[2], 100 * spread);
  }
  return o;
}

Outcome asymptotic_expansion() {
  Outcome o;
  const std::vector<int> dims = {64, 128, 256, 512, 1024};
  for (double alpha : {0.1, 1.0}) {
    std::vector<double> scaled;
    const double c = analytic::asymptotic_coefficients(alpha).c_alpha;
    for (int d : dims) {
      const double exact = quad::integral_I(d, alpha);
      scaled.push_back(std::abs(exact - analytic::asymptotic_I(d, alpha)) * d * d);
      const double stated = std::abs(exact - analytic::asymptotic_I(d, alpha, ExpansionVariant::as_stated)) * d;
      if (!(stated >= c / 8)) fail(o, fmt("as-stated residual*d = %.4f below C/8 at alpha=%g d=%d", stated, alpha, d));
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    const double ratio = *hi / *lo;
    if (!(ratio < 4.0)) fail(o, fmt("alpha=%g residual*d^2 varies by %.2fx", alpha, ratio));
    if (o.pass) {
      if (!o.detail.empty()) o.detail += "; ";
      o.detail += fmt("alpha=%g residual*d^2 in [%.4f, %.4f]", alpha, *lo, *hi);
    }
  }
  return o;
}

Outcome counterexamples() {
  Outcome o;
  std::string summary;
  std::uint64_t seed = 8000;
  for (int d : {2, 4}) {
    const std::uint64_t s = seed++;
    const json r = record(fmt("relu d=%d", d), [=](unsigned w) {
      const auto rep = dynamics::counterexample_relu(d, 1.0, 1, 100000, config(s, w));
      return json{{"zero_fraction_layer1", rep.zero_fraction_layer1}, {"std_error_layer1", rep.std_error_layer1}};
    });
    const double expected = std::ldexp(1.0, -d);
    const double z = std::abs(r["zero_fraction_layer1"].get<double>() - expected) / r["std_error_layer1"].get<double>();
    if (z > 3.0) fail(o, fmt("relu d=%d at %.2f SE", d, z));
    summary += fmt("relu d=%d |z|=%.2f; ", d, z);
  }
  for (double alpha : {0.1, 0.5}) {
    const std::uint64_t s = seed++;
    const json r = record(fmt("positive-cone alpha=%g", alpha), [=](unsigned w) {
      const auto rep = dynamics::counterexample_positive_cone(2, 1.0, alpha, 300, 200, config(s, w));
      return json{{"gap", rep.gap}, {"gap_std_error", rep.gap_std_error}, {"cone_preserved", rep.cone_preserved}};
    });
    const double z = std::abs(r["gap"].get<double>() - std::log(1.0 / alpha)) / r["gap_std_error"].get<double>();
    if (z > 3.0) fail(o, fmt("positive-cone alpha=%g at %.2f SE", alpha, z));
    if (!r["cone_preserved"].get<bool>()) fail(o, fmt("positive-cone alpha=%g left its cone", alpha));
    summary += fmt("gap alpha=%g |z|=%.2f; ", alpha, z);
  }
  if (o.pass) o.detail = summary.substr(0, summary.size() - 2);
  return o;
}

Outcome stationarity() {
  Outcome o;
  const EnsembleSpec spec = EnsembleSpec::gaussian(3, 1.0);
  const auto slopes = ActivationSlopes::leaky(0.1);
  std::uint64_t seed = 9000;
  std::string summary;
  for (int steps : {1, 10}) {
    const std::uint64_t s = seed++;
    const json r = record(fmt("stationarity steps=%d", steps), [=](unsigned w) {
      const auto m = dynamics::stationarity_check(spec, slopes, steps, 100000, config(s, w));
      return json{{"max_abs_mean", m.max_abs_mean}, {"max_second_moment_deviation", m.max_second_moment_deviation}};
    });
    const double mean = r["max_abs_mean"].get<double>();
    const double dev = r["max_second_moment_deviation"].get<double>();
    if (!(mean < 0.01) || !(dev < 0.01)) o.pass = false;
    summary += fmt("%d-step |E[S]|=%.4f |E[SS^T]-I/3|=%.4f; ", steps, mean, dev);
  }
  o.detail = summary.substr(0, summary.size() - 2);
  if (!o.pass) o.detail += " (threshold 0.01)";
  return o;
}

Outcome determinism() {
  Outcome o;
  for (const McRun& run : g_runs) {
    if (dump_json17(run.body(kReplayWorkers)) != run.first_output) fail(o, run.name + " differs");
  }
  if (o.pass) o.detail = fmt("%zu runs replayed with %u workers, byte-identical", g_runs.size(), kReplayWorkers);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*check)();
  };
  const Criterion criteria[] = {
      {"lookup tables", lookup_tables},
      {"closed forms", closed_forms},
      {"frullani", frullani},
      {"monte-carlo vs quadrature", mc_quadrature_agreement},
      {"critical construction", critical_construction},
      {"clt shape", clt_shape},
      {"asymptotic expansion", asymptotic_expansion},
      {"counterexamples", counterexamples},
      {"stationarity", stationarity},
      {"determinism", determinism},
  };
  int failures = 0;
  int index = 1;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index++, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
