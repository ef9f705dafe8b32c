#include "lyapinit/cli.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lyapinit/analytic.hpp"
#include "lyapinit/dynamics.hpp"
#include "lyapinit/ensembles.hpp"
#include "lyapinit/errors.hpp"
#include "lyapinit/initgen.hpp"
#include "lyapinit/rng.hpp"
#include "lyapinit/table.hpp"

namespace lyapinit::cli {

namespace {

using nlohmann::json;

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  file.flush();
  if (!file) throw IoError("failed writing '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << file.rdbuf();
  return buf.str();
}

double parse_number(const std::string& text, const char* flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw UsageError(std::string(flag) + ": expected a number, got '" + text + "'");
  }
  return v;
}

json ensemble_json(const EnsembleSpec& e) {
  return {{"kind", std::string(to_string(e.kind))}, {"d", e.d}, {"scale", e.scale}};
}

json report_json(const LyapunovReport& r, ExpansionVariant variant) {
  return {
      {"ensemble", ensemble_json(r.ensemble)},
      {"alpha", r.alpha},
      {"lambda", r.lambda},
      {"I_alpha", r.I_alpha},
      {"I_one", r.I_one},
      {"sigma_crit", r.sigma_crit},
      {"eta_crit", r.eta_crit},
      {"sigma_he", r.sigma_he},
      {"lambda_he", r.lambda_he},
      {"lambda_orth_unscaled", r.lambda_orth_unscaled},
      {"asymptotic",
       {{"variant", variant == ExpansionVariant::corrected ? "corrected" : "as-stated"},
        {"lambda", r.asymptotic_lambda},
        {"residual", r.asymptotic_residual},
        {"c_alpha", r.c_alpha}}},
  };
}

std::string per_trial_csv(const char* header, const std::vector<double>& values) {
  std::ostringstream s;
  s.precision(17);
  s << header << '\n';
  for (double v : values) s << v << '\n';
  return s.str();
}

// ---- exponent -------------------------------------------------------------

struct ExponentArgs {
  int d = 0;
  double alpha = 0.0;
  std::string ensemble = "gaussian";
  double scale = 1.0;
  std::string expansion = "corrected";
  std::string out;
};

void cmd_exponent(const ExponentArgs& a, std::ostream& out) {
  const EnsembleSpec e{parse_ensemble_kind(a.ensemble), a.d, a.scale};
  const ExpansionVariant variant =
      a.expansion == "as-stated" ? ExpansionVariant::as_stated : ExpansionVariant::corrected;
  write_text(a.out, dump_json17(report_json(analytic::report(e, a.alpha, {}, variant), variant)) + "\n", out);
}

// ---- table ----------------------------------------------------------------

struct TableArgs {
  double alpha = 0.0;
  std::vector<int> dims;
  std::string format = "csv";
  std::string out;
};

void cmd_table(const TableArgs& a, std::ostream& out) {
  const TableFormat format = parse_table_format(a.format);
  const auto& dims = a.dims.empty() ? table::default_dims() : a.dims;
  write_text(a.out, table::render(table::rows(a.alpha, dims), a.alpha, format), out);
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string experiment;
  int d = 2;
  double alpha = 0.1;
  std::string ensemble = "gaussian";
  std::string scale;
  int depth = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double a = 1.0;
  unsigned workers = 0;
  std::string out;
  std::string csv;
  // which flags were given explicitly
  bool has_alpha = false, has_ensemble = false, has_scale = false, has_depth = false, has_trials = false,
       has_seed = false, has_a = false;
};

struct ResolvedScale {
  double value;
  std::string mode;
};

ResolvedScale resolve_scale(const std::string& text, EnsembleKind kind, int d, double alpha) {
  if (text.empty() || text == "crit") return {analytic::critical_scale(kind, d, alpha), "crit"};
  if (text == "he") {
    if (kind != EnsembleKind::GaussianIID) throw UsageError("--scale he applies to the gaussian ensemble only");
    return {analytic::sigma_he(d, alpha), "he"};
  }
  return {parse_number(text, "--scale"), "value"};
}

void cmd_simulate(SimulateArgs a, std::ostream& out) {
  const std::string& x = a.experiment;
  const bool relu = x == "relu-zero";
  const bool cone = x == "positive-cone";
  if (!a.has_seed) a.seed = entropy_seed();
  if (a.has_a && !cone) throw UsageError("--a only applies to the positive-cone experiment");
  if (cone && (a.has_ensemble || a.has_scale)) {
    throw UsageError("positive-cone uses Unif[0, a] weights; --ensemble and --scale do not apply");
  }
  if (relu && a.has_alpha) throw UsageError("relu-zero uses ReLU slopes; --alpha does not apply");
  if (relu && a.has_ensemble && a.ensemble != "gaussian") throw UsageError("relu-zero uses gaussian weights");
  if (!a.csv.empty() && (x == "stationarity" || relu)) throw UsageError("--csv is not available for " + x);

  auto default_depth = [&] {
    if (x == "lln") return 1000;
    if (x == "clt") return 256;
    if (cone) return 300;
    return 1;
  };
  auto default_trials = [&]() -> std::size_t {
    if (x == "lln" || cone) return 200;
    return 100000;
  };
  if (!a.has_depth) a.depth = default_depth();
  if (!a.has_trials) a.trials = default_trials();
  if (x == "single-step" && a.has_depth && a.depth != 1) throw UsageError("single-step uses depth 1");

  const RunConfig cfg{a.seed, a.workers, !a.csv.empty()};
  json params = {{"d", a.d}, {"depth", a.depth}, {"trials", a.trials}};
  json rec = {{"experiment", x}};
  std::string csv_text;

  if (relu) {
    double sigma = 1.0;
    std::string mode = "value";
    if (a.scale == "he") {
      sigma = std::sqrt(2.0 / a.d);
      mode = "he";
    } else if (a.scale == "crit") {
      throw UsageError("relu-zero has no critical scale");
    } else if (!a.scale.empty()) {
      sigma = parse_number(a.scale, "--scale");
    }
    const auto r = dynamics::counterexample_relu(a.d, sigma, a.depth, a.trials, cfg);
    params.update({{"ensemble", "gaussian"}, {"scale", sigma}, {"scale_mode", mode}});
    rec.update({{"mean", r.zero_fraction_layer1},
                {"std_error", r.std_error_layer1},
                {"expected", std::ldexp(1.0, -a.d)},
                {"zero_fraction_layer1", r.zero_fraction_layer1},
                {"zero_fraction_final", r.zero_fraction_final},
                {"std_error_final", r.std_error_final}});
  } else if (cone) {
    const auto r = dynamics::counterexample_positive_cone(a.d, a.a, a.alpha, a.depth, a.trials, cfg);
    params.update({{"alpha", a.alpha}, {"a", a.a}});
    rec.update({{"mean", r.gap},
                {"std_error", r.gap_std_error},
                {"expected", std::log(1.0 / a.alpha)},
                {"limit_pos", r.limit_pos.mean},
                {"limit_pos_std_error", r.limit_pos.std_error},
                {"limit_neg", r.limit_neg.mean},
                {"limit_neg_std_error", r.limit_neg.std_error},
                {"cone_preserved", r.cone_preserved}});
    if (cfg.keep_per_trial) {
      std::ostringstream s;
      s.precision(17);
      s << "limit_pos,limit_neg\n";
      for (std::size_t i = 0; i < a.trials; ++i) {
        s << r.limit_pos.per_trial_values[i] << ',' << r.limit_neg.per_trial_values[i] << '\n';
      }
      csv_text = s.str();
    }
  } else {
    const EnsembleKind kind = parse_ensemble_kind(a.ensemble);
    const auto slopes = ActivationSlopes::leaky(a.alpha);
    const ResolvedScale s = resolve_scale(a.scale, kind, a.d, a.alpha);
    const EnsembleSpec e{kind, a.d, s.value};
    e.validate();
    params.update({{"alpha", a.alpha}, {"ensemble", std::string(to_string(kind))}, {"scale", s.value},
                   {"scale_mode", s.mode}});
    const double lambda = analytic::lambda(e, a.alpha);
    rec["lambda_analytic"] = lambda;

    if (x == "lln" || x == "single-step") {
      const MCEstimate m = x == "lln" ? dynamics::estimate_lambda_deep(e, slopes, a.depth, a.trials, cfg)
                                      : dynamics::estimate_lambda_single_step(e, slopes, a.trials, cfg);
      rec.update({{"mean", m.mean}, {"std_error", m.std_error}});
      if (cfg.keep_per_trial) csv_text = per_trial_csv("value", m.per_trial_values);
    } else if (x == "clt") {
      const CLTReport r = dynamics::estimate_clt(e, slopes, a.depth, a.trials, lambda, cfg);
      rec.update({{"mean", r.mean},
                  {"std_error", std::sqrt(r.gamma_hat / static_cast<double>(r.trials))},
                  {"gamma_hat", r.gamma_hat},
                  {"skewness", r.skewness},
                  {"excess_kurtosis", r.excess_kurtosis}});
      if (cfg.keep_per_trial) csv_text = per_trial_csv("normalized", r.normalized_samples);
    } else if (x == "stationarity") {
      const MomentReport r = dynamics::stationarity_check(e, slopes, a.depth, a.trials, cfg);
      json mean = json::array(), second = json::array();
      for (Eigen::Index i = 0; i < r.mean.size(); ++i) mean.push_back(r.mean(i));
      for (Eigen::Index i = 0; i < r.second_moment.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < r.second_moment.cols(); ++j) row.push_back(r.second_moment(i, j));
        second.push_back(std::move(row));
      }
      rec.update({{"mean", r.max_abs_mean},
                  {"std_error", nullptr},
                  {"max_abs_mean", r.max_abs_mean},
                  {"max_second_moment_deviation", r.max_second_moment_deviation},
                  {"mean_direction", std::move(mean)},
                  {"second_moment", std::move(second)}});
    } else {
      throw UsageError("unknown experiment '" + x + "'");
    }
  }

  rec["params"] = std::move(params);
  rec["trials"] = a.trials;
  rec["seed"] = a.seed;
  if (!a.csv.empty()) write_text(a.csv, csv_text, out);
  write_text(a.out, dump_json17(rec) + "\n", out);
}

// ---- init -----------------------------------------------------------------

struct InitArgs {
  int d = 0;
  double alpha = 0.0;
  int depth = 0;
  std::string kind = "gaussian";
  bool sampled = false;
  int candidates = 0;
  int probe_inputs = 256;
  std::string input_dist = "sphere";
  std::string metric = "log";
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::string out;
  bool has_seed = false, has_candidates = false, has_probe = false, has_input = false, has_metric = false;
};

InputDistribution parse_input_dist(const std::string& text, int d) {
  if (text == "sphere") return InputDistribution::uniform_sphere(d);
  if (text.rfind("box:", 0) == 0) {
    const auto rest = text.substr(4);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw UsageError("--input-dist box expects box:LO:HI");
    return InputDistribution::uniform_box(d, parse_number(rest.substr(0, colon), "--input-dist"),
                                          parse_number(rest.substr(colon + 1), "--input-dist"));
  }
  if (text.rfind("file:", 0) == 0) {
    json doc;
    try {
      doc = json::parse(read_text(text.substr(5)));
    } catch (const json::exception& e) {
      throw UsageError(std::string("--input-dist file: ") + e.what());
    }
    if (!doc.is_array()) throw UsageError("--input-dist file must hold an array of vectors");
    std::vector<Vector> vs;
    for (const auto& row : doc) {
      if (!row.is_array()) throw UsageError("--input-dist file must hold an array of vectors");
      Vector v(static_cast<Eigen::Index>(row.size()));
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!row[i].is_number()) throw UsageError("--input-dist file entries must be numbers");
        v(static_cast<Eigen::Index>(i)) = row[i].get<double>();
      }
      vs.push_back(std::move(v));
    }
    auto dist = InputDistribution::fixed_set(std::move(vs));
    if (dist.d != d) throw UsageError("--input-dist vectors must have dimension d");
    return dist;
  }
  throw UsageError("--input-dist expects sphere, box:LO:HI or file:PATH");
}

void cmd_init(InitArgs a, std::ostream& out) {
  if (!a.has_seed) a.seed = entropy_seed();
  const EnsembleKind kind = parse_ensemble_kind(a.kind);
  WeightStack stack;
  if (a.sampled) {
    SampledInitOptions opts;
    if (a.has_candidates) opts.candidate_count = a.candidates;
    opts.probe_inputs = a.probe_inputs;
    if (a.metric == "log") {
      opts.metric = SelectionMetric::log_distance;
    } else if (a.metric == "linear") {
      opts.metric = SelectionMetric::linear_distance;
    } else {
      throw UsageError("--metric expects log or linear");
    }
    opts.workers = a.workers;
    const auto inputs = parse_input_dist(a.input_dist, a.d);
    stack = initgen::sampled_lyapunov_init(a.d, a.depth, a.alpha, kind, inputs, opts, a.seed).stack;
    stack.diagnostics["input_dist"] = a.input_dist;
  } else {
    if (a.has_candidates || a.has_probe || a.has_input || a.has_metric) {
      throw UsageError("--candidates, --probe-inputs, --input-dist and --metric require --sampled");
    }
    RngStream rng(a.seed, 0);
    stack = initgen::lyapunov_init(a.d, a.depth, a.alpha, kind, rng);
  }
  write_text(a.out, to_json_string(stack) + "\n", out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lyapunov exponents and critical initialization for deep Leaky-ReLU networks", "lyapinit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lyapinit 0.1.0");

  ExponentArgs ex;
  auto* sub_ex = app.add_subcommand("exponent", "Analytic Lyapunov exponent for one ensemble");
  sub_ex->add_option("--d", ex.d, "Width")->required()->check(CLI::Range(1, quad::kMaxWidth));
  sub_ex->add_option("--alpha", ex.alpha, "Leaky-ReLU negative slope")->required();
  sub_ex->add_option("--ensemble", ex.ensemble, "gaussian or orthogonal")
      ->check(CLI::IsMember({"gaussian", "orthogonal"}));
  sub_ex->add_option("--scale", ex.scale, "sigma (gaussian) or eta (orthogonal)");
  sub_ex->add_option("--expansion", ex.expansion, "Large-d expansion coefficient")
      ->check(CLI::IsMember({"corrected", "as-stated"}));
  sub_ex->add_option("--out", ex.out, "Output file (default stdout)");

  TableArgs tb;
  auto* sub_tb = app.add_subcommand("table", "Lookup table of I, exponents and critical scales");
  sub_tb->add_option("--alpha", tb.alpha, "Leaky-ReLU negative slope")->required();
  sub_tb->add_option("--dims", tb.dims, "Comma-separated widths (default: standard 35-width list)")
      ->delimiter(',')
      ->check(CLI::Range(1, quad::kMaxWidth));
  sub_tb->add_option("--format", tb.format, "csv, md or json")->check(CLI::IsMember({"csv", "md", "json"}));
  sub_tb->add_option("--out", tb.out, "Output file (default stdout)");

  SimulateArgs sm;
  auto* sub_sm = app.add_subcommand("simulate", "Monte-Carlo experiments");
  sub_sm->add_option("--experiment", sm.experiment, "Experiment")
      ->required()
      ->check(CLI::IsMember({"lln", "clt", "single-step", "stationarity", "relu-zero", "positive-cone"}));
  sub_sm->add_option("--d", sm.d, "Width")->check(CLI::Range(1, quad::kMaxWidth));
  auto* sm_alpha = sub_sm->add_option("--alpha", sm.alpha, "Leaky-ReLU negative slope");
  auto* sm_ens = sub_sm->add_option("--ensemble", sm.ensemble, "gaussian or orthogonal")
                     ->check(CLI::IsMember({"gaussian", "orthogonal"}));
  auto* sm_scale = sub_sm->add_option("--scale", sm.scale, "Number, crit or he (default crit)");
  auto* sm_depth = sub_sm->add_option("--depth", sm.depth, "Layers (steps for stationarity)")
                       ->check(CLI::PositiveNumber);
  auto* sm_trials = sub_sm->add_option("--trials", sm.trials, "Independent trials")->check(CLI::PositiveNumber);
  auto* sm_seed = sub_sm->add_option("--seed", sm.seed, "Master seed (default: drawn and recorded)");
  auto* sm_a = sub_sm->add_option("--a", sm.a, "Unif[0, a] bound for positive-cone");
  sub_sm->add_option("--workers", sm.workers, "Worker threads (default LYAPINIT_THREADS or all cores)");
  sub_sm->add_option("--out", sm.out, "Result JSON file (default stdout)");
  sub_sm->add_option("--csv", sm.csv, "Per-trial CSV file");

  InitArgs in;
  auto* sub_in = app.add_subcommand("init", "Write a Lyapunov-initialized weight stack");
  sub_in->add_option("--d", in.d, "Width")->required()->check(CLI::Range(1, quad::kMaxWidth));
  sub_in->add_option("--alpha", in.alpha, "Leaky-ReLU negative slope")->required();
  sub_in->add_option("--depth", in.depth, "Layers")->required()->check(CLI::PositiveNumber);
  sub_in->add_option("--kind", in.kind, "gaussian or orthogonal")->check(CLI::IsMember({"gaussian", "orthogonal"}));
  sub_in->add_flag("--sampled", in.sampled, "Keep the best of several candidate stacks");
  auto* in_cand = sub_in->add_option("--candidates", in.candidates, "Candidate count (default ceil(2 sqrt(depth)))")
                      ->check(CLI::PositiveNumber);
  auto* in_probe = sub_in->add_option("--probe-inputs", in.probe_inputs, "Probe inputs per candidate")
                       ->check(CLI::PositiveNumber);
  auto* in_dist = sub_in->add_option("--input-dist", in.input_dist, "sphere, box:LO:HI or file:PATH");
  auto* in_metric = sub_in->add_option("--metric", in.metric, "log or linear");
  auto* in_seed = sub_in->add_option("--seed", in.seed, "Master seed (default: drawn and recorded)");
  sub_in->add_option("--workers", in.workers, "Worker threads");
  sub_in->add_option("--out", in.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*sub_ex) {
      cmd_exponent(ex, out);
    } else if (*sub_tb) {
      cmd_table(tb, out);
    } else if (*sub_sm) {
      sm.has_alpha = sm_alpha->count() > 0;
      sm.has_ensemble = sm_ens->count() > 0;
      sm.has_scale = sm_scale->count() > 0;
      sm.has_depth = sm_depth->count() > 0;
      sm.has_trials = sm_trials->count() > 0;
      sm.has_seed = sm_seed->count() > 0;
      sm.has_a = sm_a->count() > 0;
      cmd_simulate(sm, out);
    } else if (*sub_in) {
      in.has_seed = in_seed->count() > 0;
      in.has_candidates = in_cand->count() > 0;
      in.has_probe = in_probe->count() > 0;
      in.has_input = in_dist->count() > 0;
      in.has_metric = in_metric->count() > 0;
      cmd_init(in, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const AccuracyError& e) {
    err << "numerical error: " << e.what() << " (estimate " << e.estimate() << ", error bound " << e.error_bound()
        << ")\n";
    return kNumerical;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kNumerical;
  }
  return kSuccess;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("lyapinit");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace lyapinit::cli
