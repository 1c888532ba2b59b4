#include "carate/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "carate/covariance.hpp"
#include "carate/data.hpp"
#include "carate/error.hpp"
#include "carate/estimate.hpp"
#include "carate/inference.hpp"
#include "carate/mc.hpp"
#include "carate/rmt.hpp"

#ifndef CARATE_VERSION
#define CARATE_VERSION "0.1.0"
#endif

namespace carate {

namespace {

// Flat `key = value` files: keys without a section apply to whichever
// subcommand is being run.
class FlatConfig : public CLI::ConfigBase {
 public:
  explicit FlatConfig(const CLI::App* root) : root_(root) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigBase::from_config(input);
    const auto subs = root_->get_subcommands();
    if (subs.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty()) item.parents.push_back(subs.front()->get_name());
    }
    return items;
  }

 private:
  const CLI::App* root_;
};

struct AnalyzeOptions {
  std::string data;
  std::string outcome = "Y";
  std::string treatment = "A";
  std::string stratum = "S";
  std::vector<std::string> covariates;
  double alpha = 0.05;
  double tau0 = 0.0;
  std::string variance = "crossfit";
  double ridge = 0.0;
  bool drop_small = false;
  std::size_t min_arm_size = 0;
  std::string out;
  bool verbose = false;
};

struct SimulateOptions {
  int model = 1;
  std::size_t n = 400;
  std::size_t strata = 2;
  long k = -1;  // -1: the design default, see resolve_k
  double effect = 0.0;
  std::string scheme = "sbr";
  double lambda = 0.75;
  std::string pi = "0.5";
  std::size_t reps = 1000;
  std::uint64_t seed = 42;
  std::size_t workers = 0;
  double alpha = 0.05;
  double tau0 = 0.0;
  std::string variance = "crossfit";
  double ridge = 0.0;
  std::string methods = "adj,star,unadj,naive";
  std::string out;
  std::string dump_reps;
  std::string k_grid;  // sweep only
};

struct VifOptions {
  std::string kappa_grid = "0:0.9:0.05";
  std::string out;
};

std::string num(double v) { return format_number(v); }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  return out;
}

double to_real(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw UsageError("invalid " + what + " '" + s + "'");
  return v;
}

std::size_t to_count(const std::string& s, const std::string& what) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw UsageError("invalid " + what + " '" + s + "'");
  return v;
}

Scheme make_scheme(const SimulateOptions& o) {
  Scheme scheme;
  scheme.kind = parse_scheme(o.scheme);
  scheme.lambda = o.lambda;
  if (o.pi.find('=') == std::string::npos) {
    scheme.default_pi = to_real(o.pi, "pi");
  } else {
    scheme.default_pi.reset();
    for (const auto& part : split(o.pi, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw UsageError("invalid pi entry '" + part + "'");
      scheme.pi_by_stratum[part.substr(0, eq)] = to_real(part.substr(eq + 1), "pi");
    }
  }
  for (const auto& [label, pi] : scheme.pi_by_stratum) {
    if (!(pi >= 0.0 && pi <= 1.0)) throw UsageError("pi for '" + label + "' must lie in [0, 1]");
  }
  if (scheme.default_pi && !(*scheme.default_pi >= 0.0 && *scheme.default_pi <= 1.0)) {
    throw UsageError("pi must lie in [0, 1]");
  }
  if (scheme.kind == SchemeKind::kBcd && !(o.lambda > 0.5 && o.lambda <= 1.0)) {
    throw UsageError("lambda must lie in (1/2, 1]");
  }
  return scheme;
}

std::size_t resolve_k(const SimulateOptions& o, const ModelSpec& spec) {
  if (o.k >= 0) return static_cast<std::size_t>(o.k);
  // All latent covariates, or for the polynomial model as many terms as give
  // kappa = 0.4 per arm.
  if (spec.model != 4) return available_regressors(spec);
  const auto k = static_cast<std::size_t>(0.4 * static_cast<double>(spec.n) /
                                          (2.0 * static_cast<double>(spec.num_strata)));
  return std::min(k, available_regressors(spec));
}

SimConfig make_sim_config(const SimulateOptions& o) {
  SimConfig cfg;
  cfg.model.model = o.model;
  cfg.model.n = o.n;
  cfg.model.num_strata = o.strata;
  cfg.model.effect = o.effect;
  if (o.model < 1 || o.model > 6) throw UsageError("model must be in 1..6");
  if (o.strata < 1) throw UsageError("strata must be positive");
  cfg.model.k = resolve_k(o, cfg.model);
  cfg.scheme = make_scheme(o);
  cfg.methods.clear();
  for (const auto& m : split(o.methods, ',')) cfg.methods.push_back(parse_method(m));
  cfg.variant = parse_variant(o.variance);
  cfg.reps = o.reps;
  cfg.seed = o.seed;
  cfg.alpha = o.alpha;
  cfg.tau0 = o.tau0;
  cfg.ridge = o.ridge;
  cfg.workers = o.workers;
  cfg.check();
  return cfg;
}

ResolvedConfig resolve_simulate(const std::string& command, const SimulateOptions& o,
                                const SimConfig& cfg) {
  ResolvedConfig rc;
  rc.add("command", command);
  rc.add("model", std::to_string(cfg.model.model));
  rc.add("n", std::to_string(cfg.model.n));
  rc.add("strata", std::to_string(cfg.model.num_strata));
  if (command == "sweep") {
    rc.add("k-grid", o.k_grid);
  } else {
    rc.add("k", std::to_string(cfg.model.k));
  }
  rc.add("effect", num(cfg.model.effect));
  rc.add("scheme", std::string(scheme_name(cfg.scheme.kind)));
  rc.add("lambda", num(cfg.scheme.lambda));
  rc.add("pi", o.pi);
  rc.add("reps", std::to_string(cfg.reps));
  rc.add("seed", std::to_string(cfg.seed));
  rc.add("alpha", num(cfg.alpha));
  rc.add("tau0", num(cfg.tau0));
  rc.add("variance", std::string(variant_name(cfg.variant)));
  rc.add("ridge", num(cfg.ridge));
  std::string methods;
  for (Method m : cfg.methods) {
    if (!methods.empty()) methods += ',';
    methods += method_name(m);
  }
  rc.add("methods", methods);
  rc.add("workers", std::to_string(cfg.workers), false);
  rc.add("out", o.out.empty() ? "-" : o.out, false);
  if (command == "simulate") rc.add("dump-reps", o.dump_reps, false);
  return rc;
}

void print_config(std::ostream& os, const ResolvedConfig& rc) {
  os << "# carate " << version() << " resolved configuration\n";
  for (const auto& e : rc.entries) os << "#   " << e.key << " = " << e.value << '\n';
}

void write_trailer(std::ostream& os, const std::string& seed, const ResolvedConfig& rc) {
  os << "# carate " << version() << " seed=" << seed << " config-hash=" << rc.hash() << '\n';
}

// Output sink: a file when a path is given, else the caller's stdout.
class CsvSink {
 public:
  CsvSink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw DataError("cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }
  bool to_file() const { return file_ != nullptr; }
  void finish(const std::string& path) {
    stream_->flush();
    if (!*stream_) throw DataError("failed writing '" + path + "'");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

void print_summary(std::ostream& os, const SimReport& report, std::size_t k) {
  os << "# k=" << k << '\n';
  os << "#   method    reject%   95% interval        bias        sd     mean_se   sd/se  fail\n";
  for (const auto& s : report.methods) {
    char line[200];
    std::snprintf(line, sizeof line,
                  "#   %-7s %8.2f   [%6.2f, %6.2f]  %10.5f %9.5f %9.5f %7.3f %5zu\n",
                  std::string(method_name(s.method)).c_str(), 100.0 * s.reject_rate,
                  100.0 * s.wilson_lo, 100.0 * s.wilson_hi, s.bias, s.sd, s.mean_se,
                  s.sd_se_ratio, s.failures);
    os << line;
  }
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  const SimConfig cfg = make_sim_config(o);
  const ResolvedConfig rc = resolve_simulate("simulate", o, cfg);
  CsvSink sink(o.out, out);
  std::ostream& info = sink.to_file() ? out : err;
  print_config(info, rc);

  const SimulationRun run = run_simulation(cfg);
  std::ostream& csv = sink.get();
  write_report_header(csv);
  write_report_rows(csv, cfg, cfg.model.k, run.report);
  write_trailer(csv, std::to_string(cfg.seed), rc);
  sink.finish(o.out);

  if (!o.dump_reps.empty()) {
    std::ofstream dump(o.dump_reps, std::ios::binary);
    if (!dump) throw DataError("cannot open '" + o.dump_reps + "' for writing");
    write_replication_dump(dump, cfg, run.records);
    write_trailer(dump, std::to_string(cfg.seed), rc);
  }
  print_summary(info, run.report, cfg.model.k);
  char wall[64];
  std::snprintf(wall, sizeof wall, "# wall time %.2f s\n", run.report.wall_seconds);
  info << wall;
  return kExitOk;
}

int cmd_sweep(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  if (o.k_grid.empty()) throw UsageError("sweep requires --k-grid");
  const std::vector<std::size_t> grid = parse_count_grid(o.k_grid);
  SimulateOptions base = o;
  base.k = grid.empty() ? 0 : static_cast<long>(grid.front());
  const SimConfig cfg = make_sim_config(base);
  for (std::size_t k : grid) {
    if (k > available_regressors(cfg.model)) {
      throw UsageError("k = " + std::to_string(k) + " exceeds the " +
                       std::to_string(available_regressors(cfg.model)) +
                       " available regressors");
    }
  }
  const ResolvedConfig rc = resolve_simulate("sweep", o, cfg);
  CsvSink sink(o.out, out);
  std::ostream& info = sink.to_file() ? out : err;
  print_config(info, rc);

  const std::vector<SweepRow> rows = sweep_kappa(cfg, grid);
  std::ostream& csv = sink.get();
  write_report_header(csv);
  for (const auto& row : rows) write_report_rows(csv, cfg, row.k, row.report);
  write_trailer(csv, std::to_string(cfg.seed), rc);
  sink.finish(o.out);
  for (const auto& row : rows) print_summary(info, row.report, row.k);
  return kExitOk;
}

int cmd_vif(const VifOptions& o, std::ostream& out, std::ostream& err) {
  const std::vector<double> grid = parse_real_grid(o.kappa_grid);
  for (double kappa : grid) {
    if (!(kappa >= 0.0 && kappa < 1.0)) {
      throw UsageError("kappa grid values must lie in [0, 1); got " + num(kappa));
    }
  }
  ResolvedConfig rc;
  rc.add("command", "vif");
  rc.add("kappa-grid", o.kappa_grid);
  rc.add("out", o.out.empty() ? "-" : o.out, false);
  CsvSink sink(o.out, out);
  print_config(sink.to_file() ? out : err, rc);
  std::ostream& csv = sink.get();
  csv << "kappa,zeta,vif\n";
  for (const auto& p : vif_curve(grid)) {
    csv << num(p.kappa) << ',' << num(2.0 * p.vif) << ',' << num(p.vif) << '\n';
  }
  write_trailer(csv, "none", rc);
  sink.finish(o.out);
  return kExitOk;
}

void write_method_row(std::ostream& csv, const std::string& method,
                      const std::string& variance, double estimate, double var,
                      std::size_t n, const AnalyzeOptions& o, double weight,
                      std::ostream& info) {
  csv << method << ',' << variance << ',' << num(estimate) << ',';
  if (!(var > 0.0)) {
    info << "# note: " << method
         << " has a non-positive variance estimate; no test reported\n";
    csv << ",,,,,," << num(weight) << '\n';
    return;
  }
  const TestResult t = wald(estimate, var, n, o.tau0, o.alpha);
  const auto [lo, hi] = confidence_interval(estimate, var, n, o.alpha);
  csv << num(std::sqrt(var / static_cast<double>(n))) << ',' << num(t.statistic) << ','
      << num(t.p_value) << ',' << (t.reject ? 1 : 0) << ',' << num(lo) << ',' << num(hi)
      << ',' << num(weight) << '\n';
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  if (!(o.ridge >= 0.0)) throw UsageError("ridge must be non-negative");
  const VarianceVariant variant = parse_variant(o.variance);
  ColumnSpec spec;
  spec.outcome = o.outcome;
  spec.treatment = o.treatment;
  spec.stratum = o.stratum;
  spec.covariates = o.covariates;

  ResolvedConfig rc;
  rc.add("command", "analyze");
  rc.add("data", o.data);
  rc.add("outcome", o.outcome);
  rc.add("treatment", o.treatment);
  rc.add("stratum", o.stratum);
  std::string covs;
  for (const auto& c : o.covariates) covs += (covs.empty() ? "" : ",") + c;
  rc.add("covariates", covs);
  rc.add("alpha", num(o.alpha));
  rc.add("tau0", num(o.tau0));
  rc.add("variance", std::string(variant_name(variant)));
  rc.add("ridge", num(o.ridge));
  rc.add("drop-small-strata", o.drop_small ? "true" : "false");
  rc.add("min-arm-size", std::to_string(o.min_arm_size));
  rc.add("out", o.out.empty() ? "-" : o.out, false);

  CsvSink sink(o.out, out);
  std::ostream& info = sink.to_file() ? out : err;
  print_config(info, rc);

  Dataset d = load_dataset(o.data, spec);
  StrataIndex idx = build_index(d);
  ValidationPolicy policy;
  policy.drop_small_strata = o.drop_small;
  policy.min_arm_size = o.min_arm_size;
  const ValidationReport report = validate(d, idx, policy);
  if (!report.dropped_strata.empty()) {
    for (const auto& label : report.dropped_strata) {
      info << "# notice: dropping stratum '" << label << "' (small-stratum policy)\n";
    }
  }
  if (!report.adjusted_estimable()) {
    for (const auto& e : report.errors) err << "carate: " << e << '\n';
    return kExitData;
  }
  if (!report.dropped_strata.empty()) {
    d = drop_strata(d, report.dropped_strata);
    idx = build_index(d);
  }
  info << "# n = " << d.n() << ", k = " << d.k() << ", strata = " << idx.num_strata() << '\n';

  const AteResult ate = estimate_ate(d, idx, variant, o.ridge);
  const UnadjustedEstimate unadj = tau_unadj(d, idx);
  const SigmaHat naive = sigma_matrix(d, idx, ate.fits, ate.tau_adj, ate.tau_unadj,
                                      VarianceVariant::kNaiveFixedK);
  if (ate.coincident) {
    info << "# note: adjusted and unadjusted estimators coincide; combination weight set to 1\n";
  }
  if (!ate.sigma.psd) {
    info << "# warning: estimated covariance matrix is not positive semidefinite\n";
  }
  if (o.verbose) {
    const auto& m = ate.sigma.matrix;
    info << "# sigma[adj,adj] = " << num(m(0, 0)) << "\n# sigma[adj,unadj] = "
         << num(m(0, 1)) << "\n# sigma[unadj,unadj] = " << num(m(1, 1)) << '\n';
    info << "# U11 = " << num(ate.sigma.u.u11) << ", U12 = " << num(ate.sigma.u.u12)
         << ", V_adj = " << num(ate.sigma.v_adj) << ", W = " << num(ate.sigma.w) << '\n';
    for (const auto& t : ate.sigma.u.arms) {
      info << "#   stratum '" << idx.strata[t.stratum].label << "' arm " << t.arm
           << ": weight " << num(t.weight) << ", u11 " << num(t.u11_term) << ", u12 "
           << num(t.u12_term) << ", gamma " << num(ate.fits.at(t.stratum, t.arm).gamma)
           << '\n';
    }
    for (std::size_t s = 0; s < idx.num_strata(); ++s) {
      info << "#   stratum '" << idx.strata[s].label << "': tau_1 "
           << num(ate.tau_treated[s]) << ", tau_0 " << num(ate.tau_control[s])
           << ", mean_1 " << num(unadj.treated_mean[s]) << ", mean_0 "
           << num(unadj.control_mean[s]) << '\n';
    }
  }

  std::ostream& csv = sink.get();
  csv << "method,variance,estimate,se,statistic,p_value,reject,ci_lo,ci_hi,weight\n";
  const std::string v(variant_name(variant));
  write_method_row(csv, "adj", v, ate.tau_adj, ate.sigma.matrix(0, 0), d.n(), o, 1.0, info);
  write_method_row(csv, "star", v, ate.tau_star, ate.var_star, d.n(), o, ate.weight, info);
  write_method_row(csv, "unadj", "unadj", ate.tau_unadj, ate.sigma.matrix(1, 1), d.n(), o,
                   0.0, info);
  write_method_row(csv, "naive", "naive", ate.tau_adj, naive.matrix(0, 0), d.n(), o, 1.0,
                   info);
  write_trailer(csv, "none", rc);
  sink.finish(o.out);
  return kExitOk;
}

void add_simulation_options(CLI::App* sub, SimulateOptions& o, bool sweep) {
  sub->add_option("--model", o.model, "Design 1-6")->capture_default_str();
  sub->add_option("--n", o.n, "Sample size")->capture_default_str();
  sub->add_option("--strata", o.strata, "Number of strata")->capture_default_str();
  if (sweep) {
    sub->add_option("--k-grid", o.k_grid, "Regressor counts, start:stop:step or a list");
  } else {
    sub->add_option("--k", o.k,
                    "Regressors used (default: all latent covariates; for model 4, "
                    "kappa = 0.4)");
  }
  sub->add_option("--effect", o.effect, "mu_1 - mu_0")->capture_default_str();
  sub->add_option("--scheme", o.scheme, "srs, wei, bcd or sbr")->capture_default_str();
  sub->add_option("--lambda", o.lambda, "Biased-coin probability")->capture_default_str();
  sub->add_option("--pi", o.pi, "Treated fraction, or label=value,... per stratum")
      ->capture_default_str();
  sub->add_option("--reps", o.reps, "Replications")->capture_default_str();
  sub->add_option("--seed", o.seed, "Base seed")->envname("CARATE_SEED")->capture_default_str();
  sub->add_option("--workers", o.workers, "Worker threads (0: all cores)")
      ->capture_default_str();
  sub->add_option("--alpha", o.alpha, "Test level")->capture_default_str();
  sub->add_option("--tau0", o.tau0, "Null value")->capture_default_str();
  sub->add_option("--variance", o.variance, "crossfit, ho, hc3 or naive")
      ->capture_default_str();
  sub->add_option("--ridge", o.ridge, "Combination safeguard")->capture_default_str();
  sub->add_option("--methods", o.methods, "Subset of adj,star,unadj,naive")
      ->capture_default_str();
  sub->add_option("--out", o.out, "CSV output path (default stdout)");
  if (!sweep) sub->add_option("--dump-reps", o.dump_reps, "Per-replication CSV dump");
}

}  // namespace

std::string_view version() { return CARATE_VERSION; }

void ResolvedConfig::add(std::string key, std::string value, bool hashed) {
  entries.push_back({std::move(key), std::move(value), hashed});
}

std::string ResolvedConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& e : entries) {
    if (!e.hashed) continue;
    feed(e.key);
    feed("=");
    feed(e.value);
    feed("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> parse_real_grid(const std::string& text) {
  if (text.empty()) return {};
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("grid must be start:stop:step");
    return linear_grid(to_real(parts[0], "grid start"), to_real(parts[1], "grid stop"),
                       to_real(parts[2], "grid step"));
  }
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(to_real(p, "grid value"));
  return out;
}

std::vector<std::size_t> parse_count_grid(const std::string& text) {
  if (text.empty()) return {};
  std::vector<std::size_t> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("grid must be start:stop:step");
    const std::size_t start = to_count(parts[0], "grid start");
    const std::size_t stop = to_count(parts[1], "grid stop");
    const std::size_t step = to_count(parts[2], "grid step");
    if (step == 0) throw UsageError("grid step must be positive");
    for (std::size_t k = start; k <= stop; k += step) out.push_back(k);
    return out;
  }
  for (const auto& p : split(text, ',')) out.push_back(to_count(p, "grid value"));
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inference on average treatment effects under covariate-adaptive "
               "randomization with many regressors",
               "carate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));
  app.config_formatter(std::make_shared<FlatConfig>(&app));
  app.set_config("--config", "", "Flat key = value file; flags take precedence");

  AnalyzeOptions analyze;
  CLI::App* a = app.add_subcommand("analyze", "Estimate and test on a CSV dataset");
  a->fallthrough();
  a->add_option("--data", analyze.data, "Input CSV")->required();
  a->add_option("--outcome", analyze.outcome, "Outcome column")->capture_default_str();
  a->add_option("--treatment", analyze.treatment, "Treatment column")->capture_default_str();
  a->add_option("--stratum", analyze.stratum, "Stratum column")->capture_default_str();
  a->add_option("--covariates", analyze.covariates, "Covariate names or globs (X*)")
      ->delimiter(',');
  a->add_option("--alpha", analyze.alpha, "Test level")->capture_default_str();
  a->add_option("--tau0", analyze.tau0, "Null value")->capture_default_str();
  a->add_option("--variance", analyze.variance, "crossfit, ho, hc3 or naive")
      ->capture_default_str();
  a->add_option("--ridge", analyze.ridge, "Combination safeguard")->capture_default_str();
  a->add_flag("--drop-small-strata", analyze.drop_small,
              "Drop strata whose arms are too small instead of failing");
  a->add_option("--min-arm-size", analyze.min_arm_size,
                "Arm size below which a stratum is dropped (default k + 2)");
  a->add_option("--out", analyze.out, "CSV output path (default stdout)");
  a->add_flag("--verbose", analyze.verbose, "Print the covariance breakdown");

  SimulateOptions simulate;
  CLI::App* s = app.add_subcommand("simulate", "Monte Carlo study of one design");
  s->fallthrough();
  add_simulation_options(s, simulate, false);

  SimulateOptions sweep;
  CLI::App* w = app.add_subcommand("sweep", "Monte Carlo study over a grid of k");
  w->fallthrough();
  add_simulation_options(w, sweep, true);

  VifOptions vif_opts;
  CLI::App* v = app.add_subcommand("vif", "Variance inflation factor curve");
  v->fallthrough();
  v->add_option("--kappa-grid", vif_opts.kappa_grid, "start:stop:step or a list")
      ->capture_default_str();
  v->add_option("--out", vif_opts.out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (a->parsed()) return cmd_analyze(analyze, out, err);
    if (s->parsed()) return cmd_simulate(simulate, out, err);
    if (w->parsed()) return cmd_sweep(sweep, out, err);
    if (v->parsed()) return cmd_vif(vif_opts, out, err);
  } catch (const UsageError& e) {
    err << "carate: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "carate: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "carate: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "carate: internal error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace carate
