#include "carate/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

#include "carate/error.hpp"
#include "carate/estimate.hpp"
#include "carate/inference.hpp"
#include "carate/stats.hpp"

namespace carate {

namespace {

constexpr double kWilsonZ = 1.959963984540054;

void record_test(MethodOutcome& out, double estimate, double variance,
                 const SimConfig& cfg) {
  out.estimate = estimate;
  out.variance = variance;
  try {
    const TestResult t = wald(estimate, variance, cfg.model.n, cfg.tau0, cfg.alpha);
    out.statistic = t.statistic;
    out.reject = t.reject;
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.failure = e.what();
  }
}

void fail(MethodOutcome& out, const std::string& why) {
  out.ok = false;
  out.failure = why;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kAdj: return "adj";
    case Method::kStar: return "star";
    case Method::kUnadj: return "unadj";
    case Method::kNaive: return "naive";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "adj") return Method::kAdj;
  if (lower == "star") return Method::kStar;
  if (lower == "unadj" || lower == "bcs") return Method::kUnadj;
  if (lower == "naive" || lower == "yys") return Method::kNaive;
  throw UsageError("unknown method '" + std::string(name) +
                   "' (expected adj, star, unadj or naive)");
}

std::vector<Method> all_methods() {
  return {Method::kAdj, Method::kStar, Method::kUnadj, Method::kNaive};
}

void SimConfig::check() const {
  model.check();
  if (reps < 1) throw UsageError("reps must be at least 1");
  if (methods.empty()) throw UsageError("at least one method is required");
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  if (!(ridge >= 0.0)) throw UsageError("ridge must be non-negative");
}

ReplicationRecord run_replication(const SimConfig& cfg, std::size_t replication) {
  ReplicationRecord rec;
  rec.replication = replication;
  const GeneratedTrial trial = generate(cfg.model, cfg.scheme, cfg.seed, replication);
  const Dataset& d = trial.data;
  const StrataIndex idx = build_index(d);

  double tau_u = 0.0;
  double s22 = 0.0;
  try {
    tau_u = tau_unadj(d, idx).tau;
    s22 = sigma22(d, idx, tau_u);
    record_test(rec.at(Method::kUnadj), tau_u, s22, cfg);
  } catch (const std::exception& e) {
    // Without both arms in every stratum nothing else is computable either.
    for (auto& o : rec.outcomes) fail(o, e.what());
    return rec;
  }

  AdjustedEstimate adj;
  try {
    adj = tau_adj(d, idx);
  } catch (const std::exception& e) {
    fail(rec.at(Method::kAdj), e.what());
    fail(rec.at(Method::kStar), e.what());
    fail(rec.at(Method::kNaive), e.what());
    return rec;
  }

  const SigmaHat sigma = sigma_matrix(d, idx, adj.fits, adj.tau, tau_u, cfg.variant);
  record_test(rec.at(Method::kAdj), adj.tau, sigma.matrix(0, 0), cfg);
  try {
    const Combination c = combine_checked(adj.tau, tau_u, sigma.matrix, cfg.ridge);
    rec.weight = c.weight;
    record_test(rec.at(Method::kStar), c.tau, c.variance, cfg);
  } catch (const std::exception& e) {
    fail(rec.at(Method::kStar), e.what());
  }

  const bool want_naive = std::find(cfg.methods.begin(), cfg.methods.end(),
                                    Method::kNaive) != cfg.methods.end();
  if (want_naive) {
    const SigmaHat naive = sigma_matrix(d, idx, adj.fits, adj.tau, tau_u,
                                        VarianceVariant::kNaiveFixedK);
    record_test(rec.at(Method::kNaive), adj.tau, naive.matrix(0, 0), cfg);
  } else {
    fail(rec.at(Method::kNaive), "not requested");
  }
  return rec;
}

const MethodSummary& SimReport::at(Method m) const {
  for (const auto& s : methods) {
    if (s.method == m) return s;
  }
  throw UsageError("method '" + std::string(method_name(m)) + "' not in report");
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double m = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / m;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / m;
  const double centre = (p + z2 / (2.0 * m)) / denom;
  const double half =
      kWilsonZ / denom * std::sqrt(p * (1.0 - p) / m + z2 / (4.0 * m * m));
  return {std::clamp(centre - half, 0.0, 1.0), std::clamp(centre + half, 0.0, 1.0)};
}

SimReport aggregate(const std::vector<ReplicationRecord>& records,
                    const std::vector<Method>& methods, double tau_true,
                    std::size_t n) {
  if (records.empty()) throw UsageError("aggregate: no replication records");
  SimReport report;
  const double nn = static_cast<double>(n);
  for (Method m : methods) {
    MethodSummary s;
    s.method = m;
    std::vector<double> estimates;
    std::vector<double> ses;
    std::vector<double> rejects;
    for (const auto& rec : records) {
      const MethodOutcome& o = rec.at(m);
      if (!o.ok) {
        ++s.failures;
        continue;
      }
      estimates.push_back(o.estimate);
      ses.push_back(std::sqrt(o.variance / nn));
      rejects.push_back(o.reject ? 1.0 : 0.0);
    }
    s.successes = estimates.size();
    if (s.successes > 0) {
      s.reject_rate = ordered_mean(rejects);
      const auto hits = static_cast<std::size_t>(ordered_sum(rejects));
      std::tie(s.wilson_lo, s.wilson_hi) = wilson_interval(hits, s.successes);
      s.mc_err = std::sqrt(s.reject_rate * (1.0 - s.reject_rate) /
                           static_cast<double>(s.successes));
      s.bias = ordered_mean(estimates) - tau_true;
      s.sd = std::sqrt(ordered_sample_variance(estimates));
      s.mean_se = ordered_mean(ses);
      s.sd_se_ratio = s.mean_se > 0.0 ? s.sd / s.mean_se : 0.0;
    } else {
      s.wilson_lo = 0.0;
      s.wilson_hi = 1.0;
    }
    report.methods.push_back(s);
  }
  return report;
}

SimulationRun run_simulation(const SimConfig& cfg) {
  cfg.check();
  const auto start = std::chrono::steady_clock::now();
  SimConfig resolved = cfg;
  if (!resolved.model.c_eps) {
    resolved.model.c_eps = normalizing_constant(resolved.model.model, resolved.model.n,
                                                resolved.model.num_strata,
                                                resolved.model.rho);
  }

  SimulationRun run;
  run.records.resize(resolved.reps);
  std::vector<std::exception_ptr> errors(resolved.reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t r = next.fetch_add(1);
      if (r >= resolved.reps) return;
      try {
        run.records[r] = run_replication(resolved, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  std::size_t workers = resolved.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, resolved.reps);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  run.report = aggregate(run.records, resolved.methods, resolved.model.effect,
                         resolved.model.n);
  bool any = false;
  for (const auto& s : run.report.methods) any = any || s.successes > 0;
  if (!any) throw NumericalError("all replications failed");
  run.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

double effective_kappa(const ModelSpec& spec, std::size_t k) {
  const double arm = static_cast<double>(spec.n) /
                     (2.0 * static_cast<double>(spec.num_strata));
  return static_cast<double>(k) / arm;
}

std::vector<SweepRow> sweep_kappa(const SimConfig& cfg,
                                  const std::vector<std::size_t>& k_grid) {
  std::vector<SweepRow> rows;
  rows.reserve(k_grid.size());
  for (std::size_t k : k_grid) {
    SimConfig c = cfg;
    c.model.k = k;
    SweepRow row;
    row.k = k;
    row.kappa = effective_kappa(c.model, k);
    row.report = run_simulation(c).report;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

void write_report_header(std::ostream& out) {
  out << "model,scheme,n,strata,k,kappa,effect,variance,method,reps,successes,"
         "failures,reject_rate,wilson_lo,wilson_hi,mc_err,bias,sd,mean_se,sd_se_ratio\n";
}

void write_report_rows(std::ostream& out, const SimConfig& cfg, std::size_t k,
                       const SimReport& report) {
  const std::string kappa = format_number(effective_kappa(cfg.model, k));
  for (const auto& s : report.methods) {
    out << cfg.model.model << ',' << scheme_name(cfg.scheme.kind) << ','
        << cfg.model.n << ',' << cfg.model.num_strata << ',' << k << ',' << kappa
        << ',' << format_number(cfg.model.effect) << ','
        << (s.method == Method::kNaive ? "naive"
            : s.method == Method::kUnadj ? "unadj"
                                         : variant_name(cfg.variant))
        << ',' << method_name(s.method) << ',' << cfg.reps << ',' << s.successes
        << ',' << s.failures << ',' << format_number(s.reject_rate) << ','
        << format_number(s.wilson_lo) << ',' << format_number(s.wilson_hi) << ','
        << format_number(s.mc_err) << ',' << format_number(s.bias) << ','
        << format_number(s.sd) << ',' << format_number(s.mean_se) << ','
        << format_number(s.sd_se_ratio) << '\n';
  }
}

void write_replication_dump(std::ostream& out, const SimConfig& cfg,
                            const std::vector<ReplicationRecord>& records) {
  out << "replication,method,ok,estimate,se,statistic,reject,failure\n";
  const double n = static_cast<double>(cfg.model.n);
  for (const auto& rec : records) {
    for (Method m : cfg.methods) {
      const MethodOutcome& o = rec.at(m);
      out << rec.replication << ',' << method_name(m) << ',' << (o.ok ? 1 : 0) << ',';
      if (o.ok) {
        out << format_number(o.estimate) << ','
            << format_number(std::sqrt(o.variance / n)) << ','
            << format_number(o.statistic) << ',' << (o.reject ? 1 : 0) << ',';
      } else {
        out << ",,,,";
        std::string why = o.failure;
        std::replace(why.begin(), why.end(), ',', ';');
        std::replace(why.begin(), why.end(), '\n', ' ');
        out << why;
      }
      out << '\n';
    }
  }
}

}  // namespace carate
