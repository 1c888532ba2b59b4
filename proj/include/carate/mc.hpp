#ifndef CARATE_MC_HPP_
#define CARATE_MC_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "carate/covariance.hpp"
#include "carate/dgp.hpp"
#include "carate/randomize.hpp"

namespace carate {

// adj:   adjusted estimator with the configured covariance variant
// star:  optimal combination of adjusted and unadjusted
// unadj: unadjusted estimator (the no-regressor benchmark)
// naive: adjusted estimator with the fixed-dimension plug-in variance
enum class Method { kAdj = 0, kStar = 1, kUnadj = 2, kNaive = 3 };
inline constexpr std::size_t kNumMethods = 4;

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

struct SimConfig {
  ModelSpec model;
  Scheme scheme;
  std::vector<Method> methods = all_methods();
  VarianceVariant variant = VarianceVariant::kCrossFit;
  std::size_t reps = 1000;
  std::uint64_t seed = 42;
  double alpha = 0.05;
  double tau0 = 0.0;
  double ridge = 0.0;
  // 0 means one per hardware thread.
  std::size_t workers = 0;

  void check() const;
};

struct MethodOutcome {
  bool ok = false;
  double estimate = 0.0;
  double variance = 0.0;  // asymptotic variance; SE = sqrt(variance / n)
  double statistic = 0.0;
  bool reject = false;
  std::string failure;
};

struct ReplicationRecord {
  std::size_t replication = 0;
  std::array<MethodOutcome, kNumMethods> outcomes;
  double weight = 0.0;

  const MethodOutcome& at(Method m) const { return outcomes[static_cast<std::size_t>(m)]; }
  MethodOutcome& at(Method m) { return outcomes[static_cast<std::size_t>(m)]; }
};

// Runs one replication: generate, estimate, test. Never throws for a
// non-estimable draw; failures are recorded per method.
ReplicationRecord run_replication(const SimConfig& cfg, std::size_t replication);

struct MethodSummary {
  Method method = Method::kAdj;
  std::size_t successes = 0;
  std::size_t failures = 0;
  double reject_rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double mc_err = 0.0;  // binomial standard error of reject_rate
  double bias = 0.0;
  double sd = 0.0;
  double mean_se = 0.0;
  double sd_se_ratio = 0.0;
};

struct SimReport {
  std::vector<MethodSummary> methods;
  double wall_seconds = 0.0;  // informational; never written to CSV

  const MethodSummary& at(Method m) const;
};

// 95% Wilson score interval for `successes` out of `trials`.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials);

// Aggregates in record order. Throws UsageError on empty input.
SimReport aggregate(const std::vector<ReplicationRecord>& records,
                    const std::vector<Method>& methods, double tau_true,
                    std::size_t n);

struct SimulationRun {
  SimReport report;
  std::vector<ReplicationRecord> records;
};

// Replications run on `cfg.workers` threads; each lands in its own slot and
// aggregation follows replication order, so the report does not depend on
// the worker count. Throws NumericalError when no replication succeeds.
SimulationRun run_simulation(const SimConfig& cfg);

struct SweepRow {
  std::size_t k = 0;
  double kappa = 0.0;  // k / (n / (2 |S|))
  SimReport report;
};

std::vector<SweepRow> sweep_kappa(const SimConfig& cfg,
                                  const std::vector<std::size_t>& k_grid);

double effective_kappa(const ModelSpec& spec, std::size_t k);

void write_report_header(std::ostream& out);
void write_report_rows(std::ostream& out, const SimConfig& cfg, std::size_t k,
                       const SimReport& report);
void write_replication_dump(std::ostream& out, const SimConfig& cfg,
                            const std::vector<ReplicationRecord>& records);

// Fixed "%.10g" rendering shared by every CSV writer.
std::string format_number(double value);

}  // namespace carate

#endif  // CARATE_MC_HPP_
