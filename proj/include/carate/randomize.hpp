#ifndef CARATE_RANDOMIZE_HPP_
#define CARATE_RANDOMIZE_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carate/data.hpp"
#include "carate/rng.hpp"

namespace carate {

enum class SchemeKind { kSrs, kWei, kBcd, kSbr };

std::string_view scheme_name(SchemeKind kind);
// Accepts "srs", "wei", "bcd", "sbr" (case-insensitive); throws UsageError.
SchemeKind parse_scheme(std::string_view name);

// Covariate-adaptive randomization scheme and its parameters.
struct Scheme {
  SchemeKind kind = SchemeKind::kSrs;
  // Target treated fraction per stratum label; strata not listed use
  // default_pi. With no default, an unlisted label is an error.
  std::map<std::string, double> pi_by_stratum;
  std::optional<double> default_pi = 0.5;
  // Biased-coin probability, in (1/2, 1].
  double lambda = 0.75;
  // Allocation function on [-1, 1] for WEI. Assumed non-increasing with
  // f(-x) = 1 - f(x); not checked.
  std::function<double(double)> allocation = [](double x) {
    return (1.0 - x) / 2.0;
  };

  double pi_for(const std::string& label) const;
};

struct Assignment {
  std::vector<int> a;
  // Keyed by stratum label. imbalance: sum_i (a_i - pi_s); half_excess:
  // 2 * B_n(s) = #treated - #control, which is integral.
  std::map<std::string, double> imbalance;
  std::map<std::string, long> half_excess;
};

Assignment assign_srs(const std::vector<std::string>& strata,
                      const Scheme& scheme, RngStream& rng);
// Units are processed in row order, which is the enrollment order.
Assignment assign_wei(const std::vector<std::string>& strata,
                      const Scheme& scheme, RngStream& rng);
Assignment assign_bcd(const std::vector<std::string>& strata,
                      const Scheme& scheme, RngStream& rng);
// floor(pi_s * n_s) treated per stratum; positions by Fisher-Yates over the
// stratum's rows, strata visited in label order.
Assignment assign_sbr(const std::vector<std::string>& strata,
                      const Scheme& scheme, RngStream& rng);

Assignment assign(const std::vector<std::string>& strata, const Scheme& scheme,
                  RngStream& rng);

// D_{n,s} = sum_{i in s} (a_i - pi_s), per stratum in index order.
std::vector<double> imbalance(const std::vector<int>& a, const StrataIndex& idx,
                              const Scheme& scheme);

}  // namespace carate

#endif  // CARATE_RANDOMIZE_HPP_
