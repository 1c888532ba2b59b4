#include "carate/randomize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "carate/error.hpp"

namespace carate {

namespace {

struct RunningCounts {
  long n = 0;
  long excess = 0;  // #treated - #control
};

Assignment finish(const std::vector<std::string>& strata, std::vector<int> a,
                  const Scheme& scheme) {
  Assignment out;
  out.a = std::move(a);
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const double pi = scheme.pi_for(strata[i]);
    out.imbalance[strata[i]] += out.a[i] - pi;
    out.half_excess[strata[i]] += out.a[i] == 1 ? 1 : -1;
  }
  return out;
}

void check_known(const std::vector<std::string>& strata, const Scheme& scheme) {
  for (const auto& label : strata) (void)scheme.pi_for(label);
}

}  // namespace

std::string_view scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kSrs: return "srs";
    case SchemeKind::kWei: return "wei";
    case SchemeKind::kBcd: return "bcd";
    case SchemeKind::kSbr: return "sbr";
  }
  return "?";
}

SchemeKind parse_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "srs") return SchemeKind::kSrs;
  if (lower == "wei") return SchemeKind::kWei;
  if (lower == "bcd") return SchemeKind::kBcd;
  if (lower == "sbr") return SchemeKind::kSbr;
  throw UsageError("unknown scheme '" + std::string(name) +
                   "' (expected srs, wei, bcd or sbr)");
}

double Scheme::pi_for(const std::string& label) const {
  double pi;
  if (auto it = pi_by_stratum.find(label); it != pi_by_stratum.end()) {
    pi = it->second;
  } else if (default_pi) {
    pi = *default_pi;
  } else {
    throw UsageError("unknown stratum label '" + label +
                     "': no treatment probability configured");
  }
  if (!(pi >= 0.0 && pi <= 1.0)) {
    throw UsageError("treatment probability for stratum '" + label +
                     "' must lie in [0, 1]");
  }
  return pi;
}

Assignment assign_srs(const std::vector<std::string>& strata,
                      const Scheme& scheme, RngStream& rng) {
  check_known(strata, scheme);
  std::vector<int> a(strata.size());
  for (std::size_t i = 0; i < strata.size(); ++i) {
    a[i] = rng.bernoulli(scheme.pi_for(strata[i])) ? 1 : 0;
  }
  return finish(strata, std::move(a), scheme);
}

Assignment assign_wei(const std::vector<std::string>& strata,
                      const Scheme& scheme, RngStream& rng) {
  check_known(strata, scheme);
  std::map<std::string, RunningCounts> running;
  std::vector<int> a(strata.size());
  for (std::size_t i = 0; i < strata.size(); ++i) {
    auto& c = running[strata[i]];
    // 2 B_{k-1} / n_{k-1}, taken as zero for the first arrival.
    const double x =
        c.n == 0 ? 0.0 : static_cast<double>(c.excess) / static_cast<double>(c.n);
    const double p = scheme.allocation(x);
    a[i] = rng.bernoulli(p) ? 1 : 0;
    ++c.n;
    c.excess += a[i] == 1 ? 1 : -1;
  }
  return finish(strata, std::move(a), scheme);
}

Assignment assign_bcd(const std::vector<std::string>& strata,
                      const Scheme& scheme, RngStream& rng) {
  if (!(scheme.lambda > 0.5 && scheme.lambda <= 1.0)) {
    throw UsageError("BCD lambda must lie in (1/2, 1]");
  }
  check_known(strata, scheme);
  std::map<std::string, long> excess;
  std::vector<int> a(strata.size());
  for (std::size_t i = 0; i < strata.size(); ++i) {
    long& e = excess[strata[i]];
    const double p = e == 0 ? 0.5 : (e < 0 ? scheme.lambda : 1.0 - scheme.lambda);
    a[i] = rng.bernoulli(p) ? 1 : 0;
    e += a[i] == 1 ? 1 : -1;
  }
  return finish(strata, std::move(a), scheme);
}

Assignment assign_sbr(const std::vector<std::string>& strata,
                      const Scheme& scheme, RngStream& rng) {
  check_known(strata, scheme);
  std::map<std::string, std::vector<std::size_t>> rows;
  for (std::size_t i = 0; i < strata.size(); ++i) rows[strata[i]].push_back(i);
  std::vector<int> a(strata.size(), 0);
  for (auto& [label, ids] : rows) {
    const double target = scheme.pi_for(label) * static_cast<double>(ids.size());
    // Guard against representation error just below an integer (0.29 * 100).
    const auto treated = static_cast<std::size_t>(std::floor(target + 1e-9));
    for (std::size_t j = ids.size(); j > 1; --j) {
      const auto r = static_cast<std::size_t>(rng.uniform_index(j));
      std::swap(ids[j - 1], ids[r]);
    }
    for (std::size_t t = 0; t < treated; ++t) a[ids[t]] = 1;
  }
  return finish(strata, std::move(a), scheme);
}

Assignment assign(const std::vector<std::string>& strata, const Scheme& scheme,
                  RngStream& rng) {
  switch (scheme.kind) {
    case SchemeKind::kSrs: return assign_srs(strata, scheme, rng);
    case SchemeKind::kWei: return assign_wei(strata, scheme, rng);
    case SchemeKind::kBcd: return assign_bcd(strata, scheme, rng);
    case SchemeKind::kSbr: return assign_sbr(strata, scheme, rng);
  }
  throw UsageError("unknown scheme");
}

std::vector<double> imbalance(const std::vector<int>& a, const StrataIndex& idx,
                              const Scheme& scheme) {
  if (a.size() != idx.n) throw UsageError("assignment length mismatch");
  std::vector<double> out;
  out.reserve(idx.num_strata());
  for (const auto& stratum : idx.strata) {
    const double pi = scheme.pi_for(stratum.label);
    double d = 0.0;
    for (std::size_t i : stratum.members) d += a[i] - pi;
    out.push_back(d);
  }
  return out;
}

}  // namespace carate
