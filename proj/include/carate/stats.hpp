#ifndef CARATE_STATS_HPP_
#define CARATE_STATS_HPP_

#include <span>

#include "carate/rng.hpp"

namespace carate {

// Standard normal CDF, via erfc for accuracy in both tails.
double normal_cdf(double z);

// Inverse standard normal CDF. Acklam's rational approximation polished by
// one Halley step against normal_cdf; absolute error well below 1e-9 on
// [1e-12, 1 - 1e-12]. Throws std::domain_error outside (0, 1).
double normal_inverse_cdf(double p);

double sample_standard_normal(RngStream& stream);
double sample_uniform(RngStream& stream, double lo, double hi);

// Left-to-right reductions over the given order. All replication-level and
// observation-level aggregates go through these so that results do not
// depend on how work was scheduled.
double ordered_sum(std::span<const double> values);
double ordered_mean(std::span<const double> values);
// Sample variance with divisor (n - 1); 0 for fewer than two values.
double ordered_sample_variance(std::span<const double> values);

}  // namespace carate

#endif  // CARATE_STATS_HPP_
