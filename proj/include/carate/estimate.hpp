#ifndef CARATE_ESTIMATE_HPP_
#define CARATE_ESTIMATE_HPP_

#include <vector>

#include <Eigen/Dense>

#include "carate/covariance.hpp"
#include "carate/data.hpp"
#include "carate/ols.hpp"

namespace carate {

struct UnadjustedEstimate {
  double tau = 0.0;
  std::vector<double> treated_mean;  // per stratum, index order
  std::vector<double> control_mean;
};

// sum_s p_s (mean_1s - mean_0s). Throws DataError on an empty arm.
UnadjustedEstimate tau_unadj(const Dataset& d, const StrataIndex& idx);

struct AdjustedEstimate {
  double tau = 0.0;
  DemeanedCovariates demeaned;
  ArmFits fits;
};

// Fully saturated adjustment: one regression per (arm, stratum) on
// stratum-demeaned covariates; tau = sum_s p_s (intercept_1s - intercept_0s).
AdjustedEstimate tau_adj(const Dataset& d, const StrataIndex& idx);

// Augmented inverse-propensity form evaluated with raw covariates and the
// slopes from `fits`. Equal to tau_adj up to rounding.
double aipw_value(const Dataset& d, const StrataIndex& idx, const ArmFits& fits);

struct Combination {
  double tau = 0.0;
  double weight = 0.0;    // on the adjusted estimator
  double variance = 0.0;  // (w, 1-w) Sigma (w, 1-w)'
  // Set when the denominator vanished because both estimators coincide.
  bool coincident = false;
};

// Variance-minimizing blend of the two estimators. ridge >= 0 is added to the
// denominator; with ridge == 0 a vanishing denominator throws NumericalError.
Combination combine(double tau_adj, double tau_unadj, const Eigen::Matrix2d& sigma,
                    double ridge = 0.0);

// As combine, except that a vanishing denominator is accepted when the two
// estimates agree and Sigma11 = Sigma12 = Sigma22 (the no-regressor case):
// every weight then gives the same estimate and variance, and weight 1 is
// reported. Any other degeneracy still throws.
Combination combine_checked(double tau_adj, double tau_unadj,
                            const Eigen::Matrix2d& sigma, double ridge = 0.0);

double combination_variance(const Eigen::Matrix2d& sigma, double weight);

struct AteResult {
  double tau_unadj = 0.0;
  double tau_adj = 0.0;
  double tau_star = 0.0;
  double weight = 0.0;
  double var_star = 0.0;
  bool coincident = false;
  std::vector<double> tau_treated;  // per-stratum intercepts
  std::vector<double> tau_control;
  ArmFits fits;
  SigmaHat sigma;
};

// Point estimates plus the covariance of the given variant.
AteResult estimate_ate(const Dataset& d, const StrataIndex& idx,
                       VarianceVariant variant = VarianceVariant::kCrossFit,
                       double ridge = 0.0);

}  // namespace carate

#endif  // CARATE_ESTIMATE_HPP_
