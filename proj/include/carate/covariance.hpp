#ifndef CARATE_COVARIANCE_HPP_
#define CARATE_COVARIANCE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "carate/data.hpp"
#include "carate/ols.hpp"

namespace carate {

// Estimators of the 2x2 asymptotic covariance of (adjusted, unadjusted).
//   crossfit      - leave-one-out cross-fit error variances (default)
//   homoskedastic - pooled residual variance with k degrees of freedom
//   hc3           - HC3-type conservative error variance in the (1,1) entry
//   naive         - fixed-dimension plug-in: gamma = 1, plain residual second
//                   moment, and the covariate term (b1 - b0)' S_x (b1 - b0)
//                   with the stratum covariance S_x. Reconstruction of the
//                   conventional estimator that ignores estimation error from
//                   many regressors.
enum class VarianceVariant { kCrossFit, kHomoskedastic, kHc3, kNaiveFixedK };

std::string_view variant_name(VarianceVariant v);
// Accepts crossfit, ho, hc3, naive.
VarianceVariant parse_variant(std::string_view name);

// Asymptotic variance estimate of the unadjusted estimator.
double sigma22(const Dataset& d, const StrataIndex& idx, double tau_unadj);

// (1/n) gamma^-2 sum_i m_i^2 y_i loo_i; may be negative.
double omega_hat(const ArmFit& fit);
// (1/n) gamma^-1 sum_i m_i y_i loo_i.
double varpi_hat(const ArmFit& fit);
// (1/n) gamma^-2 sum_i m_i^2 M_ii^-2 resid_i^2; never negative.
double omega_hc3(const ArmFit& fit);
// sum_i resid_i^2 / (n - 1 - k).
double homoskedastic_error_variance(const ArmFit& fit);
// (1/n) sum_i resid_i^2.
double residual_second_moment(const ArmFit& fit);

struct ArmVarianceTerms {
  std::size_t stratum = 0;
  int arm = 0;
  double weight = 0.0;  // n_s^2 / (n n_{a,s})
  double u11_term = 0.0;
  double u12_term = 0.0;
};

struct SigmaUTerms {
  double u11 = 0.0;
  double u12 = 0.0;
  std::vector<ArmVarianceTerms> arms;
};

SigmaUTerms sigma_u_terms(const ArmFits& fits, const StrataIndex& idx,
                          VarianceVariant variant);

// Covariate-variation term. With leverage_correction the bias from
// estimated slopes is removed through sum_i P_ii y_i loo_i.
double sigma_v_adj(const ArmFits& fits, const StrataIndex& idx,
                   bool leverage_correction = true);

// Fixed-dimension covariate term: sum_s p_s (b1 - b0)' (Gamma_s / n_s) (b1 - b0).
double sigma_v_naive(const ArmFits& fits, const StrataIndex& idx);

// Between-stratum effect heterogeneity.
double sigma_w(const ArmFits& fits, const StrataIndex& idx, double tau_adj);

struct SigmaHat {
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();  // 0 = adjusted, 1 = unadjusted
  VarianceVariant variant = VarianceVariant::kCrossFit;
  SigmaUTerms u;
  double v_adj = 0.0;
  double w = 0.0;
  double s22 = 0.0;
  // Sigma11 + Sigma22 - 2 Sigma12, the combination denominator.
  double contrast = 0.0;
  // Cross-fit matrices need not be PSD in finite samples; reported, not fatal.
  bool psd = true;
};

SigmaHat sigma_matrix(const Dataset& d, const StrataIndex& idx,
                      const ArmFits& fits, double tau_adj, double tau_unadj,
                      VarianceVariant variant);

}  // namespace carate

#endif  // CARATE_COVARIANCE_HPP_
