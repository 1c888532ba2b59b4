#ifndef CARATE_OLS_HPP_
#define CARATE_OLS_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "carate/data.hpp"

namespace carate {

// Covariates centred at their stratum mean (never the stratum-arm mean).
struct DemeanedCovariates {
  Eigen::MatrixXd x;             // n x k
  Eigen::MatrixXd stratum_means;  // num_strata x k, rows in index order
};

DemeanedCovariates demean_by_stratum(const Dataset& d, const StrataIndex& idx);

// Regression of y on (1, x) within one (treatment, stratum) cell, where x is
// already stratum-demeaned. P is the projector onto the columns of x alone
// and M = I - P; the intercept is recovered through 1'M weighting.
struct ArmFit {
  int arm = 0;
  std::size_t stratum = 0;
  std::vector<std::size_t> rows;  // dataset row ids, ascending

  Eigen::VectorXd y;
  double intercept = 0.0;
  Eigen::VectorXd slope;
  Eigen::MatrixXd gram;       // x'x
  Eigen::VectorXd leverage;   // P_ii
  Eigen::VectorXd row_sum;    // sum_j M_ij
  double gamma = 1.0;         // 1'M1 / n_{a,s}
  Eigen::VectorXd resid;
  Eigen::VectorXd loo_resid;  // resid_i / M_ii
  bool qr_fallback = false;

  std::size_t size() const { return static_cast<std::size_t>(y.size()); }
  std::size_t k() const { return static_cast<std::size_t>(slope.size()); }
};

inline constexpr double kLeverageFloor = 1e-8;

// Throws NotEstimableError when n < k + 2, the covariates are collinear, the
// intercept is not identified, or some M_ii falls below kLeverageFloor.
ArmFit fit_arm(const Eigen::VectorXd& y, const Eigen::MatrixXd& x);

// All 2 |S| cell fits, stored at 2 * stratum + arm.
struct ArmFits {
  std::vector<ArmFit> cells;

  const ArmFit& at(std::size_t stratum, int arm) const {
    return cells[2 * stratum + static_cast<std::size_t>(arm)];
  }
  std::size_t num_strata() const { return cells.size() / 2; }
};

ArmFits fit_all_arms(const Dataset& d, const StrataIndex& idx,
                     const DemeanedCovariates& demeaned);

}  // namespace carate

#endif  // CARATE_OLS_HPP_
