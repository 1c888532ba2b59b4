#include "carate/ols.hpp"

#include <string>

#include "carate/error.hpp"

namespace carate {

namespace {

constexpr double kCholeskyPivotRatio = 1e-12;
constexpr double kMinGamma = 1e-12;

}  // namespace

DemeanedCovariates demean_by_stratum(const Dataset& d, const StrataIndex& idx) {
  DemeanedCovariates out;
  const auto k = d.x.cols();
  out.x.resize(d.x.rows(), k);
  out.stratum_means.setZero(static_cast<Eigen::Index>(idx.num_strata()), k);
  for (std::size_t s = 0; s < idx.num_strata(); ++s) {
    const auto& members = idx.strata[s].members;
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(k);
    for (std::size_t i : members) mean += d.x.row(static_cast<Eigen::Index>(i));
    mean /= static_cast<double>(members.size());
    out.stratum_means.row(static_cast<Eigen::Index>(s)) = mean;
    for (std::size_t i : members) {
      const auto r = static_cast<Eigen::Index>(i);
      out.x.row(r) = d.x.row(r) - mean;
    }
  }
  return out;
}

ArmFit fit_arm(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
  const Eigen::Index n = y.size();
  const Eigen::Index k = x.cols();
  if (x.rows() != n) throw DataError("fit_arm: x and y row counts differ");
  if (n < k + 2) {
    throw NotEstimableError("arm not estimable: n_{a,s} = " + std::to_string(n) +
                            " < k+2 = " + std::to_string(k + 2));
  }

  ArmFit fit;
  fit.y = y;
  fit.slope = Eigen::VectorXd::Zero(k);
  fit.gram = x.transpose() * x;

  // weights = x G^{-1}, n x k.
  Eigen::MatrixXd weights(n, k);
  if (k > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(fit.gram);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
      const double max_diag = fit.gram.diagonal().maxCoeff();
      const Eigen::VectorXd l_diag = llt.matrixLLT().diagonal();
      ok = l_diag.minCoeff() > 0.0 &&
           l_diag.cwiseAbs2().minCoeff() > kCholeskyPivotRatio * max_diag;
    }
    if (ok) {
      weights = llt.solve(x.transpose()).transpose();
    } else {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
      if (qr.rank() < k) {
        throw NotEstimableError("arm not estimable (collinear covariates)");
      }
      fit.qr_fallback = true;
      // G = P R'R P', so G^{-1} x' = P R^{-1} R^{-T} P' x'.
      const auto r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
      Eigen::MatrixXd tmp = qr.colsPermutation().transpose() * x.transpose();
      r.transpose().solveInPlace(tmp);
      r.solveInPlace(tmp);
      weights = (qr.colsPermutation() * tmp).transpose();
    }
  }

  const Eigen::VectorXd u = x.colwise().sum().transpose();
  if (k > 0) {
    fit.leverage = weights.cwiseProduct(x).rowwise().sum();
    fit.row_sum = Eigen::VectorXd::Ones(n) - weights * u;
  } else {
    fit.leverage = Eigen::VectorXd::Zero(n);
    fit.row_sum = Eigen::VectorXd::Ones(n);
  }
  const double total_weight = fit.row_sum.sum();
  fit.gamma = total_weight / static_cast<double>(n);
  if (!(fit.gamma > kMinGamma)) {
    throw NotEstimableError("arm not estimable (intercept not identified)");
  }

  if (k > 0) {
    fit.intercept = fit.row_sum.dot(y) / total_weight;
  } else {
    // Same left-to-right sum as the unadjusted arm mean, so that the two
    // estimators agree bit for bit without regressors.
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) sum += y(i);
    fit.intercept = sum / static_cast<double>(n);
  }
  const Eigen::VectorXd centred = y.array() - fit.intercept;
  if (k > 0) fit.slope = weights.transpose() * centred;
  fit.resid = centred - x * fit.slope;

  const Eigen::VectorXd m_diag = Eigen::VectorXd::Ones(n) - fit.leverage;
  if (m_diag.minCoeff() < kLeverageFloor) {
    throw NotEstimableError("arm not estimable (leverage-one observation)");
  }
  fit.loo_resid = fit.resid.cwiseQuotient(m_diag);
  return fit;
}

ArmFits fit_all_arms(const Dataset& d, const StrataIndex& idx,
                     const DemeanedCovariates& demeaned) {
  ArmFits fits;
  fits.cells.reserve(2 * idx.num_strata());
  const auto k = demeaned.x.cols();
  for (std::size_t s = 0; s < idx.num_strata(); ++s) {
    for (int arm : {0, 1}) {
      const auto& rows = idx.strata[s].arm(arm);
      const auto m = static_cast<Eigen::Index>(rows.size());
      Eigen::VectorXd y(m);
      Eigen::MatrixXd x(m, k);
      for (Eigen::Index r = 0; r < m; ++r) {
        const auto i = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]);
        y(r) = d.y(i);
        x.row(r) = demeaned.x.row(i);
      }
      ArmFit fit;
      try {
        fit = fit_arm(y, x);
      } catch (const NotEstimableError& e) {
        throw NotEstimableError("stratum '" + idx.strata[s].label + "', arm " +
                                std::to_string(arm) + ": " + e.what());
      }
      fit.arm = arm;
      fit.stratum = s;
      fit.rows = rows;
      fits.cells.push_back(std::move(fit));
    }
  }
  return fits;
}

}  // namespace carate
