#include "carate/inference.hpp"

#include <cmath>

#include "carate/error.hpp"
#include "carate/stats.hpp"

namespace carate {

namespace {

constexpr double kPdPivotRatio = 1e-12;

}  // namespace

double chi2_1_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw UsageError("alpha must lie in (0, 1)");
  }
  const double z = normal_inverse_cdf(1.0 - alpha / 2.0);
  return z * z;
}

double chi2_1_survival(double x) {
  if (!(x > 0.0)) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

TestResult wald(double tau, double var, std::size_t n, double tau0, double alpha,
                std::string method) {
  if (!(var > 0.0)) throw NumericalError("non-positive variance estimate");
  if (n == 0) throw UsageError("wald: n must be positive");
  TestResult out;
  out.tau0 = tau0;
  out.alpha = alpha;
  out.method = std::move(method);
  const double diff = tau - tau0;
  out.statistic = static_cast<double>(n) * diff * diff / var;
  out.p_value = chi2_1_survival(out.statistic);
  out.reject = out.statistic >= chi2_1_quantile(alpha);
  return out;
}

std::pair<double, double> confidence_interval(double tau, double var,
                                              std::size_t n, double alpha) {
  if (!(var > 0.0)) throw NumericalError("non-positive variance estimate");
  if (n == 0) throw UsageError("confidence_interval: n must be positive");
  const double half = std::sqrt(chi2_1_quantile(alpha) * var / static_cast<double>(n));
  return {tau - half, tau + half};
}

MultiCombination multi_combine_test(const Eigen::VectorXd& tau,
                                    const Eigen::MatrixXd& sigma, std::size_t n,
                                    double tau0, double alpha) {
  const Eigen::Index k = tau.size();
  if (k == 0 || sigma.rows() != k || sigma.cols() != k) {
    throw UsageError("multi-combination: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  bool pd = llt.info() == Eigen::Success;
  if (pd) {
    const Eigen::VectorXd l = llt.matrixLLT().diagonal();
    const double max_diag = sigma.diagonal().cwiseAbs().maxCoeff();
    pd = l.minCoeff() > 0.0 && l.cwiseAbs2().minCoeff() > kPdPivotRatio * max_diag;
  }
  if (!pd) {
    throw NumericalError("multi-combination requires positive definite covariance");
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
  const Eigen::VectorXd s_inv_one = llt.solve(ones);
  const double denom = ones.dot(s_inv_one);
  const Eigen::VectorXd centred = tau.array() - tau0;

  MultiCombination out;
  out.weights = s_inv_one / denom;
  out.estimate = out.weights.dot(tau);
  out.variance = 1.0 / denom;
  const double num = s_inv_one.dot(centred);
  out.test.statistic = static_cast<double>(n) * num * num / denom;
  out.test.p_value = chi2_1_survival(out.test.statistic);
  out.test.reject = out.test.statistic >= chi2_1_quantile(alpha);
  out.test.tau0 = tau0;
  out.test.alpha = alpha;
  out.test.method = "combined";
  return out;
}

}  // namespace carate
