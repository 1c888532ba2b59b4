#ifndef CARATE_INFERENCE_HPP_
#define CARATE_INFERENCE_HPP_

#include <string>
#include <utility>

#include <Eigen/Dense>

namespace carate {

struct TestResult {
  double statistic = 0.0;  // chi-squared(1) scale
  double p_value = 1.0;
  bool reject = false;
  double tau0 = 0.0;
  double alpha = 0.05;
  std::string method;
};

// (1 - alpha) quantile of chi-squared(1), i.e. Phi^{-1}(1 - alpha/2)^2.
double chi2_1_quantile(double alpha);
// Upper tail P(chi2_1 >= x).
double chi2_1_survival(double x);

// Two-sided Wald test of tau = tau0 with statistic n (tau - tau0)^2 / var.
// Rejects when the statistic is >= the critical value.
TestResult wald(double tau, double var, std::size_t n, double tau0, double alpha,
                std::string method = {});

std::pair<double, double> confidence_interval(double tau, double var,
                                              std::size_t n, double alpha);

struct MultiCombination {
  TestResult test;
  Eigen::VectorXd weights;  // Sigma^{-1} 1 / (1' Sigma^{-1} 1)
  double estimate = 0.0;
  double variance = 0.0;    // 1 / (1' Sigma^{-1} 1)
};

// Optimal combination of K estimators of the same effect, tested through
// n (1' S^{-1} (t - tau0))^2 / (1' S^{-1} 1). Throws NumericalError unless
// sigma is positive definite.
MultiCombination multi_combine_test(const Eigen::VectorXd& tau,
                                    const Eigen::MatrixXd& sigma, std::size_t n,
                                    double tau0, double alpha);

}  // namespace carate

#endif  // CARATE_INFERENCE_HPP_
