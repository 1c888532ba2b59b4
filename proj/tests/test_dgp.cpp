#include <cmath>
#include <vector>

#include "doctest.h"

#include "carate/dgp.hpp"
#include "carate/error.hpp"
#include "carate/stats.hpp"

using namespace carate;

namespace {

ModelSpec spec_of(int model, std::size_t n = 400, std::size_t k = 0) {
  ModelSpec s;
  s.model = model;
  s.n = n;
  s.num_strata = 2;
  s.k = k;
  return s;
}

Scheme sbr() {
  Scheme s;
  s.kind = SchemeKind::kSbr;
  return s;
}

// E[1 + (Z1 + W / sqrt(d - 1))^2] computed from moments of the latent design.
double closed_form_factor(int model, std::size_t d, double rho) {
  const double m = static_cast<double>(d - 1);
  double w2 = 0.0;  // E W^2 / (d - 1)
  if (model == 1) {
    w2 = (0.16 * m + 0.04 * m * m) / m;
  } else if (model == 3 || model == 5 || model == 6) {
    double total = 0.0;
    for (std::size_t i = 0; i < d - 1; ++i) {
      for (std::size_t j = 0; j < d - 1; ++j) {
        total += std::pow(rho, std::abs(static_cast<double>(i) - static_cast<double>(j)));
      }
    }
    w2 = total / 3.0 / m;
  } else {
    w2 = 1.0 / 3.0;
  }
  return 1.0 + 1.0 / 3.0 + w2;
}

}  // namespace

TEST_CASE("strata from the first latent coordinate") {
  Eigen::VectorXd z(5);
  z << -0.5, 0.5, 0.0, -1.0, 1.0;
  const auto two = strata_from_z1(z, 2);
  // Counting thresholds 2j/|S| - 1 at or above z1: lower interval gets label 2.
  CHECK(two[0] == "2");
  CHECK(two[1] == "1");
  CHECK(two[2] == two[0]);
  CHECK(two[3] == "2");
  CHECK(two[4] == "1");
  Eigen::VectorXd top(1);
  top << 0.9;
  CHECK(strata_from_z1(top, 4)[0] == "1");
  top << -0.9;
  CHECK(strata_from_z1(top, 4)[0] == "4");
}

TEST_CASE("toeplitz square root") {
  CHECK(toeplitz_sqrt(0.6, 1)(0, 0) == doctest::Approx(1.0));
  CHECK(toeplitz_sqrt(0.0, 5).isApprox(Eigen::MatrixXd::Identity(5, 5), 1e-14));

  // Closed-form root of [[1, r], [r, 1]]: ((a + b)/2, (a - b)/2) with a = sqrt(1 + r), b = sqrt(1 - r).
  const double a = std::sqrt(1.6), b = std::sqrt(0.4);
  const Eigen::MatrixXd q2 = toeplitz_sqrt(0.6, 2);
  CHECK(std::abs(q2(0, 0) - (a + b) / 2) < 1e-12);
  CHECK(std::abs(q2(0, 1) - (a - b) / 2) < 1e-12);
  Eigen::Matrix2d target;
  target << 1.0, 0.6, 0.6, 1.0;
  CHECK((q2 * q2 - target).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::MatrixXd q = toeplitz_sqrt(0.6, 39);
  double worst = 0.0;
  const Eigen::MatrixXd sq = q * q;
  for (int i = 0; i < 39; ++i) {
    for (int j = 0; j < 39; ++j) {
      worst = std::max(worst, std::abs(sq(i, j) - std::pow(0.6, std::abs(i - j))));
    }
  }
  CHECK(worst < 1e-10);
  CHECK((q - q.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("polynomial basis order") {
  const auto& basis = polynomial_basis();
  REQUIRE(basis.size() == 209);
  for (int j = 0; j < 6; ++j) CHECK(basis[j] == std::vector<int>{j});
  for (int j = 0; j < 6; ++j) CHECK(basis[6 + j] == std::vector<int>{j, j});
  CHECK(basis[12] == std::vector<int>{0, 1});
  CHECK(basis[13] == std::vector<int>{0, 2});
  CHECK(basis[26] == std::vector<int>{4, 5});
  CHECK(basis[27] == std::vector<int>{0, 0, 0});
  CHECK(basis[33] == std::vector<int>{0, 0, 1});
  CHECK(basis.back() == std::vector<int>{4, 5, 5, 5});
  std::size_t per_degree[5] = {0, 0, 0, 0, 0};
  for (const auto& t : basis) ++per_degree[t.size()];
  CHECK(per_degree[1] == 6);
  CHECK(per_degree[2] == 21);
  CHECK(per_degree[3] == 56);
  CHECK(per_degree[4] == 126);
}

TEST_CASE("regressor selection") {
  RngStream rng(1, 0, Purpose::kAuxiliary);
  Eigen::MatrixXd z(10, 6);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 6; ++j) z(i, j) = rng.uniform(-1, 1);
  CHECK(build_regressors(2, z, 6) == z);
  CHECK(build_regressors(4, z, 6) == z);
  CHECK(build_regressors(4, z, 0).cols() == 0);
  const Eigen::MatrixXd x = build_regressors(4, z, 209);
  CHECK(x(3, 6) == z(3, 0) * z(3, 0));
  CHECK(x(3, 12) == z(3, 0) * z(3, 1));
  CHECK(x(3, 208) == doctest::Approx(z(3, 4) * z(3, 5) * z(3, 5) * z(3, 5)));
  CHECK_THROWS_AS(build_regressors(4, z, 210), UsageError);
  CHECK_THROWS_AS(build_regressors(2, z, 7), UsageError);
}

TEST_CASE("dimensions") {
  CHECK(latent_dimension(spec_of(1)) == 40);
  CHECK(available_regressors(spec_of(1)) == 40);
  CHECK(latent_dimension(spec_of(4)) == 6);
  CHECK(available_regressors(spec_of(4)) == 209);
  CHECK_THROWS_AS(spec_of(1, 400, 41).check(), UsageError);
  CHECK_THROWS_AS(spec_of(7).check(), UsageError);
}

TEST_CASE("normalizing constant") {
  SUBCASE("reproducible") {
    CHECK(normalizing_constant(1, 400, 2) == normalizing_constant(1, 400, 2));
  }
  SUBCASE("model 4 does not depend on n") {
    CHECK(normalizing_constant(4, 400, 2) == normalizing_constant(4, 2000, 2));
  }
  SUBCASE("matches the exact moment") {
    for (int model : {1, 2, 3, 4, 5, 6}) {
      const ModelSpec s = spec_of(model);
      const double exact = 1.0 / std::sqrt(closed_form_factor(model, latent_dimension(s), 0.6));
      const double c = normalizing_constant(model, 400, 2);
      CHECK(std::abs(c / exact - 1.0) < 0.005);
    }
  }
  SUBCASE("fresh sample normalizes to one") {
    for (int model : {1, 3}) {
      const double c = normalizing_constant(model, 400, 2);
      RngStream rng(99, 0, Purpose::kAuxiliary);
      const double mean = variance_factor_mean(model, 40, 0.6, rng, 1000000);
      CHECK(std::abs(c * c * mean - 1.0) < 0.01);
    }
  }
}

TEST_CASE("generated trial structure") {
  ModelSpec s = spec_of(1, 400, 40);
  const GeneratedTrial t = generate(s, sbr(), 42, 3);
  CHECK(t.data.n() == 400);
  CHECK(t.data.k() == 40);
  CHECK(t.data.x == t.z);
  CHECK(t.tau_true == 0.0);
  for (std::size_t i = 0; i < 400; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    CHECK(t.data.y(r) == (t.data.a[i] == 1 ? t.y1(r) : t.y0(r)));
  }
  const GeneratedTrial again = generate(s, sbr(), 42, 3);
  CHECK(again.data.y == t.data.y);
  CHECK(again.data.a == t.data.a);

  // Changing the scheme leaves covariates and potential outcomes untouched.
  Scheme srs;
  const GeneratedTrial other = generate(s, srs, 42, 3);
  CHECK(other.z == t.z);
  CHECK(other.y1 == t.y1);
  CHECK(other.y0 == t.y0);
  CHECK(other.data.a != t.data.a);
}

TEST_CASE("model 1 dummies are Bernoulli(0.2)") {
  double ones = 0.0, count = 0.0;
  for (std::uint64_t r = 0; r < 7; ++r) {
    const GeneratedTrial t = generate(spec_of(1, 400, 0), sbr(), 5, r);
    ones += t.z.rightCols(39).sum();
    count += static_cast<double>(t.z.rows() * 39);
  }
  CHECK(count > 1e5);
  CHECK(std::abs(ones / count - 0.2) < 0.01);
}

TEST_CASE("correlated latent covariance") {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(39, 39);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(39);
  double rows = 0.0;
  for (std::uint64_t r = 0; r < 250; ++r) {
    const GeneratedTrial t = generate(spec_of(3, 400, 0), sbr(), 6, r);
    const Eigen::MatrixXd w = t.z.rightCols(39);
    acc += w.transpose() * w;
    mean += w.colwise().sum().transpose();
    rows += 400.0;
  }
  mean /= rows;
  const Eigen::MatrixXd cov = acc / rows - mean * mean.transpose();
  double worst = 0.0;
  for (int i = 0; i < 39; ++i)
    for (int j = 0; j < 39; ++j)
      worst = std::max(worst, std::abs(cov(i, j) - std::pow(0.6, std::abs(i - j)) / 3.0));
  CHECK(worst < 0.02);
}

TEST_CASE("true effect for misspecified models") {
  for (int model : {5, 6}) {
    ModelSpec s = spec_of(model);
    s.effect = 0.2;
    std::vector<double> diffs;
    for (std::uint64_t r = 0; r < 1000; ++r) {
      const GeneratedTrial t = generate(s, sbr(), 8, r);
      for (Eigen::Index i = 0; i < t.y1.size(); ++i) diffs.push_back(t.y1(i) - t.y0(i));
    }
    const double se = std::sqrt(ordered_sample_variance(diffs) / static_cast<double>(diffs.size()));
    CHECK(generate(s, sbr(), 8, 0).tau_true == 0.2);
    CHECK(std::abs(ordered_mean(diffs) - 0.2) < 4.0 * se);
  }
}

TEST_CASE("identical conditional means for models 1 to 4") {
  // With no effect and common means, y1 - y0 is pure noise: mean zero.
  for (int model : {1, 2, 3, 4}) {
    std::vector<double> diffs;
    for (std::uint64_t r = 0; r < 200; ++r) {
      const GeneratedTrial t = generate(spec_of(model), sbr(), 9, r);
      for (Eigen::Index i = 0; i < t.y1.size(); ++i) diffs.push_back(t.y1(i) - t.y0(i));
    }
    const double se = std::sqrt(ordered_sample_variance(diffs) / static_cast<double>(diffs.size()));
    CHECK(std::abs(ordered_mean(diffs)) < 4.0 * se);
    // Var(y1 - y0) = 2 E sigma^2 = 2 after normalization.
    CHECK(std::abs(ordered_sample_variance(diffs) - 2.0) < 0.05);
  }
}
