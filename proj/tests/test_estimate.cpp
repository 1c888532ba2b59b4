#include <cmath>
#include <numeric>

#include "doctest.h"

#include "carate/error.hpp"
#include "carate/estimate.hpp"
#include "oracle.hpp"

using namespace carate;

namespace {

Dataset simple(const std::vector<double>& y, const std::vector<int>& a,
               const std::vector<std::string>& s) {
  Dataset d;
  d.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  d.a = a;
  d.strata = s;
  d.x.resize(static_cast<Eigen::Index>(y.size()), 0);
  return d;
}

}  // namespace

TEST_CASE("unadjusted estimator") {
  Dataset d = simple({1, 2, 3, 4}, {1, 1, 0, 0}, {"s", "s", "s", "s"});
  CHECK(tau_unadj(d, build_index(d)).tau == -2.0);

  Dataset two = simple({1, 3, 0, 1, 3, 0, 1, 1}, {1, 1, 0, 1, 1, 0, 0, 0},
                       {"a", "a", "a", "b", "b", "b", "a", "b"});
  // Arm means (2, 0.5) in both strata, whatever the shares.
  CHECK(tau_unadj(two, build_index(two)).tau == doctest::Approx(1.5));

  Dataset empty = simple({1, 2}, {1, 1}, {"s", "s"});
  CHECK_THROWS_AS(tau_unadj(empty, build_index(empty)), DataError);
}

TEST_CASE("estimators against the dense oracle") {
  RngStream rng(11, 0, Purpose::kAuxiliary);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t k = rng.uniform_index(6);
    Dataset d = oracle::random_instance(rng, k, 14);
    const StrataIndex idx = build_index(d);
    const oracle::Result o = oracle::evaluate(d);
    const AdjustedEstimate adj = tau_adj(d, idx);
    CHECK(oracle::close(tau_unadj(d, idx).tau, o.tau_unadj, 1e-12));
    CHECK(oracle::close(o.tau_unadj, o.tau_unadj_ipw, 1e-12));
    CHECK(oracle::close(adj.tau, o.tau_adj));
    CHECK(oracle::close(aipw_value(d, idx, adj.fits), adj.tau));
    CHECK(oracle::close(o.aipw, o.tau_adj));
  }
}

TEST_CASE("no regressors reduce to the unadjusted estimator") {
  RngStream rng(12, 0, Purpose::kAuxiliary);
  for (int rep = 0; rep < 20; ++rep) {
    Dataset d = oracle::random_instance(rng, 0, 14);
    const StrataIndex idx = build_index(d);
    const AteResult r = estimate_ate(d, idx);
    CHECK(r.tau_adj == r.tau_unadj);
    CHECK(r.coincident);
    CHECK(r.tau_star == r.tau_adj);
    CHECK(r.sigma.matrix(0, 0) == doctest::Approx(r.sigma.s22).epsilon(1e-12));
    CHECK(r.sigma.matrix(0, 1) == doctest::Approx(r.sigma.s22).epsilon(1e-12));
    CHECK(r.sigma.v_adj == 0.0);
  }
}

TEST_CASE("exact linear outcomes recover the intercepts") {
  RngStream rng(13, 0, Purpose::kAuxiliary);
  Dataset d = oracle::random_instance(rng, 2, 14);
  const auto idx = build_index(d);
  const auto dm = demean_by_stratum(d, idx);
  for (std::size_t i = 0; i < d.n(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double base = d.strata[i] == "hi" ? 1.0 : -1.0;
    d.y(r) = base + 0.5 * d.a[i] + dm.x(r, 0) - 2.0 * dm.x(r, 1) * (1 + d.a[i]);
  }
  CHECK(std::abs(tau_adj(d, idx).tau - 0.5) < 1e-10);
}

TEST_CASE("zero slopes give the unadjusted estimator") {
  RngStream rng(14, 0, Purpose::kAuxiliary);
  Dataset d = oracle::random_instance(rng, 3, 14);
  const auto idx = build_index(d);
  AdjustedEstimate adj = tau_adj(d, idx);
  for (auto& cell : adj.fits.cells) cell.slope.setZero();
  CHECK(aipw_value(d, idx, adj.fits) == doctest::Approx(tau_unadj(d, idx).tau).epsilon(1e-12));
}

TEST_CASE("combination") {
  SUBCASE("identity covariance") {
    const Combination c = combine(1.0, 3.0, Eigen::Matrix2d::Identity());
    CHECK(c.weight == 0.5);
    CHECK(c.variance == 0.5);
    CHECK(c.tau == 2.0);
  }
  SUBCASE("boundary weight") {
    Eigen::Matrix2d s;
    s << 1, 1, 1, 2;
    const Combination c = combine(1.0, 3.0, s);
    CHECK(c.weight == 1.0);
    CHECK(c.tau == 1.0);
    CHECK(c.variance == 1.0);
  }
  SUBCASE("degenerate") {
    Eigen::Matrix2d s = Eigen::Matrix2d::Constant(2.0);
    CHECK_THROWS_WITH_AS(combine(1.0, 1.0, s), doctest::Contains("degenerate"), NumericalError);
    CHECK_NOTHROW(combine(1.0, 1.0, s, 0.1));
    CHECK_THROWS_AS(combine(1.0, 1.0, s, -1.0), UsageError);
    const Combination c = combine_checked(1.0, 1.0, s);
    CHECK(c.coincident);
    CHECK(c.weight == 1.0);
    CHECK(c.variance == 2.0);
    // Equal covariances but different estimates is not the benign case.
    CHECK_THROWS_AS(combine_checked(1.0, 2.0, s), NumericalError);
  }
  SUBCASE("ridge weight") {
    Eigen::Matrix2d s;
    s << 2, 0.5, 0.5, 1;
    const Combination c = combine(0.0, 1.0, s, 1.0);
    CHECK(c.weight == doctest::Approx(0.5 / 3.0));
    CHECK(c.variance == doctest::Approx(combination_variance(s, c.weight)));
  }
  SUBCASE("grid minimization oracle") {
    RngStream rng(15, 0, Purpose::kAuxiliary);
    for (int rep = 0; rep < 100; ++rep) {
      Eigen::Matrix2d l;
      l << rng.uniform(0.1, 2), 0, rng.uniform(-2, 2), rng.uniform(0.1, 2);
      const Eigen::Matrix2d s = l * l.transpose();
      const Combination c = combine(0.0, 1.0, s);
      double best = 1e300;
      for (int g = 0; g < 10000; ++g) {
        best = std::min(best, combination_variance(s, -2.0 + 5.0 * g / 9999.0));
      }
      CHECK(c.variance <= best + 1e-12);
      CHECK(c.variance <= s(0, 0) + 1e-12);
      CHECK(c.variance <= s(1, 1) + 1e-12);
      const Eigen::Vector2d inv1 = s.inverse() * Eigen::Vector2d::Ones();
      CHECK(c.weight == doctest::Approx(inv1(0) / inv1.sum()).epsilon(1e-10));
      CHECK(c.tau == doctest::Approx(1.0 - c.weight));
    }
  }
}

TEST_CASE("affine equivariance and permutation invariance") {
  RngStream rng(16, 0, Purpose::kAuxiliary);
  Dataset d = oracle::random_instance(rng, 3, 14);
  const AteResult base = estimate_ate(d, build_index(d));

  Dataset shifted = d;
  shifted.y.array() += 5.0;
  const AteResult s = estimate_ate(shifted, build_index(shifted));
  CHECK(s.tau_adj == doctest::Approx(base.tau_adj).epsilon(1e-10));
  CHECK(s.tau_unadj == doctest::Approx(base.tau_unadj).epsilon(1e-10));
  // The cross-fit terms use raw outcomes, so the weight of the combination
  // (and with it tau_star) moves with a location shift in finite samples.
  CHECK(s.sigma.s22 == doctest::Approx(base.sigma.s22).epsilon(1e-10));
  CHECK(s.sigma.w == doctest::Approx(base.sigma.w).epsilon(1e-10));

  Dataset scaled = d;
  scaled.y *= -3.0;
  const AteResult c = estimate_ate(scaled, build_index(scaled));
  CHECK(c.tau_adj == doctest::Approx(-3.0 * base.tau_adj).epsilon(1e-10));
  CHECK(c.tau_star == doctest::Approx(-3.0 * base.tau_star).epsilon(1e-10));
  CHECK(c.var_star == doctest::Approx(9.0 * base.var_star).epsilon(1e-10));

  std::vector<std::size_t> perm(d.n());
  for (std::size_t i = 0; i < d.n(); ++i) perm[i] = (i * 7 + 3) % d.n();
  if (std::gcd(7ul, d.n()) == 1) {
    const Dataset p = d.subset(perm);
    const AteResult q = estimate_ate(p, build_index(p));
    CHECK(q.tau_star == doctest::Approx(base.tau_star).epsilon(1e-12));
    CHECK(q.var_star == doctest::Approx(base.var_star).epsilon(1e-12));
  }
}
