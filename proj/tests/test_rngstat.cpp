#include <cmath>
#include <vector>

#include "doctest.h"

#include "carate/rng.hpp"
#include "carate/stats.hpp"

using namespace carate;

TEST_CASE("philox known answers") {
  // Reference vectors distributed with the Random123 library.
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                      {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                      {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("stream replay and purpose separation") {
  RngStream a(7, 3, Purpose::kNoise);
  RngStream b(7, 3, Purpose::kNoise);
  RngStream c(7, 3, Purpose::kCovariates);
  RngStream d(7, 4, Purpose::kNoise);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    same_c += x == c.next_u64();
    same_d += x == d.next_u64();
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
  CHECK_FALSE(StreamKey::derive(1, 2, Purpose::kNoise) ==
              StreamKey::derive(1, 2, Purpose::kAssignment));

  RngStream e(11, 0, Purpose::kAuxiliary);
  e.standard_normal();
  RngStream copy = e;
  for (int i = 0; i < 10; ++i) CHECK(copy.uniform01() == e.uniform01());
}

TEST_CASE("inverse normal cdf") {
  CHECK(normal_inverse_cdf(0.5) == 0.0);
  CHECK(std::abs(normal_inverse_cdf(0.8) - 0.8416212335729143) < 1e-9);
  CHECK(std::abs(normal_inverse_cdf(0.975) - 1.959963984540054) < 1e-9);
  CHECK(std::abs(normal_inverse_cdf(1e-10) + 6.361340902404056) < 1e-9);
  CHECK(std::abs(normal_inverse_cdf(1e-12) + 7.034483825301132) < 1e-9);
  CHECK(std::abs(normal_inverse_cdf(1 - 1e-12) - 7.034483825301132) < 1e-4);
  CHECK_THROWS(normal_inverse_cdf(0.0));
  CHECK_THROWS(normal_inverse_cdf(1.0));
  CHECK_THROWS(normal_inverse_cdf(-0.1));
}

TEST_CASE("inverse normal cdf round trip") {
  double worst = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double p = (i - 0.5) / 10000.0;
    worst = std::max(worst, std::abs(normal_cdf(normal_inverse_cdf(p)) - p));
  }
  CHECK(worst < 1e-9);
  for (double p : {1e-12, 1e-9, 1e-6, 1e-3}) {
    CHECK(std::abs(normal_cdf(normal_inverse_cdf(p)) - p) / p < 1e-8);
    CHECK(normal_inverse_cdf(1 - p) == doctest::Approx(-normal_inverse_cdf(p)).epsilon(1e-6));
  }
}

TEST_CASE("normal and uniform moments") {
  RngStream rng(2024, 0, Purpose::kAuxiliary);
  const int n = 1000000;
  std::vector<double> z(n), u(n);
  for (int i = 0; i < n; ++i) z[i] = sample_standard_normal(rng);
  for (int i = 0; i < n; ++i) u[i] = sample_uniform(rng, -1.0, 1.0);
  CHECK(std::abs(ordered_mean(z)) < 0.004);
  CHECK(std::abs(ordered_sample_variance(z) - 1.0) < 0.006);
  CHECK(std::abs(ordered_mean(u)) < 0.002);
  double lo = 1.0, hi = -1.0;
  for (double x : u) { lo = std::min(lo, x); hi = std::max(hi, x); }
  CHECK(lo >= -1.0);
  CHECK(hi < 1.0);
}

TEST_CASE("uniform_index is within bound and unbiased") {
  RngStream rng(5, 0, Purpose::kAuxiliary);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);
  CHECK(rng.uniform_index(1) == 0);
}

TEST_CASE("ordered reductions") {
  std::vector<double> v = {1.0, 2.0, 4.0, 7.0};
  CHECK(ordered_sum(v) == 14.0);
  CHECK(ordered_mean(v) == 3.5);
  CHECK(ordered_sample_variance(v) == doctest::Approx(7.0));
  CHECK(ordered_sample_variance(std::vector<double>{3.0}) == 0.0);
  // Left-to-right order is observable in floating point.
  std::vector<double> w = {1e16, 1.0, -1e16};
  CHECK(ordered_sum(w) == 0.0);
}
