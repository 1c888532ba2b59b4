#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>

#include "doctest.h"

#include "carate/data.hpp"
#include "carate/error.hpp"

using namespace carate;

namespace {

Dataset make(const std::vector<int>& a, const std::vector<std::string>& s, int k = 0) {
  Dataset d;
  d.a = a;
  d.strata = s;
  d.y = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(a.size()), 0.0, 1.0);
  d.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.size()), k);
  return d;
}

}  // namespace

TEST_CASE("parse a small file") {
  const std::string csv = "Y,A,S,X1\n1.5,1,a,0.1\n2,0,a,0.2\n-1,1,b,3\n0,0,b,4e-1\n";
  Dataset d = parse_dataset(csv, {"Y", "A", "S", {"X1"}});
  CHECK(d.n() == 4);
  CHECK(d.k() == 1);
  CHECK(d.y(0) == 1.5);
  CHECK(d.a[2] == 1);
  CHECK(d.strata[3] == "b");
  CHECK(d.x(3, 0) == 0.4);
  CHECK(d.covariate_names == std::vector<std::string>{"X1"});
}

TEST_CASE("covariate globs and covariate-free files") {
  const std::string csv = "X2,Y,A,S,Z,X1\n1,2,1,s,9,3\n4,5,0,s,9,6\n";
  Dataset d = parse_dataset(csv, {"Y", "A", "S", {"X*"}});
  CHECK(d.covariate_names == std::vector<std::string>{"X2", "X1"});
  CHECK(d.x(1, 1) == 6.0);
  Dataset bare = parse_dataset("Y,A,S\n1,1,s\n2,0,s\n", {"Y", "A", "S", {}});
  CHECK(bare.k() == 0);
  CHECK(bare.n() == 2);
}

TEST_CASE("malformed input is rejected") {
  const ColumnSpec spec{"Y", "A", "S", {"X1"}};
  CHECK_THROWS_WITH_AS(parse_dataset("Y,A,S,X1\n1,2,a,0\n", spec),
                       doctest::Contains("treatment not binary"), DataError);
  CHECK_THROWS_AS(parse_dataset("Y,A,S\n1,1,a\n", spec), DataError);
  CHECK_THROWS_AS(parse_dataset("Y,A,S,X1\n1,1,a,\n", spec), DataError);
  CHECK_THROWS_AS(parse_dataset("Y,A,S,X1\n1,1,a,NA\n", spec), DataError);
  CHECK_THROWS_AS(parse_dataset("Y,A,S,X1\n1,1,a\n", spec), DataError);
  CHECK_THROWS_AS(parse_dataset("", spec), DataError);
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv", spec), DataError);
}

TEST_CASE("load from disk matches in-memory parse") {
  const auto path = std::filesystem::temp_directory_path() / "carate_test_data.csv";
  const std::string csv = "Y,A,S,X1\n1,1,a,0.5\n2,0,a,0.25\n";
  std::ofstream(path) << csv;
  Dataset a = load_dataset(path, {"Y", "A", "S", {"X1"}});
  Dataset b = parse_dataset(csv, {"Y", "A", "S", {"X1"}});
  CHECK(a.y == b.y);
  CHECK(a.x == b.x);
  std::filesystem::remove(path);
}

TEST_CASE("strata counts") {
  Dataset d = make({1, 0, 1, 0, 1, 0}, {"1", "1", "1", "2", "2", "2"});
  StrataIndex idx = build_index(d);
  REQUIRE(idx.num_strata() == 2);
  CHECK(idx.strata[0].size() == 3);
  CHECK(idx.strata[0].treated.size() == 2);
  CHECK(idx.propensity(0) == doctest::Approx(2.0 / 3.0));
  CHECK(idx.share(0) == 0.5);

  Dataset all = make({1, 1, 1}, {"x", "x", "x"});
  CHECK(build_index(all).propensity(0) == 1.0);

  std::vector<int> a(400, 0);
  std::vector<std::string> s(400, "b");
  std::fill(s.begin(), s.begin() + 100, "a");
  StrataIndex big = build_index(make(a, s));
  CHECK(big.share(0) == 0.25);
  CHECK(big.share(1) == 0.75);
}

TEST_CASE("index partitions rows and is permutation invariant") {
  std::vector<int> a;
  std::vector<std::string> s;
  for (int i = 0; i < 50; ++i) {
    a.push_back((i * 7) % 3 == 0);
    s.push_back(std::to_string(i % 4));
  }
  Dataset d = make(a, s);
  StrataIndex idx = build_index(d);
  std::vector<int> seen(d.n(), 0);
  std::size_t total = 0;
  for (std::size_t s_i = 0; s_i < idx.num_strata(); ++s_i) {
    const auto& cells = idx.strata[s_i];
    CHECK(cells.treated.size() + cells.control.size() == cells.size());
    for (std::size_t r : cells.members) {
      ++seen[r];
      CHECK(idx.stratum_of_row[r] == s_i);
      CHECK(d.strata[r] == cells.label);
    }
    total += cells.size();
  }
  CHECK(total == d.n());
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));

  std::vector<std::size_t> perm(d.n());
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  StrataIndex rev = build_index(d.subset(perm));
  for (std::size_t s_i = 0; s_i < idx.num_strata(); ++s_i) {
    CHECK(rev.strata[s_i].label == idx.strata[s_i].label);
    CHECK(rev.strata[s_i].treated.size() == idx.strata[s_i].treated.size());
    CHECK(rev.strata[s_i].control.size() == idx.strata[s_i].control.size());
  }
}

TEST_CASE("labels are ordered lexicographically") {
  StrataIndex idx = build_index(make({1, 0, 1}, {"b", "10", "2"}));
  CHECK(idx.strata[0].label == "10");
  CHECK(idx.strata[1].label == "2");
  CHECK(idx.strata[2].label == "b");
}

TEST_CASE("validation") {
  SUBCASE("large arms are estimable") {
    std::vector<int> a(141, 1);
    std::fill(a.begin() + 100, a.end(), 0);
    std::vector<std::string> s(141, "s");
    Dataset d = make(a, s, 40);
    auto report = validate(d, build_index(d), {});
    REQUIRE(report.cells.size() == 2);
    CHECK(report.cells[0].arm == 1);
    CHECK(report.cells[0].estimable);
    CHECK_FALSE(report.cells[1].estimable);
    CHECK(report.cells[1].reason.find("n_{a,s} < k+2") != std::string::npos);
    CHECK_FALSE(report.adjusted_estimable());
    CHECK(report.unadjusted_estimable);
  }
  SUBCASE("no control units") {
    Dataset d = make({1, 1, 1, 0, 1, 0}, {"a", "a", "a", "b", "b", "b"});
    auto report = validate(d, build_index(d), {});
    CHECK(report.cells[1].reason == "no control units");
    CHECK_FALSE(report.unadjusted_estimable);
  }
  SUBCASE("drop policy") {
    Dataset d = make({1, 1, 1, 0, 1, 0, 1}, {"a", "a", "a", "b", "b", "b", "b"});
    auto report = validate(d, build_index(d), {0, true});
    CHECK(report.dropped_strata == std::vector<std::string>{"a"});
    CHECK(report.adjusted_estimable());
    Dataset kept = drop_strata(d, report.dropped_strata);
    CHECK(kept.n() == 4);
    CHECK(build_index(kept).num_strata() == 1);
  }
}

TEST_CASE("dataset checks") {
  Dataset d = make({1, 0}, {"a", "a"});
  CHECK_NOTHROW(d.check());
  d.a[1] = 3;
  CHECK_THROWS_AS(d.check(), DataError);
  Dataset e = make({1, 0}, {"a"});
  CHECK_THROWS_AS(e.check(), DataError);
}
