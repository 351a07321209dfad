#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <vector>

#include "xct/hash.hpp"
#include "xct/rng.hpp"

using namespace xct;

namespace {

bool sorted_distinct_in_range(const std::vector<int>& v, int n) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 1 || v[i] > n) return false;
    if (i > 0 && v[i] <= v[i - 1]) return false;
  }
  return true;
}

bool row_satisfied(const XorConstraint& c, uint32_t x) {
  int parity = 0;
  for (int v : c.support) parity ^= (x >> (v - 1)) & 1;
  return parity == (c.target ? 1 : 0);
}

} // namespace

TEST_CASE("bernoulli rows: shape and statistics") {
  Rng r(11);
  const int n = 100;
  const double p = 0.3;
  const int rows = 2000;
  long total = 0;
  int targets = 0;
  for (int i = 0; i < rows; ++i) {
    XorConstraint c = sample_bernoulli_row(n, p, r);
    REQUIRE(sorted_distinct_in_range(c.support, n));
    total += static_cast<long>(c.support.size());
    targets += c.target;
  }
  double mean = static_cast<double>(total) / rows;
  double se = std::sqrt(n * p * (1 - p) / rows);
  CHECK(std::fabs(mean - n * p) < 5 * se);
  CHECK(std::fabs(targets - rows / 2.0) < 5 * std::sqrt(rows * 0.25));

  CHECK_THROWS_AS(sample_bernoulli_row(4, 0.0, r), std::invalid_argument);
  CHECK_THROWS_AS(sample_bernoulli_row(4, 0.6, r), std::invalid_argument);
}

TEST_CASE("fixed-k rows: exact width and subset uniformity") {
  Rng r(12);
  CHECK(sample_fixed_k_row(5, 0, r).support.empty());
  CHECK(sample_fixed_k_row(5, 5, r).support == std::vector<int>{1, 2, 3, 4, 5});
  CHECK_THROWS_AS(sample_fixed_k_row(5, 6, r), std::invalid_argument);
  CHECK_THROWS_AS(sample_fixed_k_row(5, -1, r), std::invalid_argument);

  const int n = 5, k = 2, draws = 5000;
  std::map<std::vector<int>, int> histogram;
  for (int i = 0; i < draws; ++i) {
    XorConstraint c = sample_fixed_k_row(n, k, r);
    REQUIRE(c.support.size() == size_t{k});
    REQUIRE(sorted_distinct_in_range(c.support, n));
    ++histogram[c.support];
  }
  CHECK(histogram.size() == 10); // C(5,2)
  double expect = draws / 10.0;
  double sigma = std::sqrt(expect * 0.9);
  for (const auto& [subset, count] : histogram)
    CHECK(std::fabs(count - expect) < 5 * sigma);
}

TEST_CASE("build_hash: row count, prefix stability, determinism") {
  Rng base(77);
  RowSampler sampler = bernoulli_rows(0.4);
  HashFunction h3 = build_hash(10, 3, sampler, base);
  HashFunction h2 = build_hash(10, 2, sampler, base);
  CHECK(h3.m() == 3);
  CHECK(h3.n == 10);
  // a prefix of rows is unchanged when m grows under the same seed
  CHECK(h3.rows[0].support == h2.rows[0].support);
  CHECK(h3.rows[0].target == h2.rows[0].target);
  CHECK(h3.rows[1].support == h2.rows[1].support);

  HashFunction again = build_hash(10, 3, sampler, Rng(77));
  for (int i = 0; i < 3; ++i) {
    CHECK(h3.rows[i].support == again.rows[i].support);
    CHECK(h3.rows[i].target == again.rows[i].target);
  }
  CHECK_THROWS_AS(build_hash(10, 0, sampler, base), std::invalid_argument);
}

TEST_CASE("xor_to_cnf is semantically the parity predicate") {
  const int n = 5;
  Rng r(3);
  // every support of width <= 3 over 5 variables, both targets
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > 3) continue;
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) support.push_back(i + 1);
    for (int target = 0; target < 2; ++target) {
      XorConstraint c{support, target == 1};
      Cnf f = xor_to_cnf(c, n);
      CHECK(f.var_count() == n);
      size_t w = support.size();
      size_t expected_clauses = w == 0 ? (target ? 1 : 0) : (size_t{1} << (w - 1));
      CHECK(f.clause_count() == expected_clauses);
      for (uint32_t x = 0; x < (1u << n); ++x) {
        std::vector<bool> bits(n);
        for (int i = 0; i < n; ++i) bits[i] = (x >> i) & 1;
        CHECK(satisfies(f, bits) == row_satisfied(c, x));
      }
    }
  }
}

TEST_CASE("xor_to_cnf guards") {
  std::vector<int> wide;
  for (int v = 1; v <= 27; ++v) wide.push_back(v);
  CHECK_THROWS_AS(xor_to_cnf(XorConstraint{wide, false}, 30), std::invalid_argument);
  CHECK_THROWS_AS(xor_to_cnf(XorConstraint{{5}, false}, 4), std::invalid_argument);
}

TEST_CASE("encode_hash conjoins every row over the same variables") {
  Rng r(21);
  const int n = 4;
  HashFunction h = build_hash(n, 3, bernoulli_rows(0.5), r);
  Cnf f = encode_hash(h);
  CHECK(f.var_count() == n);
  for (uint32_t x = 0; x < (1u << n); ++x) {
    std::vector<bool> bits(n);
    for (int i = 0; i < n; ++i) bits[i] = (x >> i) & 1;
    bool all = true;
    for (const XorConstraint& c : h.rows) all = all && row_satisfied(c, x);
    CHECK(satisfies(f, bits) == all);
  }
}

TEST_CASE("locality report") {
  HashFunction h;
  h.n = 6;
  h.rows = {XorConstraint{{1, 2}, false}, XorConstraint{{1, 3, 5, 6}, true},
            XorConstraint{{}, false}};
  LocalityReport rep = locality_report(h);
  CHECK(rep.row_sizes == std::vector<int>{2, 4, 0});
  CHECK(rep.max_size == 4);
  CHECK(rep.within(4));
  CHECK_FALSE(rep.within(3));
}
