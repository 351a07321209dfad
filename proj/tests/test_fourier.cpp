#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "xct/fourier.hpp"
#include "xct/hash.hpp"
#include "xct/rng.hpp"

using namespace xct;

namespace {

std::vector<uint32_t> sample_support(int n, uint32_t count, Rng& r) {
  uint32_t space = uint32_t{1} << n;
  std::vector<bool> seen(space, false);
  std::vector<uint32_t> out;
  for (uint32_t j = space - count; j < space; ++j) {
    auto x = static_cast<uint32_t>(r.next_below(j + 1));
    if (seen[x]) x = j;
    seen[x] = true;
    out.push_back(x);
  }
  return out;
}

HypercubeDistribution random_distribution(int n, Rng& r) {
  std::vector<double> v(size_t{1} << n);
  long double sum = 0.0L;
  for (auto& x : v) {
    double u = r.next_double();
    x = u * u;
    sum += x;
  }
  for (auto& x : v) x = static_cast<double>(x / sum);
  return HypercubeDistribution(n, v);
}

SignedFunction random_signed(int n, Rng& r) {
  std::vector<double> v(size_t{1} << n);
  for (auto& x : v) x = static_cast<double>(static_cast<int>(r.next_below(3)) - 1);
  return SignedFunction(n, v);
}

} // namespace

TEST_CASE("distribution constructors validate") {
  CHECK_THROWS_AS(HypercubeDistribution(2, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(HypercubeDistribution(2, {0.5, 0.6, -0.1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(HypercubeDistribution(2, {0.5, 0.5, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(HypercubeDistribution::flat(2, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(HypercubeDistribution::flat(2, {}), std::invalid_argument);
  CHECK_THROWS_AS(HypercubeDistribution::point_mass(21, 0), std::invalid_argument);

  HypercubeDistribution u = HypercubeDistribution::uniform(3);
  CHECK(u.support_size() == 8);
  CHECK(u[5] == doctest::Approx(0.125));

  HypercubeDistribution p = HypercubeDistribution::point_mass(3, 6);
  CHECK(p.support() == std::vector<uint32_t>{6});

  HypercubeDistribution fl = HypercubeDistribution::flat(3, {1, 4, 6, 7});
  CHECK(fl.support_size() == 4);
  CHECK(fl[4] == doctest::Approx(0.25));
  CHECK(fl[0] == 0.0);

  CHECK_THROWS_AS(SignedFunction(2, {0.5, 0.0, 1.0, -1.0}), std::invalid_argument);
  SignedFunction s(2, {1.0, 0.0, -1.0, 0.0});
  CHECK(s.support_size() == 2);
}

TEST_CASE("walsh transform involution and spectrum scaling") {
  Rng r(31);
  std::vector<double> v(16);
  for (auto& x : v) x = r.next_double() - 0.5;
  std::vector<double> twice = v;
  walsh_transform(twice);
  walsh_transform(twice);
  for (size_t i = 0; i < v.size(); ++i)
    CHECK(twice[i] == doctest::Approx(16.0 * v[i]).epsilon(1e-12));

  std::vector<double> spec = spectrum(v);
  for (uint32_t S = 0; S < 16; ++S)
    CHECK(spec[S] == doctest::Approx(fourier_coefficient(v, S)).epsilon(1e-12));

  std::vector<double> odd(3);
  CHECK_THROWS_AS(walsh_transform(odd), std::invalid_argument);
}

TEST_CASE("coefficients of pinned distributions") {
  const int n = 4;
  HypercubeDistribution u = HypercubeDistribution::uniform(n);
  CHECK(fourier_coefficient(u, 0) == doctest::Approx(1.0 / 16).epsilon(1e-15));
  for (uint32_t S = 1; S < 16; ++S) {
    CHECK(fourier_coefficient(u, S) == doctest::Approx(0.0));
    CHECK(normalized_coefficient(u, S) == doctest::Approx(0.0));
  }
  CHECK(normalized_coefficient(u, 0) == doctest::Approx(0.5));

  HypercubeDistribution pm = HypercubeDistribution::point_mass(n, 11);
  for (uint32_t S = 0; S < 16; ++S) {
    double sign = (std::popcount(11u & S) & 1) ? -1.0 : 1.0;
    CHECK(fourier_coefficient(pm, S) == doctest::Approx(sign / 16).epsilon(1e-15));
    CHECK(normalized_coefficient(pm, S) == doctest::Approx(0.5 * sign).epsilon(1e-15));
  }
}

TEST_CASE("bias route and transform route agree") {
  Rng r(17);
  for (int i = 0; i < 60; ++i) {
    int n = 2 + static_cast<int>(r.next_below(9)); // 2..10
    HypercubeDistribution f = random_distribution(n, r);
    for (int j = 0; j < 8; ++j) {
      auto S = static_cast<uint32_t>(r.next_below(uint64_t{1} << n));
      double a = normalized_coefficient(f, S);
      double b = std::ldexp(fourier_coefficient(f, S), n - 1);
      CHECK(std::fabs(a - b) <= 1e-12);
    }
  }
}

TEST_CASE("entropy profile") {
  EntropyProfile u = entropy_profile(HypercubeDistribution::uniform(6));
  CHECK(u.min_entropy == doctest::Approx(6.0));
  CHECK(u.relative == doctest::Approx(1.0));
  CHECK(u.is_flat);
  CHECK(u.support_size == 64);

  EntropyProfile p = entropy_profile(HypercubeDistribution::point_mass(6, 9));
  CHECK(p.min_entropy == doctest::Approx(0.0));
  CHECK(p.is_flat);
  CHECK(p.support_size == 1);

  EntropyProfile fl = entropy_profile(HypercubeDistribution::flat(5, {0, 3, 17, 30}));
  CHECK(fl.min_entropy == doctest::Approx(2.0));
  CHECK(fl.is_flat);

  // overlapping unequal mixture: 3/4 on {0,1}, 1/4 on {1,2} -> not flat
  HypercubeDistribution mix(2, {0.375, 0.5, 0.125, 0.0});
  EntropyProfile m = entropy_profile(mix);
  CHECK_FALSE(m.is_flat);
  CHECK(m.min_entropy == doctest::Approx(1.0));
  CHECK(m.support_size == 3);
}

TEST_CASE("flat decomposition") {
  SUBCASE("flat input comes back as one component") {
    HypercubeDistribution f = HypercubeDistribution::flat(4, {2, 5, 9, 14});
    auto parts = flat_decompose(f, 2);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].first == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(parts[0].second.support() == f.support());
  }
  SUBCASE("uniform splits into flats that reconstruct") {
    HypercubeDistribution f = HypercubeDistribution::uniform(4);
    auto parts = flat_decompose(f, 2);
    std::vector<long double> rebuilt(16, 0.0L);
    long double total = 0.0L;
    for (const auto& [w, d] : parts) {
      CHECK(w > 0.0);
      total += w;
      EntropyProfile prof = entropy_profile(d);
      CHECK(prof.is_flat);
      CHECK(prof.support_size == 4);
      for (uint32_t x = 0; x < 16; ++x) rebuilt[x] += w * d[x];
    }
    CHECK(std::fabs(static_cast<double>(total) - 1.0) <= 1e-10);
    for (uint32_t x = 0; x < 16; ++x)
      CHECK(std::fabs(static_cast<double>(rebuilt[x]) - f[x]) <= 1e-10);
  }
  SUBCASE("random mixtures with min-entropy >= t reconstruct") {
    Rng r(91);
    for (int i = 0; i < 40; ++i) {
      int n = 3 + static_cast<int>(r.next_below(6)); // 3..8
      int t = 1 + static_cast<int>(r.next_below(n - 1));
      // mixture of flats on 2^t points is guaranteed min-entropy >= t
      std::vector<long double> table(size_t{1} << n, 0.0L);
      int comps = 1 + static_cast<int>(r.next_below(4));
      std::vector<long double> w(comps);
      long double wsum = 0.0L;
      for (auto& x : w) {
        x = 0.2L + static_cast<long double>(r.next_double());
        wsum += x;
      }
      for (int c = 0; c < comps; ++c) {
        auto supp = sample_support(n, uint32_t{1} << t, r);
        for (uint32_t x : supp) table[x] += (w[c] / wsum) * ldexpl(1.0L, -t);
      }
      std::vector<double> dv(table.begin(), table.end());
      HypercubeDistribution f(n, dv);
      auto parts = flat_decompose(f, t);
      std::vector<long double> rebuilt(dv.size(), 0.0L);
      for (const auto& [wt, d] : parts) {
        CHECK(entropy_profile(d).is_flat);
        CHECK(d.support_size() == 1 << t);
        for (uint32_t x = 0; x < dv.size(); ++x) rebuilt[x] += wt * d[x];
      }
      for (uint32_t x = 0; x < dv.size(); ++x)
        CHECK(std::fabs(static_cast<double>(rebuilt[x]) - dv[x]) <= 1e-10);
    }
  }
  SUBCASE("min-entropy below t is rejected") {
    CHECK_THROWS_AS(flat_decompose(HypercubeDistribution::point_mass(3, 0), 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(flat_decompose(HypercubeDistribution::uniform(3), 4),
                    std::invalid_argument);
  }
}

TEST_CASE("coefficient expectations: closed forms") {
  const int n = 8;
  HypercubeDistribution u = HypercubeDistribution::uniform(n);
  for (double p : {0.1, 0.3, 0.5}) {
    CoeffExpectation e = expected_abs_coeff_mu_p(u, p);
    CHECK(e.exact);
    CHECK(e.value == doctest::Approx(0.5 * std::pow(1 - p, n)).epsilon(1e-12));
  }
  HypercubeDistribution pm = HypercubeDistribution::point_mass(n, 77);
  CHECK(expected_abs_coeff_mu_p(pm, 0.25).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(expected_abs_coeff_fixed_k(pm, 3).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(expected_abs_coeff_fixed_k(u, 0).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(expected_abs_coeff_fixed_k(u, 3).value == doctest::Approx(0.0));

  // pair support {0, d}: coefficient is 1/2 exactly when S has even overlap
  // with d, so the expectation is (1 + (1-2p)^|d|) / 4
  for (int w : {1, 3, 5}) {
    uint32_t d = (uint32_t{1} << w) - 1;
    HypercubeDistribution pair = HypercubeDistribution::flat(n, {0, d});
    for (double p : {0.2, 0.5}) {
      double expect = (1.0 + std::pow(1 - 2 * p, w)) / 4.0;
      CHECK(expected_abs_coeff_mu_p(pair, p).value == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("monte carlo expectation agrees with closed forms above the exact cap") {
  // n = 15 is past the exact-mode cutoff, so sampling kicks in; the pair
  // support {0, d} keeps both closed forms in reach
  const int n = 15, w = 4, k = 3;
  const uint32_t d = (uint32_t{1} << w) - 1;
  HypercubeDistribution pair = HypercubeDistribution::flat(n, {0, d});
  Rng r(12345);

  double p = 0.3;
  CoeffExpectation mc = expected_abs_coeff_mu_p(pair, p, 20000, &r);
  CHECK_FALSE(mc.exact);
  CHECK(mc.std_error > 0.0);
  double expect = (1.0 + std::pow(1.0 - 2.0 * p, w)) / 4.0;
  CHECK(std::fabs(mc.value - expect) <= 5 * mc.std_error + 1e-9);

  // fixed k: coefficient is 1/2 exactly when |S & d| is even (hypergeometric)
  auto choose = [](int a, int b) {
    double acc = 1.0;
    for (int i = 1; i <= b; ++i) acc = acc * (a - b + i) / i;
    return b < 0 || b > a ? 0.0 : acc;
  };
  double even = 0.0, total = 0.0;
  for (int j = 0; j <= std::min(w, k); ++j) {
    double ways = choose(w, j) * choose(n - w, k - j);
    total += ways;
    if (j % 2 == 0) even += ways;
  }
  CoeffExpectation mck = expected_abs_coeff_fixed_k(pair, k, 20000, &r);
  CHECK_FALSE(mck.exact);
  CHECK(mck.std_error > 0.0);
  CHECK(std::fabs(mck.value - 0.5 * even / total) <= 5 * mck.std_error + 1e-9);

  // above the cap, asking for the exact mode is refused
  CHECK_THROWS_AS(expected_abs_coeff_mu_p(pair, p), std::invalid_argument);
  CHECK_THROWS_AS(expected_abs_coeff_fixed_k(pair, k), std::invalid_argument);
}

TEST_CASE("coefficient ceilings") {
  // relative entropy 0 pins the ceiling at exactly 1/2, met by point masses
  CHECK(mu_p_abs_coeff_bound(12, 0.25, 0.0) == 0.5);
  // decreasing in the entropy rate
  CHECK(mu_p_abs_coeff_bound(12, 0.25, 0.2) > mu_p_abs_coeff_bound(12, 0.25, 0.8));
  // sweep over flats at n = 8: never violated
  Rng r(41);
  for (int t = 0; t <= 8; ++t)
    for (int rep = 0; rep < 5; ++rep) {
      HypercubeDistribution f =
          HypercubeDistribution::flat(8, sample_support(8, uint32_t{1} << t, r));
      for (double p : {0.1, 0.25, 0.5}) {
        double bound = mu_p_abs_coeff_bound(8, p, t / 8.0);
        CHECK(expected_abs_coeff_mu_p(f, p).value <= bound + 1e-9);
      }
      for (int k : {2, 3, 4})
        CHECK(expected_abs_coeff_fixed_k(f, k).value <=
              fixed_k_abs_coeff_bound(8, k, t, 0.5) + 1e-9);
    }
}

TEST_CASE("norm constant") {
  CHECK(A_of(1.0 / 9.0, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(A_of(0.05, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
  for (double alpha : {0.02, 0.06, 1.0 / 9.0})
    for (double p : {0.05, 0.2, 0.5}) {
      double a = A_of(alpha, p);
      CHECK(a >= 1.0 - 1e-9);
      CHECK(a <= a_closed_form_cap(alpha, p) + 1e-9);
      double at = a_tilde(alpha, p, a);
      CHECK(at >= a - 1e-15);
      CHECK(at >= (1 - p) * std::pow(4.0, alpha * p) - 1e-15);
    }
  CHECK_THROWS_AS(A_of(0.0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(A_of(0.1, 0.6), std::invalid_argument);
}

TEST_CASE("pairwise correlation bound") {
  SUBCASE("all-ones base case") {
    for (int n : {1, 4}) {
      SignedFunction ones(n, std::vector<double>(size_t{1} << n, 1.0));
      BoundCheck c = check_contractive(ones, ones, 0.25, 1.0 / 9.0);
      CHECK(c.holds);
      if (n == 1) CHECK(c.lhs == doctest::Approx(0.75).epsilon(1e-12));
    }
  }
  SUBCASE("zero function is the degenerate equality") {
    SignedFunction zero(3, std::vector<double>(8, 0.0));
    Rng r7(7);
    SignedFunction other = random_signed(3, r7);
    BoundCheck c = check_contractive(zero, other, 0.25, 0.1);
    CHECK(c.lhs == doctest::Approx(0.0));
    CHECK(c.rhs == doctest::Approx(0.0));
    CHECK(c.holds);
  }
  SUBCASE("random sweep") {
    Rng r(61);
    double a_cache = A_of(1.0 / 9.0, 0.25);
    for (int i = 0; i < 60; ++i) {
      int n = 2 + static_cast<int>(r.next_below(7)); // 2..8
      SignedFunction f = random_signed(n, r);
      SignedFunction g = (i % 3 == 0) ? f : random_signed(n, r);
      CHECK(check_contractive(f, g, 0.25, 1.0 / 9.0, a_cache).holds);
    }
  }
  SUBCASE("dimension cap") {
    SignedFunction big(13, std::vector<double>(size_t{1} << 13, 1.0));
    CHECK_THROWS_AS(check_contractive(big, big, 0.25, 0.1), std::invalid_argument);
  }
}

TEST_CASE("weighted spectral tail bound") {
  // dictator: whole spectrum on one degree-1 coefficient
  std::vector<double> dict(16);
  for (uint32_t x = 0; x < 16; ++x) dict[x] = (x & 1) ? -1.0 : 1.0;
  SignedFunction f(4, dict);
  for (double delta : {0.0, 0.3, 0.7}) CHECK(check_kkl_bound(f, delta).holds);
  BoundCheck eq = check_kkl_bound(f, 1.0);
  CHECK(eq.lhs == doctest::Approx(eq.rhs).epsilon(1e-12)); // Parseval at delta = 1

  Rng r(71);
  for (int i = 0; i < 50; ++i) {
    int n = 2 + static_cast<int>(r.next_below(7));
    SignedFunction g = random_signed(n, r);
    for (double delta : {0.0, 0.25, 0.5, 0.75}) CHECK(check_kkl_bound(g, delta).holds);
    BoundCheck pe = check_kkl_bound(g, 1.0);
    CHECK(std::fabs(pe.lhs - pe.rhs) <= 1e-12);
  }
  CHECK_THROWS_AS(check_kkl_bound(f, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(check_kkl_bound(f, 1.1), std::invalid_argument);
}

TEST_CASE("conditioning chain") {
  SUBCASE("uniform source: every conditional is exactly one half") {
    HypercubeDistribution u = HypercubeDistribution::uniform(8);
    HashFunction h;
    h.n = 8;
    h.rows = {XorConstraint{{1}, false}, XorConstraint{{2, 3}, true},
              XorConstraint{{1, 4, 7}, false}};
    ChainReport rep = check_conditioning_chain(u, h, {0, 1, 0}, 0.01);
    CHECK(rep.condition_holds);
    CHECK(rep.first_violation == 0);
    REQUIRE(rep.conditional.size() == 3);
    for (double p : rep.conditional) CHECK(p == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(rep.prefix.size() == 3);
    for (int j = 0; j < 3; ++j)
      CHECK(rep.prefix[j] == doctest::Approx(std::ldexp(1.0, -(j + 1))).epsilon(1e-15));
    CHECK(rep.sandwich_holds);
    CHECK(rep.final_gap_holds);
    CHECK(rep.final_gap == doctest::Approx(0.0));
    CHECK(rep.final_gap_bound ==
          doctest::Approx(std::ldexp(1.0, -3) * (std::pow(1.01, 3) - 1)).epsilon(1e-12));
  }
  SUBCASE("point mass breaks the balance condition") {
    HypercubeDistribution pm = HypercubeDistribution::point_mass(6, 5);
    HashFunction h;
    h.n = 6;
    h.rows = {XorConstraint{{1}, false}}; // bit 1 of x=5 is 1, so p_1 = 0
    ChainReport rep = check_conditioning_chain(pm, h, {0}, 0.5);
    CHECK_FALSE(rep.condition_holds);
    CHECK(rep.first_violation == 1);
  }
  SUBCASE("near-balance on large flats, conclusions follow") {
    Rng r(81);
    int accepted = 0;
    for (int i = 0; i < 40; ++i) {
      int n = 10;
      HypercubeDistribution f =
          HypercubeDistribution::flat(n, sample_support(n, 1u << 8, r));
      Rng hr = r.split(1, 0);
      HashFunction h = build_hash(n, 3, bernoulli_rows(0.5), hr);
      ChainReport rep = check_conditioning_chain(f, h, {0, 0, 1}, 0.5);
      if (!rep.condition_holds) continue;
      ++accepted;
      CHECK(rep.sandwich_holds);
      CHECK(rep.final_gap_holds);
    }
    CHECK(accepted >= 30); // almost all instances are balanced at eta = 1/2
  }
  SUBCASE("validation") {
    HypercubeDistribution u = HypercubeDistribution::uniform(4);
    HashFunction h;
    h.n = 4;
    h.rows = {XorConstraint{{1}, false}};
    CHECK_THROWS_AS(check_conditioning_chain(u, h, {0, 1}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(check_conditioning_chain(u, h, {0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(check_conditioning_chain(u, h, {0}, 1.0), std::invalid_argument);
    HashFunction wrong;
    wrong.n = 5;
    wrong.rows = h.rows;
    CHECK_THROWS_AS(check_conditioning_chain(u, wrong, {0}, 0.5), std::invalid_argument);
  }
}

TEST_CASE("extraction failure terms: frozen values") {
  CHECK(extraction_failure_q(20, 1, 0.5, 5, 0.5, 18) == doctest::Approx(0.2228).epsilon(2e-3));
  CHECK(extraction_failure_p(20, 1, 0.5, 0.5, 0.9) == doctest::Approx(1.4224).epsilon(2e-3));
  CHECK(std::isinf(extraction_failure_p(20, 1, 0.5, 0.5, 0.0)));
  CHECK(extraction_failure_q(20, 2, 0.5, 5, 0.5, 17) > extraction_failure_q(20, 1, 0.5, 5, 0.5, 18));
}

TEST_CASE("extraction estimates") {
  SUBCASE("full cube, fixed width: ratio is exactly a half, always succeeds") {
    ExtractionParams params;
    params.n = 16;
    params.m = 1;
    params.family = HashFamily::fixed_k;
    params.k = 3;
    params.trials = 300;
    params.full_cube = true;
    ExtractionResult r = extraction_estimate({}, params, Rng(5));
    CHECK(r.empirical == doctest::Approx(1.0));
    CHECK(r.analytic_applicable);
    CHECK(r.analytic_bound == doctest::Approx(1.0 - r.failure_term).epsilon(1e-12));
    CHECK(r.failure_term < 1.0);
    CHECK(r.empirical >= r.analytic_bound);
  }
  SUBCASE("sparse rows at half density: analytic floor never applies at n = 8") {
    ExtractionParams params;
    params.n = 8;
    params.m = 1;
    params.family = HashFamily::bernoulli;
    params.p = 0.5;
    params.trials = 400;
    params.full_cube = true;
    ExtractionResult r = extraction_estimate({}, params, Rng(6));
    CHECK_FALSE(r.analytic_applicable);
    CHECK(r.note.find("failure term") != std::string::npos);
    CHECK(r.empirical >= 0.97); // rows are almost never empty
  }
  SUBCASE("entropy slack gate") {
    ExtractionParams params;
    params.n = 8;
    params.m = 1;
    params.family = HashFamily::fixed_k;
    params.k = 3;
    params.trials = 50;
    ExtractionResult r = extraction_estimate({0, 1}, params, Rng(7)); // t = 1
    CHECK_FALSE(r.analytic_applicable);
    CHECK(r.note.find("nonpositive") != std::string::npos);
  }
  SUBCASE("validation") {
    ExtractionParams params;
    params.n = 8;
    params.m = 1;
    params.trials = 10;
    CHECK_THROWS_AS(extraction_estimate({}, params, Rng(1)), std::invalid_argument);
    params.full_cube = true;
    params.m = 0;
    CHECK_THROWS_AS(extraction_estimate({}, params, Rng(1)), std::invalid_argument);
    params.m = 1;
    params.n = 25;
    CHECK_THROWS_AS(extraction_estimate({}, params, Rng(1)), std::invalid_argument);
  }
}
