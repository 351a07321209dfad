#include "xct/selftest.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <unordered_set>

#include "xct/counter.hpp"
#include "xct/fourier.hpp"
#include "xct/rng.hpp"
#include "xct/solver.hpp"

namespace xct {
namespace {

// ---------------------------------------------------------------- utilities

int scaled(const SelftestOptions& opt, int base, int floor_count = 1) {
  double want = std::ceil(base * opt.scale - 1e-9);
  return std::max(floor_count, static_cast<int>(want));
}

int scaled_odd(const SelftestOptions& opt, int base) {
  int v = scaled(opt, base, 3);
  return (v % 2 == 0) ? v + 1 : v;
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Floyd's sampling: `count` distinct points out of [0, 2^n)
std::vector<uint32_t> random_support(int n, uint32_t count, Rng& r) {
  uint32_t space = uint32_t{1} << n;
  std::unordered_set<uint32_t> seen;
  std::vector<uint32_t> out;
  out.reserve(count);
  for (uint32_t j = space - count; j < space; ++j) {
    auto x = static_cast<uint32_t>(r.next_below(j + 1));
    if (!seen.insert(x).second) {
      x = j;
      seen.insert(j);
    }
    out.push_back(x);
  }
  return out;
}

HypercubeDistribution random_distribution(int n, Rng& r) {
  std::vector<double> v(size_t{1} << n, 0.0);
  for (auto& x : v) {
    if (r.next_below(3) == 0) continue; // keep roughly a third of the mass points empty
    double u = r.next_double();
    x = u * u;
  }
  long double sum = 0.0L;
  for (double x : v) sum += x;
  if (sum <= 0.0L) v[0] = 1.0;
  else
    for (auto& x : v) x = static_cast<double>(x / sum);
  return HypercubeDistribution(n, v);
}

SignedFunction random_signed(int n, Rng& r) {
  std::vector<double> v(size_t{1} << n);
  for (auto& x : v) x = static_cast<double>(static_cast<int>(r.next_below(3)) - 1);
  return SignedFunction(n, v);
}

HypercubeDistribution random_flat(int n, int t, Rng& r) {
  return HypercubeDistribution::flat(n, random_support(n, uint32_t{1} << t, r));
}

// mixture of flats that all share one point, so the min-entropy is exactly t
HypercubeDistribution random_mixture(int n, int t, Rng& r) {
  int comps = 2 + static_cast<int>(r.next_below(3));
  auto common = static_cast<uint32_t>(r.next_below(uint64_t{1} << n));
  std::vector<long double> table(size_t{1} << n, 0.0L);
  std::vector<long double> w(comps);
  long double wsum = 0.0L;
  for (auto& x : w) {
    x = 0.1L + static_cast<long double>(r.next_double());
    wsum += x;
  }
  for (auto& x : w) x /= wsum;
  for (int c = 0; c < comps; ++c) {
    auto supp = random_support(n, uint32_t{1} << t, r);
    if (std::find(supp.begin(), supp.end(), common) == supp.end()) supp[0] = common;
    long double piece = w[c] * ldexpl(1.0L, -t);
    for (uint32_t x : supp) table[x] += piece;
  }
  std::vector<double> v(table.begin(), table.end());
  return HypercubeDistribution(n, v);
}

Cnf random_cnf(int n, int clauses, int width, Rng& r) {
  Cnf f(n);
  for (int c = 0; c < clauses; ++c) {
    std::vector<int> vars;
    while (static_cast<int>(vars.size()) < width) {
      int v = 1 + static_cast<int>(r.next_below(n));
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    std::vector<Literal> lits;
    lits.reserve(vars.size());
    for (int v : vars) lits.push_back(Literal::make(v, r.next_bool(0.5)));
    f.add(Clause(lits));
  }
  return f;
}

// free-variable family at n=16: pin the first j variables, leaving 2^(16-j) models
Cnf pinned_formula(int j) {
  Cnf f(16);
  for (int v = 1; v <= j; ++v) f.add(Clause({Literal::make(v, true)}));
  return f;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// ---------------------------------------------------------------- criteria

// 1: the probability-gap formula and the transform route must agree on every
//    coefficient of every distribution
CriterionResult criterion_bias_identity(const SelftestOptions& opt) {
  constexpr double kTol = 1e-12;
  CriterionResult res;
  int cases = scaled(opt, 500);
  Rng root = Rng(opt.seed).split(1, 0);
  double worst = 0.0;
  for (int i = 0; i < cases; ++i) {
    Rng r = root.split(2, i);
    int n = 2 + static_cast<int>(r.next_below(11)); // 2..12
    HypercubeDistribution f = random_distribution(n, r);
    auto mask = static_cast<uint32_t>(r.next_below(uint64_t{1} << n));
    double via_bias = normalized_coefficient(f, mask);
    double via_transform = std::ldexp(fourier_coefficient(f, mask), n - 1);
    worst = std::max(worst, std::fabs(via_bias - via_transform));
  }
  res.passed = worst <= kTol;
  res.detail = "cases=" + std::to_string(cases) + " max_gap=" + num(worst);
  return res;
}

// 2: the two-function correlation bound holds on random signed pairs
CriterionResult criterion_correlation_bound(const SelftestOptions& opt) {
  CriterionResult res;
  int pairs = scaled(opt, 500);
  const double ps[] = {0.1, 0.25, 0.5};
  const double alphas[] = {0.05, 1.0 / 9.0};
  double a_cache[3][2];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) a_cache[i][j] = A_of(alphas[j], ps[i]);
  Rng root = Rng(opt.seed).split(2, 0);
  int violations = 0;
  double min_margin = 1e300;
  for (int i = 0; i < pairs; ++i) {
    Rng r = root.split(3, i);
    int n = 4 + static_cast<int>(r.next_below(7)); // 4..10
    SignedFunction f = random_signed(n, r);
    SignedFunction g = (i % 4 == 0) ? f : random_signed(n, r);
    for (int pi = 0; pi < 3; ++pi)
      for (int ai = 0; ai < 2; ++ai) {
        BoundCheck c = check_contractive(f, g, ps[pi], alphas[ai], a_cache[pi][ai]);
        min_margin = std::min(min_margin, c.margin);
        if (!c.holds) ++violations;
      }
  }
  res.passed = violations == 0;
  res.detail = "pairs=" + std::to_string(pairs) + " violations=" +
               std::to_string(violations) + " min_margin=" + num(min_margin);
  return res;
}

// 3: the norm constant stays within [1, closed-form cap] across the grid
CriterionResult criterion_norm_constant_cap(const SelftestOptions& opt) {
  constexpr double kSlack = 1e-9;
  CriterionResult res;
  int grid = std::max(4, static_cast<int>(std::lround(20.0 * std::sqrt(opt.scale))));
  const double alpha_lo = 0.01, alpha_hi = 1.0 / 9.0;
  const double p_lo = 0.05, p_hi = 0.5;
  int violations = 0;
  double min_cap_margin = 1e300, min_floor = 1e300;
  for (int i = 0; i < grid; ++i) {
    double frac = grid == 1 ? 0.0 : static_cast<double>(i) / (grid - 1);
    double alpha = std::exp(std::log(alpha_lo) + frac * (std::log(alpha_hi) - std::log(alpha_lo)));
    alpha = std::min(alpha, alpha_hi);
    for (int j = 0; j < grid; ++j) {
      double pf = grid == 1 ? 0.0 : static_cast<double>(j) / (grid - 1);
      double p = p_lo + pf * (p_hi - p_lo);
      double a = A_of(alpha, p);
      double cap = a_closed_form_cap(alpha, p);
      min_cap_margin = std::min(min_cap_margin, cap - a);
      min_floor = std::min(min_floor, a);
      if (a > cap + kSlack || a < 1.0 - kSlack) ++violations;
    }
  }
  res.passed = violations == 0;
  res.detail = "grid=" + std::to_string(grid) + "x" + std::to_string(grid) +
               " min_cap_margin=" + num(min_cap_margin) + " min_value=" + num(min_floor);
  return res;
}

// 4: the sparse-row expected-coefficient bound on flat supports and on
//    shared-point mixtures pinned to the same min-entropy
CriterionResult criterion_mu_p_coeff_bound(const SelftestOptions& opt) {
  constexpr double kTol = 1e-9;
  CriterionResult res;
  const int ns[] = {8, 10, 12};
  const double ps[] = {0.1, 0.25, 0.5};
  Rng root = Rng(opt.seed).split(4, 0);
  int violations = 0, checks = 0;
  double min_margin = 1e300;
  int reps = scaled(opt, 50);
  for (int n : ns)
    for (int t = 0; t <= n; ++t)
      for (int rep = 0; rep < reps; ++rep) {
        Rng r = root.split(n * 100 + t, rep);
        HypercubeDistribution f = random_flat(n, t, r);
        for (double p : ps) {
          double value = expected_abs_coeff_mu_p(f, p).value;
          double bound = mu_p_abs_coeff_bound(n, p, static_cast<double>(t) / n);
          min_margin = std::min(min_margin, bound - value);
          ++checks;
          if (value > bound + kTol) ++violations;
        }
      }
  int mixtures = scaled(opt, 100);
  for (int i = 0; i < mixtures; ++i) {
    Rng r = root.split(0x40, i);
    int n = ns[r.next_below(3)];
    int t = 1 + static_cast<int>(r.next_below(n - 2));
    HypercubeDistribution f = random_mixture(n, t, r);
    for (double p : ps) {
      double value = expected_abs_coeff_mu_p(f, p).value;
      double bound = mu_p_abs_coeff_bound(n, p, static_cast<double>(t) / n);
      min_margin = std::min(min_margin, bound - value);
      ++checks;
      if (value > bound + kTol) ++violations;
    }
  }
  res.passed = violations == 0;
  res.detail = "checks=" + std::to_string(checks) + " violations=" +
               std::to_string(violations) + " min_margin=" + num(min_margin);
  return res;
}

// 5: the fixed-width expected-coefficient bound, plus the weighted spectral
//    tail bound with its delta=1 equality edge
CriterionResult criterion_fixed_k_coeff_bound(const SelftestOptions& opt) {
  constexpr double kTol = 1e-9;
  constexpr double kParsevalTol = 1e-12;
  CriterionResult res;
  const int ns[] = {8, 10, 12};
  const int ks[] = {2, 3, 4};
  const double zeta = 0.5;
  Rng root = Rng(opt.seed).split(5, 0);
  int violations = 0, checks = 0;
  double min_margin = 1e300;
  int reps = scaled(opt, 50);
  for (int n : ns)
    for (int t = 0; t <= n; ++t)
      for (int rep = 0; rep < reps; ++rep) {
        Rng r = root.split(n * 100 + t, rep);
        HypercubeDistribution f = random_flat(n, t, r);
        for (int k : ks) {
          double value = expected_abs_coeff_fixed_k(f, k).value;
          double bound = fixed_k_abs_coeff_bound(n, k, t, zeta);
          min_margin = std::min(min_margin, bound - value);
          ++checks;
          if (value > bound + kTol) ++violations;
        }
      }
  int tails = scaled(opt, 500);
  int tail_violations = 0;
  double worst_parseval = 0.0;
  for (int i = 0; i < tails; ++i) {
    Rng r = root.split(0x55, i);
    int n = 4 + static_cast<int>(r.next_below(7)); // 4..10
    SignedFunction f = random_signed(n, r);
    for (int d = 1; d <= 9; ++d) {
      if (!check_kkl_bound(f, 0.1 * d).holds) ++tail_violations;
    }
    if (!check_kkl_bound(f, 0.0).holds) ++tail_violations;
    BoundCheck eq = check_kkl_bound(f, 1.0);
    worst_parseval = std::max(worst_parseval, std::fabs(eq.lhs - eq.rhs));
  }
  res.passed = violations == 0 && tail_violations == 0 && worst_parseval <= kParsevalTol;
  res.detail = "checks=" + std::to_string(checks) + " violations=" +
               std::to_string(violations + tail_violations) +
               " min_margin=" + num(min_margin) + " parseval_gap=" + num(worst_parseval);
  return res;
}

// 6: whenever the near-balance condition holds, the sandwich and final-gap
//    conclusions must hold with zero exceptions
CriterionResult criterion_conditioning_chain(const SelftestOptions& opt) {
  constexpr double kEta = 0.5;
  CriterionResult res;
  int want = scaled(opt, 200);
  Rng root = Rng(opt.seed).split(6, 0);
  int made = 0, violations = 0, attempts = 0;
  while (made < want && attempts < want * 100) {
    Rng r = root.split(7, attempts++);
    int n = 8 + 2 * static_cast<int>(r.next_below(4)); // 8,10,12,14
    int t = n - 3 + static_cast<int>(r.next_below(3));
    int m = 1 + static_cast<int>(r.next_below(4));
    HypercubeDistribution f = random_flat(n, t, r);
    Rng hr = r.split(1, 0);
    HashFunction h = build_hash(n, m, bernoulli_rows(0.5), hr);
    std::vector<uint8_t> y(m);
    for (auto& b : y) b = r.next_bool(0.5) ? 1 : 0;
    ChainReport rep = check_conditioning_chain(f, h, y, kEta);
    if (!rep.condition_holds) continue;
    ++made;
    if (!rep.sandwich_holds || !rep.final_gap_holds) ++violations;
  }
  res.passed = made == want && violations == 0;
  res.detail = "instances=" + std::to_string(made) + "/" + std::to_string(want) +
               " violations=" + std::to_string(violations);
  return res;
}

// 7: analytic extraction floors, where applicable, sit below the empirical
//    success rate; the sparse-row family must be uniformly inapplicable at n=20
CriterionResult criterion_extraction(const SelftestOptions& opt) {
  CriterionResult res;
  const int n = 20;
  int trials = scaled(opt, 2000);
  Rng root = Rng(opt.seed).split(7, 0);
  // sparse-row width per the default rule would exceed n/2 here, so the row
  // density is clamped at one half
  double p_clamped = std::min(0.5, bernoulli_p(n, default_k(n)));
  const int ms[] = {1, 2, 4, 6};
  const int ts[] = {10, 15, 20};
  int cell = 0, applicable = 0, violations = 0, sparse_applicable = 0;
  double min_gap = 1e300;
  for (int t : ts) {
    Rng sr = root.split(8, t);
    std::vector<uint32_t> support;
    bool full = t == n;
    if (!full) support = random_support(n, uint32_t{1} << t, sr);
    for (int fam = 0; fam < 3; ++fam)
      for (int m : ms) {
        ExtractionParams params;
        params.n = n;
        params.m = m;
        params.eps = 0.5;
        params.trials = trials;
        params.full_cube = full;
        if (fam == 0) {
          params.family = HashFamily::bernoulli;
          params.p = p_clamped;
        } else {
          params.family = HashFamily::fixed_k;
          params.k = fam == 1 ? 4 : 5;
          params.zeta = 0.5;
        }
        ExtractionResult r = extraction_estimate(support, params, root.split(9, cell));
        ++cell;
        if (fam == 0) {
          if (r.analytic_applicable) ++sparse_applicable;
          continue;
        }
        if (!r.analytic_applicable) continue;
        ++applicable;
        double floor_ = r.analytic_bound - 3.0 * r.std_error;
        min_gap = std::min(min_gap, r.empirical - floor_);
        if (r.empirical < floor_ - 1e-12) ++violations;
      }
  }
  res.passed = violations == 0 && sparse_applicable == 0 && applicable >= 1;
  res.detail = "cells=" + std::to_string(cell) + " applicable=" + std::to_string(applicable) +
               " violations=" + std::to_string(violations) +
               " sparse_applicable=" + std::to_string(sparse_applicable) +
               (applicable > 0 ? " min_gap=" + num(min_gap) : "");
  return res;
}

// 8: the parity-to-clauses encoding matches the parity predicate on every
//    assignment, for every support of width <= 6 over 8 variables
CriterionResult criterion_xor_encoding(const SelftestOptions& opt) {
  (void)opt;
  CriterionResult res;
  res.passed = xor_encoding_agrees(&xor_to_cnf, &res.detail);
  return res;
}

// 9: the main estimator lands in its guaranteed interval at least a quarter
//    of the time on every corpus formula
CriterionResult criterion_acount_interval(const SelftestOptions& opt) {
  CriterionResult res;
  Rng root = Rng(opt.seed).split(9, 0);
  struct Item {
    Cnf f;
    uint64_t s;
  };
  std::vector<Item> corpus;
  for (int j = 0; j <= 8; ++j) corpus.push_back({pinned_formula(j), uint64_t{1} << (16 - j)});
  int randoms = scaled(opt, 20);
  int made = 0, tries = 0;
  while (made < randoms && tries < randoms * 60) {
    Rng r = root.split(1, tries++);
    int n = 12 + 2 * static_cast<int>(r.next_below(3)); // 12,14,16
    int clauses = 2 + static_cast<int>(r.next_below(5));
    Cnf f = random_cnf(n, clauses, 3, r);
    uint64_t s = exact_count(f);
    if (s < 256) continue;
    corpus.push_back({std::move(f), s});
    ++made;
  }
  int runs = scaled(opt, 100, 8);
  auto factory = internal_oracle();
  int failing = 0;
  double min_fraction = 1.0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const Item& item = corpus[i];
    AcountConfig cfg;
    cfg.mode = CountMode::bernoulli;
    cfg.seed = root.split(2, i).seed();
    int nv = item.f.var_count();
    AcountConfig eff = validate_config(nv, cfg);
    double kappa = derive_kappa(nv, eff.k);
    double lo = 0.25 * std::exp2(-nv / kappa) * static_cast<double>(item.s);
    double hi = 4.0 * static_cast<double>(item.s);
    RepeatedResult rr = run_repeated(item.f, cfg, factory, runs, lo, hi);
    min_fraction = std::min(min_fraction, rr.fraction_within);
    if (rr.fraction_within < 0.25) ++failing;
  }
  res.passed = failing == 0 && made == randoms;
  res.detail = "formulas=" + std::to_string(corpus.size()) + " runs_each=" +
               std::to_string(runs) + " min_fraction=" + num(min_fraction) +
               " below_quarter=" + std::to_string(failing);
  return res;
}

// 10: the cap-probing counter is exact below its cap and lands within a
//     factor of two in the median above it
CriterionResult criterion_hybrid(const SelftestOptions& opt) {
  CriterionResult res;
  Rng root = Rng(opt.seed).split(10, 0);
  auto factory = internal_oracle();
  int exact_instances = scaled(opt, 30);
  int exact_errors = 0;
  for (int i = 0; i < exact_instances; ++i) {
    Rng r = root.split(1, i);
    int n = 8 + static_cast<int>(r.next_below(11)); // 8..18
    auto cap = static_cast<uint64_t>(std::floor(std::exp2(0.25 * n)));
    int clauses = 4 * n;
    Cnf f(n);
    uint64_t s = 0;
    for (;;) {
      f = random_cnf(n, clauses, 3, r);
      s = exact_count(f);
      if (s <= cap) break;
      clauses += 4;
    }
    AcountConfig cfg;
    cfg.mode = CountMode::hybrid;
    cfg.delta = 0.25;
    cfg.seed = root.split(2, i).seed();
    CountEstimate est = hybrid_count(f, cfg, factory);
    if (est.aborted || !est.exact_path || est.estimate != s) ++exact_errors;
  }
  int runs = scaled_odd(opt, 51);
  int median_errors = 0;
  for (int j = 0; j <= 8; ++j) {
    uint64_t s = uint64_t{1} << (16 - j);
    AcountConfig cfg;
    cfg.mode = CountMode::hybrid;
    cfg.delta = 0.25;
    cfg.seed = root.split(3, j).seed();
    RepeatedResult rr =
        run_repeated(pinned_formula(j), cfg, factory, runs, s / 2.0, 2.0 * s);
    double med = static_cast<double>(rr.median);
    if (med < s / 2.0 || med > 2.0 * s) ++median_errors;
  }
  res.passed = exact_errors == 0 && median_errors == 0;
  res.detail = "exact_instances=" + std::to_string(exact_instances) + " exact_errors=" +
               std::to_string(exact_errors) + " median_errors=" + std::to_string(median_errors);
  return res;
}

// 11: unsatisfiable inputs make every algorithm answer exactly zero
CriterionResult criterion_unsat_zero(const SelftestOptions& opt) {
  CriterionResult res;
  Rng root = Rng(opt.seed).split(11, 0);
  auto factory = internal_oracle();
  int instances = scaled(opt, 50);
  int violations = 0;
  for (int i = 0; i < instances; ++i) {
    Rng r = root.split(1, i);
    int n = 6 + static_cast<int>(r.next_below(5)); // 6..10
    int clauses = 8 * n;
    Cnf f(n);
    for (;;) {
      f = random_cnf(n, clauses, 3, r);
      if (exact_count(f) == 0) break;
      clauses += 4;
    }
    AcountConfig a;
    a.mode = CountMode::bernoulli;
    a.seed = root.split(2, i).seed();
    AcountConfig b;
    b.mode = CountMode::fixed_k;
    b.k = 5;
    b.seed = a.seed;
    AcountConfig c;
    c.mode = CountMode::hybrid;
    c.delta = 0.25;
    c.seed = a.seed;
    if (acount(f, a, factory).estimate != 0) ++violations;
    if (acount_constant(f, b, factory).estimate != 0) ++violations;
    if (hybrid_count(f, c, factory).estimate != 0) ++violations;
  }
  res.passed = violations == 0;
  res.detail =
      "instances=" + std::to_string(instances) + " nonzero=" + std::to_string(violations);
  return res;
}

// 12: full n-row draws from the sparse family stay within the width budget
//     at least 7/8 of the time (minus sampling noise)
CriterionResult criterion_locality(const SelftestOptions& opt) {
  CriterionResult res;
  int draws = scaled(opt, 10000, 200);
  Rng root = Rng(opt.seed).split(12, 0);
  double sigma = std::sqrt(0.875 * 0.125 / draws);
  double floor_ = 0.875 - 3.0 * sigma;
  int violations = 0;
  std::string fracs;
  for (int n : {64, 128}) {
    int k = default_k(n);
    RowSampler rows = bernoulli_rows(bernoulli_p(n, k));
    int good = 0;
    for (int d = 0; d < draws; ++d) {
      Rng r = root.split(n, d);
      HashFunction h = build_hash(n, n, rows, r);
      if (locality_report(h).within(k)) ++good;
    }
    double frac = static_cast<double>(good) / draws;
    if (frac < floor_) ++violations;
    fracs += " n" + std::to_string(n) + "=" + num(frac);
  }
  res.passed = violations == 0;
  res.detail = "draws=" + std::to_string(draws) + " floor=" + num(floor_) + fracs;
  return res;
}

// 13: serialized run records (timing excluded) are byte-identical across
//     repeats and across worker counts, for all three algorithms
CriterionResult criterion_determinism(const SelftestOptions& opt) {
  (void)opt;
  CriterionResult res;
  Cnf f(12);
  f.add(Clause({Literal::make(1, true)}));
  f.add(Clause({Literal::make(2, false)}));
  f.add(Clause({Literal::make(3, true), Literal::make(4, true), Literal::make(5, false)}));
  f.add(Clause({Literal::make(6, false), Literal::make(7, true), Literal::make(8, true)}));
  auto factory = internal_oracle();
  int mismatches = 0;
  for (int mode = 0; mode < 3; ++mode) {
    AcountConfig cfg;
    cfg.seed = 0xd15c0;
    std::string runs[3];
    for (int variant = 0; variant < 3; ++variant) {
      cfg.workers = variant == 1 ? 4 : 1;
      CountEstimate est;
      switch (mode) {
        case 0:
          cfg.mode = CountMode::bernoulli;
          est = acount(f, cfg, factory);
          break;
        case 1:
          cfg.mode = CountMode::fixed_k;
          cfg.k = 5;
          est = acount_constant(f, cfg, factory);
          break;
        default:
          cfg.mode = CountMode::hybrid;
          cfg.delta = 0.25;
          est = hybrid_count(f, cfg, factory);
          break;
      }
      runs[variant] = to_json_string(est, false);
    }
    if (runs[0] != runs[1] || runs[0] != runs[2]) ++mismatches;
  }
  res.passed = mismatches == 0;
  res.detail = "modes=3 mismatches=" + std::to_string(mismatches);
  return res;
}

} // namespace

bool xor_encoding_agrees(XorEncoder encoder, std::string* detail) {
  const int n = 8;
  int checked = 0;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > 6) continue;
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) support.push_back(i + 1);
    for (int target = 0; target < 2; ++target) {
      XorConstraint c{support, target == 1};
      Cnf f = encoder(c, n);
      for (uint32_t x = 0; x < (1u << n); ++x) {
        std::vector<bool> bits(n);
        for (int i = 0; i < n; ++i) bits[i] = (x >> i) & 1;
        bool want = (std::popcount(x & mask) & 1) == target;
        if (satisfies(f, bits) != want) {
          if (detail)
            *detail = "mismatch at mask=" + std::to_string(mask) +
                      " target=" + std::to_string(target) + " x=" + std::to_string(x);
          return false;
        }
      }
      ++checked;
    }
  }
  if (detail)
    *detail = "constraints=" + std::to_string(checked) + " assignments_each=256 mismatches=0";
  return true;
}

int run_acceptance(const SelftestOptions& opt, std::ostream& out,
                   std::vector<CriterionResult>* results) {
  using Fn = CriterionResult (*)(const SelftestOptions&);
  struct Entry {
    int number;
    const char* name;
    Fn fn;
    bool in_fast;
  };
  static const Entry entries[] = {
      {1, "bias-identity", &criterion_bias_identity, true},
      {2, "correlation-bound", &criterion_correlation_bound, false},
      {3, "norm-constant-cap", &criterion_norm_constant_cap, true},
      {4, "mu-p-coeff-bound", &criterion_mu_p_coeff_bound, false},
      {5, "fixed-k-coeff-bound", &criterion_fixed_k_coeff_bound, false},
      {6, "conditioning-chain", &criterion_conditioning_chain, false},
      {7, "extraction", &criterion_extraction, false},
      {8, "xor-encoding", &criterion_xor_encoding, true},
      {9, "acount-interval", &criterion_acount_interval, false},
      {10, "hybrid", &criterion_hybrid, false},
      {11, "unsat-zero", &criterion_unsat_zero, false},
      {12, "locality", &criterion_locality, true},
      {13, "determinism", &criterion_determinism, true},
  };
  SelftestOptions eff = opt;
  if (opt.fast) eff.scale = std::min(opt.scale, 0.1);
  int failures = 0;
  for (const Entry& e : entries) {
    if (opt.fast && !e.in_fast) {
      out << "SKIP " << std::setw(2) << e.number << " " << e.name << "\n" << std::flush;
      continue;
    }
    Timer timer;
    CriterionResult res = e.fn(eff);
    res.number = e.number;
    res.name = e.name;
    res.seconds = timer.seconds();
    out << (res.passed ? "PASS " : "FAIL ") << std::setw(2) << e.number << " " << std::left
        << std::setw(20) << e.name << std::right << " " << res.detail << " ("
        << std::fixed << std::setprecision(1) << res.seconds << "s)\n"
        << std::defaultfloat << std::flush;
    if (!res.passed) ++failures;
    if (results) results->push_back(res);
  }
  return failures;
}

} // namespace xct
