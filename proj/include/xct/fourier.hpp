#pragma once

// Fourier analysis of functions and distributions on {0,1}^n with dense
// 2^n tables, plus numeric checkers for the inequalities the counter's
// accuracy argument rests on. Index sets S are bitmasks: bit (i-1) <-> x_i.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xct/hash.hpp"
#include "xct/rng.hpp"

namespace xct {

inline constexpr int kMaxFourierDim = 20;

// probability mass function on {0,1}^n; dense, nonnegative, sums to 1
class HypercubeDistribution {
public:
  HypercubeDistribution(int n, std::vector<double> values);

  static HypercubeDistribution uniform(int n);
  static HypercubeDistribution point_mass(int n, uint32_t x);
  static HypercubeDistribution flat(int n, const std::vector<uint32_t>& support);

  int n() const { return n_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](uint32_t x) const { return values_[x]; }
  std::vector<uint32_t> support() const;
  int support_size() const;

private:
  int n_;
  std::vector<double> values_;
};

// cube function with range {-1, 0, +1}
class SignedFunction {
public:
  SignedFunction(int n, std::vector<double> values);

  int n() const { return n_; }
  const std::vector<double>& values() const { return values_; }
  int support_size() const;

private:
  int n_;
  std::vector<double> values_;
};

struct EntropyProfile {
  double min_entropy = 0.0; // -log2 of the largest mass
  double relative = 0.0;    // min_entropy / n
  bool is_flat = false;     // uniform on its support
  int support_size = 0;
};

// in-place unnormalized transform: v[S] <- sum_x v[x] * (-1)^popcount(x & S)
void walsh_transform(std::vector<double>& v);

// full coefficient table, entry S = 2^{-n} * sum_x v[x] * (-1)^popcount(x&S)
std::vector<double> spectrum(std::vector<double> v);

// single coefficient by direct expectation over all 2^n points
double fourier_coefficient(const std::vector<double>& values, uint32_t S);
double fourier_coefficient(const HypercubeDistribution& f, uint32_t S);
double fourier_coefficient(const SignedFunction& f, uint32_t S);

// Pr_{x~f}(parity of x over S is even) - 1/2; independent evaluation route
// from fourier_coefficient, the two agree via the factor 2^{n-1}
double normalized_coefficient(const HypercubeDistribution& f, uint32_t S);

EntropyProfile entropy_profile(const HypercubeDistribution& f);

// greedy convex decomposition into distributions uniform on 2^t points;
// requires min-entropy >= t, reconstructs the input within 1e-10
std::vector<std::pair<double, HypercubeDistribution>>
flat_decompose(const HypercubeDistribution& f, int t);

struct CoeffExpectation {
  double value = 0.0;
  double std_error = 0.0; // 0 in exact mode
  bool exact = true;
};

// E over S with each index included independently w.p. p of
// |normalized_coefficient(f, S)|; exact for n <= 14, Monte Carlo above
// (pass trials > 0 and an rng)
CoeffExpectation expected_abs_coeff_mu_p(const HypercubeDistribution& f,
                                         double p, int trials = 0,
                                         const Rng* rng = nullptr);

// same expectation with S uniform over the k-element subsets
CoeffExpectation expected_abs_coeff_fixed_k(const HypercubeDistribution& f,
                                            int k, int trials = 0,
                                            const Rng* rng = nullptr);

// analytic ceilings the two expectations are tested against; t_rel is the
// relative min-entropy t/n, logs base 2 throughout
double mu_p_abs_coeff_bound(int n, double p, double t_rel);
double fixed_k_abs_coeff_bound(int n, int k, double t, double zeta);

// sup over x in [0,1] of |(1-2px, 1-2p(1-x))|_{1/(alpha p)} /
// |(x, 1-x)|_{1/(1-alpha p)}; symmetric around 1/2, searched on [0, 1/2]
double A_of(double alpha, double p);

// closed-form cap (1 + 2^{8 - 1/alpha})^{alpha p}, valid for alpha <= 1/9
double a_closed_form_cap(double alpha, double p);

// the constant actually used by the pairwise-product bound
double a_tilde(double alpha, double p, double a_value);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0; // rhs - lhs
  bool holds = false;
};

// E_{S~mu_p}(fhat(S) * ghat(S)) <= 4^{-n} * a_tilde^n *
// (|supp f| * |supp g|)^{1 - alpha p}; exact subset enumeration, n <= 12.
// Pass a precomputed A_of value to skip the supremum search.
BoundCheck check_contractive(const SignedFunction& f, const SignedFunction& g,
                             double p, double alpha,
                             double precomputed_a = -1.0);

// sum_S delta^{|S|} fhat(S)^2 <= Pr(f != 0)^{2/(1+delta)}; n <= 12;
// delta = 1 degenerates to Parseval equality
BoundCheck check_kkl_bound(const SignedFunction& f, double delta);

struct ChainReport {
  bool condition_holds = true;
  int first_violation = 0; // 1-based row index, 0 when the condition holds
  std::vector<double> conditional; // p_i = Pr(row i hits | rows < i hit)
  std::vector<double> prefix;      // q_j = Pr(rows 1..j all hit)
  bool sandwich_holds = false;     // (1-eta)^j 2^-j <= q_j <= (1+eta)^j 2^-j
  bool final_gap_holds = false;    // |q_m - 2^-m| <= 2^-m ((1+eta)^m - 1)
  double final_gap = 0.0;
  double final_gap_bound = 0.0;
};

// conditions f row by row on h_i(x) = y_i and checks that near-unbiased
// conditionals (|p_i - 1/2| <= eta/2) force the stated prefix bounds
ChainReport check_conditioning_chain(const HypercubeDistribution& f,
                                     const HashFunction& h,
                                     const std::vector<uint8_t>& y, double eta);

enum class HashFamily { bernoulli, fixed_k };

struct ExtractionParams {
  int n = 0;
  int m = 1;
  HashFamily family = HashFamily::bernoulli;
  double p = 0.5;    // bernoulli row bias
  int k = 0;         // fixed-k row support size
  double zeta = 0.5; // exponent split in the fixed-k failure term
  double eps = 0.5;
  int trials = 1000;
  std::vector<uint8_t> y; // m target bits; empty means all zero
  bool full_cube = false; // support = all of {0,1}^n, counted by rank
};

struct ExtractionResult {
  double empirical = 0.0;
  double std_error = 0.0;
  bool analytic_applicable = false;
  double analytic_bound = 0.0; // (1 - failure_term)^m when applicable
  double failure_term = 0.0;   // P or Q evaluated at the entropy slack t0
  double t0 = 0.0;
  std::string note; // why the analytic bound does not apply
};

// per-row failure terms of the extraction guarantee
double extraction_failure_p(int n, int m, double eps, double p, double t_rel);
double extraction_failure_q(int n, int m, double eps, int k, double zeta,
                            double t0);

// empirical Pr over hash draws that the support splits to within eps of
// 2^{-m} under the m-row hash, plus the analytic floor when its
// hypotheses are met
ExtractionResult extraction_estimate(const std::vector<uint32_t>& support,
                                     const ExtractionParams& params,
                                     const Rng& rng);

} // namespace xct
