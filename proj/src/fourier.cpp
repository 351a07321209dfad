#include "xct/fourier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace xct {

namespace {

void require_dim(int n) {
  if (n < 0 || n > kMaxFourierDim)
    throw std::invalid_argument("cube dimension must lie in [0, 20], got " +
                                std::to_string(n));
}

long double table_sum(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return s;
}

inline int parity(uint32_t x) { return std::popcount(x) & 1; }

} // namespace

//=================================================================
// types

HypercubeDistribution::HypercubeDistribution(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  require_dim(n);
  if (values_.size() != (size_t{1} << n_))
    throw std::invalid_argument("table size must be 2^n");
  for (double v : values_)
    if (!(v >= 0.0))
      throw std::invalid_argument("distribution values must be nonnegative");
  long double s = table_sum(values_);
  if (std::fabs(static_cast<double>(s - 1.0L)) > 1e-12)
    throw std::invalid_argument("distribution values must sum to 1");
}

HypercubeDistribution HypercubeDistribution::uniform(int n) {
  require_dim(n);
  size_t size = size_t{1} << n;
  return HypercubeDistribution(n, std::vector<double>(size, std::ldexp(1.0, -n)));
}

HypercubeDistribution HypercubeDistribution::point_mass(int n, uint32_t x) {
  require_dim(n);
  std::vector<double> v(size_t{1} << n, 0.0);
  if (x >= v.size()) throw std::invalid_argument("point outside the cube");
  v[x] = 1.0;
  return HypercubeDistribution(n, std::move(v));
}

HypercubeDistribution
HypercubeDistribution::flat(int n, const std::vector<uint32_t>& support) {
  require_dim(n);
  if (support.empty()) throw std::invalid_argument("empty support");
  std::vector<double> v(size_t{1} << n, 0.0);
  double w = 1.0 / static_cast<double>(support.size());
  for (uint32_t x : support) {
    if (x >= v.size()) throw std::invalid_argument("support point outside the cube");
    if (v[x] != 0.0) throw std::invalid_argument("duplicate support point");
    v[x] = w;
  }
  return HypercubeDistribution(n, std::move(v));
}

std::vector<uint32_t> HypercubeDistribution::support() const {
  std::vector<uint32_t> s;
  for (uint32_t x = 0; x < values_.size(); ++x)
    if (values_[x] > 0.0) s.push_back(x);
  return s;
}

int HypercubeDistribution::support_size() const {
  int c = 0;
  for (double v : values_) c += v > 0.0;
  return c;
}

SignedFunction::SignedFunction(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  require_dim(n);
  if (values_.size() != (size_t{1} << n_))
    throw std::invalid_argument("table size must be 2^n");
  for (double v : values_)
    if (v != -1.0 && v != 0.0 && v != 1.0)
      throw std::invalid_argument("signed function values must be -1, 0, or 1");
}

int SignedFunction::support_size() const {
  int c = 0;
  for (double v : values_) c += v != 0.0;
  return c;
}

//=================================================================
// transform

void walsh_transform(std::vector<double>& v) {
  size_t size = v.size();
  if (size == 0 || (size & (size - 1)) != 0)
    throw std::invalid_argument("table size must be a power of two");
  for (size_t h = 1; h < size; h <<= 1) {
    for (size_t i = 0; i < size; i += h << 1) {
      for (size_t j = i; j < i + h; ++j) {
        double a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

std::vector<double> spectrum(std::vector<double> v) {
  walsh_transform(v);
  double scale = 1.0 / static_cast<double>(v.size());
  for (double& x : v) x *= scale;
  return v;
}

double fourier_coefficient(const std::vector<double>& values, uint32_t S) {
  long double acc = 0.0L;
  for (uint32_t x = 0; x < values.size(); ++x)
    acc += parity(x & S) ? -values[x] : values[x];
  return static_cast<double>(acc / static_cast<long double>(values.size()));
}

double fourier_coefficient(const HypercubeDistribution& f, uint32_t S) {
  return fourier_coefficient(f.values(), S);
}

double fourier_coefficient(const SignedFunction& f, uint32_t S) {
  return fourier_coefficient(f.values(), S);
}

double normalized_coefficient(const HypercubeDistribution& f, uint32_t S) {
  long double even = 0.0L;
  const std::vector<double>& v = f.values();
  for (uint32_t x = 0; x < v.size(); ++x)
    if (!parity(x & S)) even += v[x];
  return static_cast<double>(even - 0.5L);
}

//=================================================================
// entropy structure

EntropyProfile entropy_profile(const HypercubeDistribution& f) {
  const std::vector<double>& v = f.values();
  double max = 0.0;
  int support = 0;
  for (double x : v) {
    if (x > 0.0) {
      ++support;
      if (x > max) max = x;
    }
  }
  if (max <= 0.0) throw std::invalid_argument("all-zero table");
  EntropyProfile prof;
  prof.min_entropy = -std::log2(max);
  prof.relative = f.n() > 0 ? prof.min_entropy / f.n() : 0.0;
  prof.support_size = support;
  prof.is_flat = true;
  for (double x : v)
    if (x > 0.0 && std::fabs(x - max) > 1e-9 * max) { prof.is_flat = false; break; }
  return prof;
}

std::vector<std::pair<double, HypercubeDistribution>>
flat_decompose(const HypercubeDistribution& f, int t) {
  int n = f.n();
  if (t < 0 || t > n) throw std::invalid_argument("t out of range");
  size_t piece = size_t{1} << t;
  double ceiling = std::ldexp(1.0, -t);
  std::vector<double> g = f.values();
  for (double v : g)
    if (v > ceiling * (1.0 + 1e-12) + 1e-15)
      throw std::invalid_argument("min-entropy below t");

  std::vector<std::pair<double, HypercubeDistribution>> parts;
  std::vector<uint32_t> order(g.size());
  double w = 1.0;
  // each pass subtracts the largest multiple of uniform(top 2^t points) that
  // keeps every value at or below (remaining mass) * 2^-t; the residual at
  // support 2^t is then exactly flat
  size_t guard = 8 * g.size() + 64;
  for (size_t pass = 0; pass < guard; ++pass) {
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return g[a] > g[b]; });
    size_t support = 0;
    for (double v : g) support += v > 0.0;
    if (support <= piece || w <= 1e-13) {
      if (w > 1e-13) {
        std::vector<uint32_t> top(order.begin(), order.begin() + piece);
        parts.emplace_back(w, HypercubeDistribution::flat(n, top));
      }
      return parts;
    }
    uint32_t arg_min = order[piece - 1];
    double in_min = g[arg_min];
    double out_max = g[order[piece]];
    double take_all = static_cast<double>(piece) * in_min;
    double keep_ceiling = w - static_cast<double>(piece) * out_max;
    double lambda = std::min(take_all, keep_ceiling);
    if (lambda <= 0.0) lambda = take_all; // float tie; residual check absorbs it
    std::vector<uint32_t> top(order.begin(), order.begin() + piece);
    parts.emplace_back(lambda, HypercubeDistribution::flat(n, top));
    double step = lambda / static_cast<double>(piece);
    for (uint32_t x : top) g[x] = std::max(g[x] - step, 0.0);
    if (lambda == take_all) g[arg_min] = 0.0;
    w -= lambda;
  }
  throw std::logic_error("flat decomposition failed to terminate");
}

//=================================================================
// coefficient expectations and their ceilings

namespace {

CoeffExpectation monte_carlo_abs_coeff(
    const HypercubeDistribution& f, int trials, const Rng* rng,
    const std::function<uint32_t(Rng&)>& draw_mask) {
  if (trials <= 0 || rng == nullptr)
    throw std::invalid_argument(
        "dimension above the exact-mode cap: pass trials and an rng");
  std::vector<std::pair<uint32_t, double>> supp;
  const std::vector<double>& v = f.values();
  for (uint32_t x = 0; x < v.size(); ++x)
    if (v[x] > 0.0) supp.emplace_back(x, v[x]);
  long double sum = 0.0L, sum_sq = 0.0L;
  for (int tr = 0; tr < trials; ++tr) {
    Rng stream = rng->split(0xC0EF, static_cast<uint64_t>(tr));
    uint32_t mask = draw_mask(stream);
    long double even = 0.0L;
    for (const auto& [x, weight] : supp)
      if (!parity(x & mask)) even += weight;
    double val = std::fabs(static_cast<double>(even - 0.5L));
    sum += val;
    sum_sq += static_cast<long double>(val) * val;
  }
  CoeffExpectation out;
  out.exact = false;
  out.value = static_cast<double>(sum / trials);
  long double var = sum_sq / trials - (sum / trials) * (sum / trials);
  if (var < 0.0L) var = 0.0L;
  out.std_error = std::sqrt(static_cast<double>(var) / trials);
  return out;
}

// |normalized coefficient| table = |W[S]| / 2 with W the raw transform
std::vector<double> abs_coeff_table(const HypercubeDistribution& f) {
  std::vector<double> w = f.values();
  walsh_transform(w);
  for (double& x : w) x = std::fabs(x) * 0.5;
  return w;
}

} // namespace

CoeffExpectation expected_abs_coeff_mu_p(const HypercubeDistribution& f,
                                         double p, int trials, const Rng* rng) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must be in (0,1)");
  int n = f.n();
  if (n > 14)
    return monte_carlo_abs_coeff(f, trials, rng, [n, p](Rng& r) {
      uint32_t mask = 0;
      for (int i = 0; i < n; ++i)
        if (r.next_bool(p)) mask |= uint32_t{1} << i;
      return mask;
    });
  std::vector<double> coeff = abs_coeff_table(f);
  std::vector<double> weight(n + 1);
  for (int j = 0; j <= n; ++j)
    weight[j] = std::pow(p, j) * std::pow(1.0 - p, n - j);
  long double acc = 0.0L;
  for (uint32_t S = 0; S < coeff.size(); ++S)
    acc += weight[std::popcount(S)] * coeff[S];
  return {static_cast<double>(acc), 0.0, true};
}

CoeffExpectation expected_abs_coeff_fixed_k(const HypercubeDistribution& f,
                                            int k, int trials, const Rng* rng) {
  int n = f.n();
  if (k < 0 || k > n) throw std::invalid_argument("k out of range");
  if (n > 14)
    return monte_carlo_abs_coeff(f, trials, rng, [n, k](Rng& r) {
      XorConstraint row = sample_fixed_k_row(n, k, r);
      uint32_t mask = 0;
      for (int v : row.support) mask |= uint32_t{1} << (v - 1);
      return mask;
    });
  std::vector<double> coeff = abs_coeff_table(f);
  long double acc = 0.0L;
  uint64_t count = 0;
  for (uint32_t S = 0; S < coeff.size(); ++S) {
    if (std::popcount(S) != k) continue;
    acc += coeff[S];
    ++count;
  }
  return {static_cast<double>(acc / count), 0.0, true};
}

double mu_p_abs_coeff_bound(int n, double p, double t_rel) {
  if (t_rel <= 0.0) return 0.5;
  double denom = std::log2(512.0 / t_rel);
  return 0.5 * std::exp2(-(p * n * t_rel) / (2.0 * denom));
}

double fixed_k_abs_coeff_bound(int n, int k, double t, double zeta) {
  double poly = std::pow(static_cast<double>(n), -(1.0 - zeta) * k / 2.0);
  double expo = std::exp2((n - t) * k * std::pow(static_cast<double>(n), -zeta));
  return 0.5 * poly * expo;
}

//=================================================================
// the norm-ratio constant

namespace {

// |(a,b)|_q for a,b >= 0 and large q without overflow/underflow
double qnorm2(double a, double b, double q) {
  double hi = std::max(a, b), lo = std::min(a, b);
  if (hi <= 0.0) return 0.0;
  double r = lo / hi;
  return hi * std::exp(std::log1p(std::pow(r, q)) / q);
}

} // namespace

double A_of(double alpha, double p) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must be in (0,1]");
  if (!(p > 0.0 && p <= 0.5))
    throw std::invalid_argument("p must be in (0,1/2]");
  double q_num = 1.0 / (alpha * p);
  double q_den = 1.0 / (1.0 - alpha * p);
  auto ratio = [&](double x) {
    double num = qnorm2(1.0 - 2.0 * p * x, 1.0 - 2.0 * p * (1.0 - x), q_num);
    double den = qnorm2(x, 1.0 - x, q_den);
    return num / den;
  };
  // the ratio is symmetric around x = 1/2, so [0, 1/2] suffices
  constexpr int kGrid = 10000;
  double best = 0.0;
  int best_i = 0;
  for (int i = 0; i <= kGrid; ++i) {
    double x = 0.5 * i / kGrid;
    double r = ratio(x);
    if (r > best) { best = r; best_i = i; }
  }
  double lo = 0.5 * std::max(best_i - 1, 0) / kGrid;
  double hi = 0.5 * std::min(best_i + 1, kGrid) / kGrid;
  while (hi - lo > 1e-12) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (ratio(m1) < ratio(m2)) lo = m1; else hi = m2;
  }
  return std::max(best, ratio(0.5 * (lo + hi)));
}

double a_closed_form_cap(double alpha, double p) {
  return std::pow(1.0 + std::exp2(8.0 - 1.0 / alpha), alpha * p);
}

double a_tilde(double alpha, double p, double a_value) {
  return std::max(a_value, (1.0 - p) * std::pow(4.0, alpha * p));
}

//=================================================================
// inequality checkers

BoundCheck check_contractive(const SignedFunction& f, const SignedFunction& g,
                             double p, double alpha, double precomputed_a) {
  if (f.n() != g.n())
    throw std::invalid_argument("functions live on different cubes");
  int n = f.n();
  if (n > 12) throw std::invalid_argument("exact enumeration capped at n = 12");
  std::vector<double> fhat = spectrum(f.values());
  std::vector<double> ghat = spectrum(g.values());
  std::vector<double> weight(n + 1);
  for (int j = 0; j <= n; ++j)
    weight[j] = std::pow(p, j) * std::pow(1.0 - p, n - j);
  long double acc = 0.0L;
  for (uint32_t S = 0; S < fhat.size(); ++S)
    acc += weight[std::popcount(S)] *
           static_cast<long double>(fhat[S]) * ghat[S];
  double a_val = precomputed_a > 0.0 ? precomputed_a : A_of(alpha, p);
  double at = a_tilde(alpha, p, a_val);
  double supports = static_cast<double>(f.support_size()) * g.support_size();
  BoundCheck out;
  out.lhs = static_cast<double>(acc);
  out.rhs = std::exp2(-2.0 * n) * std::pow(at, n) *
            std::pow(supports, 1.0 - alpha * p);
  out.margin = out.rhs - out.lhs;
  out.holds = out.lhs <= out.rhs + 1e-9 * std::fabs(out.rhs);
  return out;
}

BoundCheck check_kkl_bound(const SignedFunction& f, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("delta must be in [0,1]");
  int n = f.n();
  if (n > 12) throw std::invalid_argument("exact enumeration capped at n = 12");
  std::vector<double> fhat = spectrum(f.values());
  long double acc = 0.0L;
  for (uint32_t S = 0; S < fhat.size(); ++S)
    acc += std::pow(delta, std::popcount(S)) *
           static_cast<long double>(fhat[S]) * fhat[S];
  double pr_nonzero =
      static_cast<double>(f.support_size()) / static_cast<double>(fhat.size());
  BoundCheck out;
  out.lhs = static_cast<double>(acc);
  out.rhs = std::pow(pr_nonzero, 2.0 / (1.0 + delta));
  out.margin = out.rhs - out.lhs;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9) + 1e-18;
  return out;
}

ChainReport check_conditioning_chain(const HypercubeDistribution& f,
                                     const HashFunction& h,
                                     const std::vector<uint8_t>& y, double eta) {
  if (h.n != f.n()) throw std::invalid_argument("hash dimension mismatch");
  if (f.n() > 16) throw std::invalid_argument("chain checker capped at n = 16");
  if (y.size() != h.rows.size())
    throw std::invalid_argument("target length must equal the row count");
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("eta must be in (0,1)");
  int m = static_cast<int>(h.rows.size());
  std::vector<uint32_t> masks(m);
  for (int j = 0; j < m; ++j) {
    uint32_t mask = 0;
    for (int v : h.rows[j].support) mask |= uint32_t{1} << (v - 1);
    masks[j] = mask;
  }
  // q[j] = Pr(first j rows all hit their targets), exact sum over the table
  std::vector<long double> q(m + 1, 0.0L);
  q[0] = 1.0L;
  const std::vector<double>& v = f.values();
  for (uint32_t x = 0; x < v.size(); ++x) {
    if (v[x] == 0.0) continue;
    for (int j = 0; j < m; ++j) {
      if (parity(x & masks[j]) != (y[j] ? 1 : 0)) break;
      q[j + 1] += v[x];
    }
  }
  ChainReport rep;
  rep.prefix.resize(m);
  rep.conditional.resize(m);
  for (int j = 0; j < m; ++j) rep.prefix[j] = static_cast<double>(q[j + 1]);
  for (int i = 1; i <= m; ++i) {
    if (q[i - 1] <= 0.0L) {
      rep.condition_holds = false;
      rep.first_violation = i;
      break;
    }
    double p_i = static_cast<double>(q[i] / q[i - 1]);
    rep.conditional[i - 1] = p_i;
    if (std::fabs(p_i - 0.5) > eta / 2.0 + 1e-12) {
      rep.condition_holds = false;
      rep.first_violation = i;
      break;
    }
  }
  if (!rep.condition_holds) return rep;
  rep.sandwich_holds = true;
  for (int j = 1; j <= m; ++j) {
    double scale = std::exp2(-j);
    double lo = scale * std::pow(1.0 - eta, j);
    double hi = scale * std::pow(1.0 + eta, j);
    double qj = static_cast<double>(q[j]);
    if (qj < lo - 1e-12 || qj > hi + 1e-12) rep.sandwich_holds = false;
  }
  rep.final_gap = std::fabs(static_cast<double>(q[m]) - std::exp2(-m));
  rep.final_gap_bound = std::exp2(-m) * (std::pow(1.0 + eta, m) - 1.0);
  rep.final_gap_holds = rep.final_gap <= rep.final_gap_bound + 1e-12;
  return rep;
}

//=================================================================
// extraction property

double extraction_failure_p(int n, int m, double eps, double p, double t_rel) {
  if (t_rel <= 0.0) return std::numeric_limits<double>::infinity();
  double denom = std::log2(512.0 / t_rel);
  return (m / eps) * std::exp2(-(p * n * t_rel) / (2.0 * denom));
}

double extraction_failure_q(int n, int m, double eps, int k, double zeta,
                            double t0) {
  double poly = std::pow(static_cast<double>(n), -(1.0 - zeta) * k / 2.0);
  double expo = std::exp2((n - t0) * k * std::pow(static_cast<double>(n), -zeta));
  return (m / eps) * poly * expo;
}

namespace {

// exact |{x : rows(x) = y}| / 2^n for rows over the full cube, by rank of
// the linear system; basis rows are keyed by their leading bit
double full_cube_hit_ratio(const std::vector<uint32_t>& rows,
                           const std::vector<uint8_t>& y) {
  uint32_t basis[32] = {0};
  uint8_t rhs[32] = {0};
  int rank = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    uint32_t r = rows[i];
    uint8_t b = y[i];
    while (r != 0) {
      int lead = std::bit_width(r) - 1;
      if (basis[lead] == 0) {
        basis[lead] = r;
        rhs[lead] = b;
        ++rank;
        break;
      }
      r ^= basis[lead];
      b ^= rhs[lead];
    }
    if (r == 0 && b) return 0.0; // reduced to 0 = 1: no solutions
  }
  return std::exp2(-rank);
}

} // namespace

ExtractionResult extraction_estimate(const std::vector<uint32_t>& support,
                                     const ExtractionParams& params,
                                     const Rng& rng) {
  int n = params.n;
  if (n < 1 || n > 24) throw std::invalid_argument("n must lie in [1, 24]");
  if (params.m < 1) throw std::invalid_argument("m must be positive");
  if (params.trials < 1) throw std::invalid_argument("trials must be positive");
  if (!params.full_cube && support.empty())
    throw std::invalid_argument("empty support");
  std::vector<uint8_t> y = params.y;
  if (y.empty()) y.assign(params.m, 0);
  if (static_cast<int>(y.size()) != params.m)
    throw std::invalid_argument("target length must equal m");

  ExtractionResult out;
  double t = params.full_cube
                 ? static_cast<double>(n)
                 : std::log2(static_cast<double>(support.size()));
  out.t0 = t - params.m - 1;
  if (out.t0 <= 0.0) {
    out.note = "entropy slack t - m - 1 is nonpositive";
  } else if (out.t0 + params.m + 1 > n + 1e-9) {
    out.note = "entropy slack exceeds the dimension";
  } else {
    out.failure_term =
        params.family == HashFamily::bernoulli
            ? extraction_failure_p(n, params.m, params.eps, params.p, out.t0 / n)
            : extraction_failure_q(n, params.m, params.eps, params.k,
                                   params.zeta, out.t0);
    if (out.failure_term < 1.0) {
      out.analytic_applicable = true;
      out.analytic_bound = std::pow(1.0 - out.failure_term, params.m);
    } else {
      out.note = "per-row failure term is at least 1";
    }
  }

  double target_ratio = std::exp2(-params.m);
  double tolerance = params.eps * target_ratio;
  int successes = 0;
  std::vector<uint32_t> masks(params.m);
  for (int trial = 0; trial < params.trials; ++trial) {
    Rng stream = rng.split(0xE57, static_cast<uint64_t>(trial));
    for (int j = 0; j < params.m; ++j) {
      XorConstraint row =
          params.family == HashFamily::bernoulli
              ? sample_bernoulli_row(n, params.p, stream)
              : sample_fixed_k_row(n, params.k, stream);
      uint32_t mask = 0;
      for (int v : row.support) mask |= uint32_t{1} << (v - 1);
      masks[j] = mask;
    }
    double ratio;
    if (params.full_cube) {
      ratio = full_cube_hit_ratio(masks, y);
    } else {
      size_t hits = 0;
      for (uint32_t a : support) {
        bool ok = true;
        for (int j = 0; j < params.m; ++j)
          if (parity(a & masks[j]) != (y[j] ? 1 : 0)) { ok = false; break; }
        hits += ok;
      }
      ratio = static_cast<double>(hits) / static_cast<double>(support.size());
    }
    if (std::fabs(ratio - target_ratio) <= tolerance + 1e-15) ++successes;
  }
  out.empirical = static_cast<double>(successes) / params.trials;
  out.std_error =
      std::sqrt(out.empirical * (1.0 - out.empirical) / params.trials);
  return out;
}

} // namespace xct
