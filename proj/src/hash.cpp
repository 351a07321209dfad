#include "xct/hash.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace xct {

XorConstraint sample_bernoulli_row(int n, double p, Rng& rng) {
  if (!(p > 0.0) || p > 0.5)
    throw std::invalid_argument("row bias must lie in (0, 1/2]");
  if (n < 0) throw std::invalid_argument("negative dimension");
  XorConstraint row;
  for (int v = 1; v <= n; ++v)
    if (rng.next_bool(p)) row.support.push_back(v);
  row.target = (rng.next() & 1u) != 0;
  return row;
}

XorConstraint sample_fixed_k_row(int n, int k, Rng& rng) {
  if (k < 0 || k > n)
    throw std::invalid_argument("support size must lie in [0, n]");
  // Floyd's subset sampling: uniform over k-subsets, k draws total
  XorConstraint row;
  std::vector<char> in(n + 1, 0);
  for (int j = n - k + 1; j <= n; ++j) {
    int t = static_cast<int>(rng.next_below(static_cast<uint64_t>(j))) + 1;
    if (in[t]) t = j;
    in[t] = 1;
    row.support.push_back(t);
  }
  std::sort(row.support.begin(), row.support.end());
  row.target = (rng.next() & 1u) != 0;
  return row;
}

RowSampler bernoulli_rows(double p) {
  return [p](int n, Rng& rng) { return sample_bernoulli_row(n, p, rng); };
}

RowSampler fixed_k_rows(int k) {
  return [k](int n, Rng& rng) { return sample_fixed_k_row(n, k, rng); };
}

HashFunction build_hash(int n, int m, const RowSampler& sampler, const Rng& rng) {
  if (m < 1) throw std::invalid_argument("row count must be at least 1");
  HashFunction h;
  h.n = n;
  h.rows.reserve(m);
  for (int i = 0; i < m; ++i) {
    Rng stream = rng.split(static_cast<uint64_t>(i));
    h.rows.push_back(sampler(n, stream));
  }
  return h;
}

Cnf xor_to_cnf(const XorConstraint& c, int n) {
  const int w = static_cast<int>(c.support.size());
  for (int v : c.support)
    if (v < 1 || v > n) throw std::invalid_argument("support variable out of range");
  Cnf out(n);
  if (w == 0) {
    if (c.target) out.add(Clause{}); // 0 = 1: falsum
    return out;
  }
  if (w > 26) throw std::invalid_argument("support too wide to expand");
  // one clause per support assignment of the wrong parity, each clause
  // falsified exactly by that assignment
  const uint32_t wrong = c.target ? 0u : 1u;
  for (uint32_t a = 0; a < (1u << w); ++a) {
    if ((std::popcount(a) & 1u) != wrong) continue;
    std::vector<Literal> lits;
    lits.reserve(w);
    for (int i = 0; i < w; ++i) {
      bool bit = (a >> i) & 1u;
      lits.push_back(Literal::make(c.support[i], !bit));
    }
    out.add(Clause(std::move(lits)));
  }
  return out;
}

Cnf encode_hash(const HashFunction& h) {
  Cnf out(h.n);
  for (const XorConstraint& row : h.rows) {
    Cnf rowCnf = xor_to_cnf(row, h.n);
    for (const Clause& cl : rowCnf.clauses()) out.add(cl);
  }
  return out;
}

LocalityReport locality_report(const HashFunction& h) {
  LocalityReport rep;
  rep.row_sizes.reserve(h.rows.size());
  for (const XorConstraint& row : h.rows) {
    int w = static_cast<int>(row.support.size());
    rep.row_sizes.push_back(w);
    rep.max_size = std::max(rep.max_size, w);
  }
  return rep;
}

} // namespace xct
