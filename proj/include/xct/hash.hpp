#pragma once

#include <functional>
#include <vector>

#include "xct/cnf.hpp"
#include "xct/rng.hpp"

namespace xct {

// One parity constraint: xor of the support variables must equal target.
// Empty support is legal and means the constant-0 parity, so target=1 is
// unsatisfiable on its own.
struct XorConstraint {
  std::vector<int> support; // sorted, distinct, 1-based
  bool target = false;
};

struct HashFunction {
  int n = 0;
  std::vector<XorConstraint> rows;
  int m() const { return static_cast<int>(rows.size()); }
};

struct LocalityReport {
  std::vector<int> row_sizes;
  int max_size = 0;          // equals k_local_for: the tightest width budget
  bool within(int k) const { return max_size <= k; }
};

// support ~ mu_p: each variable joins independently with probability p;
// target bit uniform. Requires 0 < p <= 1/2.
XorConstraint sample_bernoulli_row(int n, double p, Rng& rng);

// support uniform over the k-subsets of [1..n]; target bit uniform.
// Requires 0 <= k <= n.
XorConstraint sample_fixed_k_row(int n, int k, Rng& rng);

using RowSampler = std::function<XorConstraint(int, Rng&)>;

RowSampler bernoulli_rows(double p);
RowSampler fixed_k_rows(int k);

// m rows on independent child streams: row i draws from rng.split(i), so a
// prefix of rows is unchanged when m grows under the same seed.
HashFunction build_hash(int n, int m, const RowSampler& sampler, const Rng& rng);

// Direct expansion into 2^{|S|-1} clauses of width |S| over the support
// variables themselves; no auxiliary variables, so the variable count of the
// result is exactly n. |S| = 0 gives the empty formula (target 0) or a
// single falsum clause (target 1).
Cnf xor_to_cnf(const XorConstraint& c, int n);

// conjunction of all row encodings over the hash's n variables
Cnf encode_hash(const HashFunction& h);

LocalityReport locality_report(const HashFunction& h);

} // namespace xct
