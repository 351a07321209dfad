#pragma once

// Approximate model counting by layering random XOR constraints over the
// input formula and majority-voting the satisfiability of each layer depth.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "xct/cnf.hpp"
#include "xct/hash.hpp"
#include "xct/rng.hpp"
#include "xct/solver.hpp"

namespace xct {

enum class CountMode { bernoulli, fixed_k, hybrid };

const char* mode_name(CountMode mode);

struct AcountConfig {
  CountMode mode = CountMode::bernoulli;
  int k = 0;               // 0 = derive from n; row width budget / row size
  double delta = 0.25;     // hybrid switchover exponent
  int reps_multiplier = 1; // scales trials and threshold together
  int workers = 1;         // parallel trial execution; never changes results
  uint64_t seed = 1;
};

// widest Bernoulli budget that keeps the derived row bias at or below 1/2,
// capped at the analysis's preferred width when n is large enough for it
int default_k(int n);

// row inclusion bias (k+1)/(2n)
double bernoulli_p(int n, int k);

// the locality constant: unique root of k+1 = kappa*log2(512*kappa)*4*log2(16n)
double derive_kappa(int n, int k);

// trials per depth and the vote threshold, both scaled by reps_multiplier
int trials_per_level(int n, int reps_multiplier);
int unsat_threshold(int n, int reps_multiplier);

// throws ConfigError; fills in cfg.k when 0 (returns the effective config)
AcountConfig validate_config(int n, AcountConfig cfg);

struct LevelTally {
  int sat = 0;
  int unsat = 0;
  int redraws = 0; // oversized rows re-drawn at this depth

  bool operator==(const LevelTally&) const = default;
};

struct CountEstimate {
  uint64_t estimate = 0;
  int stopped_at_l = 0;   // depth that tripped the vote; 0 = none did
  bool unsat_precheck = false;
  std::vector<LevelTally> trials_log; // entry i = depth i+1
  bool aborted = false;
  std::string abort_reason;
  bool exact_path = false;     // hybrid solved below the cap, result exact
  bool capped_at_lmax = false; // hybrid ran out of depths still at the cap
  uint64_t oracle_queries = 0;
  double wall_ms = 0.0;
  double kappa = std::nan(""); // locality constant; NaN in fixed-k mode
  // true when k+1 >= 4 log2(16n) and k+1 <= n, the window the accuracy
  // analysis assumes; small n cannot reach it (first true point is n = 40)
  bool in_analysis_regime = false;
  // config echo for replay
  CountMode mode = CountMode::bernoulli;
  int k = 0;
  double p = 0.0;
  double delta = 0.0;
  int reps_multiplier = 1;
  uint64_t seed = 0;
};

// canonical serialization; timing fields are the only nondeterministic part
std::string to_json_string(const CountEstimate& est, bool include_timing = true);

// Bernoulli-row counter: for depth l = 1..n+1 run the trial vote; at the
// first depth where UNSAT strictly wins, report 2^{l-1}. A row wider than
// cfg.k is re-drawn up to 3 times, then the run aborts. An unsatisfiable
// input is caught by one up-front oracle call and reported as 0.
CountEstimate acount(const Cnf& f, const AcountConfig& cfg,
                     const OracleFactory& oracle);
CountEstimate acount(const Cnf& f, const AcountConfig& cfg, SatOracle& oracle);

// same vote with exactly-k-variable rows and no width policy
CountEstimate acount_constant(const Cnf& f, const AcountConfig& cfg,
                              const OracleFactory& oracle);
CountEstimate acount_constant(const Cnf& f, const AcountConfig& cfg,
                              SatOracle& oracle);

// count exactly up to cap = floor(2^{delta*n}); above it, add rows one at a
// time and return (exact count of the constrained formula) * 2^l at the
// first depth that falls below the cap
CountEstimate hybrid_count(const Cnf& f, const AcountConfig& cfg,
                           const OracleFactory& oracle);
CountEstimate hybrid_count(const Cnf& f, const AcountConfig& cfg,
                           SatOracle& oracle);

struct RepeatedResult {
  std::vector<uint64_t> estimates; // per run, in run order
  uint64_t median = 0;             // lower median
  double fraction_within = 0.0;    // runs landing in [interval_lo, interval_hi]
  std::vector<std::pair<uint64_t, int>> histogram; // estimate -> run count
  int aborted_runs = 0;
};

// independent runs re-seeded from cfg.seed; mode selects the algorithm
RepeatedResult run_repeated(const Cnf& f, const AcountConfig& cfg,
                            const OracleFactory& oracle, int repeats,
                            double interval_lo, double interval_hi);

} // namespace xct
