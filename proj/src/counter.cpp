#include "xct/counter.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <exception>
#include <map>
#include <thread>

#include "json.hpp"

namespace xct {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

int ceil_log2(int n) { return std::bit_width(static_cast<unsigned>(n) - 1); }

constexpr int kMaxRedraws = 3;

} // namespace

const char* mode_name(CountMode mode) {
  switch (mode) {
    case CountMode::bernoulli: return "bernoulli";
    case CountMode::fixed_k: return "fixed_k";
    case CountMode::hybrid: return "hybrid";
  }
  return "?";
}

int default_k(int n) {
  // smallest k with k+1 >= 4*log2(16n), held below n so the bias stays <= 1/2
  double want = 4.0 * std::log2(16.0 * n);
  int k = static_cast<int>(std::ceil(want - 1e-9)) - 1;
  return std::min(k, n - 1);
}

double bernoulli_p(int n, int k) {
  return (k + 1.0) / (2.0 * n);
}

double derive_kappa(int n, int k) {
  double target = k + 1.0;
  double c = 4.0 * std::log2(16.0 * n);
  auto width = [c](double kap) { return kap * std::log2(512.0 * kap) * c; };
  double lo = 1.0 / 512.0, hi = 1.0;
  while (width(hi) < target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (width(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

int trials_per_level(int n, int reps_multiplier) {
  return 8 * ceil_log2(n) * reps_multiplier;
}

int unsat_threshold(int n, int reps_multiplier) {
  return 4 * ceil_log2(n) * reps_multiplier;
}

AcountConfig validate_config(int n, AcountConfig cfg) {
  if (n < 2) throw ConfigError("counting needs at least 2 variables");
  if (n > 62)
    throw ConfigError("the 64-bit estimate range caps the variable count at 62");
  if (cfg.reps_multiplier < 1) throw ConfigError("reps_multiplier must be positive");
  if (cfg.workers < 1) throw ConfigError("workers must be positive");
  if (cfg.k == 0) cfg.k = cfg.mode == CountMode::fixed_k ? 5 : default_k(n);
  if (cfg.mode == CountMode::fixed_k) {
    if (cfg.k < 5 || cfg.k > n)
      throw ConfigError("fixed row size must lie in [5, n]");
  } else {
    if (cfg.k < 1 || cfg.k > n - 1)
      throw ConfigError("row width budget must lie in [1, n-1] "
                        "so the row bias stays at or below 1/2");
  }
  if (cfg.mode == CountMode::hybrid && !(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw ConfigError("delta must lie in (0,1)");
  return cfg;
}

namespace {

CountEstimate init_record(int n, const AcountConfig& cfg) {
  CountEstimate rec;
  rec.mode = cfg.mode;
  rec.k = cfg.k;
  rec.reps_multiplier = cfg.reps_multiplier;
  rec.seed = cfg.seed;
  rec.delta = cfg.mode == CountMode::hybrid ? cfg.delta : 0.0;
  if (cfg.mode == CountMode::fixed_k) {
    rec.p = 0.0;
  } else {
    rec.p = bernoulli_p(n, cfg.k);
    rec.kappa = derive_kappa(n, cfg.k);
    rec.in_analysis_regime =
        cfg.k + 1.0 >= 4.0 * std::log2(16.0 * n) - 1e-9 && cfg.k + 1 <= n;
  }
  return rec;
}

struct TrialOutcome {
  enum class Kind { sat, unsat, aborted };
  Kind kind = Kind::aborted;
  int redraws = 0;
  uint64_t queries = 0;
  std::string reason;
};

TrialOutcome run_trial(const Cnf& f, int l, const AcountConfig& cfg, double p,
                       bool fixed, const Rng& base, SatOracle& oracle) {
  TrialOutcome out;
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    Rng r = base.split(7, attempt);
    HashFunction h = build_hash(
        f.var_count(), l, fixed ? fixed_k_rows(cfg.k) : bernoulli_rows(p), r);
    if (!fixed && !locality_report(h).within(cfg.k)) {
      if (attempt == kMaxRedraws) {
        out.reason = "a hash row stayed wider than the budget after " +
                     std::to_string(kMaxRedraws) + " redraws";
        return out;
      }
      ++out.redraws;
      continue;
    }
    SolveResult res = oracle.decide(conjoin(f, encode_hash(h)));
    ++out.queries;
    if (res.status == SolveStatus::SAT) {
      out.kind = TrialOutcome::Kind::sat;
    } else if (res.status == SolveStatus::UNSAT) {
      out.kind = TrialOutcome::Kind::unsat;
    } else {
      out.reason = "oracle returned unknown: " + res.note;
    }
    return out;
  }
  return out; // unreachable
}

// trial t at depth l always draws from master.split(l, t), so worker count
// and scheduling cannot change any outcome
std::vector<TrialOutcome> run_trials(const Cnf& f, int l,
                                     const AcountConfig& cfg, double p,
                                     bool fixed, const Rng& master,
                                     const OracleFactory& factory,
                                     SatOracle& seq_oracle, int trials) {
  std::vector<TrialOutcome> outs;
  if (cfg.workers <= 1) {
    outs.reserve(trials);
    for (int t = 0; t < trials; ++t) {
      outs.push_back(run_trial(f, l, cfg, p, fixed,
                               master.split(static_cast<uint64_t>(l),
                                            static_cast<uint64_t>(t)),
                               seq_oracle));
      if (outs.back().kind == TrialOutcome::Kind::aborted) break;
    }
    return outs;
  }
  outs.resize(trials);
  int workers = std::min(cfg.workers, trials);
  int chunk = (trials + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        auto oracle = factory();
        int from = w * chunk, to = std::min(trials, from + chunk);
        for (int t = from; t < to; ++t)
          outs[t] = run_trial(f, l, cfg, p, fixed,
                              master.split(static_cast<uint64_t>(l),
                                           static_cast<uint64_t>(t)),
                              *oracle);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return outs;
}

struct LevelResult {
  LevelTally tally;
  uint64_t queries = 0;
  bool aborted = false;
  std::string reason;
};

// consume outcomes strictly in trial order and stop at the first abort, so
// the record never depends on how many trials a parallel run computed past it
LevelResult fold_level(const std::vector<TrialOutcome>& outs) {
  LevelResult r;
  for (const TrialOutcome& o : outs) {
    r.tally.redraws += o.redraws;
    r.queries += o.queries;
    if (o.kind == TrialOutcome::Kind::sat) {
      ++r.tally.sat;
    } else if (o.kind == TrialOutcome::Kind::unsat) {
      ++r.tally.unsat;
    } else {
      r.aborted = true;
      r.reason = o.reason;
      break;
    }
  }
  return r;
}

CountEstimate run_pure(const Cnf& f, AcountConfig cfg,
                       const OracleFactory& factory, bool fixed) {
  auto t0 = std::chrono::steady_clock::now();
  int n = f.var_count();
  cfg = validate_config(n, cfg);
  CountEstimate rec = init_record(n, cfg);
  double p = fixed ? 0.0 : bernoulli_p(n, cfg.k);
  Rng master(cfg.seed);
  auto oracle = factory();

  SolveResult pre = oracle->decide(f);
  rec.oracle_queries = 1;
  if (pre.status == SolveStatus::UNKNOWN) {
    rec.aborted = true;
    rec.abort_reason = "oracle returned unknown: " + pre.note;
  } else if (pre.status == SolveStatus::UNSAT) {
    rec.unsat_precheck = true;
  } else {
    int trials = trials_per_level(n, cfg.reps_multiplier);
    int threshold = unsat_threshold(n, cfg.reps_multiplier);
    for (int l = 1; l <= n + 1; ++l) {
      LevelResult lr = fold_level(
          run_trials(f, l, cfg, p, fixed, master, factory, *oracle, trials));
      rec.trials_log.push_back(lr.tally);
      rec.oracle_queries += lr.queries;
      if (lr.aborted) {
        rec.aborted = true;
        rec.abort_reason = lr.reason;
        break;
      }
      if (lr.tally.unsat > threshold) {
        rec.stopped_at_l = l;
        rec.estimate = uint64_t{1} << (l - 1);
        break;
      }
    }
  }
  rec.wall_ms = ms_since(t0);
  return rec;
}

} // namespace

CountEstimate acount(const Cnf& f, const AcountConfig& cfg,
                     const OracleFactory& oracle) {
  if (cfg.mode != CountMode::bernoulli)
    throw ConfigError("acount runs in bernoulli mode only");
  return run_pure(f, cfg, oracle, false);
}

CountEstimate acount_constant(const Cnf& f, const AcountConfig& cfg,
                              const OracleFactory& oracle) {
  if (cfg.mode != CountMode::fixed_k)
    throw ConfigError("acount_constant runs in fixed_k mode only");
  return run_pure(f, cfg, oracle, true);
}

CountEstimate hybrid_count(const Cnf& f, const AcountConfig& cfg0,
                           const OracleFactory& factory) {
  if (cfg0.mode != CountMode::hybrid)
    throw ConfigError("hybrid_count runs in hybrid mode only");
  auto t0 = std::chrono::steady_clock::now();
  int n = f.var_count();
  AcountConfig cfg = validate_config(n, cfg0);
  CountEstimate rec = init_record(n, cfg);
  double p = bernoulli_p(n, cfg.k);
  uint64_t cap = static_cast<uint64_t>(std::floor(std::exp2(cfg.delta * n)));
  Rng master(cfg.seed);
  auto oracle = factory();
  try {
    // one extra unit of headroom so a count equal to the cap is recognized
    // as exact rather than sent through the approximate path
    uint64_t probe = count_up_to(f, cap + 1, *oracle, &rec.oracle_queries);
    if (probe <= cap) {
      rec.estimate = probe;
      rec.exact_path = true;
      rec.wall_ms = ms_since(t0);
      return rec;
    }
    int l_max = static_cast<int>(std::ceil((1.0 - cfg.delta) * n));
    Cnf work = f;
    bool widened = false;
    for (int l = 1; l <= l_max && !widened; ++l) {
      LevelTally tally;
      XorConstraint row;
      widened = true;
      for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
        Rng r = master.split(static_cast<uint64_t>(l),
                             static_cast<uint64_t>(attempt));
        row = sample_bernoulli_row(n, p, r);
        if (static_cast<int>(row.support.size()) <= cfg.k) {
          widened = false;
          break;
        }
        ++tally.redraws;
      }
      if (widened) {
        rec.trials_log.push_back(tally);
        rec.aborted = true;
        rec.abort_reason = "a hash row stayed wider than the budget after " +
                           std::to_string(kMaxRedraws) + " redraws";
        break;
      }
      work = conjoin(work, xor_to_cnf(row, n));
      uint64_t count = count_up_to(work, cap, *oracle, &rec.oracle_queries);
      if (count < cap) {
        rec.estimate = count << l;
        rec.stopped_at_l = l;
        rec.trials_log.push_back(tally);
        rec.wall_ms = ms_since(t0);
        return rec;
      }
      rec.trials_log.push_back(tally);
      if (l == l_max) {
        // still at the cap at the deepest level: report the cap scaled up
        rec.estimate = cap << l_max;
        rec.capped_at_lmax = true;
        rec.stopped_at_l = l_max;
      }
    }
  } catch (const CountingError& e) {
    rec.aborted = true;
    rec.abort_reason = e.what();
    rec.estimate = 0;
  }
  rec.wall_ms = ms_since(t0);
  return rec;
}

namespace {

// non-owning factory for the single-oracle overloads; forces workers = 1
// since one shared instance cannot serve concurrent trials
OracleFactory borrow_oracle(SatOracle& oracle) {
  struct Ref final : SatOracle {
    SatOracle* inner;
    explicit Ref(SatOracle* o) : inner(o) {}
    SolveResult decide(const Cnf& f) override { return inner->decide(f); }
    bool provides_witness() const override { return inner->provides_witness(); }
    std::string name() const override { return inner->name(); }
  };
  return [&oracle]() { return std::make_unique<Ref>(&oracle); };
}

} // namespace

CountEstimate acount(const Cnf& f, const AcountConfig& cfg, SatOracle& oracle) {
  AcountConfig seq = cfg;
  seq.workers = 1;
  return acount(f, seq, borrow_oracle(oracle));
}

CountEstimate acount_constant(const Cnf& f, const AcountConfig& cfg,
                              SatOracle& oracle) {
  AcountConfig seq = cfg;
  seq.workers = 1;
  return acount_constant(f, seq, borrow_oracle(oracle));
}

CountEstimate hybrid_count(const Cnf& f, const AcountConfig& cfg,
                           SatOracle& oracle) {
  AcountConfig seq = cfg;
  seq.workers = 1;
  return hybrid_count(f, seq, borrow_oracle(oracle));
}

std::string to_json_string(const CountEstimate& est, bool include_timing) {
  nlohmann::json j;
  j["estimate"] = est.estimate;
  if (est.estimate > 0)
    j["log2_estimate"] = std::log2(static_cast<double>(est.estimate));
  else
    j["log2_estimate"] = nullptr;
  j["stopped_at_l"] = est.stopped_at_l;
  j["unsat_precheck"] = est.unsat_precheck;
  j["aborted"] = est.aborted;
  j["abort_reason"] = est.abort_reason;
  j["exact_path"] = est.exact_path;
  j["capped_at_lmax"] = est.capped_at_lmax;
  j["oracle_queries"] = est.oracle_queries;
  if (std::isnan(est.kappa))
    j["kappa"] = nullptr;
  else
    j["kappa"] = est.kappa;
  j["in_analysis_regime"] = est.in_analysis_regime;
  j["mode"] = mode_name(est.mode);
  j["k"] = est.k;
  j["p"] = est.p;
  j["delta"] = est.delta;
  j["reps_multiplier"] = est.reps_multiplier;
  j["seed"] = est.seed;
  nlohmann::json log = nlohmann::json::array();
  for (const LevelTally& t : est.trials_log)
    log.push_back({t.sat, t.unsat, t.redraws});
  j["trials_log"] = std::move(log);
  if (include_timing) j["wall_ms"] = est.wall_ms;
  return j.dump();
}

RepeatedResult run_repeated(const Cnf& f, const AcountConfig& cfg,
                            const OracleFactory& oracle, int repeats,
                            double interval_lo, double interval_hi) {
  if (repeats < 1) throw ConfigError("repeats must be positive");
  Rng master(cfg.seed);
  RepeatedResult agg;
  std::map<uint64_t, int> histogram;
  int inside = 0;
  for (int r = 0; r < repeats; ++r) {
    AcountConfig run_cfg = cfg;
    run_cfg.seed = master.split(0x5EED, static_cast<uint64_t>(r)).seed();
    CountEstimate est;
    switch (cfg.mode) {
      case CountMode::bernoulli: est = acount(f, run_cfg, oracle); break;
      case CountMode::fixed_k: est = acount_constant(f, run_cfg, oracle); break;
      case CountMode::hybrid: est = hybrid_count(f, run_cfg, oracle); break;
    }
    agg.estimates.push_back(est.estimate);
    ++histogram[est.estimate];
    if (est.aborted) {
      ++agg.aborted_runs;
    } else {
      double v = static_cast<double>(est.estimate);
      if (v >= interval_lo && v <= interval_hi) ++inside;
    }
  }
  std::vector<uint64_t> sorted = agg.estimates;
  std::sort(sorted.begin(), sorted.end());
  agg.median = sorted[(sorted.size() - 1) / 2];
  agg.fraction_within = static_cast<double>(inside) / repeats;
  agg.histogram.assign(histogram.begin(), histogram.end());
  return agg;
}

} // namespace xct
