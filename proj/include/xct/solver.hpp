#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xct/cnf.hpp"

namespace xct {

enum class SolveStatus { SAT, UNSAT, UNKNOWN };

struct SolveStats {
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  double wall_ms = 0.0;
};

// status SAT implies the witness, when present, satisfies every clause;
// both solvers re-check before returning. UNKNOWN carries a note and only
// arises from resource limits or subprocess trouble, never as a soft UNSAT.
struct SolveResult {
  SolveStatus status = SolveStatus::UNKNOWN;
  std::optional<std::vector<bool>> witness;
  SolveStats stats;
  std::string note;
};

class SatOracle {
public:
  virtual ~SatOracle() = default;
  virtual SolveResult decide(const Cnf& f) = 0;
  virtual bool provides_witness() const = 0;
  virtual std::string name() const = 0;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CountingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DpllLimits {
  uint64_t max_decisions = 0; // 0 = unlimited
};

// Chronological-backtracking DPLL with two watched literals, unit
// propagation, and fixed branching on the lowest-index unassigned variable
// (false first). No heuristics, no learning: runs are reproducible and the
// search order is easy to audit. Always produces a full witness on SAT.
class DpllSolver final : public SatOracle {
public:
  explicit DpllSolver(DpllLimits limits = {}) : limits_(limits) {}
  SolveResult decide(const Cnf& f) override;
  bool provides_witness() const override { return true; }
  std::string name() const override { return "internal-dpll"; }

private:
  DpllLimits limits_;
};

// Shells out once per query: DIMACS goes to a fresh temp file passed as the
// sole argument; exit 10 = SAT, 20 = UNSAT; a model may follow on 'v' lines.
// Anything else (timeout, crash, malformed or failing model) is UNKNOWN with
// a note. Safe to share across threads; every query is self-contained.
class ExternalSolver final : public SatOracle {
public:
  explicit ExternalSolver(std::string executable, double timeout_seconds = 60.0);
  SolveResult decide(const Cnf& f) override;
  bool provides_witness() const override { return true; }
  std::string name() const override { return "external:" + executable_; }

private:
  std::string executable_;
  double timeout_seconds_;
};

using OracleFactory = std::function<std::unique_ptr<SatOracle>()>;

OracleFactory internal_oracle(DpllLimits limits = {});
OracleFactory external_oracle(std::string executable, double timeout_seconds = 60.0);

// Exhaustive enumeration over all 2^n assignments with bitmask clause
// evaluation. Deliberately independent of the DPLL machinery: this is the
// verification oracle the rest of the project is measured against.
uint64_t exact_count(const Cnf& f, int budget_bits = 26);

// min(|sol(f)|, cap) by repeated decide + a blocking clause over all n
// variables per model, so unconstrained variables multiply the count.
// Throws CountingError if the oracle reports UNKNOWN or omits a witness.
uint64_t count_up_to(const Cnf& f, uint64_t cap, SatOracle& oracle,
                     uint64_t* queries = nullptr);

} // namespace xct
