#pragma once

// The acceptance suite: every release-gating check, each runnable at a
// reduced scale for quick smoke runs. The full-scale parameters and
// tolerances are pinned inside the criterion functions.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "xct/cnf.hpp"
#include "xct/hash.hpp"

namespace xct {

struct SelftestOptions {
  double scale = 1.0; // multiplies case counts; 1.0 = the full acceptance run
  bool fast = false;  // run only the quick subset, at a small scale
  uint64_t seed = 0x5e1f7e57;
};

struct CriterionResult {
  int number = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// runs the criteria in order, streaming one "PASS/FAIL <n> <name> <detail>"
// line each to `out`; returns the number of failures
int run_acceptance(const SelftestOptions& opt, std::ostream& out,
                   std::vector<CriterionResult>* results = nullptr);

// the parity-encoding check behind criterion 8, exposed with the encoder as
// a parameter so tests can prove the suite rejects a corrupted encoder
using XorEncoder = Cnf (*)(const XorConstraint&, int);
bool xor_encoding_agrees(XorEncoder encoder, std::string* detail);

} // namespace xct
