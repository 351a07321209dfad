#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace xct {

// Signed DIMACS-style literal: +v is the positive occurrence of variable v.
class Literal {
public:
  explicit Literal(int code) : code_(code) {
    if (code == 0) throw std::invalid_argument("literal code must be nonzero");
  }
  static Literal make(int var, bool positive) {
    return Literal(positive ? var : -var);
  }

  int var() const { return code_ < 0 ? -code_ : code_; }
  bool positive() const { return code_ > 0; }
  int code() const { return code_; }
  Literal negated() const { return Literal(-code_); }

  bool operator==(const Literal&) const = default;

private:
  int code_;
};

// Duplicate literals collapse at construction; a clause holding both x and
// ~x is flagged tautological and dropped by Cnf::add. Literal order is
// first occurrence, so emitted text is stable.
class Clause {
public:
  Clause() = default; // the empty (falsum) clause
  explicit Clause(std::vector<Literal> lits);

  bool tautological() const { return tautological_; }
  const std::vector<Literal>& lits() const { return lits_; }
  size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }

  bool operator==(const Clause&) const = default;

private:
  std::vector<Literal> lits_;
  bool tautological_ = false;
};

class Cnf {
public:
  explicit Cnf(int var_count);

  int var_count() const { return n_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  size_t clause_count() const { return clauses_.size(); }
  size_t literal_count() const; // the formula's size: sum of clause lengths

  // drops tautologies; rejects literals with var > var_count
  void add(Clause c);
  void add_lits(std::initializer_list<int> codes);

  bool operator==(const Cnf&) const = default;

private:
  int n_ = 0;
  std::vector<Clause> clauses_;
};

struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line) {}
  int line;
};

Cnf parse_dimacs(std::istream& in, std::vector<std::string>* warnings = nullptr);
Cnf parse_dimacs(const std::string& text, std::vector<std::string>* warnings = nullptr);

void emit_dimacs(const Cnf& f, std::ostream& out);
std::string emit_dimacs(const Cnf& f);

// clause union over an identical variable set; throws std::invalid_argument
// on var-count mismatch
Cnf conjoin(const Cnf& f, const Cnf& g);

// assignment[v-1] is the value of variable v
bool satisfies(const Cnf& f, const std::vector<bool>& assignment);

} // namespace xct
