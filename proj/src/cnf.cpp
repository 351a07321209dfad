#include "xct/cnf.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace xct {

Clause::Clause(std::vector<Literal> lits) {
  lits_.reserve(lits.size());
  for (const Literal& l : lits) {
    bool dup = false;
    for (const Literal& seen : lits_) {
      if (seen == l) { dup = true; break; }
      if (seen.var() == l.var()) { tautological_ = true; }
    }
    if (!dup) lits_.push_back(l);
  }
  if (tautological_) lits_.clear();
}

Cnf::Cnf(int var_count) : n_(var_count) {
  if (var_count < 0) throw std::invalid_argument("negative variable count");
}

size_t Cnf::literal_count() const {
  size_t total = 0;
  for (const Clause& c : clauses_) total += c.size();
  return total;
}

void Cnf::add(Clause c) {
  if (c.tautological()) return;
  for (const Literal& l : c.lits()) {
    if (l.var() > n_)
      throw std::invalid_argument("literal " + std::to_string(l.code()) +
                                  " outside declared variable range 1.." +
                                  std::to_string(n_));
  }
  clauses_.push_back(std::move(c));
}

void Cnf::add_lits(std::initializer_list<int> codes) {
  std::vector<Literal> ls;
  ls.reserve(codes.size());
  for (int c : codes) ls.push_back(Literal(c));
  add(Clause(std::move(ls)));
}

namespace {

// whitespace-split tokens with the line each one started on
struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == 'c') continue;
    std::istringstream ls(line);
    std::string word;
    while (ls >> word) out.push_back({word, lineno});
  }
  return out;
}

int parse_int(const Token& t) {
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
  if (ec != std::errc() || ptr != t.text.data() + t.text.size())
    throw ParseError(t.line, "expected integer, got '" + t.text + "'");
  return value;
}

} // namespace

Cnf parse_dimacs(std::istream& in, std::vector<std::string>* warnings) {
  std::vector<Token> toks = tokenize(in);
  size_t i = 0;
  if (toks.size() < 4 || toks[0].text != "p" || toks[1].text != "cnf")
    throw ParseError(toks.empty() ? 1 : toks[0].line,
                     "missing 'p cnf <vars> <clauses>' header");
  int n = parse_int(toks[2]);
  int declared_clauses = parse_int(toks[3]);
  if (n < 0 || declared_clauses < 0)
    throw ParseError(toks[2].line, "negative value in header");
  i = 4;

  Cnf f(n);
  size_t seen = 0;
  std::vector<Literal> current;
  int clause_start_line = toks.size() > 4 ? toks[4].line : toks[3].line;
  while (i < toks.size()) {
    const Token& t = toks[i];
    if (current.empty()) clause_start_line = t.line;
    int code = parse_int(t);
    ++i;
    if (code == 0) {
      f.add(Clause(current)); // may drop a tautology; header count is advisory
      ++seen;
      current.clear();
      continue;
    }
    int var = code < 0 ? -code : code;
    if (var > n)
      throw ParseError(t.line, "literal " + t.text + " exceeds declared " +
                                   std::to_string(n) + " variables");
    current.push_back(Literal(code));
  }
  if (!current.empty())
    throw ParseError(clause_start_line, "clause not terminated by 0");
  if (warnings && seen != static_cast<size_t>(declared_clauses))
    warnings->push_back("header declares " + std::to_string(declared_clauses) +
                        " clauses, found " + std::to_string(seen));
  return f;
}

Cnf parse_dimacs(const std::string& text, std::vector<std::string>* warnings) {
  std::istringstream in(text);
  return parse_dimacs(in, warnings);
}

void emit_dimacs(const Cnf& f, std::ostream& out) {
  out << "p cnf " << f.var_count() << ' ' << f.clause_count() << '\n';
  for (const Clause& c : f.clauses()) {
    for (const Literal& l : c.lits()) out << l.code() << ' ';
    out << "0\n";
  }
}

std::string emit_dimacs(const Cnf& f) {
  std::ostringstream out;
  emit_dimacs(f, out);
  return out.str();
}

Cnf conjoin(const Cnf& f, const Cnf& g) {
  if (f.var_count() != g.var_count())
    throw std::invalid_argument(
        "conjoin: variable counts differ (" + std::to_string(f.var_count()) +
        " vs " + std::to_string(g.var_count()) + ")");
  Cnf out = f;
  for (const Clause& c : g.clauses()) out.add(c);
  return out;
}

bool satisfies(const Cnf& f, const std::vector<bool>& assignment) {
  if (assignment.size() < static_cast<size_t>(f.var_count()))
    throw std::invalid_argument("assignment shorter than variable count");
  for (const Clause& c : f.clauses()) {
    bool sat = false;
    for (const Literal& l : c.lits()) {
      if (assignment[l.var() - 1] == l.positive()) { sat = true; break; }
    }
    if (!sat) return false;
  }
  return true;
}

} // namespace xct
