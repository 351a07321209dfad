#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "xct/cnf.hpp"

using namespace xct;

TEST_CASE("literal encoding") {
  CHECK(Literal::make(3, true).code() == 3);
  CHECK(Literal::make(3, false).code() == -3);
  CHECK(Literal(-7).var() == 7);
  CHECK_FALSE(Literal(-7).positive());
  CHECK(Literal(7).positive());
  CHECK_THROWS_AS(Literal(0), std::invalid_argument);
}

TEST_CASE("clause normalization") {
  Clause dup({Literal(1), Literal(1), Literal(-2)});
  CHECK(dup.lits().size() == 2);
  CHECK_FALSE(dup.tautological());

  Clause taut({Literal(1), Literal(-1), Literal(3)});
  CHECK(taut.tautological());
  CHECK(taut.lits().empty());

  Clause empty(std::vector<Literal>{});
  CHECK(empty.empty());
  CHECK_FALSE(empty.tautological());
}

TEST_CASE("cnf add rules") {
  Cnf f(3);
  f.add(Clause({Literal(1), Literal(-3)}));
  f.add(Clause({Literal(2), Literal(-2)})); // tautology: silently dropped
  CHECK(f.clause_count() == 1);
  f.add(Clause(std::vector<Literal>{})); // falsum clause is kept
  CHECK(f.clause_count() == 2);
  CHECK_THROWS_AS(f.add(Clause({Literal(4)})), std::invalid_argument);
  CHECK_THROWS_AS(Cnf(-1), std::invalid_argument);
}

// expected text is the canonical emitted form, frozen
TEST_CASE("emit format") {
  Cnf f(4);
  f.add_lits({1, -2});
  f.add_lits({4});
  CHECK(emit_dimacs(f) == "p cnf 4 2\n1 -2 0\n4 0\n");

  Cnf empty(2);
  CHECK(emit_dimacs(empty) == "p cnf 2 0\n");
}

TEST_CASE("parse a valid file with comments and multiline clauses") {
  std::string text =
      "c a comment line\n"
      "p cnf 3 2\n"
      "1 -2 0\n"
      "c mid comment\n"
      "3\n"
      "-1 0\n";
  std::vector<std::string> warnings;
  Cnf f = parse_dimacs(text, &warnings);
  CHECK(f.var_count() == 3);
  CHECK(f.clause_count() == 2);
  CHECK(warnings.empty());
  CHECK(f.clauses()[1].lits().size() == 2); // "3 -1 0" spans two lines
  CHECK(emit_dimacs(f) == "p cnf 3 2\n1 -2 0\n3 -1 0\n");
}

TEST_CASE("parse error cases") {
  CHECK_THROWS_AS(parse_dimacs(std::string("")), ParseError);
  CHECK_THROWS_AS(parse_dimacs(std::string("p dnf 2 1\n1 0\n")), ParseError);
  CHECK_THROWS_AS(parse_dimacs(std::string("p cnf 2 1\n3 0\n")), ParseError);
  CHECK_THROWS_AS(parse_dimacs(std::string("p cnf 2 1\n1 2\n")), ParseError);
  CHECK_THROWS_AS(parse_dimacs(std::string("p cnf 2 1\n1 x 0\n")), ParseError);
  CHECK_THROWS_AS(parse_dimacs(std::string("p cnf -2 1\n")), ParseError);

  // clause-count mismatch is only a warning
  std::vector<std::string> warnings;
  Cnf f = parse_dimacs(std::string("p cnf 2 5\n1 0\n"), &warnings);
  CHECK(f.clause_count() == 1);
  REQUIRE(warnings.size() == 1);
}

TEST_CASE("parse-emit round trip") {
  std::string text = "p cnf 5 3\n1 -2 3 0\n-4 5 0\n2 0\n";
  Cnf f = parse_dimacs(text);
  CHECK(emit_dimacs(f) == text);
  CHECK(parse_dimacs(emit_dimacs(f)) == f);
}

TEST_CASE("conjoin") {
  Cnf f(3);
  f.add_lits({1, 2});
  Cnf g(3);
  g.add_lits({-3});
  Cnf both = conjoin(f, g);
  CHECK(both.clause_count() == 2);
  CHECK(both.var_count() == 3);
  CHECK_THROWS_AS(conjoin(f, Cnf(4)), std::invalid_argument);
}

TEST_CASE("satisfies") {
  Cnf f(3);
  f.add_lits({1, -2});
  f.add_lits({3});
  CHECK(satisfies(f, {true, true, true}));
  CHECK(satisfies(f, {false, false, true}));
  CHECK_FALSE(satisfies(f, {false, true, true}));
  CHECK_FALSE(satisfies(f, {true, true, false}));
  CHECK_THROWS_AS(satisfies(f, {true, true}), std::invalid_argument);

  Cnf falsum(2);
  falsum.add(Clause(std::vector<Literal>{}));
  CHECK_FALSE(satisfies(falsum, {true, true}));
}
