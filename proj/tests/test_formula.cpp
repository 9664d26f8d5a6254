// Copyright 2026 the ksat authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "ksat/formula.hpp"
#include "support/brute.hpp"

using namespace ksat;
using testing::assignment_from_mask;
using testing::make_formula;

TEST_CASE("parse a plain two-variable instance") {
  auto res = parse_dimacs("p cnf 2 1\n1 -2 0");
  CHECK(res.formula.num_vars() == 2);
  REQUIRE(res.formula.num_clauses() == 1);
  CHECK(res.formula.width_min() == 2);
  CHECK(res.formula.width_max() == 2);
  CHECK(res.formula.max_degree() == 1);
  CHECK(res.formula.clauses()[0].literals[0] == Literal{0, true});
  CHECK(res.formula.clauses()[0].literals[1] == Literal{1, false});
  CHECK(res.warnings.empty());
}

TEST_CASE("parse an empty clause list") {
  auto res = parse_dimacs("p cnf 3 0");
  CHECK(res.formula.num_vars() == 3);
  CHECK(res.formula.num_clauses() == 0);
  CHECK(res.formula.width_min() == 0);
  CHECK(res.formula.max_degree() == 0);
}

TEST_CASE("parser rejects duplicate variables within a clause") {
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 1 0"), Error);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 -1 0"), Error);
}

TEST_CASE("parser error classes") {
  CHECK_THROWS_AS(parse_dimacs("p dnf 2 1\n1 0"), Error);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n3 0"), Error);
  CHECK_THROWS_AS(parse_dimacs("1 -2 0"), Error);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 -2"), Error);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\nx 0"), Error);
}

TEST_CASE("clause count mismatch is a warning") {
  auto res = parse_dimacs("c comment line\np cnf 2 3\n1 0\n-2 0\n");
  CHECK(res.formula.num_clauses() == 2);
  REQUIRE(res.warnings.size() == 1);
  CHECK(res.warnings[0].find("declares 3") != std::string::npos);
}

TEST_CASE("comments and whitespace are tolerated") {
  auto res = parse_dimacs("c head\nc more\np cnf 4 2\n 1  2 -3 0\nc mid\n4 -1 0\n");
  CHECK(res.formula.num_clauses() == 2);
  CHECK(res.formula.max_degree() == 2);
}

TEST_CASE("emit parses back to an identical formula") {
  RandomSource rng(3, kStreamGenerate);
  CnfFormula f = generate_random(20, 10, 4, 3, rng);
  std::string text = emit_dimacs(f);
  auto round = parse_dimacs(text);
  REQUIRE(round.formula.num_clauses() == f.num_clauses());
  CHECK(round.formula.num_vars() == f.num_vars());
  for (uint32_t c = 0; c < f.num_clauses(); ++c)
    CHECK(round.formula.clauses()[c].literals == f.clauses()[c].literals);
  CHECK(emit_dimacs(round.formula) == text);
}

TEST_CASE("generator honors shape constraints and determinism") {
  RandomSource a(7, kStreamGenerate), b(7, kStreamGenerate);
  CnfFormula fa = generate_random(20, 10, 4, 3, a);
  CnfFormula fb = generate_random(20, 10, 4, 3, b);
  CHECK(emit_dimacs(fa) == emit_dimacs(fb));
  CHECK(fa.num_clauses() == 10);
  CHECK(fa.width_min() == 4);
  CHECK(fa.width_max() == 4);
  CHECK(fa.max_degree() <= 3);

  RandomSource c(7, kStreamGenerate);
  CnfFormula empty = generate_random(10, 0, 3, 2, c);
  CHECK(empty.num_clauses() == 0);

  RandomSource d(7, kStreamGenerate);
  CnfFormula forced = generate_random(4, 1, 4, 1, d);
  REQUIRE(forced.num_clauses() == 1);
  std::set<uint32_t> vars;
  for (const Literal& l : forced.clauses()[0].literals) vars.insert(l.var);
  CHECK(vars == std::set<uint32_t>{0, 1, 2, 3});

  RandomSource e(7, kStreamGenerate);
  CHECK_THROWS_AS(generate_random(4, 3, 4, 2, e), Error);
}

TEST_CASE("simplify drops satisfied clauses and strips assigned literals") {
  CnfFormula f = make_formula(2, {{1, -2}});
  PartialAssignment x(2);

  x.set(0, true);
  CHECK(simplify(f, x).residuals.empty());

  x.set(0, false);
  auto sf = simplify(f, x);
  REQUIRE(sf.residuals.size() == 1);
  CHECK(sf.residuals[0].literals == std::vector<Literal>{Literal{1, false}});

  CnfFormula g = make_formula(2, {{1, 2}});
  PartialAssignment y(2);
  y.set(0, false);
  y.set(1, false);
  auto sg = simplify(g, y);
  REQUIRE(sg.residuals.size() == 1);
  CHECK(sg.residuals[0].literals.empty());
}

TEST_CASE("simplify under a full assignment mirrors satisfaction") {
  RandomSource rng(19, kStreamGenerate);
  CnfFormula f = generate_random(10, 6, 3, 3, rng);
  for (uint64_t mask = 0; mask < (1ULL << 10); ++mask) {
    PartialAssignment x = assignment_from_mask(10, mask);
    bool sat = satisfies(f, x);
    auto sf = simplify(f, x);
    CHECK(sf.residuals.empty() == sat);
  }
}

TEST_CASE("components touching a set") {
  CnfFormula f = make_formula(4, {{1, 2}, {3, 4}});
  PartialAssignment x(4);
  auto sf = simplify(f, x);

  auto r = components_touching(sf, {0}, 100);
  REQUIRE(r.components.size() == 1);
  CHECK(r.components[0].clause_ids == std::vector<uint32_t>{0});
  CHECK(r.components[0].vars == std::vector<uint32_t>{0, 1});

  // an isolated free variable forms its own component
  CnfFormula none = make_formula(3, {});
  PartialAssignment y(3);
  auto sn = simplify(none, y);
  auto rn = components_touching(sn, {1}, 100);
  REQUIRE(rn.components.size() == 1);
  CHECK(rn.components[0].vars == std::vector<uint32_t>{1});
  CHECK(rn.components[0].clause_ids.empty());
}

TEST_CASE("early stop on the clause cap") {
  // chain of 5 pairwise-overlapping clauses
  CnfFormula f = make_formula(
      6, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}});
  PartialAssignment x(6);
  auto sf = simplify(f, x);
  auto r = components_touching(sf, {0}, 3);
  CHECK(r.too_large);
  CHECK(r.components.empty());

  auto ok = components_touching(sf, {0}, 5);
  CHECK_FALSE(ok.too_large);
  REQUIRE(ok.components.size() == 1);
  CHECK(ok.components[0].clause_ids.size() == 5);
}

TEST_CASE("components partition free variables and live residual clauses") {
  RandomSource rng(23, kStreamGenerate);
  CnfFormula f = generate_random(14, 8, 3, 3, rng);
  for (uint64_t trial = 0; trial < 40; ++trial) {
    RandomSource r2(trial, 99);
    PartialAssignment x(14);
    for (uint32_t v = 0; v < 14; ++v)
      if (r2.next_bit()) x.set(v, r2.next_bit());
    auto sf = simplify(f, x);
    std::vector<uint32_t> free_vars;
    for (uint32_t v = 0; v < 14; ++v)
      if (!x.assigned(v)) free_vars.push_back(v);

    auto res = components_touching(sf, free_vars, 10000);
    REQUIRE_FALSE(res.too_large);
    std::set<uint32_t> seen_vars;
    std::set<uint32_t> seen_clauses;
    for (const Component& comp : res.components) {
      for (uint32_t v : comp.vars) CHECK(seen_vars.insert(v).second);
      for (uint32_t c : comp.clause_ids) CHECK(seen_clauses.insert(c).second);
    }
    CHECK(seen_vars == std::set<uint32_t>(free_vars.begin(), free_vars.end()));
    // every residual clause with at least one surviving literal is covered
    for (uint32_t rid = 0; rid < sf.residuals.size(); ++rid)
      if (!sf.residuals[rid].literals.empty())
        CHECK(seen_clauses.count(rid) == 1);
  }
}

TEST_CASE("early stop agrees with the unbounded traversal") {
  RandomSource rng(29, kStreamGenerate);
  CnfFormula f = generate_random(12, 7, 3, 3, rng);
  PartialAssignment x(12);
  x.set(0, true);
  x.set(5, false);
  auto sf = simplify(f, x);
  std::vector<uint32_t> free_vars;
  for (uint32_t v = 0; v < 12; ++v)
    if (!x.assigned(v)) free_vars.push_back(v);

  auto unbounded = components_touching(sf, free_vars, UINT64_MAX);
  size_t max_comp = 0;
  for (const Component& c : unbounded.components)
    max_comp = std::max(max_comp, c.clause_ids.size());
  auto capped = components_touching(sf, free_vars, max_comp);
  REQUIRE_FALSE(capped.too_large);
  REQUIRE(capped.components.size() == unbounded.components.size());
  for (size_t i = 0; i < capped.components.size(); ++i) {
    CHECK(capped.components[i].vars == unbounded.components[i].vars);
    CHECK(capped.components[i].clause_ids == unbounded.components[i].clause_ids);
  }
}
