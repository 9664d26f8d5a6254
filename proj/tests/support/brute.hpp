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

// Test-only brute-force helpers, kept independent of the library's
// enumeration paths so they can act as oracles for it.

#ifndef KSAT_TESTS_SUPPORT_BRUTE_HPP
#define KSAT_TESTS_SUPPORT_BRUTE_HPP

#include <cstdint>
#include <vector>

#include "ksat/formula.hpp"

namespace ksat::testing {

// Builds a formula from DIMACS-style signed 1-based literal lists.
inline CnfFormula make_formula(uint32_t n,
                               const std::vector<std::vector<int>>& clauses) {
  std::vector<Clause> cs;
  for (const auto& lits : clauses) {
    Clause c;
    for (int lit : lits)
      c.literals.push_back(
          Literal{static_cast<uint32_t>((lit < 0 ? -lit : lit) - 1), lit > 0});
    cs.push_back(std::move(c));
  }
  return CnfFormula::make(n, std::move(cs));
}

inline PartialAssignment assignment_from_mask(uint32_t n, uint64_t mask) {
  PartialAssignment x(n);
  for (uint32_t v = 0; v < n; ++v) x.set(v, (mask >> v) & 1);
  return x;
}

// Independent satisfying-assignment counter: walks the 2^n assignments in
// Gray-code order, maintaining the number of true literals per clause
// incrementally. Shares no code with oracle::exact_count.
inline uint64_t gray_code_count(const CnfFormula& f) {
  const uint32_t n = f.num_vars();
  std::vector<int> true_lits(f.num_clauses(), 0);
  // start at the all-zeros assignment
  for (uint32_t cid = 0; cid < f.num_clauses(); ++cid)
    for (const Literal& l : f.clauses()[cid].literals)
      if (!l.positive) ++true_lits[cid];
  int violated = 0;
  for (int t : true_lits)
    if (t == 0) ++violated;

  uint64_t count = violated == 0 ? 1 : 0;
  std::vector<bool> value(n, false);
  const uint64_t total = n >= 64 ? 0 : (1ULL << n);
  for (uint64_t step = 1; step < total; ++step) {
    // Gray code flips the lowest set bit's position of step
    uint32_t v = static_cast<uint32_t>(__builtin_ctzll(step));
    bool newval = !value[v];
    value[v] = newval;
    for (uint32_t cid : f.clauses_of(v)) {
      for (const Literal& l : f.clauses()[cid].literals) {
        if (l.var != v) continue;
        bool now_true = (l.positive == newval);
        int before = true_lits[cid];
        true_lits[cid] += now_true ? 1 : -1;
        if (before == 0 && true_lits[cid] > 0) --violated;
        if (before > 0 && true_lits[cid] == 0) ++violated;
      }
    }
    if (violated == 0) ++count;
  }
  return count;
}

// Clause-by-clause evaluation used as a second route for unsat counts.
inline uint64_t violated_clauses_direct(const CnfFormula& f, uint64_t mask) {
  uint64_t bad = 0;
  for (const Clause& c : f.clauses()) {
    bool sat = false;
    for (const Literal& l : c.literals)
      if ((((mask >> l.var) & 1) != 0) == l.positive) sat = true;
    if (!sat) ++bad;
  }
  return bad;
}

}  // namespace ksat::testing

#endif  // KSAT_TESTS_SUPPORT_BRUTE_HPP
