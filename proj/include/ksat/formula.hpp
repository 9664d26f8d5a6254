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

#ifndef KSAT_FORMULA_HPP
#define KSAT_FORMULA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ksat/error.hpp"
#include "ksat/rng.hpp"

namespace ksat {

struct Literal {
  uint32_t var;
  bool positive;

  bool operator==(const Literal&) const = default;
};

struct Clause {
  std::vector<Literal> literals;
};

/// Immutable CNF formula. Clause order and literal order are preserved from
/// the input; every tie-break downstream (first hyperedge, first variable)
/// resolves through them. Construct through parse/generate/make so the
/// invariants (distinct variables per clause, indices in range) always hold.
class CnfFormula {
 public:
  static CnfFormula make(uint32_t num_vars, std::vector<Clause> clauses);

  uint32_t num_vars() const { return num_vars_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  uint32_t num_clauses() const { return static_cast<uint32_t>(clauses_.size()); }
  uint32_t width_min() const { return width_min_; }
  uint32_t width_max() const { return width_max_; }
  uint32_t max_degree() const { return max_degree_; }
  bool uniform() const { return width_min_ == width_max_; }

  /// Clause ids containing the variable, in increasing id order.
  const std::vector<uint32_t>& clauses_of(uint32_t var) const {
    return incidence_[var];
  }

 private:
  uint32_t num_vars_ = 0;
  std::vector<Clause> clauses_;
  uint32_t width_min_ = 0;
  uint32_t width_max_ = 0;
  uint32_t max_degree_ = 0;
  std::vector<std::vector<uint32_t>> incidence_;
};

struct ParseResult {
  CnfFormula formula;
  std::vector<std::string> warnings;
};

/// DIMACS CNF reader: comment lines `c ...`, a `p cnf <n> <m>` header and
/// 0-terminated clauses of signed 1-based variable ids. A clause-count
/// mismatch against the header is a warning, not an error.
ParseResult parse_dimacs(std::string_view text);

/// Bit-exact DIMACS writer: clauses in stored order, literals in stored order.
std::string emit_dimacs(const CnfFormula& f);

/// Random test fixture generator: m clauses of k distinct variables each,
/// respecting the per-variable degree cap, polarities uniform. Deterministic
/// for a given RandomSource state.
CnfFormula generate_random(uint32_t n, uint32_t m, uint32_t k, uint32_t d_cap,
                           RandomSource& rng);

/// Assignment of a subset of variables; values[v] is -1 when v is outside the
/// domain. Cheap O(1) lookup is what the per-step simplification loops need.
class PartialAssignment {
 public:
  PartialAssignment() = default;
  explicit PartialAssignment(uint32_t num_vars)
      : values_(num_vars, int8_t{-1}) {}

  uint32_t num_vars() const { return static_cast<uint32_t>(values_.size()); }
  bool assigned(uint32_t var) const { return values_[var] >= 0; }
  bool value(uint32_t var) const { return values_[var] == 1; }
  uint32_t domain_size() const { return assigned_count_; }

  void set(uint32_t var, bool v) {
    if (values_[var] < 0) ++assigned_count_;
    values_[var] = v ? 1 : 0;
  }
  void unset(uint32_t var) {
    if (values_[var] >= 0) --assigned_count_;
    values_[var] = -1;
  }

  std::vector<uint32_t> domain() const;

 private:
  std::vector<int8_t> values_;
  uint32_t assigned_count_ = 0;
};

struct ResidualClause {
  uint32_t orig_id;
  std::vector<Literal> literals;  // empty = clause falsified by the assignment
};

/// Formula simplified under a partial assignment: satisfied clauses removed,
/// assigned literals stripped from the survivors. A falsified clause stays as
/// an empty residual so rejection sampling on its component never succeeds.
struct SimplifiedFormula {
  const CnfFormula* base = nullptr;
  const PartialAssignment* assignment = nullptr;
  std::vector<ResidualClause> residuals;
  // orig clause id -> index into residuals, or -1
  std::vector<int32_t> residual_of_clause;

  bool is_free(uint32_t var) const { return !assignment->assigned(var); }
};

SimplifiedFormula simplify(const CnfFormula& f, const PartialAssignment& x);

/// Equivalent to simplify but recycles the output object's storage; the
/// per-step sampler loop calls this tens of thousands of times per sample.
void simplify_into(const CnfFormula& f, const PartialAssignment& x,
                   SimplifiedFormula& out);

/// Connected component of the hypergraph of the simplified formula. vars is
/// the union of the member residual clauses' variables (or a single isolated
/// free variable), ascending; clause_ids indexes into sf.residuals.
struct Component {
  std::vector<uint32_t> vars;
  std::vector<uint32_t> clause_ids;
};

struct ComponentsResult {
  bool too_large = false;
  uint32_t offending_clause = 0;  // orig clause id that tripped the cap
  std::vector<Component> components;

  // epoch-stamped traversal scratch, recycled across calls
  std::vector<uint32_t> var_epoch;
  std::vector<uint32_t> clause_epoch;
  uint32_t epoch = 0;
  std::vector<uint32_t> stack;
};

/// Components of H_{Phi^X} whose variable set intersects s, discovered by DFS
/// from each seed variable. Exploration aborts the moment any component under
/// construction exceeds edge_cap residual clauses.
ComponentsResult components_touching(const SimplifiedFormula& sf,
                                     const std::vector<uint32_t>& s,
                                     uint64_t edge_cap);

/// Storage-recycling variant of components_touching.
void components_touching_into(const SimplifiedFormula& sf,
                              const std::vector<uint32_t>& s,
                              uint64_t edge_cap, ComponentsResult& out);

/// True iff x (total on the clause's variables) satisfies the clause.
bool clause_satisfied(const Clause& c, const PartialAssignment& x);

/// True iff the full assignment satisfies every clause.
bool satisfies(const CnfFormula& f, const PartialAssignment& x);

}  // namespace ksat

#endif  // KSAT_FORMULA_HPP
