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

#ifndef KSAT_MARKING_HPP
#define KSAT_MARKING_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ksat/formula.hpp"
#include "ksat/regime.hpp"
#include "ksat/rng.hpp"

namespace ksat {

/// The set M of marked variables plus per-clause marked counts, kept in sync
/// so the condition check is O(1) per clause.
struct Marking {
  std::vector<bool> marked;
  std::vector<uint32_t> per_clause_marked;

  std::vector<uint32_t> marked_vars() const {
    std::vector<uint32_t> out;
    for (uint32_t v = 0; v < marked.size(); ++v)
      if (marked[v]) out.push_back(v);
    return out;
  }
};

struct MarkStats {
  // resampling steps consumed by each attempt, in attempt order
  std::vector<uint32_t> resamples_per_attempt;
  uint32_t attempts_used = 0;
};

struct MarkResult {
  std::optional<Marking> marking;  // empty on failure of all attempts
  MarkStats stats;
};

/// True iff every clause has >= k_alpha marked and >= k_beta unmarked
/// variables.
bool check_condition(const CnfFormula& f, const Marking& m, uint32_t k_alpha,
                     uint32_t k_beta);

/// Moser-Tardos marking: up to ceil(log2(1/delta)) independent attempts, each
/// marking every eligible variable with probability (1+alpha-beta)/2 and then
/// resampling the marks of the lowest-id violating clause until no clause
/// violates the condition; an attempt is abandoned after ceil(4n/k) steps.
/// Variables listed in never_mark (the counter's auxiliary variables) are
/// never marked and never resampled.
///
/// threads > 1 runs attempts concurrently; the lowest-indexed successful
/// attempt wins either way, so the result is independent of the worker count.
MarkResult mark_variables(const CnfFormula& f, const RegimeParams& params,
                          double delta, RandomSource& rng,
                          const std::vector<uint32_t>& never_mark = {},
                          uint32_t threads = 1);

}  // namespace ksat

#endif  // KSAT_MARKING_HPP
