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

#ifndef KSAT_COUPLING_HPP
#define KSAT_COUPLING_HPP

#include <cstdint>
#include <vector>

#include "ksat/formula.hpp"
#include "ksat/marking.hpp"
#include "ksat/oracle.hpp"
#include "ksat/regime.hpp"
#include "ksat/rng.hpp"

namespace ksat {

/// Desk-scale instrument for the analysis couplings. The marginal and joint
/// conditional laws come from the exact oracle, so the procedures here are
/// faithful transcriptions of the BFS couplings the mixing proof studies.

struct CouplingParams {
  uint32_t k_gamma = 0;
  double s = 0;      // 36 d^4 k^5
  double p_low = 0;  // 1/2 - 1/s
  double p_up = 0;   // 1/2 + 1/s
  // whether the instance satisfies the parameter bounds the coupling
  // guarantees assume
  bool in_regime = false;

  static CouplingParams make(uint32_t k, uint32_t d, uint32_t k_beta,
                             uint32_t k_gamma);
  static CouplingParams from_regime(const RegimeParams& p);
};

struct CouplingStep {
  uint32_t var = 0;
  double r = 0;
  double p_x = 0;
  double p_y = 0;
  bool marked = false;
};

struct CouplingTrace {
  std::vector<uint32_t> v1;    // superset of the discrepancy variables
  std::vector<uint32_t> vset;  // variables decided during the BFS
  std::vector<uint32_t> s_set; // decisively coupled unmarked variables
  std::vector<uint32_t> alive_clauses;  // hyperedges never deleted
  std::vector<CouplingStep> steps;      // one per while-loop round, in order
  PartialAssignment x;  // values on vset (v0 included)
  PartialAssignment y;
  bool terminated = true;
  bool in_regime = false;
};

/// The coupling over all variables other than v0 (free marked variables).
CouplingTrace run_coupling_C(const CnfFormula& f, const Marking& marking,
                             uint32_t v0, const CouplingParams& cp,
                             RandomSource& rng,
                             oracle::MarginalOracle& backend);

struct CvResult {
  CouplingTrace trace;
  PartialAssignment x_full;  // total assignments after the two extensions
  PartialAssignment y_full;
};

/// The coupling conditioned on the context values of M \ {v0, v}; includes
/// the two final extension steps (V2 first, then V1) realized by maximal
/// couplings of the oracle joint conditionals.
CvResult run_coupling_Cv(const CnfFormula& f, const Marking& marking,
                         uint32_t v0, uint32_t v,
                         const PartialAssignment& context,
                         const CouplingParams& cp, RandomSource& rng,
                         oracle::MarginalOracle& backend);

struct MeanV1 {
  double mean = 0;
  double stderr_ = 0;
  uint64_t trials = 0;
};

/// Monte-Carlo mean of |V1| over independent C runs.
MeanV1 estimate_mean_V1(const CnfFormula& f, const Marking& marking,
                        uint32_t v0, const CouplingParams& cp, uint64_t trials,
                        uint64_t seed, oracle::MarginalOracle& backend);

/// Maximal coupling of two laws over the same variables: identical outcomes
/// with probability sum min(p,q), residual mass distributed by ascending atom
/// order. Returns the packed atom pair.
std::pair<uint64_t, uint64_t> maximal_coupling_draw(
    const oracle::ExactDistribution& p, const oracle::ExactDistribution& q,
    RandomSource& rng);

/// Draws context values for M \ {v0, v} under which nu is well-defined for
/// both conditionings of v0, i.e. the context extends to satisfying
/// assignments with v0 = 0 and with v0 = 1.
PartialAssignment draw_context(const CnfFormula& f, const Marking& marking,
                               uint32_t v0, uint32_t v, RandomSource& rng,
                               oracle::MarginalOracle& backend);

}  // namespace ksat

#endif  // KSAT_COUPLING_HPP
