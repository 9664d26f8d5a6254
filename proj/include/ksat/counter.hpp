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

#ifndef KSAT_COUNTER_HPP
#define KSAT_COUNTER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ksat/bias.hpp"
#include "ksat/formula.hpp"
#include "ksat/regime.hpp"
#include "ksat/sampler.hpp"

namespace ksat {

/// Non-adaptive ladder theta_i = i/(dn), i = 0..ell.
struct AnnealingSchedule {
  std::vector<double> theta;
  uint64_t ell = 0;
  uint64_t m = 0;
};

AnnealingSchedule make_schedule(uint64_t n, uint32_t d, double eps);

/// |F(x)|: number of clauses the total assignment x violates.
uint64_t unsat_count(const CnfFormula& f, const PartialAssignment& x);

/// The auxiliary-variable formula: clause c becomes u_c OR c with a fresh
/// variable u_c, so the product law with Pr[u_c = 1] = exp(-theta),
/// conditioned on satisfaction, projects to the Gibbs law mu_theta on V.
struct GibbsFormula {
  const CnfFormula* base = nullptr;
  CnfFormula augmented;
  std::vector<uint32_t> u_of_clause;  // clause id -> auxiliary variable id
  double theta = 0;

  Bias bias() const;
  std::vector<uint32_t> aux_vars() const { return u_of_clause; }
};

GibbsFormula build_gibbs(const CnfFormula& f, double theta);

struct GibbsSampleOptions {
  std::optional<RegimeParams> params;  // nullopt: strict on width k+1
  MarginalMode marginal_mode = MarginalMode::kComponent;
  const Marking* fixed_marking = nullptr;
  oracle::MarginalOracle* shared_oracle = nullptr;
};

/// Full sampler pipeline on the augmented formula with the theta bias on the
/// auxiliary variables; returns the assignment on V union U.
FullSampleResult gibbs_sample(const GibbsFormula& gf, double delta,
                              uint64_t seed, const GibbsSampleOptions& opts = {});

struct CountOptions {
  std::optional<RegimeParams> manual;  // strict derivation on Phi' when empty
  bool oracle_sampler = false;  // exact per-rung draws instead of the pipeline
  uint32_t reps = 1;            // median of independent estimates
  uint32_t threads = 1;         // replicate parallelism
};

struct CountEstimate {
  double log2_estimate = 0;
  std::optional<double> decimal_estimate;  // present when below 2^63
  std::vector<double> replicate_log2;
  uint64_t ell = 0;
  uint64_t m = 0;
  uint64_t fallback_toolarge = 0;
  uint64_t fallback_rejection = 0;
  uint64_t marking_failures = 0;
  uint64_t seed = 0;
  // pipeline parameters used by the chain sampler (absent in oracle mode)
  std::optional<RegimeParams> params_used;
};

/// Simulated-annealing estimator: m replicates of the telescoping product
/// over the schedule, averaged in the log2 domain with a max-shifted sum.
CountEstimate approx_count(const CnfFormula& f, double eps, uint64_t seed,
                           const CountOptions& opts = {});

}  // namespace ksat

#endif  // KSAT_COUNTER_HPP
