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

#ifndef KSAT_SAMPLER_HPP
#define KSAT_SAMPLER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ksat/bias.hpp"
#include "ksat/formula.hpp"
#include "ksat/marking.hpp"
#include "ksat/oracle.hpp"
#include "ksat/regime.hpp"
#include "ksat/rng.hpp"

namespace ksat {

/// How the single-site conditional is realized: through the component
/// rejection-sampling subroutine, or through the exact conditional marginal
/// by enumeration. Oracle mode realizes the idealized chain on desk-scale
/// instances where the regime cannot hold.
enum class MarginalMode { kComponent, kOracle };

enum class FallbackKind { kNone, kTooLarge, kRejection };

struct SamplerReport {
  uint64_t steps = 0;
  uint64_t seed = 0;
  uint64_t fallback_toolarge_count = 0;
  uint64_t fallback_rejection_count = 0;
  bool marking_failed = false;
  MarkStats mark_stats;
};

/// Up to R i.i.d. draws of the component's variables from the bias; returns
/// values parallel to comp.vars for the first draw satisfying every residual
/// clause of the component, or nullopt when every trial is rejected.
std::optional<std::vector<uint8_t>> rejection_sampling(
    const SimplifiedFormula& sf, const Component& comp, uint64_t R,
    const Bias& bias, RandomSource& rng);

/// Buffer-recycling form; returns false on bottom.
bool rejection_sampling_into(const SimplifiedFormula& sf,
                             const Component& comp, uint64_t R,
                             const Bias& bias, RandomSource& rng,
                             std::vector<uint8_t>& values);

struct SubroutineResult {
  // values for s in ascending variable order
  std::vector<std::pair<uint32_t, bool>> values;
  bool fallback = false;
  FallbackKind kind = FallbackKind::kNone;
};

/// The Sample subroutine: simplify under x, find the components touching s
/// with edge cap ceil(d k log2(n/delta)), rejection-sample each; any oversize
/// component or exhausted rejection budget degrades to a fresh bias draw on s
/// with the fallback flag set. force_uniform_fallback switches the degraded
/// draw to the literal uniform draw regardless of bias.
SubroutineResult sample_subroutine(const CnfFormula& f, double delta,
                                   const PartialAssignment& x,
                                   const std::vector<uint32_t>& s,
                                   const Bias& bias, const RegimeParams& params,
                                   RandomSource& rng,
                                   bool force_uniform_fallback = false);

/// Glauber dynamics over the marked variables: T single-site updates from a
/// bias-distributed start. In component mode each update goes through
/// sample_subroutine; in oracle mode through the exact conditional marginal.
/// shared_oracle, when given, supplies the memo cache across runs.
std::pair<PartialAssignment, SamplerReport> glauber_run(
    const CnfFormula& f, const Marking& marking, const RegimeParams& params,
    const Bias& bias, RandomSource& rng, MarginalMode mode,
    oracle::MarginalOracle* shared_oracle = nullptr,
    bool force_uniform_fallback = false);

struct SampleOptions {
  // nullopt: strict mode, parameters derived from the formula and epsilon
  std::optional<RegimeParams> params;
  // xi used for strict-mode derivation
  double xi_hint = 0.0;
  MarginalMode marginal_mode = MarginalMode::kComponent;
  Bias bias;
  bool force_uniform_fallback = false;
  // variables the marking stage must never mark (the counter's auxiliaries)
  std::vector<uint32_t> never_mark;
  // reuse a previously computed marking instead of running Moser-Tardos
  const Marking* fixed_marking = nullptr;
  oracle::MarginalOracle* shared_oracle = nullptr;
};

struct FullSampleResult {
  PartialAssignment assignment;  // total
  SamplerReport report;
  RegimeParams params;
  Marking marking;  // empty marking when the marking stage failed
};

/// The whole sampling pipeline: mark (delta = eps/4), run the chain, complete
/// the unmarked variables. A marking failure degrades to a bias-distributed
/// assignment with the marking_failed flag set, matching the epsilon/4
/// failure budget.
FullSampleResult full_sample(const CnfFormula& f, double eps, uint64_t seed,
                             const SampleOptions& opts = {});

/// Edge cap used by the subroutine: ceil(d k log2(n/delta)).
uint64_t subroutine_edge_cap(const CnfFormula& f, double delta);

}  // namespace ksat

#endif  // KSAT_SAMPLER_HPP
