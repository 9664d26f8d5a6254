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

#ifndef KSAT_ORACLE_HPP
#define KSAT_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ksat/bias.hpp"
#include "ksat/formula.hpp"

namespace ksat::oracle {

/// Enumeration caps; overridable through KSAT_ORACLE_MAX_COUNT_VARS and
/// KSAT_ORACLE_MAX_WEIGHTED_VARS for experiments that can afford more.
struct Caps {
  uint32_t count_vars = 30;
  uint32_t weighted_vars = 26;
  uint32_t local_uniformity_vars = 20;
};
Caps caps();

/// Exact law over assignments of an ordered variable set, stored densely:
/// probs[key] where bit i of key is the value of vars[i].
struct ExactDistribution {
  std::vector<uint32_t> vars;  // ascending
  std::vector<double> probs;   // size 1 << vars.size()

  size_t support_size() const { return probs.size(); }
};

/// Packs the values of `vars` under a (partial) assignment covering them.
uint64_t pack_assignment(const PartialAssignment& x,
                         const std::vector<uint32_t>& vars);

/// Number of satisfying assignments, by enumeration over 2^n.
uint64_t exact_count(const CnfFormula& f);

/// Z(theta) = sum_X exp(-theta |F(X)|), compensated summation.
double exact_partition(const CnfFormula& f, double theta);

/// Exact marginal law on s given x. theta absent: uniform over satisfying
/// assignments. theta present: Gibbs-weighted by exp(-theta |F|), every
/// assignment in the support.
ExactDistribution exact_conditional(const CnfFormula& f,
                                    const PartialAssignment& x,
                                    const std::vector<uint32_t>& s,
                                    std::optional<double> theta = std::nullopt);

/// Exact marginal law on s given x under a product bias, conditioned on the
/// formula being satisfied (the law of the auxiliary-variable construction).
ExactDistribution exact_conditional_bias(const CnfFormula& f,
                                         const PartialAssignment& x,
                                         const std::vector<uint32_t>& s,
                                         const Bias& bias);

/// The Gibbs law mu_theta over all variables.
ExactDistribution exact_gibbs_distribution(const CnfFormula& f, double theta);

double tv_distance(const ExactDistribution& p, const ExactDistribution& q);

/// Plug-in TV between the histogram of packed samples and p.
double empirical_tv(std::span<const uint64_t> packed_samples,
                    const ExactDistribution& p);

/// Checks max{Pr[X(v)=0], Pr[X(v)=1]} <= (1/2) exp(1/s) for every variable,
/// by enumeration. Preconditions 2^{k_min} >= 2 e d s and s >= k_max are
/// enforced, matching the local lemma hypothesis.
bool local_uniformity_check(const CnfFormula& f, double s_param);

/// Memoizing backend for exact conditional marginals and joints under a
/// product bias with hard satisfaction conditioning. This is what the
/// idealized Glauber mode and the coupling lab query millions of times.
class MarginalOracle {
 public:
  explicit MarginalOracle(const CnfFormula& f, Bias bias = Bias());

  const CnfFormula& formula() const { return *f_; }
  const Bias& bias() const { return bias_; }

  /// P(var = 0 | cond, formula satisfied); throws kZeroMass if the
  /// conditioning event has no mass.
  double prob_zero(uint32_t var, const PartialAssignment& cond);

  /// Joint law of `targets` given cond (hard satisfaction conditioning).
  ExactDistribution joint(const PartialAssignment& cond,
                          const std::vector<uint32_t>& targets);

 private:
  struct Key {
    uint64_t mask;
    uint64_t vals;
    uint64_t tag;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const;
  };

  const CnfFormula* f_;
  Bias bias_;
  std::unordered_map<Key, double, KeyHash> marginal_memo_;
  std::unordered_map<Key, ExactDistribution, KeyHash> joint_memo_;
};

}  // namespace ksat::oracle

#endif  // KSAT_ORACLE_HPP
