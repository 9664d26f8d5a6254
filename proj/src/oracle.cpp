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

#include "ksat/oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace ksat::oracle {

namespace {

uint32_t env_cap(const char* name, uint32_t fallback) {
  const char* v = std::getenv(name);
  if (!v) return fallback;
  char* end = nullptr;
  unsigned long parsed = std::strtoul(v, &end, 10);
  if (end == v || parsed == 0 || parsed > 62) return fallback;
  return static_cast<uint32_t>(parsed);
}

struct ClauseMasks {
  uint64_t pos = 0;
  uint64_t neg = 0;
  bool already_sat = false;
};

// Per-clause masks over the free-variable ordering; free_index[v] is the bit
// position of free variable v, or -1 when v is assigned by x.
std::vector<ClauseMasks> build_masks(const CnfFormula& f,
                                     const PartialAssignment& x,
                                     const std::vector<int32_t>& free_index) {
  std::vector<ClauseMasks> masks(f.num_clauses());
  for (uint32_t cid = 0; cid < f.num_clauses(); ++cid) {
    ClauseMasks& cm = masks[cid];
    for (const Literal& l : f.clauses()[cid].literals) {
      if (free_index[l.var] < 0) {
        if (x.value(l.var) == l.positive) {
          cm.already_sat = true;
          break;
        }
      } else {
        uint64_t bit = 1ULL << free_index[l.var];
        if (l.positive)
          cm.pos |= bit;
        else
          cm.neg |= bit;
      }
    }
  }
  return masks;
}

struct EnumSetup {
  std::vector<uint32_t> free_vars;
  std::vector<int32_t> free_index;  // var -> bit position or -1
  std::vector<ClauseMasks> masks;
};

EnumSetup setup_enumeration(const CnfFormula& f, const PartialAssignment& x,
                            uint32_t cap, const char* who) {
  EnumSetup e;
  e.free_index.assign(f.num_vars(), -1);
  for (uint32_t v = 0; v < f.num_vars(); ++v) {
    if (!x.assigned(v)) {
      e.free_index[v] = static_cast<int32_t>(e.free_vars.size());
      e.free_vars.push_back(v);
    }
  }
  if (e.free_vars.size() > cap)
    fail(ErrorCode::kOracleCap, std::string(who) + ": " +
                                    std::to_string(e.free_vars.size()) +
                                    " free variables exceed the cap of " +
                                    std::to_string(cap));
  e.masks = build_masks(f, x, e.free_index);
  return e;
}

inline uint32_t unsat_clauses(const std::vector<ClauseMasks>& masks,
                              uint64_t pattern) {
  uint32_t cnt = 0;
  for (const ClauseMasks& cm : masks) {
    if (cm.already_sat) continue;
    if ((pattern & cm.pos) == 0 && (~pattern & cm.neg) == 0) ++cnt;
  }
  return cnt;
}

inline bool all_satisfied(const std::vector<ClauseMasks>& masks,
                          uint64_t pattern) {
  for (const ClauseMasks& cm : masks) {
    if (cm.already_sat) continue;
    if ((pattern & cm.pos) == 0 && (~pattern & cm.neg) == 0) return false;
  }
  return true;
}

double bias_weight(const Bias& bias, const std::vector<uint32_t>& free_vars,
                   uint64_t pattern) {
  double w = 1.0;
  for (size_t i = 0; i < free_vars.size(); ++i) {
    double p1 = bias.prob_one(free_vars[i]);
    w *= (pattern >> i) & 1 ? p1 : 1.0 - p1;
  }
  return w;
}

// Shared accumulation: weight(pattern) summed into the projection onto s.
template <typename WeightFn>
ExactDistribution conditional_impl(const CnfFormula& f,
                                   const PartialAssignment& x,
                                   const std::vector<uint32_t>& s,
                                   uint32_t cap, const char* who,
                                   WeightFn&& weight) {
  EnumSetup e = setup_enumeration(f, x, cap, who);
  ExactDistribution dist;
  dist.vars = s;
  std::sort(dist.vars.begin(), dist.vars.end());
  std::vector<int32_t> target_pos;
  for (uint32_t v : dist.vars) {
    if (x.assigned(v))
      fail(ErrorCode::kInvalidArgument,
           "target variable is fixed by the conditioning assignment");
    target_pos.push_back(e.free_index[v]);
  }
  dist.probs.assign(1ULL << dist.vars.size(), 0.0);

  const uint64_t total = 1ULL << e.free_vars.size();
  for (uint64_t p = 0; p < total; ++p) {
    double w = weight(e, p);
    if (w == 0.0) continue;
    uint64_t key = 0;
    for (size_t i = 0; i < target_pos.size(); ++i)
      key |= ((p >> target_pos[i]) & 1) << i;
    dist.probs[key] += w;
  }
  double z = 0.0;
  for (double v : dist.probs) z += v;
  if (z <= 0.0)
    fail(ErrorCode::kZeroMass, "conditioning event has zero mass");
  for (double& v : dist.probs) v /= z;
  return dist;
}

}  // namespace

Caps caps() {
  static Caps c = [] {
    Caps caps;
    caps.count_vars = env_cap("KSAT_ORACLE_MAX_COUNT_VARS", caps.count_vars);
    caps.weighted_vars =
        env_cap("KSAT_ORACLE_MAX_WEIGHTED_VARS", caps.weighted_vars);
    return caps;
  }();
  return c;
}

uint64_t pack_assignment(const PartialAssignment& x,
                         const std::vector<uint32_t>& vars) {
  uint64_t key = 0;
  for (size_t i = 0; i < vars.size(); ++i) {
    if (!x.assigned(vars[i]))
      fail(ErrorCode::kInvalidArgument, "pack_assignment: variable unassigned");
    key |= static_cast<uint64_t>(x.value(vars[i])) << i;
  }
  return key;
}

uint64_t exact_count(const CnfFormula& f) {
  if (f.num_vars() > caps().count_vars)
    fail(ErrorCode::kOracleCap,
         "exact_count: n=" + std::to_string(f.num_vars()) + " exceeds cap " +
             std::to_string(caps().count_vars));
  PartialAssignment empty(f.num_vars());
  std::vector<int32_t> idx(f.num_vars());
  for (uint32_t v = 0; v < f.num_vars(); ++v) idx[v] = static_cast<int32_t>(v);
  auto masks = build_masks(f, empty, idx);
  uint64_t count = 0;
  const uint64_t total = 1ULL << f.num_vars();
  for (uint64_t p = 0; p < total; ++p)
    if (all_satisfied(masks, p)) ++count;
  return count;
}

double exact_partition(const CnfFormula& f, double theta) {
  if (f.num_vars() > caps().weighted_vars)
    fail(ErrorCode::kOracleCap,
         "exact_partition: n=" + std::to_string(f.num_vars()) +
             " exceeds cap " + std::to_string(caps().weighted_vars));
  PartialAssignment empty(f.num_vars());
  std::vector<int32_t> idx(f.num_vars());
  for (uint32_t v = 0; v < f.num_vars(); ++v) idx[v] = static_cast<int32_t>(v);
  auto masks = build_masks(f, empty, idx);
  double sum = 0.0, comp = 0.0;  // Kahan
  const uint64_t total = 1ULL << f.num_vars();
  for (uint64_t p = 0; p < total; ++p) {
    double term = std::exp(-theta * unsat_clauses(masks, p));
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

ExactDistribution exact_conditional(const CnfFormula& f,
                                    const PartialAssignment& x,
                                    const std::vector<uint32_t>& s,
                                    std::optional<double> theta) {
  if (theta) {
    double th = *theta;
    return conditional_impl(
        f, x, s, caps().weighted_vars, "exact_conditional",
        [th](const EnumSetup& e, uint64_t p) {
          return std::exp(-th * unsat_clauses(e.masks, p));
        });
  }
  return conditional_impl(f, x, s, caps().weighted_vars, "exact_conditional",
                          [](const EnumSetup& e, uint64_t p) {
                            return all_satisfied(e.masks, p) ? 1.0 : 0.0;
                          });
}

ExactDistribution exact_conditional_bias(const CnfFormula& f,
                                         const PartialAssignment& x,
                                         const std::vector<uint32_t>& s,
                                         const Bias& bias) {
  if (bias.is_uniform()) return exact_conditional(f, x, s);
  return conditional_impl(f, x, s, caps().weighted_vars,
                          "exact_conditional_bias",
                          [&bias](const EnumSetup& e, uint64_t p) {
                            if (!all_satisfied(e.masks, p)) return 0.0;
                            return bias_weight(bias, e.free_vars, p);
                          });
}

ExactDistribution exact_gibbs_distribution(const CnfFormula& f, double theta) {
  PartialAssignment empty(f.num_vars());
  std::vector<uint32_t> all;
  for (uint32_t v = 0; v < f.num_vars(); ++v) all.push_back(v);
  return exact_conditional(f, empty, all, theta);
}

double tv_distance(const ExactDistribution& p, const ExactDistribution& q) {
  if (p.vars != q.vars)
    fail(ErrorCode::kInvalidArgument, "tv_distance: mismatched supports");
  double sum = 0.0;
  for (size_t i = 0; i < p.probs.size(); ++i)
    sum += std::abs(p.probs[i] - q.probs[i]);
  return 0.5 * sum;
}

double empirical_tv(std::span<const uint64_t> packed_samples,
                    const ExactDistribution& p) {
  if (p.probs.size() > (1ULL << 20))
    fail(ErrorCode::kInvalidArgument,
         "empirical_tv: support above 2^20 atoms");
  std::vector<uint64_t> hist(p.probs.size(), 0);
  for (uint64_t key : packed_samples) {
    if (key >= hist.size())
      fail(ErrorCode::kInvalidArgument,
           "empirical_tv: sample outside the support universe");
    ++hist[key];
  }
  const double n = static_cast<double>(packed_samples.size());
  double sum = 0.0;
  for (size_t i = 0; i < hist.size(); ++i)
    sum += std::abs(static_cast<double>(hist[i]) / n - p.probs[i]);
  return 0.5 * sum;
}

bool local_uniformity_check(const CnfFormula& f, double s_param) {
  if (f.num_vars() > caps().local_uniformity_vars)
    fail(ErrorCode::kOracleCap, "local_uniformity_check: n exceeds cap");
  if (f.num_clauses() == 0) return true;  // marginals are exactly 1/2
  if (s_param < f.width_max())
    fail(ErrorCode::kInvalidArgument,
         "local_uniformity_check: requires s >= max clause width");
  double lhs = std::pow(2.0, f.width_min());
  double rhs = 2.0 * std::exp(1.0) * f.max_degree() * s_param;
  if (lhs < rhs)
    fail(ErrorCode::kInvalidArgument,
         "local_uniformity_check: requires 2^{k_min} >= 2 e d s");

  PartialAssignment empty(f.num_vars());
  std::vector<int32_t> idx(f.num_vars());
  for (uint32_t v = 0; v < f.num_vars(); ++v) idx[v] = static_cast<int32_t>(v);
  auto masks = build_masks(f, empty, idx);
  uint64_t z = 0;
  std::vector<uint64_t> ones(f.num_vars(), 0);
  const uint64_t total = 1ULL << f.num_vars();
  for (uint64_t p = 0; p < total; ++p) {
    if (!all_satisfied(masks, p)) continue;
    ++z;
    for (uint32_t v = 0; v < f.num_vars(); ++v)
      if ((p >> v) & 1) ++ones[v];
  }
  if (z == 0) fail(ErrorCode::kZeroMass, "formula unsatisfiable");
  const double bound = 0.5 * std::exp(1.0 / s_param) + 1e-15;
  for (uint32_t v = 0; v < f.num_vars(); ++v) {
    double p1 = static_cast<double>(ones[v]) / static_cast<double>(z);
    if (std::max(p1, 1.0 - p1) > bound) return false;
  }
  return true;
}

size_t MarginalOracle::KeyHash::operator()(const Key& k) const {
  auto mix = [](uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return static_cast<size_t>(mix(k.mask ^ mix(k.vals ^ mix(k.tag))));
}

MarginalOracle::MarginalOracle(const CnfFormula& f, Bias bias)
    : f_(&f), bias_(std::move(bias)) {
  if (f.num_vars() > 62)
    fail(ErrorCode::kOracleCap, "MarginalOracle: n exceeds 62");
}

double MarginalOracle::prob_zero(uint32_t var, const PartialAssignment& cond) {
  Key key{0, 0, var};
  for (uint32_t v = 0; v < f_->num_vars(); ++v) {
    if (cond.assigned(v)) {
      key.mask |= 1ULL << v;
      if (cond.value(v)) key.vals |= 1ULL << v;
    }
  }
  auto it = marginal_memo_.find(key);
  if (it != marginal_memo_.end()) return it->second;
  ExactDistribution d = exact_conditional_bias(*f_, cond, {var}, bias_);
  double p0 = d.probs[0];
  marginal_memo_.emplace(key, p0);
  return p0;
}

ExactDistribution MarginalOracle::joint(const PartialAssignment& cond,
                                        const std::vector<uint32_t>& targets) {
  Key key{0, 0, 0};
  for (uint32_t v = 0; v < f_->num_vars(); ++v) {
    if (cond.assigned(v)) {
      key.mask |= 1ULL << v;
      if (cond.value(v)) key.vals |= 1ULL << v;
    }
  }
  for (uint32_t v : targets) key.tag |= 1ULL << v;
  auto it = joint_memo_.find(key);
  if (it != joint_memo_.end()) return it->second;
  ExactDistribution d = exact_conditional_bias(*f_, cond, targets, bias_);
  joint_memo_.emplace(key, d);
  return d;
}

}  // namespace ksat::oracle
