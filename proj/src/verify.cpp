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

#include "ksat/verify.hpp"

#include <algorithm>
#include <cmath>

#include "ksat/counter.hpp"
#include "ksat/oracle.hpp"
#include "ksat/sampler.hpp"

namespace ksat {

namespace {

bool wanted(const VerifyOptions& opts, const std::string& name) {
  if (opts.only.empty()) return true;
  return std::find(opts.only.begin(), opts.only.end(), name) !=
         opts.only.end();
}

VerifyCheck skipped(std::string name, std::string why) {
  VerifyCheck c;
  c.name = std::move(name);
  c.status = CheckStatus::kSkipped;
  c.detail = std::move(why);
  return c;
}

std::optional<RegimeParams> desk_params(const CnfFormula& f, double eps) {
  uint32_t kmin = f.num_clauses() ? f.width_min() : 0;
  if (f.num_clauses() > 0 && kmin < 2) return std::nullopt;
  ManualOverrides ov;
  ov.k_alpha = std::max(1u, kmin / 4);
  ov.k_beta = std::max(1u, kmin / 2);
  while (kmin > 0 && ov.k_alpha + ov.k_beta > kmin) {
    if (ov.k_beta > 1)
      --ov.k_beta;
    else
      --ov.k_alpha;
  }
  uint64_t n = std::max<uint32_t>(f.num_vars(), 2);
  ov.T = static_cast<uint64_t>(
      std::ceil(50.0 * static_cast<double>(n) * std::log2(n)));
  ov.R = 200;
  return manual_params(f.num_vars(), kmin, std::max(f.max_degree(), 1u), eps,
                       0.0, ov);
}

uint64_t cdf_draw(const std::vector<double>& cdf, RandomSource& rng) {
  double u = rng.next_real();
  size_t a = static_cast<size_t>(
      std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  return a < cdf.size() ? a : cdf.size() - 1;
}

VerifyCheck check_sampler_tv(const CnfFormula& f, const VerifyOptions& opts) {
  VerifyCheck c;
  c.name = "sampler_tv";
  if (f.num_vars() > 14) return skipped(c.name, "n above the TV check cap");
  auto params = desk_params(f, 0.05);
  if (!params) return skipped(c.name, "no feasible desk marking parameters");

  std::vector<uint32_t> all;
  for (uint32_t v = 0; v < f.num_vars(); ++v) all.push_back(v);
  oracle::ExactDistribution target;
  try {
    PartialAssignment empty(f.num_vars());
    target = oracle::exact_conditional(f, empty, all);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kZeroMass)
      return skipped(c.name, "formula is unsatisfiable");
    throw;
  }

  std::vector<uint64_t> packed;
  packed.reserve(opts.samples);
  SampleOptions so;
  so.params = *params;
  for (uint32_t i = 0; i < opts.samples; ++i) {
    auto res = full_sample(f, 0.05, opts.seed * 1000003ULL + i, so);
    packed.push_back(oracle::pack_assignment(res.assignment, all));
  }
  c.value = oracle::empirical_tv(packed, target);
  c.threshold = std::max(
      0.02, 0.75 * std::sqrt(static_cast<double>(target.support_size()) /
                             static_cast<double>(opts.samples)));
  c.status = c.value <= c.threshold ? CheckStatus::kPass : CheckStatus::kFail;
  return c;
}

VerifyCheck check_detailed_balance(const CnfFormula& f,
                                   const VerifyOptions& opts) {
  VerifyCheck c;
  c.name = "detailed_balance";
  c.threshold = 1e-9;
  if (f.num_vars() > 10) return skipped(c.name, "n above the balance cap");
  auto params = desk_params(f, 0.1);
  if (!params) return skipped(c.name, "no feasible desk marking parameters");

  RandomSource rng(opts.seed, 0);
  MarkResult mr = mark_variables(f, *params, 0.1, rng);
  if (!mr.marking) return skipped(c.name, "marking failed");
  std::vector<uint32_t> m_vars = mr.marking->marked_vars();
  if (m_vars.empty()) return skipped(c.name, "empty marking");

  oracle::ExactDistribution mu_m;
  try {
    PartialAssignment empty(f.num_vars());
    mu_m = oracle::exact_conditional(f, empty, m_vars);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kZeroMass)
      return skipped(c.name, "formula is unsatisfiable");
    throw;
  }

  oracle::MarginalOracle backend(f);
  const double inv_m = 1.0 / static_cast<double>(m_vars.size());
  double worst = 0;
  for (uint64_t key = 0; key < mu_m.probs.size(); ++key) {
    for (size_t i = 0; i < m_vars.size(); ++i) {
      uint64_t other = key ^ (1ULL << i);
      if (other < key) continue;  // each unordered pair once
      PartialAssignment sigma(f.num_vars());
      for (size_t j = 0; j < m_vars.size(); ++j)
        if (j != i) sigma.set(m_vars[j], (key >> j) & 1);
      double p0;
      try {
        p0 = backend.prob_zero(m_vars[i], sigma);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kZeroMass) continue;  // unreachable sigma
        throw;
      }
      double to_one = 1.0 - p0;
      bool key_bit = (key >> i) & 1;
      double lhs = mu_m.probs[key] * inv_m * (key_bit ? p0 : to_one);
      double rhs = mu_m.probs[other] * inv_m * (key_bit ? to_one : p0);
      double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
      worst = std::max(worst, std::abs(lhs - rhs) / denom);
    }
  }
  c.value = worst;
  c.status = c.value <= c.threshold ? CheckStatus::kPass : CheckStatus::kFail;
  return c;
}

VerifyCheck check_local_uniformity(const CnfFormula& f) {
  VerifyCheck c;
  c.name = "local_uniformity";
  c.threshold = 1;
  try {
    bool ok = oracle::local_uniformity_check(
        f, std::max<uint32_t>(f.width_max(), 1));
    c.value = ok ? 1 : 0;
    c.status = ok ? CheckStatus::kPass : CheckStatus::kFail;
  } catch (const Error& e) {
    return skipped(c.name, e.what());
  }
  return c;
}

VerifyCheck check_annealing_endpoint(const CnfFormula& f) {
  VerifyCheck c;
  c.name = "annealing_endpoint";
  const double eps = 0.5;
  if (!f.uniform() || f.num_clauses() == 0)
    return skipped(c.name, "needs a k-uniform formula");
  if (f.num_vars() > oracle::caps().weighted_vars)
    return skipped(c.name, "n above the oracle cap");
  uint32_t k = f.width_max();
  double d = std::max(f.max_degree(), 1u);
  if (std::pow(2.0, k) < 2.0 * std::exp(1.0) * d * k)
    return skipped(c.name, "2^k >= 2edk fails");
  uint64_t z = oracle::exact_count(f);
  if (z == 0) return skipped(c.name, "formula is unsatisfiable");
  double nd = static_cast<double>(f.num_vars()) * d;
  double theta_ell = std::ceil(std::log(4.0 * nd / eps));
  double zl = oracle::exact_partition(f, theta_ell);
  c.value = zl / static_cast<double>(z);
  c.threshold = std::exp(eps / 2.0);
  bool ok = zl >= static_cast<double>(z) * (1.0 - 1e-12) &&
            c.value <= c.threshold * (1.0 + 1e-12);
  c.status = ok ? CheckStatus::kPass : CheckStatus::kFail;
  return c;
}

VerifyCheck check_ratio_unbiasedness(const CnfFormula& f, const VerifyOptions& opts) {
  VerifyCheck c;
  c.name = "ratio_unbiasedness";
  c.threshold = 3.0;  // standard errors
  if (f.num_vars() > 16) return skipped(c.name, "n above the oracle cap");
  const uint32_t d = std::max(f.max_degree(), 1u);
  const double dn = static_cast<double>(f.num_vars()) * d;
  if (f.num_clauses() == 0) {
    c.value = 0;
    c.status = CheckStatus::kPass;
    return c;
  }
  const uint64_t rungs = 6;
  RandomSource root(opts.seed, 0);
  double worst = 0;
  for (uint64_t i = 1; i <= rungs; ++i) {
    double lo = static_cast<double>(i - 1) / dn;
    double hi = static_cast<double>(i) / dn;
    auto dist = oracle::exact_gibbs_distribution(f, lo);
    std::vector<double> cdf(dist.probs.size());
    double acc = 0;
    for (size_t a = 0; a < cdf.size(); ++a) {
      acc += dist.probs[a];
      cdf[a] = acc;
    }
    double ratio = oracle::exact_partition(f, hi) / oracle::exact_partition(f, lo);
    RandomSource rng = root.fork(kStreamVerify, i);
    double sum = 0, sumsq = 0;
    for (uint32_t t = 0; t < opts.samples; ++t) {
      uint64_t atom = cdf_draw(cdf, rng);
      PartialAssignment x(f.num_vars());
      for (uint32_t v = 0; v < f.num_vars(); ++v) x.set(v, (atom >> v) & 1);
      double w = std::exp(-static_cast<double>(unsat_count(f, x)) / dn);
      sum += w;
      sumsq += w * w;
    }
    double mean = sum / opts.samples;
    double var = std::max(0.0, sumsq / opts.samples - mean * mean);
    double se = std::sqrt(var / opts.samples);
    double dev = se > 0 ? std::abs(mean - ratio) / se
                        : (std::abs(mean - ratio) < 1e-12 ? 0.0 : 1e18);
    worst = std::max(worst, dev);
  }
  c.value = worst;
  c.status = c.value <= c.threshold ? CheckStatus::kPass : CheckStatus::kFail;
  return c;
}

VerifyCheck check_clause_addition(const CnfFormula& f, const VerifyOptions& opts) {
  VerifyCheck c;
  c.name = "clause_addition";
  c.threshold = 0.5;
  if (!f.uniform() || f.num_clauses() == 0)
    return skipped(c.name, "needs a k-uniform formula");
  if (f.num_vars() > oracle::caps().count_vars)
    return skipped(c.name, "n above the oracle cap");
  const uint32_t k = f.width_max();
  const uint32_t d = std::max(f.max_degree(), 1u);
  if (std::pow(2.0, k) < 2.0 * std::exp(1.0) * d * k)
    return skipped(c.name, "2^k >= 2edk fails");
  std::vector<uint32_t> degree(f.num_vars(), 0);
  for (const Clause& cl : f.clauses())
    for (const Literal& l : cl.literals) ++degree[l.var];
  std::vector<uint32_t> roomy;
  for (uint32_t v = 0; v < f.num_vars(); ++v)
    if (degree[v] < d) roomy.push_back(v);
  if (roomy.size() < k) return skipped(c.name, "no legal clause to add");

  uint64_t z = oracle::exact_count(f);
  if (z == 0) return skipped(c.name, "formula is unsatisfiable");
  RandomSource rng(opts.seed, 0);
  double min_ratio = 1e18;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<uint32_t> pool = roomy;
    Clause add;
    for (uint32_t i = 0; i < k; ++i) {
      uint64_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      add.literals.push_back(Literal{pool[i], rng.next_bit()});
    }
    std::vector<Clause> clauses = f.clauses();
    clauses.push_back(add);
    CnfFormula bigger = CnfFormula::make(f.num_vars(), std::move(clauses));
    double ratio = static_cast<double>(oracle::exact_count(bigger)) /
                   static_cast<double>(z);
    min_ratio = std::min(min_ratio, ratio);
  }
  c.value = min_ratio;
  c.status =
      c.value >= c.threshold ? CheckStatus::kPass : CheckStatus::kFail;
  return c;
}

VerifyCheck check_aux_formula(const CnfFormula& f) {
  VerifyCheck c;
  c.name = "aux_formula";
  c.threshold = 1e-9;
  if (f.num_vars() + f.num_clauses() > 20)
    return skipped(c.name, "n + m above the enumeration cap");
  const double theta = 0.7;
  GibbsFormula gf = build_gibbs(f, theta);
  // structural facts of the construction
  for (uint32_t cid = 0; cid < f.num_clauses(); ++cid) {
    const auto& base_lits = f.clauses()[cid].literals;
    const auto& aug_lits = gf.augmented.clauses()[cid].literals;
    bool ok = aug_lits.size() == base_lits.size() + 1 &&
              std::equal(base_lits.begin(), base_lits.end(), aug_lits.begin()) &&
              aug_lits.back().var == gf.u_of_clause[cid] &&
              aug_lits.back().positive &&
              gf.augmented.clauses_of(gf.u_of_clause[cid]).size() == 1;
    if (!ok) {
      c.value = 1;
      c.status = CheckStatus::kFail;
      c.detail = "auxiliary clause structure broken";
      return c;
    }
  }
  std::vector<uint32_t> v_vars;
  for (uint32_t v = 0; v < f.num_vars(); ++v) v_vars.push_back(v);
  PartialAssignment empty(gf.augmented.num_vars());
  auto projected =
      oracle::exact_conditional_bias(gf.augmented, empty, v_vars, gf.bias());
  auto direct = oracle::exact_gibbs_distribution(f, theta);
  double worst = 0;
  for (size_t a = 0; a < projected.probs.size(); ++a)
    worst = std::max(worst, std::abs(projected.probs[a] - direct.probs[a]));
  c.value = worst;
  c.status = c.value <= c.threshold ? CheckStatus::kPass : CheckStatus::kFail;
  return c;
}

}  // namespace

const char* check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass:
      return "pass";
    case CheckStatus::kFail:
      return "fail";
    case CheckStatus::kSkipped:
      return "skipped";
  }
  return "unknown";
}

std::vector<VerifyCheck> verify_formula(const CnfFormula& f,
                                        const VerifyOptions& opts) {
  std::vector<VerifyCheck> out;
  if (wanted(opts, "sampler_tv")) out.push_back(check_sampler_tv(f, opts));
  if (wanted(opts, "detailed_balance"))
    out.push_back(check_detailed_balance(f, opts));
  if (wanted(opts, "local_uniformity"))
    out.push_back(check_local_uniformity(f));
  if (wanted(opts, "annealing_endpoint")) out.push_back(check_annealing_endpoint(f));
  if (wanted(opts, "ratio_unbiasedness")) out.push_back(check_ratio_unbiasedness(f, opts));
  if (wanted(opts, "clause_addition")) out.push_back(check_clause_addition(f, opts));
  if (wanted(opts, "aux_formula")) out.push_back(check_aux_formula(f));
  return out;
}

std::vector<VerifyCheck> verify_battery(const VerifyOptions& opts) {
  std::vector<VerifyCheck> out;
  auto add = [&out](std::vector<VerifyCheck> checks, const std::string& tag) {
    for (VerifyCheck& c : checks) {
      c.detail = c.detail.empty() ? tag : c.detail + "; " + tag;
      out.push_back(std::move(c));
    }
  };

  VerifyOptions o = opts;
  {
    CnfFormula free4 = CnfFormula::make(4, {});
    o.only = {"sampler_tv"};
    add(verify_formula(free4, o), "instance: 4 free variables");
  }
  {
    RandomSource rng(opts.seed, kStreamVerify);
    CnfFormula small = generate_random(6, 3, 3, 3, rng);
    o.only = {"detailed_balance", "sampler_tv", "ratio_unbiasedness", "aux_formula"};
    add(verify_formula(small, o), "instance: n=6 k=3 m=3");
  }
  {
    RandomSource rng(opts.seed, kStreamVerify + 100);
    CnfFormula wide = generate_random(16, 3, 8, 2, rng);
    o.only = {"local_uniformity", "annealing_endpoint", "clause_addition"};
    add(verify_formula(wide, o), "instance: n=16 k=8 m=3");
  }
  return out;
}

}  // namespace ksat
