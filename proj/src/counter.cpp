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

#include "ksat/counter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ksat/oracle.hpp"

namespace ksat {

AnnealingSchedule make_schedule(uint64_t n, uint32_t d, double eps) {
  if (!(eps > 0.0))
    fail(ErrorCode::kInvalidArgument, "epsilon must be positive");
  AnnealingSchedule s;
  s.m = static_cast<uint64_t>(std::ceil(144.0 / (eps * eps)));
  if (n == 0 || d == 0) {
    // clause-free: the telescope collapses to Z(0) = 2^n
    s.ell = 0;
    s.theta = {0.0};
    return s;
  }
  double nd = static_cast<double>(n) * d;
  s.ell = static_cast<uint64_t>(n) * d *
          static_cast<uint64_t>(std::ceil(std::log(4.0 * nd / eps)));
  s.theta.reserve(s.ell + 1);
  for (uint64_t i = 0; i <= s.ell; ++i)
    s.theta.push_back(static_cast<double>(i) / nd);
  return s;
}

uint64_t unsat_count(const CnfFormula& f, const PartialAssignment& x) {
  if (x.domain_size() != f.num_vars())
    fail(ErrorCode::kInvalidArgument, "unsat_count needs a total assignment");
  uint64_t cnt = 0;
  for (const Clause& c : f.clauses())
    if (!clause_satisfied(c, x)) ++cnt;
  return cnt;
}

GibbsFormula build_gibbs(const CnfFormula& f, double theta) {
  if (theta < 0) fail(ErrorCode::kInvalidArgument, "theta must be >= 0");
  GibbsFormula gf;
  gf.base = &f;
  gf.theta = theta;
  std::vector<Clause> clauses = f.clauses();
  for (uint32_t cid = 0; cid < clauses.size(); ++cid) {
    uint32_t u = f.num_vars() + cid;
    gf.u_of_clause.push_back(u);
    clauses[cid].literals.push_back(Literal{u, true});
  }
  gf.augmented = CnfFormula::make(f.num_vars() + f.num_clauses(),
                                  std::move(clauses));
  return gf;
}

Bias GibbsFormula::bias() const {
  Bias b;
  double p1 = std::exp(-theta);
  for (uint32_t u : u_of_clause) b.set_override(u, p1);
  return b;
}

FullSampleResult gibbs_sample(const GibbsFormula& gf, double delta,
                              uint64_t seed, const GibbsSampleOptions& opts) {
  SampleOptions so;
  so.params = opts.params;
  so.marginal_mode = opts.marginal_mode;
  so.bias = gf.bias();
  so.never_mark = gf.aux_vars();
  so.fixed_marking = opts.fixed_marking;
  so.shared_oracle = opts.shared_oracle;
  return full_sample(gf.augmented, delta, seed, so);
}

namespace {

struct ReplicateTally {
  double log2_w = 0;
  uint64_t fallback_toolarge = 0;
  uint64_t fallback_rejection = 0;
  uint64_t marking_failures = 0;
};

// One telescoping replicate: for each rung draw X ~ mu_{theta_{i-1}} and
// accumulate log2 of W_i = exp(-|F(X)|/(dn)).
template <typename DrawFn>
ReplicateTally run_replicate(const CnfFormula& f,
                             const AnnealingSchedule& sched, double dn,
                             DrawFn&& draw) {
  ReplicateTally tally;
  tally.log2_w = static_cast<double>(f.num_vars());
  constexpr double kLog2e = 1.4426950408889634;
  for (uint64_t i = 1; i <= sched.ell; ++i) {
    PartialAssignment x = draw(i, tally);
    uint64_t viol = unsat_count(f, x);
    tally.log2_w -= static_cast<double>(viol) / dn * kLog2e;
  }
  return tally;
}

CountEstimate single_estimate(const CnfFormula& f, double eps, uint64_t seed,
                              const CountOptions& opts) {
  CountEstimate est;
  est.seed = seed;
  const uint32_t d = f.max_degree();
  AnnealingSchedule sched = make_schedule(f.num_vars(), d, eps);
  est.ell = sched.ell;
  est.m = sched.m;
  const double dn = std::max(1.0, static_cast<double>(f.num_vars()) * d);

  RandomSource root(seed, 0);
  est.replicate_log2.assign(sched.m, 0.0);

  if (sched.ell == 0) {
    // no rungs: the telescope is exactly Z(0) = 2^n
    for (uint64_t j = 0; j < sched.m; ++j)
      est.replicate_log2[j] = static_cast<double>(f.num_vars());
  } else if (opts.oracle_sampler) {
    // exact per-rung CDFs, shared read-only by all replicates
    std::vector<std::vector<double>> cdfs(sched.ell);
    std::vector<uint32_t> all_vars;
    for (uint32_t v = 0; v < f.num_vars(); ++v) all_vars.push_back(v);
    for (uint64_t i = 1; i <= sched.ell; ++i) {
      auto dist = oracle::exact_gibbs_distribution(f, sched.theta[i - 1]);
      std::vector<double> cdf(dist.probs.size());
      double acc = 0;
      for (size_t a = 0; a < dist.probs.size(); ++a) {
        acc += dist.probs[a];
        cdf[a] = acc;
      }
      cdfs[i - 1] = std::move(cdf);
    }
    auto run = [&](uint64_t j) {
      RandomSource rng = root.fork(kStreamReplicate, j);
      auto draw = [&](uint64_t i, ReplicateTally&) {
        const auto& cdf = cdfs[i - 1];
        double u = rng.next_real();
        size_t a = static_cast<size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (a >= cdf.size()) a = cdf.size() - 1;
        PartialAssignment x(f.num_vars());
        for (uint32_t v = 0; v < f.num_vars(); ++v)
          x.set(v, (a >> v) & 1);
        return x;
      };
      ReplicateTally t = run_replicate(f, sched, dn, draw);
      est.replicate_log2[j] = t.log2_w;
    };
    for (uint64_t j = 0; j < sched.m; ++j) run(j);
  } else {
    // structure of Phi' and its marking are theta-independent: built once
    GibbsFormula skeleton = build_gibbs(f, 0.0);
    double call_budget = 1.0 / (8.0 * static_cast<double>(sched.ell) *
                                static_cast<double>(sched.m));
    RegimeParams params;
    if (opts.manual) {
      params = *opts.manual;
    } else {
      params = derive_params(skeleton.augmented.num_vars(),
                             skeleton.augmented.width_max(),
                             std::max(skeleton.augmented.max_degree(), 1u),
                             call_budget, 0.0);
    }

    est.params_used = params;
    std::optional<Marking> marking;
    {
      MarkResult mr = mark_variables(skeleton.augmented, params,
                                     std::min(call_budget / 4.0, 0.25), root,
                                     skeleton.aux_vars());
      if (mr.marking) marking = std::move(*mr.marking);
    }

    std::vector<GibbsFormula> rungs;
    rungs.reserve(sched.ell);
    for (uint64_t i = 1; i <= sched.ell; ++i)
      rungs.push_back(build_gibbs(f, sched.theta[i - 1]));

    std::vector<ReplicateTally> tallies(sched.m);
    auto run = [&](uint64_t j) {
      RandomSource rep_rng = root.fork(kStreamReplicate, j);
      auto draw = [&](uint64_t i, ReplicateTally& tally) {
        RandomSource call_rng = rep_rng.fork(kStreamChain, i);
        PartialAssignment x(f.num_vars());
        if (!marking) {
          // the one-time marking failed: every call degrades to a bias draw
          ++tally.marking_failures;
          Bias b = rungs[i - 1].bias();
          for (uint32_t v = 0; v < f.num_vars(); ++v)
            x.set(v, b.draw(v, call_rng));
          return x;
        }
        GibbsSampleOptions gso;
        gso.params = params;
        gso.fixed_marking = &*marking;
        FullSampleResult r =
            gibbs_sample(rungs[i - 1], call_budget, call_rng.stream(), gso);
        tally.fallback_toolarge += r.report.fallback_toolarge_count;
        tally.fallback_rejection += r.report.fallback_rejection_count;
        for (uint32_t v = 0; v < f.num_vars(); ++v)
          x.set(v, r.assignment.value(v));
        return x;
      };
      tallies[j] = run_replicate(f, sched, dn, draw);
    };

    uint32_t workers = std::max(1u, opts.threads);
    if (workers == 1) {
      for (uint64_t j = 0; j < sched.m; ++j) run(j);
    } else {
      std::atomic<uint64_t> next{0};
      std::vector<std::thread> pool;
      for (uint32_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (;;) {
            uint64_t j = next.fetch_add(1);
            if (j >= sched.m) return;
            run(j);
          }
        });
      for (auto& th : pool) th.join();
    }
    for (uint64_t j = 0; j < sched.m; ++j) {
      est.replicate_log2[j] = tallies[j].log2_w;
      est.fallback_toolarge += tallies[j].fallback_toolarge;
      est.fallback_rejection += tallies[j].fallback_rejection;
      est.marking_failures += tallies[j].marking_failures;
    }
  }

  // log2 of the replicate mean, max-shifted
  double max_l = est.replicate_log2[0];
  for (double l : est.replicate_log2) max_l = std::max(max_l, l);
  double acc = 0;
  for (double l : est.replicate_log2) acc += std::exp2(l - max_l);
  est.log2_estimate =
      max_l + std::log2(acc / static_cast<double>(sched.m));
  if (est.log2_estimate < 63.0)
    est.decimal_estimate = std::exp2(est.log2_estimate);
  return est;
}

}  // namespace

CountEstimate approx_count(const CnfFormula& f, double eps, uint64_t seed,
                           const CountOptions& opts) {
  if (!(eps > 0.0))
    fail(ErrorCode::kInvalidArgument, "epsilon must be positive");
  uint32_t reps = std::max(1u, opts.reps);
  if (reps == 1) return single_estimate(f, eps, seed, opts);

  std::vector<CountEstimate> all;
  all.reserve(reps);
  RandomSource root(seed, 0);
  for (uint32_t r = 0; r < reps; ++r)
    all.push_back(
        single_estimate(f, eps, root.fork(kStreamVerify, r).stream(), opts));
  std::sort(all.begin(), all.end(),
            [](const CountEstimate& a, const CountEstimate& b) {
              return a.log2_estimate < b.log2_estimate;
            });
  CountEstimate median = all[(reps - 1) / 2];
  median.seed = seed;
  return median;
}

}  // namespace ksat
