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

#include "ksat/marking.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace ksat {

namespace {

bool clause_ok(uint32_t width, uint32_t marked, uint32_t k_alpha,
               uint32_t k_beta) {
  return marked >= k_alpha && width - marked >= k_beta;
}

// Lowest-id clause violating the condition, or -1.
int64_t first_violating(const CnfFormula& f, const std::vector<uint32_t>& cnt,
                        uint32_t k_alpha, uint32_t k_beta) {
  for (uint32_t cid = 0; cid < f.num_clauses(); ++cid) {
    uint32_t w = static_cast<uint32_t>(f.clauses()[cid].literals.size());
    if (!clause_ok(w, cnt[cid], k_alpha, k_beta)) return cid;
  }
  return -1;
}

}  // namespace

bool check_condition(const CnfFormula& f, const Marking& m, uint32_t k_alpha,
                     uint32_t k_beta) {
  for (uint32_t cid = 0; cid < f.num_clauses(); ++cid) {
    uint32_t w = static_cast<uint32_t>(f.clauses()[cid].literals.size());
    if (!clause_ok(w, m.per_clause_marked[cid], k_alpha, k_beta)) return false;
  }
  return true;
}

namespace {

struct AttemptResult {
  bool ok = false;
  uint32_t steps = 0;
  Marking marking;
};

AttemptResult run_attempt(const CnfFormula& f, const RegimeParams& params,
                          const std::vector<bool>& eligible, double p_mark,
                          uint32_t step_budget, RandomSource sub) {
  const uint32_t n = f.num_vars();
  AttemptResult out;
  Marking& m = out.marking;
  m.marked.assign(n, false);
  m.per_clause_marked.assign(f.num_clauses(), 0);
  for (uint32_t v = 0; v < n; ++v) {
    if (!eligible[v]) continue;
    if (sub.next_real() < p_mark) {
      m.marked[v] = true;
      for (uint32_t cid : f.clauses_of(v)) ++m.per_clause_marked[cid];
    }
  }
  for (;;) {
    int64_t bad = first_violating(f, m.per_clause_marked, params.k_alpha,
                                  params.k_beta);
    if (bad < 0) {
      out.ok = true;
      return out;
    }
    if (out.steps >= step_budget) return out;
    ++out.steps;
    for (const Literal& l : f.clauses()[static_cast<size_t>(bad)].literals) {
      if (!eligible[l.var]) continue;
      bool was = m.marked[l.var];
      bool now = sub.next_real() < p_mark;
      if (was == now) continue;
      m.marked[l.var] = now;
      for (uint32_t cid : f.clauses_of(l.var)) {
        if (now)
          ++m.per_clause_marked[cid];
        else
          --m.per_clause_marked[cid];
      }
    }
  }
}

}  // namespace

MarkResult mark_variables(const CnfFormula& f, const RegimeParams& params,
                          double delta, RandomSource& rng,
                          const std::vector<uint32_t>& never_mark,
                          uint32_t threads) {
  if (!(delta > 0.0 && delta < 1.0))
    fail(ErrorCode::kInvalidArgument, "delta must lie in (0,1)");
  const uint32_t n = f.num_vars();
  const uint32_t k = std::max(f.width_max(), 1u);
  const double alpha = static_cast<double>(params.k_alpha) / k;
  const double beta = static_cast<double>(params.k_beta) / k;
  const double p_mark = (1.0 + alpha - beta) / 2.0;
  const uint32_t attempts = std::max(
      static_cast<uint32_t>(std::ceil(std::log2(1.0 / delta))), 1u);
  const uint32_t step_budget =
      static_cast<uint32_t>(std::ceil(4.0 * n / k));

  std::vector<bool> eligible(n, true);
  for (uint32_t v : never_mark) eligible[v] = false;

  MarkResult result;
  if (threads <= 1) {
    for (uint32_t attempt = 0; attempt < attempts; ++attempt) {
      AttemptResult a =
          run_attempt(f, params, eligible, p_mark, step_budget,
                      rng.fork(kStreamMarkAttempt, attempt));
      result.stats.resamples_per_attempt.push_back(a.steps);
      result.stats.attempts_used = attempt + 1;
      if (a.ok) {
        result.marking = std::move(a.marking);
        return result;
      }
    }
    return result;
  }

  // concurrent attempts; the lowest successful index wins, matching the
  // sequential outcome regardless of the worker count
  std::vector<AttemptResult> all(attempts);
  std::atomic<uint32_t> next{0};
  std::vector<std::thread> pool;
  uint32_t workers = std::min(threads, attempts);
  for (uint32_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        uint32_t i = next.fetch_add(1);
        if (i >= attempts) return;
        all[i] = run_attempt(f, params, eligible, p_mark, step_budget,
                             rng.fork(kStreamMarkAttempt, i));
      }
    });
  for (auto& th : pool) th.join();
  for (uint32_t i = 0; i < attempts; ++i) {
    result.stats.resamples_per_attempt.push_back(all[i].steps);
    result.stats.attempts_used = i + 1;
    if (all[i].ok) {
      result.marking = std::move(all[i].marking);
      return result;
    }
  }
  return result;
}

}  // namespace ksat
