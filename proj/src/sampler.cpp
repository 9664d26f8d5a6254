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

#include "ksat/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace ksat {

namespace {

std::vector<std::pair<uint32_t, bool>> degraded_draw(
    const std::vector<uint32_t>& sorted_s, const Bias& bias, RandomSource& rng,
    bool force_uniform) {
  std::vector<std::pair<uint32_t, bool>> out;
  out.reserve(sorted_s.size());
  for (uint32_t v : sorted_s) {
    bool bit = force_uniform ? rng.next_bit() : bias.draw(v, rng);
    out.push_back({v, bit});
  }
  return out;
}

}  // namespace

uint64_t subroutine_edge_cap(const CnfFormula& f, double delta) {
  double d = std::max<uint32_t>(f.max_degree(), 1);
  double k = std::max<uint32_t>(f.width_max(), 1);
  double n = std::max<uint32_t>(f.num_vars(), 1);
  double cap = std::ceil(d * k * std::log2(n / delta));
  return cap > 0 ? static_cast<uint64_t>(cap) : 0;
}

bool rejection_sampling_into(const SimplifiedFormula& sf,
                             const Component& comp, uint64_t R,
                             const Bias& bias, RandomSource& rng,
                             std::vector<uint8_t>& values) {
  if (R < 1) fail(ErrorCode::kInvalidArgument, "R must be >= 1");
  values.assign(comp.vars.size(), 0);
  auto pos_of = [&comp](uint32_t var) {
    return static_cast<size_t>(
        std::lower_bound(comp.vars.begin(), comp.vars.end(), var) -
        comp.vars.begin());
  };
  for (uint64_t trial = 0; trial < R; ++trial) {
    for (size_t i = 0; i < comp.vars.size(); ++i)
      values[i] = bias.draw(comp.vars[i], rng) ? 1 : 0;
    bool ok = true;
    for (uint32_t rid : comp.clause_ids) {
      const ResidualClause& rc = sf.residuals[rid];
      bool sat = false;
      for (const Literal& l : rc.literals) {
        if ((values[pos_of(l.var)] != 0) == l.positive) {
          sat = true;
          break;
        }
      }
      if (!sat) {  // an empty residual clause lands here on every trial
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

std::optional<std::vector<uint8_t>> rejection_sampling(
    const SimplifiedFormula& sf, const Component& comp, uint64_t R,
    const Bias& bias, RandomSource& rng) {
  std::vector<uint8_t> values;
  if (rejection_sampling_into(sf, comp, R, bias, rng, values)) return values;
  return std::nullopt;
}

namespace {

// recycled across the tens of thousands of per-step calls a chain makes
struct SubroutineScratch {
  SimplifiedFormula sf;
  ComponentsResult comps;
  std::vector<uint32_t> sorted_s;
  std::vector<uint8_t> values;
  std::vector<int8_t> drawn;
};

}  // namespace

SubroutineResult sample_subroutine(const CnfFormula& f, double delta,
                                   const PartialAssignment& x,
                                   const std::vector<uint32_t>& s,
                                   const Bias& bias, const RegimeParams& params,
                                   RandomSource& rng,
                                   bool force_uniform_fallback) {
  thread_local SubroutineScratch ws;
  SubroutineResult res;
  ws.sorted_s.assign(s.begin(), s.end());
  std::sort(ws.sorted_s.begin(), ws.sorted_s.end());

  simplify_into(f, x, ws.sf);
  uint64_t cap = subroutine_edge_cap(f, delta);
  components_touching_into(ws.sf, ws.sorted_s, cap, ws.comps);
  if (ws.comps.too_large) {
    res.values = degraded_draw(ws.sorted_s, bias, rng, force_uniform_fallback);
    res.fallback = true;
    res.kind = FallbackKind::kTooLarge;
    return res;
  }

  if (ws.drawn.size() < f.num_vars()) ws.drawn.resize(f.num_vars());
  for (const Component& comp : ws.comps.components) {
    if (!rejection_sampling_into(ws.sf, comp, params.R, bias, rng,
                                 ws.values)) {
      res.values =
          degraded_draw(ws.sorted_s, bias, rng, force_uniform_fallback);
      res.fallback = true;
      res.kind = FallbackKind::kRejection;
      return res;
    }
    for (size_t i = 0; i < comp.vars.size(); ++i)
      ws.drawn[comp.vars[i]] = ws.values[i];
  }
  res.values.reserve(ws.sorted_s.size());
  for (uint32_t v : ws.sorted_s) res.values.push_back({v, ws.drawn[v] == 1});
  return res;
}

std::pair<PartialAssignment, SamplerReport> glauber_run(
    const CnfFormula& f, const Marking& marking, const RegimeParams& params,
    const Bias& bias, RandomSource& rng, MarginalMode mode,
    oracle::MarginalOracle* shared_oracle, bool force_uniform_fallback) {
  SamplerReport report;
  report.steps = params.T;
  report.seed = rng.seed();

  std::vector<uint32_t> m_vars = marking.marked_vars();
  PartialAssignment x(f.num_vars());
  for (uint32_t v : m_vars) x.set(v, bias.draw(v, rng));
  if (m_vars.empty()) return {x, report};

  std::optional<oracle::MarginalOracle> local_oracle;
  oracle::MarginalOracle* orc = shared_oracle;
  if (mode == MarginalMode::kOracle && !orc) {
    local_oracle.emplace(f, bias);
    orc = &*local_oracle;
  }

  std::vector<uint32_t> target(1);
  for (uint64_t t = 0; t < params.T; ++t) {
    uint32_t v = m_vars[rng.below(m_vars.size())];
    x.unset(v);
    bool bit;
    if (mode == MarginalMode::kOracle) {
      double p0 = orc->prob_zero(v, x);
      bit = !(rng.next_real() <= p0);
    } else {
      target[0] = v;
      SubroutineResult r = sample_subroutine(f, params.delta, x, target, bias,
                                             params, rng,
                                             force_uniform_fallback);
      if (r.fallback) {
        if (r.kind == FallbackKind::kTooLarge)
          ++report.fallback_toolarge_count;
        else
          ++report.fallback_rejection_count;
      }
      bit = r.values[0].second;
    }
    x.set(v, bit);
  }
  return {x, report};
}

FullSampleResult full_sample(const CnfFormula& f, double eps, uint64_t seed,
                             const SampleOptions& opts) {
  FullSampleResult out;
  if (opts.params) {
    out.params = *opts.params;
  } else {
    if (!f.uniform() || f.num_clauses() == 0)
      fail(ErrorCode::kRegime,
           "strict mode requires a k-uniform formula with at least one clause");
    out.params = derive_params(f.num_vars(), f.width_max(),
                               std::max(f.max_degree(), 1u), eps, opts.xi_hint);
  }

  RandomSource root(seed, 0);
  out.report.seed = seed;
  out.report.steps = out.params.T;

  const Marking* marking = opts.fixed_marking;
  if (!marking) {
    MarkResult mr =
        mark_variables(f, out.params, eps / 4.0, root, opts.never_mark);
    out.report.mark_stats = mr.stats;
    if (!mr.marking) {
      // failed marking: emit an arbitrary (bias-distributed) assignment,
      // charged to the epsilon/4 budget
      out.report.marking_failed = true;
      RandomSource chain = root.fork(kStreamChain, 0);
      out.assignment = PartialAssignment(f.num_vars());
      for (uint32_t v = 0; v < f.num_vars(); ++v)
        out.assignment.set(v, opts.bias.draw(v, chain));
      return out;
    }
    out.marking = std::move(*mr.marking);
    marking = &out.marking;
  } else {
    out.marking = *marking;
  }

  RandomSource chain = root.fork(kStreamChain, 0);
  auto [x_marked, chain_report] =
      glauber_run(f, *marking, out.params, opts.bias, chain,
                  opts.marginal_mode, opts.shared_oracle,
                  opts.force_uniform_fallback);
  out.report.fallback_toolarge_count = chain_report.fallback_toolarge_count;
  out.report.fallback_rejection_count = chain_report.fallback_rejection_count;

  std::vector<uint32_t> unmarked;
  for (uint32_t v = 0; v < f.num_vars(); ++v)
    if (!x_marked.assigned(v)) unmarked.push_back(v);

  out.assignment = x_marked;
  if (!unmarked.empty()) {
    SubroutineResult r =
        sample_subroutine(f, out.params.delta, x_marked, unmarked, opts.bias,
                          out.params, chain, opts.force_uniform_fallback);
    if (r.fallback) {
      if (r.kind == FallbackKind::kTooLarge)
        ++out.report.fallback_toolarge_count;
      else
        ++out.report.fallback_rejection_count;
    }
    for (auto [v, bit] : r.values) out.assignment.set(v, bit);
  }
  return out;
}

}  // namespace ksat
