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

#include "ksat/coupling.hpp"

#include <algorithm>
#include <cmath>

namespace ksat {

CouplingParams CouplingParams::make(uint32_t k, uint32_t d, uint32_t k_beta,
                                    uint32_t k_gamma) {
  if (k_gamma < 1 || k_gamma >= k_beta)
    fail(ErrorCode::kInvalidArgument, "k_gamma must lie in [1, k_beta)");
  CouplingParams cp;
  cp.k_gamma = k_gamma;
  double kd = std::max(k, 1u), dd = std::max(d, 1u);
  cp.s = 36.0 * dd * dd * dd * dd * kd * kd * kd * kd * kd;
  cp.p_low = 0.5 - 1.0 / cp.s;
  cp.p_up = 0.5 + 1.0 / cp.s;
  cp.in_regime =
      std::pow(2.0, static_cast<double>(k_beta) - k_gamma) >=
          2.0 * std::exp(1.0) * dd * cp.s &&
      std::pow(2.0, static_cast<double>(k_gamma)) >=
          36.0 * dd * dd * dd * dd * kd * kd * kd * kd;
  return cp;
}

CouplingParams CouplingParams::from_regime(const RegimeParams& p) {
  return make(p.k, p.d, p.k_beta, p.k_gamma);
}

std::pair<uint64_t, uint64_t> maximal_coupling_draw(
    const oracle::ExactDistribution& p, const oracle::ExactDistribution& q,
    RandomSource& rng) {
  if (p.vars != q.vars)
    fail(ErrorCode::kInvalidArgument, "maximal coupling: mismatched supports");
  const size_t atoms = p.probs.size();
  double overlap = 0;
  for (size_t a = 0; a < atoms; ++a)
    overlap += std::min(p.probs[a], q.probs[a]);

  double u = rng.next_real();
  double u2 = rng.next_real();
  if (u <= overlap && overlap > 0) {
    double target = u2 * overlap, acc = 0;
    for (size_t a = 0; a < atoms; ++a) {
      acc += std::min(p.probs[a], q.probs[a]);
      if (acc >= target) return {a, a};
    }
    return {atoms - 1, atoms - 1};
  }
  double residual = 1.0 - overlap;
  double target = u2 * residual;
  uint64_t xa = atoms - 1, ya = atoms - 1;
  double acc = 0;
  for (size_t a = 0; a < atoms; ++a) {
    acc += p.probs[a] - std::min(p.probs[a], q.probs[a]);
    if (acc >= target) {
      xa = a;
      break;
    }
  }
  acc = 0;
  for (size_t a = 0; a < atoms; ++a) {
    acc += q.probs[a] - std::min(p.probs[a], q.probs[a]);
    if (acc >= target) {
      ya = a;
      break;
    }
  }
  return {xa, ya};
}

namespace {

struct LoopState {
  std::vector<bool> in_v1;
  std::vector<bool> in_vset;
  std::vector<bool> in_s;
  std::vector<bool> alive;
  std::vector<uint32_t> vset_order;
  // decided-by-the-loop values; for Cv the conditioning assignments also
  // carry the fixed context
  PartialAssignment x_cond;
  PartialAssignment y_cond;
};

bool satisfied_by_s(const Clause& c, const LoopState& st,
                    const PartialAssignment& vals) {
  for (const Literal& l : c.literals)
    if (st.in_s[l.var] && vals.value(l.var) == l.positive) return true;
  return false;
}

// Shared BFS loop of the two coupling procedures; the backends differ only
// through the conditioning already present in x_cond / y_cond.
CouplingTrace run_loop(const CnfFormula& f, const Marking& marking,
                       uint32_t v0, const CouplingParams& cp,
                       RandomSource& rng, oracle::MarginalOracle& backend,
                       LoopState& st) {
  const uint32_t n = f.num_vars();
  st.in_v1.assign(n, false);
  st.in_vset.assign(n, false);
  st.in_s.assign(n, false);
  st.alive.assign(f.num_clauses(), true);

  CouplingTrace trace;
  trace.in_regime = cp.in_regime;
  st.in_v1[v0] = true;
  st.in_vset[v0] = true;
  st.vset_order.push_back(v0);
  st.x_cond.set(v0, false);
  st.y_cond.set(v0, true);

  for (;;) {
    // first hyperedge meeting V1 with an undecided variable outside V1
    uint32_t pick_clause = UINT32_MAX, pick_var = UINT32_MAX;
    for (uint32_t cid = 0; cid < f.num_clauses() && pick_clause == UINT32_MAX;
         ++cid) {
      if (!st.alive[cid]) continue;
      bool meets_v1 = false;
      uint32_t candidate = UINT32_MAX;
      for (const Literal& l : f.clauses()[cid].literals) {
        if (st.in_v1[l.var]) meets_v1 = true;
        if (!st.in_v1[l.var] && !st.in_vset[l.var])
          candidate = std::min(candidate, l.var);
      }
      if (meets_v1 && candidate != UINT32_MAX) {
        pick_clause = cid;
        pick_var = candidate;
      }
    }
    if (pick_clause == UINT32_MAX) break;

    const uint32_t u = pick_var;
    double r = rng.next_real();
    double px, py;
    if (st.x_cond.assigned(u)) {
      // u carries a context value (u in Lambda): the conditional is a point
      // mass and the draw is vacuous
      px = st.x_cond.value(u) ? 0.0 : 1.0;
      py = st.y_cond.value(u) ? 0.0 : 1.0;
    } else {
      px = backend.prob_zero(u, st.x_cond);
      py = backend.prob_zero(u, st.y_cond);
      st.x_cond.set(u, !(r <= px));
      st.y_cond.set(u, !(r <= py));
    }
    st.in_vset[u] = true;
    st.vset_order.push_back(u);
    trace.steps.push_back(CouplingStep{u, r, px, py, marking.marked[u]});

    if (cp.p_low < r && r <= cp.p_up) st.in_v1[u] = true;
    if (!marking.marked[u] && (r <= cp.p_low || r > cp.p_up)) st.in_s[u] = true;

    for (uint32_t cid = 0; cid < f.num_clauses(); ++cid) {
      if (!st.alive[cid]) continue;
      const Clause& c = f.clauses()[cid];
      if (satisfied_by_s(c, st, st.x_cond) && satisfied_by_s(c, st, st.y_cond))
        st.alive[cid] = false;
    }
    for (uint32_t cid = 0; cid < f.num_clauses(); ++cid) {
      if (!st.alive[cid]) continue;
      uint32_t unmarked_set = 0;
      for (const Literal& l : f.clauses()[cid].literals)
        if (st.in_vset[l.var] && !marking.marked[l.var]) ++unmarked_set;
      if (unmarked_set == cp.k_gamma) {
        for (const Literal& l : f.clauses()[cid].literals)
          if (!st.in_vset[l.var]) st.in_v1[l.var] = true;
      }
    }
  }

  for (uint32_t v = 0; v < n; ++v) {
    if (st.in_v1[v]) trace.v1.push_back(v);
    if (st.in_vset[v]) trace.vset.push_back(v);
    if (st.in_s[v]) trace.s_set.push_back(v);
  }
  for (uint32_t cid = 0; cid < f.num_clauses(); ++cid)
    if (st.alive[cid]) trace.alive_clauses.push_back(cid);
  trace.x = PartialAssignment(n);
  trace.y = PartialAssignment(n);
  for (uint32_t v : st.vset_order) {
    trace.x.set(v, st.x_cond.value(v));
    trace.y.set(v, st.y_cond.value(v));
  }
  return trace;
}

void check_inputs(const CnfFormula& f, const Marking& marking, uint32_t v0) {
  if (v0 >= f.num_vars())
    fail(ErrorCode::kInvalidArgument, "v0 out of range");
  if (marking.marked.size() != f.num_vars())
    fail(ErrorCode::kInvalidArgument, "marking does not match the formula");
  if (!marking.marked[v0])
    fail(ErrorCode::kInvalidArgument, "v0 must be marked");
}

}  // namespace

CouplingTrace run_coupling_C(const CnfFormula& f, const Marking& marking,
                             uint32_t v0, const CouplingParams& cp,
                             RandomSource& rng,
                             oracle::MarginalOracle& backend) {
  check_inputs(f, marking, v0);
  LoopState st;
  st.x_cond = PartialAssignment(f.num_vars());
  st.y_cond = PartialAssignment(f.num_vars());
  return run_loop(f, marking, v0, cp, rng, backend, st);
}

CvResult run_coupling_Cv(const CnfFormula& f, const Marking& marking,
                         uint32_t v0, uint32_t v,
                         const PartialAssignment& context,
                         const CouplingParams& cp, RandomSource& rng,
                         oracle::MarginalOracle& backend) {
  check_inputs(f, marking, v0);
  if (v == v0 || v >= f.num_vars() || !marking.marked[v])
    fail(ErrorCode::kInvalidArgument, "v must be a marked variable != v0");

  LoopState st;
  st.x_cond = PartialAssignment(f.num_vars());
  st.y_cond = PartialAssignment(f.num_vars());
  // nu conditions on the context values of Lambda = M \ {v0, v}
  for (uint32_t w = 0; w < f.num_vars(); ++w) {
    if (w == v0 || w == v || !marking.marked[w]) continue;
    if (!context.assigned(w))
      fail(ErrorCode::kInvalidArgument,
           "context must assign every marked variable other than v0 and v");
    st.x_cond.set(w, context.value(w));
    st.y_cond.set(w, context.value(w));
  }

  CvResult result;
  result.trace = run_loop(f, marking, v0, cp, rng, backend, st);

  // extension one: V2 \ Vset given the Vset values
  auto extend = [&](bool v1_side) {
    std::vector<uint32_t> targets;
    for (uint32_t w = 0; w < f.num_vars(); ++w) {
      if (st.x_cond.assigned(w)) continue;
      if (st.in_v1[w] == v1_side) targets.push_back(w);
    }
    if (targets.empty()) return;
    auto px = backend.joint(st.x_cond, targets);
    auto py = backend.joint(st.y_cond, targets);
    auto [xa, ya] = maximal_coupling_draw(px, py, rng);
    for (size_t i = 0; i < targets.size(); ++i) {
      st.x_cond.set(targets[i], (xa >> i) & 1);
      st.y_cond.set(targets[i], (ya >> i) & 1);
    }
  };
  extend(false);  // V2 \ Vset
  extend(true);   // V1 \ Vset

  result.x_full = st.x_cond;
  result.y_full = st.y_cond;
  return result;
}

PartialAssignment draw_context(const CnfFormula& f, const Marking& marking,
                               uint32_t v0, uint32_t v, RandomSource& rng,
                               oracle::MarginalOracle& backend) {
  constexpr int kTries = 64;
  for (int attempt = 0; attempt < kTries; ++attempt) {
    PartialAssignment ctx(f.num_vars());
    bool ok = true;
    for (uint32_t w = 0; w < f.num_vars() && ok; ++w) {
      if (w == v0 || w == v || !marking.marked[w]) continue;
      double p0 = backend.prob_zero(w, ctx);
      ctx.set(w, !(rng.next_real() <= p0));
    }
    // nu must admit both settings of v0
    PartialAssignment probe = ctx;
    probe.set(v0, false);
    try {
      (void)backend.prob_zero(v, probe);
      probe.set(v0, true);
      (void)backend.prob_zero(v, probe);
      return ctx;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kZeroMass) throw;
      ok = false;
    }
  }
  fail(ErrorCode::kInvalidArgument,
       "no context found with positive mass for both settings of v0");
}

MeanV1 estimate_mean_V1(const CnfFormula& f, const Marking& marking,
                        uint32_t v0, const CouplingParams& cp, uint64_t trials,
                        uint64_t seed, oracle::MarginalOracle& backend) {
  if (trials == 0) fail(ErrorCode::kInvalidArgument, "trials must be >= 1");
  RandomSource root(seed, 0);
  double sum = 0, sumsq = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    RandomSource rng = root.fork(kStreamCoupling, t);
    CouplingTrace trace = run_coupling_C(f, marking, v0, cp, rng, backend);
    double size = static_cast<double>(trace.v1.size());
    sum += size;
    sumsq += size * size;
  }
  MeanV1 out;
  out.trials = trials;
  out.mean = sum / static_cast<double>(trials);
  double var = sumsq / static_cast<double>(trials) - out.mean * out.mean;
  out.stderr_ = trials > 1 ? std::sqrt(std::max(0.0, var) /
                                       static_cast<double>(trials - 1))
                           : 0.0;
  return out;
}

}  // namespace ksat
