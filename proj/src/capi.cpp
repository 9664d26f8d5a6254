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

#include "ksat.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <string>

#include <json.hpp>

#include "ksat/coupling.hpp"
#include "ksat/counter.hpp"
#include "ksat/error.hpp"
#include "ksat/formula.hpp"
#include "ksat/marking.hpp"
#include "ksat/oracle.hpp"
#include "ksat/regime.hpp"
#include "ksat/sampler.hpp"
#include "ksat/verify.hpp"

struct ksat_formula {
  ksat::CnfFormula impl;
};

namespace {

thread_local std::string g_last_error;

ksat_status to_status(ksat::ErrorCode code) {
  switch (code) {
    case ksat::ErrorCode::kInvalidArgument:
      return KSAT_ERROR_INVALID_ARGUMENT;
    case ksat::ErrorCode::kParse:
      return KSAT_ERROR_PARSE;
    case ksat::ErrorCode::kRegime:
      return KSAT_ERROR_REGIME;
    case ksat::ErrorCode::kOracleCap:
      return KSAT_ERROR_ORACLE_CAP;
    case ksat::ErrorCode::kInfeasible:
      return KSAT_ERROR_INFEASIBLE;
    case ksat::ErrorCode::kZeroMass:
      return KSAT_ERROR_ZERO_MASS;
  }
  return KSAT_ERROR_INVALID_ARGUMENT;
}

template <typename Fn>
ksat_status guarded(Fn&& fn) {
  try {
    fn();
    return KSAT_OK;
  } catch (const ksat::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KSAT_ERROR_INVALID_ARGUMENT;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ksat_params to_c(const ksat::RegimeParams& p) {
  ksat_params out{};
  out.mode = p.mode == ksat::ParamMode::kStrict ? 0 : 1;
  out.n = p.n;
  out.k = p.k;
  out.d = p.d;
  out.epsilon = p.epsilon;
  out.xi = p.xi;
  out.k_alpha = p.k_alpha;
  out.k_beta = p.k_beta;
  out.eta = p.eta;
  out.T_steps = p.T;
  out.delta = p.delta;
  out.R_trials = p.R;
  out.zeta = p.zeta;
  out.s = p.s;
  out.k_gamma = p.k_gamma;
  return out;
}

ksat::RegimeParams from_c(const ksat_params& p) {
  ksat::RegimeParams out;
  out.mode = p.mode == 0 ? ksat::ParamMode::kStrict : ksat::ParamMode::kManual;
  out.n = p.n;
  out.k = p.k;
  out.d = p.d;
  out.epsilon = p.epsilon;
  out.xi = p.xi;
  out.k_alpha = p.k_alpha;
  out.k_beta = p.k_beta;
  out.eta = p.eta;
  out.T = p.T_steps;
  out.delta = p.delta;
  out.R = p.R_trials;
  out.zeta = p.zeta;
  out.s = p.s;
  out.k_gamma = p.k_gamma;
  return out;
}

ksat::Marking marking_from_list(const ksat::CnfFormula& f,
                                const uint32_t* marked, size_t n_marked) {
  ksat::Marking m;
  m.marked.assign(f.num_vars(), false);
  for (size_t i = 0; i < n_marked; ++i) {
    if (marked[i] >= f.num_vars())
      ksat::fail(ksat::ErrorCode::kInvalidArgument,
                 "marked variable out of range");
    m.marked[marked[i]] = true;
  }
  m.per_clause_marked.assign(f.num_clauses(), 0);
  for (uint32_t cid = 0; cid < f.num_clauses(); ++cid)
    for (const ksat::Literal& l : f.clauses()[cid].literals)
      if (m.marked[l.var]) ++m.per_clause_marked[cid];
  return m;
}

// effective Condition-3.1 beta of an explicit marking: the smallest number
// of unmarked variables any clause keeps
uint32_t effective_k_beta(const ksat::CnfFormula& f, const ksat::Marking& m,
                          uint32_t k_gamma) {
  uint32_t beta = UINT32_MAX;
  for (uint32_t cid = 0; cid < f.num_clauses(); ++cid) {
    uint32_t w = static_cast<uint32_t>(f.clauses()[cid].literals.size());
    beta = std::min(beta, w - m.per_clause_marked[cid]);
  }
  if (beta == UINT32_MAX) beta = k_gamma + 1;  // clause-free formula
  return beta;
}

// emitted variable ids are 1-based, matching the DIMACS convention
std::vector<uint32_t> one_based(const std::vector<uint32_t>& vars) {
  std::vector<uint32_t> out;
  out.reserve(vars.size());
  for (uint32_t v : vars) out.push_back(v + 1);
  return out;
}

nlohmann::ordered_json trace_to_json(const ksat::CouplingTrace& t) {
  nlohmann::ordered_json j;
  j["v1"] = one_based(t.v1);
  j["vset"] = one_based(t.vset);
  j["s_set"] = one_based(t.s_set);
  j["alive_clauses"] = t.alive_clauses;
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const ksat::CouplingStep& s : t.steps) {
    steps.push_back({{"var", s.var + 1},
                     {"r", s.r},
                     {"p_x", s.p_x},
                     {"p_y", s.p_y},
                     {"marked", s.marked}});
  }
  j["steps"] = steps;
  nlohmann::ordered_json xs = nlohmann::ordered_json::array();
  nlohmann::ordered_json ys = nlohmann::ordered_json::array();
  for (uint32_t v : t.vset) {
    xs.push_back({{"var", v + 1}, {"value", t.x.value(v)}});
    ys.push_back({{"var", v + 1}, {"value", t.y.value(v)}});
  }
  j["x"] = xs;
  j["y"] = ys;
  j["in_regime"] = t.in_regime;
  return j;
}

}  // namespace

extern "C" {

const char* ksat_version(void) { return "0.1.0"; }

const char* ksat_status_name(ksat_status status) {
  switch (status) {
    case KSAT_OK:
      return "ok";
    case KSAT_ERROR_INVALID_ARGUMENT:
      return "invalid_argument";
    case KSAT_ERROR_PARSE:
      return "parse_error";
    case KSAT_ERROR_REGIME:
      return "regime_violation";
    case KSAT_ERROR_ORACLE_CAP:
      return "oracle_cap_exceeded";
    case KSAT_ERROR_INFEASIBLE:
      return "infeasible";
    case KSAT_ERROR_ZERO_MASS:
      return "zero_mass";
  }
  return "unknown";
}

const char* ksat_last_error(void) { return g_last_error.c_str(); }

ksat_status ksat_formula_parse(const char* dimacs, size_t len,
                               ksat_formula** out, char** warnings_out) {
  return guarded([&] {
    if (!dimacs || !out)
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    ksat::ParseResult res = ksat::parse_dimacs(std::string_view(dimacs, len));
    *out = new ksat_formula{std::move(res.formula)};
    if (warnings_out) {
      std::string joined;
      for (const std::string& w : res.warnings) {
        if (!joined.empty()) joined += '\n';
        joined += w;
      }
      *warnings_out = joined.empty() ? nullptr : dup_string(joined);
    }
  });
}

ksat_status ksat_formula_generate(uint32_t n, uint32_t m, uint32_t k,
                                  uint32_t d_cap, uint64_t seed,
                                  ksat_formula** out) {
  return guarded([&] {
    if (!out) ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    ksat::RandomSource rng(seed, ksat::kStreamGenerate);
    *out = new ksat_formula{ksat::generate_random(n, m, k, d_cap, rng)};
  });
}

void ksat_formula_free(ksat_formula* f) { delete f; }

uint32_t ksat_formula_num_vars(const ksat_formula* f) {
  return f->impl.num_vars();
}
uint32_t ksat_formula_num_clauses(const ksat_formula* f) {
  return f->impl.num_clauses();
}
uint32_t ksat_formula_width_min(const ksat_formula* f) {
  return f->impl.width_min();
}
uint32_t ksat_formula_width_max(const ksat_formula* f) {
  return f->impl.width_max();
}
uint32_t ksat_formula_max_degree(const ksat_formula* f) {
  return f->impl.max_degree();
}

ksat_status ksat_formula_to_dimacs(const ksat_formula* f, char** out) {
  return guarded([&] {
    if (!f || !out)
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    *out = dup_string(ksat::emit_dimacs(f->impl));
  });
}

void ksat_string_free(char* s) { delete[] s; }

int ksat_regime_holds(uint32_t k, uint32_t d, double xi) {
  try {
    return ksat::regime_holds(k, d, xi) ? 1 : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

ksat_status ksat_derive_params(uint64_t n, uint32_t k, uint32_t d,
                               double epsilon, double xi, ksat_params* out) {
  return guarded([&] {
    if (!out) ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    *out = to_c(ksat::derive_params(n, k, d, epsilon, xi));
  });
}

ksat_status ksat_manual_params(const ksat_formula* f, double epsilon,
                               double xi, const ksat_manual_overrides* ov,
                               ksat_params* out) {
  return guarded([&] {
    if (!f || !ov || !out)
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    ksat::ManualOverrides mo;
    mo.k_alpha = ov->k_alpha;
    mo.k_beta = ov->k_beta;
    if (ov->set_mask & KSAT_OVERRIDE_ETA) mo.eta = ov->eta;
    if (ov->set_mask & KSAT_OVERRIDE_T) mo.T = ov->T_steps;
    if (ov->set_mask & KSAT_OVERRIDE_R) mo.R = ov->R_trials;
    if (ov->set_mask & KSAT_OVERRIDE_DELTA) mo.delta = ov->delta;
    *out = to_c(ksat::manual_params(
        f->impl.num_vars(), f->impl.width_min(),
        std::max(f->impl.max_degree(), 1u), epsilon, xi, mo));
  });
}

ksat_status ksat_mark(const ksat_formula* f, const ksat_params* params,
                      double delta, uint64_t seed, uint32_t threads,
                      uint32_t* marked_out, uint32_t* n_marked,
                      ksat_mark_report* report) {
  return guarded([&] {
    if (!f || !params || !marked_out || !n_marked)
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    ksat::RandomSource rng(seed, 0);
    ksat::MarkResult mr = ksat::mark_variables(f->impl, from_c(*params), delta,
                                               rng, {}, std::max(threads, 1u));
    if (report) {
      report->attempts_used = mr.stats.attempts_used;
      report->total_resamples =
          std::accumulate(mr.stats.resamples_per_attempt.begin(),
                          mr.stats.resamples_per_attempt.end(), uint64_t{0});
      report->failed = mr.marking ? 0 : 1;
    }
    *n_marked = 0;
    if (mr.marking) {
      std::vector<uint32_t> vars = mr.marking->marked_vars();
      for (size_t i = 0; i < vars.size(); ++i) marked_out[i] = vars[i];
      *n_marked = static_cast<uint32_t>(vars.size());
    }
  });
}

ksat_status ksat_sample(const ksat_formula* f, double epsilon, double xi,
                        uint64_t seed, const ksat_params* params,
                        int oracle_marginals, uint8_t* assignment_out,
                        ksat_sample_report* report) {
  return guarded([&] {
    if (!f || !assignment_out)
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    ksat::SampleOptions opts;
    opts.xi_hint = xi;
    if (params) opts.params = from_c(*params);
    if (oracle_marginals) opts.marginal_mode = ksat::MarginalMode::kOracle;
    ksat::FullSampleResult res = ksat::full_sample(f->impl, epsilon, seed, opts);
    for (uint32_t v = 0; v < f->impl.num_vars(); ++v)
      assignment_out[v] = res.assignment.value(v) ? 1 : 0;
    if (report) {
      report->steps = res.report.steps;
      report->seed = res.report.seed;
      report->fallback_toolarge = res.report.fallback_toolarge_count;
      report->fallback_rejection = res.report.fallback_rejection_count;
      report->marking_failed = res.report.marking_failed ? 1 : 0;
      report->mark_attempts = res.report.mark_stats.attempts_used;
    }
  });
}

ksat_status ksat_count(const ksat_formula* f, double epsilon, uint64_t seed,
                       const ksat_params* params, int oracle_sampler,
                       uint32_t reps, uint32_t threads,
                       ksat_count_result* out) {
  return guarded([&] {
    if (!f || !out)
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    ksat::CountOptions opts;
    if (params) opts.manual = from_c(*params);
    opts.oracle_sampler = oracle_sampler != 0;
    opts.reps = reps;
    opts.threads = threads;
    if (!params && !opts.oracle_sampler && f->impl.num_clauses() > 0) {
      // strict mode: the regime check applies to Phi', width k+1
      if (!f->impl.uniform())
        ksat::fail(ksat::ErrorCode::kRegime,
                   "strict mode requires a k-uniform formula");
      if (!ksat::regime_holds(f->impl.width_max() + 1,
                              std::max(f->impl.max_degree(), 1u), 0.0))
        ksat::fail(ksat::ErrorCode::kRegime,
                   "regime violated for the auxiliary formula width k+1");
    }
    ksat::CountEstimate est = ksat::approx_count(f->impl, epsilon, seed, opts);
    out->log2_estimate = est.log2_estimate;
    out->has_decimal = est.decimal_estimate.has_value() ? 1 : 0;
    out->decimal_estimate = est.decimal_estimate.value_or(0.0);
    out->ell = est.ell;
    out->m = est.m;
    out->fallback_toolarge = est.fallback_toolarge;
    out->fallback_rejection = est.fallback_rejection;
    out->marking_failures = est.marking_failures;
    out->seed = est.seed;
    out->has_params = est.params_used.has_value() ? 1 : 0;
    if (est.params_used) out->params_used = to_c(*est.params_used);
  });
}

ksat_status ksat_exact_count(const ksat_formula* f, uint64_t* out) {
  return guarded([&] {
    if (!f || !out)
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    *out = ksat::oracle::exact_count(f->impl);
  });
}

ksat_status ksat_exact_partition(const ksat_formula* f, double theta,
                                 double* out) {
  return guarded([&] {
    if (!f || !out)
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    *out = ksat::oracle::exact_partition(f->impl, theta);
  });
}

ksat_status ksat_exact_conditional(const ksat_formula* f, const int64_t* given,
                                   size_t n_given, const uint32_t* vars,
                                   size_t n_vars, int use_theta, double theta,
                                   double* probs_out) {
  return guarded([&] {
    if (!f || !probs_out || (n_given && !given) || (n_vars && !vars))
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    ksat::PartialAssignment x(f->impl.num_vars());
    for (size_t i = 0; i < n_given; ++i) {
      int64_t lit = given[i];
      uint64_t var = static_cast<uint64_t>(lit < 0 ? -lit : lit);
      if (lit == 0 || var > f->impl.num_vars())
        ksat::fail(ksat::ErrorCode::kInvalidArgument,
                   "literal out of range in the conditioning list");
      uint32_t v = static_cast<uint32_t>(var - 1);
      if (x.assigned(v) && x.value(v) != (lit > 0))
        ksat::fail(ksat::ErrorCode::kInvalidArgument,
                   "contradictory literals in the conditioning list");
      x.set(v, lit > 0);
    }
    std::vector<uint32_t> s(vars, vars + n_vars);
    auto dist = ksat::oracle::exact_conditional(
        f->impl, x, s,
        use_theta ? std::optional<double>(theta) : std::nullopt);
    for (size_t a = 0; a < dist.probs.size(); ++a) probs_out[a] = dist.probs[a];
  });
}

ksat_status ksat_couple_summary_run(const ksat_formula* f, uint32_t v0,
                                    uint32_t v, uint32_t k_gamma,
                                    const uint32_t* marked, size_t n_marked,
                                    uint64_t trials, uint64_t seed,
                                    ksat_couple_summary* out) {
  return guarded([&] {
    if (!f || !out)
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    ksat::Marking m;
    if (n_marked > 0) {
      m = marking_from_list(f->impl, marked, n_marked);
    } else {
      std::vector<uint32_t> def = {v0};
      if (v != UINT32_MAX) def.push_back(v);
      m = marking_from_list(f->impl, def.data(), def.size());
    }
    ksat::CouplingParams cp = ksat::CouplingParams::make(
        std::max(f->impl.width_max(), 1u), std::max(f->impl.max_degree(), 1u),
        effective_k_beta(f->impl, m, k_gamma), k_gamma);
    ksat::oracle::MarginalOracle backend(f->impl);

    ksat::RandomSource root(seed, 0);
    double sum = 0, sumsq = 0;
    uint64_t equal = 0;
    for (uint64_t t = 0; t < trials; ++t) {
      ksat::RandomSource rng_c = root.fork(ksat::kStreamCoupling, t);
      ksat::CouplingTrace tc =
          ksat::run_coupling_C(f->impl, m, v0, cp, rng_c, backend);
      double size = static_cast<double>(tc.v1.size());
      sum += size;
      sumsq += size * size;
      if (v == UINT32_MAX) {
        ++equal;
        continue;
      }
      ksat::RandomSource rng_cv = root.fork(ksat::kStreamCoupling, t);
      ksat::RandomSource rng_ctx = root.fork(ksat::kStreamContext, t);
      ksat::PartialAssignment ctx =
          ksat::draw_context(f->impl, m, v0, v, rng_ctx, backend);
      ksat::CvResult cv = ksat::run_coupling_Cv(f->impl, m, v0, v, ctx, cp,
                                                rng_cv, backend);
      if (cv.trace.v1 == tc.v1) ++equal;
    }
    out->trials = trials;
    out->mean_v1 = trials ? sum / static_cast<double>(trials) : 0.0;
    double var = trials ? sumsq / static_cast<double>(trials) -
                              out->mean_v1 * out->mean_v1
                        : 0.0;
    out->stderr_v1 =
        trials > 1
            ? std::sqrt(std::max(0.0, var) / static_cast<double>(trials - 1))
            : 0.0;
    out->v1_equal = equal;
    out->in_regime = cp.in_regime ? 1 : 0;
  });
}

ksat_status ksat_couple_trace_json(const ksat_formula* f, uint32_t v0,
                                   uint32_t v, uint32_t k_gamma,
                                   const uint32_t* marked, size_t n_marked,
                                   uint64_t seed, char** json_out) {
  return guarded([&] {
    if (!f || !json_out)
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    ksat::Marking m;
    if (n_marked > 0) {
      m = marking_from_list(f->impl, marked, n_marked);
    } else {
      std::vector<uint32_t> def = {v0};
      if (v != UINT32_MAX) def.push_back(v);
      m = marking_from_list(f->impl, def.data(), def.size());
    }
    ksat::CouplingParams cp = ksat::CouplingParams::make(
        std::max(f->impl.width_max(), 1u), std::max(f->impl.max_degree(), 1u),
        effective_k_beta(f->impl, m, k_gamma), k_gamma);
    ksat::oracle::MarginalOracle backend(f->impl);

    nlohmann::ordered_json j;
    j["v0"] = v0 + 1;
    j["k_gamma"] = k_gamma;
    j["seed"] = seed;
    j["marked"] = one_based(m.marked_vars());

    ksat::RandomSource root(seed, 0);
    ksat::RandomSource rng_c = root.fork(ksat::kStreamCoupling, 0);
    ksat::CouplingTrace tc =
        ksat::run_coupling_C(f->impl, m, v0, cp, rng_c, backend);
    j["c"] = trace_to_json(tc);

    if (v != UINT32_MAX) {
      j["v"] = v + 1;
      ksat::RandomSource rng_cv = root.fork(ksat::kStreamCoupling, 0);
      ksat::RandomSource rng_ctx = root.fork(ksat::kStreamContext, 0);
      ksat::PartialAssignment ctx =
          ksat::draw_context(f->impl, m, v0, v, rng_ctx, backend);
      ksat::CvResult cv =
          ksat::run_coupling_Cv(f->impl, m, v0, v, ctx, cp, rng_cv, backend);
      j["cv"] = trace_to_json(cv.trace);
      nlohmann::ordered_json ctxj = nlohmann::ordered_json::array();
      for (uint32_t w = 0; w < f->impl.num_vars(); ++w)
        if (ctx.assigned(w))
          ctxj.push_back({{"var", w + 1}, {"value", ctx.value(w)}});
      j["context"] = ctxj;
      std::string xbits, ybits;
      for (uint32_t w = 0; w < f->impl.num_vars(); ++w) {
        xbits += cv.x_full.value(w) ? '1' : '0';
        ybits += cv.y_full.value(w) ? '1' : '0';
      }
      j["cv_x_full"] = xbits;
      j["cv_y_full"] = ybits;
      j["v1_equal"] = tc.v1 == cv.trace.v1;
    }
    *json_out = dup_string(j.dump(2));
  });
}

ksat_status ksat_verify_run(const ksat_formula* f, uint64_t seed,
                            uint32_t samples, const char* only,
                            ksat_verify_check* checks, size_t cap,
                            size_t* n_out) {
  return guarded([&] {
    if (!checks || !n_out)
      ksat::fail(ksat::ErrorCode::kInvalidArgument, "null argument");
    ksat::VerifyOptions opts;
    opts.seed = seed;
    if (samples > 0) opts.samples = samples;
    if (only && *only) {
      std::string list(only);
      size_t start = 0;
      while (start <= list.size()) {
        size_t comma = list.find(',', start);
        std::string item = list.substr(
            start, comma == std::string::npos ? std::string::npos
                                              : comma - start);
        if (!item.empty()) opts.only.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    std::vector<ksat::VerifyCheck> results =
        f ? ksat::verify_formula(f->impl, opts) : ksat::verify_battery(opts);
    *n_out = results.size();
    for (size_t i = 0; i < results.size() && i < cap; ++i) {
      ksat_verify_check& c = checks[i];
      std::snprintf(c.name, sizeof(c.name), "%s", results[i].name.c_str());
      c.status = results[i].status == ksat::CheckStatus::kPass   ? 0
                 : results[i].status == ksat::CheckStatus::kFail ? 1
                                                                 : 2;
      c.value = results[i].value;
      c.threshold = results[i].threshold;
      std::snprintf(c.detail, sizeof(c.detail), "%s",
                    results[i].detail.c_str());
    }
  });
}

}  // extern "C"
