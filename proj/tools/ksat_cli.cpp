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

// Command-line front end. Talks to the library exclusively through the C
// API in ksat.h; one JSON document (or text rendering) per invocation on
// stdout, diagnostics on stderr. Variable ids on this surface are 1-based,
// matching DIMACS.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ksat.h"

using nlohmann::ordered_json;

namespace {

// exit codes: 0 ok, 1 usage, 2 regime violation, 3 oracle cap, 4 failed checks
int exit_code_for(ksat_status st) {
  switch (st) {
    case KSAT_OK:
      return 0;
    case KSAT_ERROR_REGIME:
      return 2;
    case KSAT_ERROR_ORACLE_CAP:
      return 3;
    default:
      return 1;
  }
}

[[noreturn]] void die(ksat_status st) {
  std::cerr << "error (" << ksat_status_name(st) << "): " << ksat_last_error()
            << "\n";
  std::exit(exit_code_for(st));
}

void check(ksat_status st) {
  if (st != KSAT_OK) die(st);
}

struct FormulaHandle {
  ksat_formula* ptr = nullptr;
  ~FormulaHandle() { ksat_formula_free(ptr); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    std::exit(1);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void load_formula(const std::string& path, FormulaHandle& fh) {
  std::string text = read_file(path);
  char* warnings = nullptr;
  check(ksat_formula_parse(text.data(), text.size(), &fh.ptr, &warnings));
  if (warnings) {
    std::cerr << "warning: " << warnings << "\n";
    ksat_string_free(warnings);
  }
}

ordered_json params_json(const ksat_params& p) {
  ordered_json j;
  j["mode"] = p.mode == 0 ? "strict" : "manual";
  j["n"] = p.n;
  j["k"] = p.k;
  j["d"] = p.d;
  j["epsilon"] = p.epsilon;
  j["xi"] = p.xi;
  j["k_alpha"] = p.k_alpha;
  j["k_beta"] = p.k_beta;
  j["eta"] = p.eta;
  j["T"] = p.T_steps;
  j["delta"] = p.delta;
  j["R"] = p.R_trials;
  j["zeta"] = p.zeta;
  j["s"] = p.s;
  j["k_gamma"] = p.k_gamma;
  return j;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<uint32_t> parse_id_list(const std::string& csv) {
  std::vector<uint32_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    long v = std::stol(item);
    if (v < 1) {
      std::cerr << "error: variable ids are 1-based\n";
      std::exit(1);
    }
    out.push_back(static_cast<uint32_t>(v - 1));
  }
  return out;
}

std::vector<int64_t> parse_lit_list(const std::string& csv) {
  std::vector<int64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoll(item));
  }
  return out;
}

struct ManualFlags {
  std::string mode = "strict";
  uint32_t k_alpha = 0;
  uint32_t k_beta = 0;
  double eta = -1;
  int64_t T = -1;
  int64_t R = -1;
  double delta = -1;
  double xi = 0;
};

void add_mode_flags(CLI::App* cmd, ManualFlags& mf) {
  cmd->add_option("--mode", mf.mode, "strict or manual")
      ->check(CLI::IsMember({"strict", "manual"}));
  cmd->add_option("--k-alpha", mf.k_alpha, "manual: marked-per-clause floor");
  cmd->add_option("--k-beta", mf.k_beta, "manual: unmarked-per-clause floor");
  cmd->add_option("--eta", mf.eta, "manual: rejection exponent");
  cmd->add_option("--T", mf.T, "manual: chain steps");
  cmd->add_option("--R", mf.R, "manual: rejection trials");
  cmd->add_option("--delta", mf.delta, "manual: per-call TV budget");
  cmd->add_option("--xi", mf.xi, "regime slack");
}

// strict mode returns nothing; manual mode builds params from the overrides
std::optional<ksat_params> resolve_params(const ksat_formula* f,
                                          const ManualFlags& mf, double eps) {
  if (mf.mode == "strict") {
    if (mf.k_alpha || mf.k_beta || mf.eta >= 0 || mf.T >= 0 || mf.R >= 0 ||
        mf.delta >= 0) {
      std::cerr << "error: strict mode forbids manual overrides\n";
      std::exit(1);
    }
    return std::nullopt;
  }
  if (mf.k_alpha == 0 || mf.k_beta == 0) {
    std::cerr << "error: manual mode requires --k-alpha and --k-beta\n";
    std::exit(1);
  }
  ksat_manual_overrides ov{};
  ov.k_alpha = mf.k_alpha;
  ov.k_beta = mf.k_beta;
  if (mf.eta >= 0) {
    ov.set_mask |= KSAT_OVERRIDE_ETA;
    ov.eta = mf.eta;
  }
  if (mf.T >= 0) {
    ov.set_mask |= KSAT_OVERRIDE_T;
    ov.T_steps = static_cast<uint64_t>(mf.T);
  }
  if (mf.R >= 0) {
    ov.set_mask |= KSAT_OVERRIDE_R;
    ov.R_trials = static_cast<uint64_t>(mf.R);
  }
  if (mf.delta >= 0) {
    ov.set_mask |= KSAT_OVERRIDE_DELTA;
    ov.delta = mf.delta;
  }
  ksat_params params{};
  check(ksat_manual_params(f, eps, mf.xi, &ov, &params));
  return params;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ksat: sampling and approximate counting of CNF solutions"};
  app.require_subcommand(1);

  std::string input, format = "json", csv;
  uint64_t seed = 0;
  double epsilon = 0.1;

  // generate
  auto* gen = app.add_subcommand("generate", "emit a random (k,d)-formula");
  uint32_t gn = 0, gm = 0, gk = 0, gd = 0;
  gen->add_option("--n", gn, "variables")->required();
  gen->add_option("--m", gm, "clauses")->required();
  gen->add_option("--k", gk, "clause width")->required();
  gen->add_option("--d-cap", gd, "max variable degree")->required();
  gen->add_option("--seed", seed, "seed")->required();
  gen->add_option("--format", format, "json or text");

  // mark
  auto* mark = app.add_subcommand("mark", "construct the marked-variable set");
  ManualFlags mark_mf;
  mark->add_option("--input", input, "DIMACS file")->required();
  mark->add_option("--epsilon", epsilon, "accuracy target");
  mark->add_option("--seed", seed, "seed")->required();
  uint32_t mark_threads = 1;
  mark->add_option("--parallel", mark_threads, "attempt worker threads");
  add_mode_flags(mark, mark_mf);

  // sample
  auto* sample = app.add_subcommand("sample", "draw a near-uniform solution");
  ManualFlags sample_mf;
  bool oracle_marginals = false;
  sample->add_option("--input", input, "DIMACS file")->required();
  sample->add_option("--epsilon", epsilon, "TV distance target");
  sample->add_option("--seed", seed, "seed")->required();
  sample->add_flag("--oracle-marginals", oracle_marginals,
                   "exact conditional marginals (desk scale)");
  sample->add_option("--format", format, "json or text");
  add_mode_flags(sample, sample_mf);

  // count
  auto* count = app.add_subcommand("count", "estimate the solution count");
  ManualFlags count_mf;
  bool oracle_sampler = false;
  uint32_t reps = 1, threads = 1;
  count->add_option("--input", input, "DIMACS file")->required();
  count->add_option("--epsilon", epsilon, "relative accuracy");
  count->add_option("--seed", seed, "seed")->required();
  count->add_flag("--oracle-sampler", oracle_sampler,
                  "exact per-rung draws (desk scale)");
  count->add_option("--reps", reps, "median of this many estimates");
  count->add_option("--parallel", threads, "replicate worker threads");
  add_mode_flags(count, count_mf);

  // exact
  auto* exact = app.add_subcommand("exact", "brute-force oracle queries");
  double theta = -1;
  std::string given_csv, vars_csv;
  exact->add_option("--input", input, "DIMACS file")->required();
  exact->add_option("--theta", theta, "Gibbs parameter (partition function)");
  exact->add_option("--given", given_csv,
                    "conditioning literals, e.g. 1,-3 (signed, 1-based)");
  exact->add_option("--vars", vars_csv, "target variables (1-based)");

  // verify
  auto* verify = app.add_subcommand("verify", "oracle-backed checks");
  uint32_t samples = 20000;
  std::string checks_csv;
  verify->add_option("--input", input, "DIMACS file (omit for the battery)");
  verify->add_option("--seed", seed, "seed");
  verify->add_option("--samples", samples, "samples per statistical check");
  verify->add_option("--checks", checks_csv, "comma list of check names");

  // couple
  auto* couple = app.add_subcommand("couple", "coupling-lab runs");
  uint32_t v0_cli = 0, v_cli = 0, k_gamma = 1;
  uint64_t trials = 1;
  std::string marked_csv;
  couple->add_option("--input", input, "DIMACS file")->required();
  couple->add_option("--v0", v0_cli, "initial disagreement variable (1-based)")
      ->required();
  couple->add_option("--v", v_cli, "target variable for C_v (1-based)");
  couple->add_option("--k-gamma", k_gamma, "adaptive-marking threshold");
  couple->add_option("--marked", marked_csv, "explicit marking (1-based ids)");
  couple->add_option("--trials", trials, "paired runs (1: emit the trace)");
  couple->add_option("--seed", seed, "seed")->required();

  CLI11_PARSE(app, argc, argv);

  if (format != "json" && format != "text") {
    std::cerr << "error: --format must be json or text\n";
    return 1;
  }

  if (gen->parsed()) {
    FormulaHandle fh;
    check(ksat_formula_generate(gn, gm, gk, gd, seed, &fh.ptr));
    char* dimacs = nullptr;
    check(ksat_formula_to_dimacs(fh.ptr, &dimacs));
    if (format == "text") {
      std::cout << dimacs;
    } else {
      ordered_json j;
      j["command"] = "generate";
      j["seed"] = seed;
      j["n"] = gn;
      j["m"] = gm;
      j["k"] = gk;
      j["d_cap"] = gd;
      j["max_degree"] = ksat_formula_max_degree(fh.ptr);
      j["dimacs"] = std::string(dimacs);
      emit(j);
    }
    ksat_string_free(dimacs);
    return 0;
  }

  if (mark->parsed()) {
    FormulaHandle fh;
    load_formula(input, fh);
    std::optional<ksat_params> mp = resolve_params(fh.ptr, mark_mf, epsilon);
    ksat_params params{};
    if (mp) {
      params = *mp;
    } else {
      check(ksat_derive_params(ksat_formula_num_vars(fh.ptr),
                               ksat_formula_width_max(fh.ptr),
                               ksat_formula_max_degree(fh.ptr), epsilon,
                               mark_mf.xi, &params));
    }
    std::vector<uint32_t> marked(ksat_formula_num_vars(fh.ptr));
    uint32_t n_marked = 0;
    ksat_mark_report rep{};
    check(ksat_mark(fh.ptr, &params, epsilon / 4.0, seed, mark_threads,
                    marked.data(), &n_marked, &rep));
    ordered_json j;
    j["command"] = "mark";
    j["seed"] = seed;
    j["epsilon"] = epsilon;
    j["params"] = params_json(params);
    std::vector<uint32_t> ids;
    for (uint32_t i = 0; i < n_marked; ++i) ids.push_back(marked[i] + 1);
    j["marked"] = ids;
    j["attempts"] = rep.attempts_used;
    j["resamples"] = rep.total_resamples;
    j["failed"] = rep.failed != 0;
    emit(j);
    return 0;
  }

  if (sample->parsed()) {
    FormulaHandle fh;
    load_formula(input, fh);
    std::optional<ksat_params> mp = resolve_params(fh.ptr, sample_mf, epsilon);
    uint32_t n = ksat_formula_num_vars(fh.ptr);
    std::vector<uint8_t> assignment(n);
    ksat_sample_report rep{};
    check(ksat_sample(fh.ptr, epsilon, sample_mf.xi, seed,
                      mp ? &*mp : nullptr, oracle_marginals ? 1 : 0,
                      assignment.data(), &rep));
    ksat_params echo{};
    if (mp) {
      echo = *mp;
    } else {
      check(ksat_derive_params(n, ksat_formula_width_max(fh.ptr),
                               ksat_formula_max_degree(fh.ptr), epsilon,
                               sample_mf.xi, &echo));
    }
    if (format == "text") {
      std::cout << "v";
      for (uint32_t v = 0; v < n; ++v)
        std::cout << " " << (assignment[v] ? "" : "-") << (v + 1);
      std::cout << " 0\n";
    } else {
      ordered_json j;
      j["command"] = "sample";
      j["seed"] = seed;
      j["epsilon"] = epsilon;
      j["params"] = params_json(echo);
      j["assignment"] = assignment;
      ordered_json r;
      r["steps"] = rep.steps;
      r["fallback_toolarge"] = rep.fallback_toolarge;
      r["fallback_rejection"] = rep.fallback_rejection;
      r["marking_failed"] = rep.marking_failed != 0;
      r["mark_attempts"] = rep.mark_attempts;
      j["report"] = r;
      emit(j);
    }
    return 0;
  }

  if (count->parsed()) {
    FormulaHandle fh;
    load_formula(input, fh);
    std::optional<ksat_params> mp = resolve_params(fh.ptr, count_mf, epsilon);
    ksat_count_result res{};
    check(ksat_count(fh.ptr, epsilon, seed, mp ? &*mp : nullptr,
                     oracle_sampler ? 1 : 0, reps, threads, &res));
    ordered_json j;
    j["command"] = "count";
    j["log2_estimate"] = res.log2_estimate;
    if (res.has_decimal) j["decimal_estimate"] = res.decimal_estimate;
    j["epsilon"] = epsilon;
    j["schedule"] = {{"ell", res.ell}, {"m", res.m}};
    if (res.has_params) {
      j["params"] = params_json(res.params_used);
    } else if (mp) {
      j["params"] = params_json(*mp);
    } else {
      j["params"] = {{"mode", oracle_sampler ? "oracle" : "strict"}};
    }
    j["fallback_stats"] = {{"toolarge", res.fallback_toolarge},
                           {"rejection", res.fallback_rejection},
                           {"marking_failures", res.marking_failures}};
    j["oracle_sampler"] = oracle_sampler;
    j["reps"] = reps;
    j["seed"] = seed;
    emit(j);
    return 0;
  }

  if (exact->parsed()) {
    FormulaHandle fh;
    load_formula(input, fh);
    ordered_json j;
    j["command"] = "exact";
    if (!vars_csv.empty() || !given_csv.empty()) {
      std::vector<uint32_t> vars = parse_id_list(vars_csv);
      std::vector<int64_t> given = parse_lit_list(given_csv);
      if (vars.empty()) {
        std::cerr << "error: --vars required with --given\n";
        return 1;
      }
      std::vector<double> probs(1ULL << vars.size());
      check(ksat_exact_conditional(fh.ptr, given.data(), given.size(),
                                   vars.data(), vars.size(), theta >= 0 ? 1 : 0,
                                   theta, probs.data()));
      std::vector<uint32_t> ids;
      for (uint32_t v : vars) ids.push_back(v + 1);
      std::sort(ids.begin(), ids.end());
      j["vars"] = ids;
      j["given"] = given;
      if (theta >= 0) j["theta"] = theta;
      j["probs"] = probs;
    } else if (theta >= 0) {
      double z = 0;
      check(ksat_exact_partition(fh.ptr, theta, &z));
      j["theta"] = theta;
      j["partition"] = z;
    } else {
      uint64_t z = 0;
      check(ksat_exact_count(fh.ptr, &z));
      j["count"] = z;
    }
    emit(j);
    return 0;
  }

  if (verify->parsed()) {
    FormulaHandle fh;
    if (!input.empty()) load_formula(input, fh);
    std::vector<ksat_verify_check> checks(32);
    size_t n_checks = 0;
    check(ksat_verify_run(fh.ptr, seed, samples,
                          checks_csv.empty() ? nullptr : checks_csv.c_str(),
                          checks.data(), checks.size(), &n_checks));
    ordered_json j;
    j["command"] = "verify";
    j["seed"] = seed;
    j["samples"] = samples;
    ordered_json arr = ordered_json::array();
    bool all_pass = true;
    for (size_t i = 0; i < n_checks && i < checks.size(); ++i) {
      const ksat_verify_check& c = checks[i];
      const char* st = c.status == 0 ? "pass" : c.status == 1 ? "fail" : "skipped";
      if (c.status == 1) all_pass = false;
      arr.push_back({{"name", c.name},
                     {"status", st},
                     {"value", c.value},
                     {"threshold", c.threshold},
                     {"detail", c.detail}});
    }
    j["checks"] = arr;
    j["all_pass"] = all_pass;
    emit(j);
    return all_pass ? 0 : 4;
  }

  if (couple->parsed()) {
    FormulaHandle fh;
    load_formula(input, fh);
    if (v0_cli < 1) {
      std::cerr << "error: --v0 is 1-based\n";
      return 1;
    }
    uint32_t v0 = v0_cli - 1;
    uint32_t v = v_cli >= 1 ? v_cli - 1 : UINT32_MAX;
    std::vector<uint32_t> marked = parse_id_list(marked_csv);
    if (trials <= 1) {
      char* json = nullptr;
      check(ksat_couple_trace_json(fh.ptr, v0, v, k_gamma, marked.data(),
                                   marked.size(), seed, &json));
      ordered_json j = ordered_json::parse(json);
      ksat_string_free(json);
      ordered_json out;
      out["command"] = "couple";
      out["trace"] = j;
      emit(out);
    } else {
      ksat_couple_summary sum{};
      check(ksat_couple_summary_run(fh.ptr, v0, v, k_gamma, marked.data(),
                                    marked.size(), trials, seed, &sum));
      ordered_json j;
      j["command"] = "couple";
      j["seed"] = seed;
      j["trials"] = sum.trials;
      j["mean_v1"] = sum.mean_v1;
      j["stderr_v1"] = sum.stderr_v1;
      j["v1_equal"] = sum.v1_equal;
      j["in_regime"] = sum.in_regime != 0;
      emit(j);
    }
    return 0;
  }

  return 1;
}
