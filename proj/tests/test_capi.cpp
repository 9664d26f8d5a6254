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

// Exercises the shared-library surface exactly the way an external client
// (or the CLI) would: through ksat.h only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "ksat.h"

namespace {

struct Handle {
  ksat_formula* f = nullptr;
  ~Handle() { ksat_formula_free(f); }
};

void parse_ok(const std::string& text, Handle& h) {
  char* warn = nullptr;
  REQUIRE(ksat_formula_parse(text.data(), text.size(), &h.f, &warn) == KSAT_OK);
  if (warn) ksat_string_free(warn);
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(ksat_version()) == "0.1.0");
  CHECK(std::string(ksat_status_name(KSAT_OK)) == "ok");
  CHECK(std::string(ksat_status_name(KSAT_ERROR_REGIME)) ==
        "regime_violation");
}

TEST_CASE("parse, inspect, round-trip") {
  Handle h;
  parse_ok("p cnf 3 2\n1 -2 0\n2 3 0\n", h);
  CHECK(ksat_formula_num_vars(h.f) == 3);
  CHECK(ksat_formula_num_clauses(h.f) == 2);
  CHECK(ksat_formula_width_min(h.f) == 2);
  CHECK(ksat_formula_width_max(h.f) == 2);
  CHECK(ksat_formula_max_degree(h.f) == 2);

  char* dimacs = nullptr;
  REQUIRE(ksat_formula_to_dimacs(h.f, &dimacs) == KSAT_OK);
  CHECK(std::string(dimacs) == "p cnf 3 2\n1 -2 0\n2 3 0\n");
  ksat_string_free(dimacs);
}

TEST_CASE("parse errors surface with messages") {
  ksat_formula* f = nullptr;
  std::string bad = "p cnf 2 1\n1 1 0\n";
  CHECK(ksat_formula_parse(bad.data(), bad.size(), &f, nullptr) ==
        KSAT_ERROR_PARSE);
  CHECK(std::strlen(ksat_last_error()) > 0);

  std::string mismatch = "p cnf 2 2\n1 2 0\n";
  char* warn = nullptr;
  REQUIRE(ksat_formula_parse(mismatch.data(), mismatch.size(), &f, &warn) ==
          KSAT_OK);
  REQUIRE(warn != nullptr);
  CHECK(std::string(warn).find("declares 2") != std::string::npos);
  ksat_string_free(warn);
  ksat_formula_free(f);
}

TEST_CASE("generation is reproducible through the api") {
  ksat_formula* a = nullptr;
  ksat_formula* b = nullptr;
  REQUIRE(ksat_formula_generate(12, 5, 3, 2, 77, &a) == KSAT_OK);
  REQUIRE(ksat_formula_generate(12, 5, 3, 2, 77, &b) == KSAT_OK);
  char* da = nullptr;
  char* db = nullptr;
  ksat_formula_to_dimacs(a, &da);
  ksat_formula_to_dimacs(b, &db);
  CHECK(std::string(da) == std::string(db));
  ksat_string_free(da);
  ksat_string_free(db);
  ksat_formula_free(a);
  ksat_formula_free(b);

  ksat_formula* c = nullptr;
  CHECK(ksat_formula_generate(4, 3, 4, 2, 1, &c) == KSAT_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("params derivation and regime checks") {
  CHECK(ksat_regime_holds(256, 1, 0) == 1);
  CHECK(ksat_regime_holds(60, 1, 0) == 0);

  ksat_params p{};
  REQUIRE(ksat_derive_params(100, 240, 1, 0.5, 0, &p) == KSAT_OK);
  CHECK(p.k_alpha == 27);
  CHECK(p.k_beta == 122);
  CHECK(p.mode == 0);

  CHECK(ksat_derive_params(100, 60, 1, 0.5, 0, &p) == KSAT_ERROR_REGIME);
}

TEST_CASE("manual params through a formula handle") {
  Handle h;
  parse_ok("p cnf 4 1\n1 2 3 4 0\n", h);
  ksat_manual_overrides ov{};
  ov.k_alpha = 1;
  ov.k_beta = 2;
  ov.set_mask = KSAT_OVERRIDE_T;
  ov.T_steps = 123;
  ksat_params p{};
  REQUIRE(ksat_manual_params(h.f, 0.25, 0, &ov, &p) == KSAT_OK);
  CHECK(p.mode == 1);
  CHECK(p.T_steps == 123);

  ov.k_alpha = 3;
  CHECK(ksat_manual_params(h.f, 0.25, 0, &ov, &p) ==
        KSAT_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("mark, sample and count through the api") {
  Handle h;
  parse_ok("p cnf 6 2\n1 2 3 0\n4 5 6 0\n", h);
  ksat_manual_overrides ov{};
  ov.k_alpha = 1;
  ov.k_beta = 1;
  ov.set_mask = KSAT_OVERRIDE_T | KSAT_OVERRIDE_R;
  ov.T_steps = 100;
  ov.R_trials = 50;
  ksat_params p{};
  REQUIRE(ksat_manual_params(h.f, 0.2, 0, &ov, &p) == KSAT_OK);

  std::vector<uint32_t> marked(6);
  uint32_t n_marked = 0;
  ksat_mark_report mrep{};
  REQUIRE(ksat_mark(h.f, &p, 0.05, 3, 1, marked.data(), &n_marked, &mrep) ==
          KSAT_OK);
  std::vector<uint32_t> marked_par(6);
  uint32_t n_marked_par = 0;
  REQUIRE(ksat_mark(h.f, &p, 0.05, 3, 4, marked_par.data(), &n_marked_par,
                    nullptr) == KSAT_OK);
  CHECK(n_marked_par == n_marked);
  CHECK(marked_par == marked);
  CHECK(mrep.failed == 0);
  CHECK(n_marked >= 2);
  for (uint32_t i = 1; i < n_marked; ++i) CHECK(marked[i - 1] < marked[i]);

  std::vector<uint8_t> assignment(6);
  ksat_sample_report srep{};
  REQUIRE(ksat_sample(h.f, 0.2, 0, 9, &p, 0, assignment.data(), &srep) ==
          KSAT_OK);
  CHECK(srep.steps == 100);
  bool c1 = assignment[0] || assignment[1] || assignment[2];
  bool c2 = assignment[3] || assignment[4] || assignment[5];
  if (!srep.marking_failed && srep.fallback_toolarge == 0 &&
      srep.fallback_rejection == 0) {
    CHECK(c1);
    CHECK(c2);
  }

  std::vector<uint8_t> again(6);
  REQUIRE(ksat_sample(h.f, 0.2, 0, 9, &p, 0, again.data(), nullptr) ==
          KSAT_OK);
  CHECK(assignment == again);

  ksat_count_result cres{};
  REQUIRE(ksat_count(h.f, 0.8, 5, &p, 0, 1, 1, &cres) == KSAT_OK);
  CHECK(cres.m > 0);
  CHECK(cres.seed == 5);
  CHECK(cres.has_params == 1);
  CHECK(cres.params_used.T_steps == 100);
  // 49 solutions in 2^6 assignments; the estimate lives in the right decade
  CHECK(cres.log2_estimate > 3.5);
  CHECK(cres.log2_estimate < 7.5);
}

TEST_CASE("strict sampling rejects desk formulas and tiny widths") {
  Handle h;
  parse_ok("p cnf 2 1\n1 2 0\n", h);
  std::vector<uint8_t> assignment(2);
  CHECK(ksat_sample(h.f, 0.2, 0, 1, nullptr, 0, assignment.data(),
                    nullptr) == KSAT_ERROR_REGIME);
  ksat_count_result cres{};
  CHECK(ksat_count(h.f, 0.5, 1, nullptr, 0, 1, 1, &cres) == KSAT_ERROR_REGIME);
}

TEST_CASE("exact oracle endpoints") {
  Handle h;
  parse_ok("p cnf 2 1\n1 2 0\n", h);
  uint64_t count = 0;
  REQUIRE(ksat_exact_count(h.f, &count) == KSAT_OK);
  CHECK(count == 3);

  double z = 0;
  REQUIRE(ksat_exact_partition(h.f, 0.0, &z) == KSAT_OK);
  CHECK(z == 4.0);

  uint32_t vars[1] = {1};
  int64_t given[1] = {-1};
  double probs[2] = {0, 0};
  REQUIRE(ksat_exact_conditional(h.f, given, 1, vars, 1, 0, 0, probs) ==
          KSAT_OK);
  CHECK(probs[0] == 0.0);
  CHECK(probs[1] == 1.0);

  Handle big;
  std::string big_text = "p cnf 40 0\n";
  parse_ok(big_text, big);
  CHECK(ksat_exact_count(big.f, &count) == KSAT_ERROR_ORACLE_CAP);

  int64_t contradiction[2] = {1, -1};
  CHECK(ksat_exact_conditional(h.f, contradiction, 2, vars, 1, 0, 0, probs) !=
        KSAT_OK);
}

TEST_CASE("coupling endpoints through the api") {
  Handle h;
  parse_ok("p cnf 5 2\n1 2 3 0\n3 4 5 0\n", h);
  ksat_couple_summary sum{};
  REQUIRE(ksat_couple_summary_run(h.f, 0, 3, 1, nullptr, 0, 100, 9, &sum) ==
          KSAT_OK);
  CHECK(sum.trials == 100);
  CHECK(sum.mean_v1 >= 1.0);
  CHECK(sum.v1_equal == 100);
  CHECK(sum.in_regime == 0);

  char* json = nullptr;
  REQUIRE(ksat_couple_trace_json(h.f, 0, 3, 1, nullptr, 0, 9, &json) ==
          KSAT_OK);
  std::string text(json);
  ksat_string_free(json);
  CHECK(text.find("\"v1\"") != std::string::npos);
  CHECK(text.find("\"cv\"") != std::string::npos);

  // k_gamma must stay under the effective beta of the marking
  CHECK(ksat_couple_summary_run(h.f, 0, 1, 2, nullptr, 0, 10, 9, &sum) ==
        KSAT_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("verify endpoint surfaces named checks") {
  Handle h;
  parse_ok("p cnf 4 0\n", h);
  std::vector<ksat_verify_check> checks(16);
  size_t n = 0;
  REQUIRE(ksat_verify_run(h.f, 1, 4000, "sampler_tv", checks.data(),
                          checks.size(), &n) == KSAT_OK);
  REQUIRE(n == 1);
  CHECK(std::string(checks[0].name) == "sampler_tv");
  CHECK(checks[0].status == 0);
  CHECK(checks[0].value <= checks[0].threshold);
}
