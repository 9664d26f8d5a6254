/* Copyright 2026 the ksat authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the ksat shared library: sampling near-uniform satisfying
 * assignments of (k,d)-CNF formulas, approximate counting by simulated
 * annealing, exact desk-scale oracles, and the coupling lab. All entry
 * points are deterministic functions of their arguments and seeds.
 */

#ifndef KSAT_H
#define KSAT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ksat_status {
  KSAT_OK = 0,
  KSAT_ERROR_INVALID_ARGUMENT = 1,
  KSAT_ERROR_PARSE = 2,
  KSAT_ERROR_REGIME = 3,
  KSAT_ERROR_ORACLE_CAP = 4,
  KSAT_ERROR_INFEASIBLE = 5,
  KSAT_ERROR_ZERO_MASS = 6
} ksat_status;

const char* ksat_version(void);
const char* ksat_status_name(ksat_status status);
/* message of the most recent failing call on this thread */
const char* ksat_last_error(void);

/* ---- formulas ---------------------------------------------------------- */

typedef struct ksat_formula ksat_formula;

/* warnings_out (nullable) receives newline-joined parser warnings; free it
 * with ksat_string_free */
ksat_status ksat_formula_parse(const char* dimacs, size_t len,
                               ksat_formula** out, char** warnings_out);
ksat_status ksat_formula_generate(uint32_t n, uint32_t m, uint32_t k,
                                  uint32_t d_cap, uint64_t seed,
                                  ksat_formula** out);
void ksat_formula_free(ksat_formula* f);

uint32_t ksat_formula_num_vars(const ksat_formula* f);
uint32_t ksat_formula_num_clauses(const ksat_formula* f);
uint32_t ksat_formula_width_min(const ksat_formula* f);
uint32_t ksat_formula_width_max(const ksat_formula* f);
uint32_t ksat_formula_max_degree(const ksat_formula* f);

ksat_status ksat_formula_to_dimacs(const ksat_formula* f, char** out);
void ksat_string_free(char* s);

/* ---- parameters -------------------------------------------------------- */

typedef struct ksat_params {
  int32_t mode; /* 0 strict, 1 manual */
  uint64_t n;
  uint32_t k;
  uint32_t d;
  double epsilon;
  double xi;
  uint32_t k_alpha;
  uint32_t k_beta;
  double eta;
  uint64_t T_steps;
  double delta;
  uint64_t R_trials;
  double zeta;
  double s;
  uint32_t k_gamma;
} ksat_params;

/* 1 iff k >= 20 log2 k + 20 log2 d + 60 + xi */
int ksat_regime_holds(uint32_t k, uint32_t d, double xi);
ksat_status ksat_derive_params(uint64_t n, uint32_t k, uint32_t d,
                               double epsilon, double xi, ksat_params* out);

#define KSAT_OVERRIDE_ETA 0x1u
#define KSAT_OVERRIDE_T 0x2u
#define KSAT_OVERRIDE_R 0x4u
#define KSAT_OVERRIDE_DELTA 0x8u

typedef struct ksat_manual_overrides {
  uint32_t k_alpha; /* required */
  uint32_t k_beta;  /* required */
  uint32_t set_mask;
  double eta;
  uint64_t T_steps;
  uint64_t R_trials;
  double delta;
} ksat_manual_overrides;

ksat_status ksat_manual_params(const ksat_formula* f, double epsilon,
                               double xi, const ksat_manual_overrides* ov,
                               ksat_params* out);

/* ---- marking ----------------------------------------------------------- */

typedef struct ksat_mark_report {
  uint32_t attempts_used;
  uint64_t total_resamples;
  int failed;
} ksat_mark_report;

/* marked_out must hold num_vars entries; on success the first *n_marked of
 * them are the marked variable ids in ascending order. threads > 1 runs the
 * attempts concurrently; the result does not depend on the worker count. */
ksat_status ksat_mark(const ksat_formula* f, const ksat_params* params,
                      double delta, uint64_t seed, uint32_t threads,
                      uint32_t* marked_out, uint32_t* n_marked,
                      ksat_mark_report* report);

/* ---- sampling ---------------------------------------------------------- */

typedef struct ksat_sample_report {
  uint64_t steps;
  uint64_t seed;
  uint64_t fallback_toolarge;
  uint64_t fallback_rejection;
  int marking_failed;
  uint32_t mark_attempts;
} ksat_sample_report;

/* params NULL selects strict mode (derived from the formula, epsilon and
 * xi); oracle_marginals != 0 runs the chain on exact conditional marginals,
 * capped at desk scale. assignment_out must hold num_vars bytes. */
ksat_status ksat_sample(const ksat_formula* f, double epsilon, double xi,
                        uint64_t seed, const ksat_params* params,
                        int oracle_marginals, uint8_t* assignment_out,
                        ksat_sample_report* report);

/* ---- counting ---------------------------------------------------------- */

typedef struct ksat_count_result {
  double log2_estimate;
  double decimal_estimate; /* valid iff has_decimal */
  int has_decimal;
  uint64_t ell;
  uint64_t m;
  uint64_t fallback_toolarge;
  uint64_t fallback_rejection;
  uint64_t marking_failures;
  uint64_t seed;
  int has_params;            /* pipeline parameters used (absent in oracle mode) */
  ksat_params params_used;
} ksat_count_result;

ksat_status ksat_count(const ksat_formula* f, double epsilon, uint64_t seed,
                       const ksat_params* params, int oracle_sampler,
                       uint32_t reps, uint32_t threads,
                       ksat_count_result* out);

/* ---- exact oracles ----------------------------------------------------- */

ksat_status ksat_exact_count(const ksat_formula* f, uint64_t* out);
ksat_status ksat_exact_partition(const ksat_formula* f, double theta,
                                 double* out);
/* law of vars given the signed 1-based literals in `given`; probs_out must
 * hold (1 << n_vars) entries, indexed by packed values of the ascending-
 * sorted vars */
ksat_status ksat_exact_conditional(const ksat_formula* f, const int64_t* given,
                                   size_t n_given, const uint32_t* vars,
                                   size_t n_vars, int use_theta, double theta,
                                   double* probs_out);

/* ---- coupling lab ------------------------------------------------------ */

typedef struct ksat_couple_summary {
  double mean_v1;
  double stderr_v1;
  uint64_t trials;
  uint64_t v1_equal; /* paired runs whose V1 sets matched exactly */
  int in_regime;
} ksat_couple_summary;

/* marked/n_marked: explicit marking; n_marked = 0 marks {v0, v} only.
 * v = UINT32_MAX runs the C procedure alone (v1_equal is then `trials`). */
ksat_status ksat_couple_summary_run(const ksat_formula* f, uint32_t v0,
                                    uint32_t v, uint32_t k_gamma,
                                    const uint32_t* marked, size_t n_marked,
                                    uint64_t trials, uint64_t seed,
                                    ksat_couple_summary* out);

/* one paired run emitted as a JSON document; free with ksat_string_free */
ksat_status ksat_couple_trace_json(const ksat_formula* f, uint32_t v0,
                                   uint32_t v, uint32_t k_gamma,
                                   const uint32_t* marked, size_t n_marked,
                                   uint64_t seed, char** json_out);

/* ---- verification ------------------------------------------------------ */

typedef struct ksat_verify_check {
  char name[48];
  int status; /* 0 pass, 1 fail, 2 skipped */
  double value;
  double threshold;
  char detail[160];
} ksat_verify_check;

/* f NULL runs the builtin battery. `only` is a comma-separated check list
 * or NULL for all. Writes at most cap records, total count to n_out. */
ksat_status ksat_verify_run(const ksat_formula* f, uint64_t seed,
                            uint32_t samples, const char* only,
                            ksat_verify_check* checks, size_t cap,
                            size_t* n_out);

#ifdef __cplusplus
}
#endif

#endif /* KSAT_H */
