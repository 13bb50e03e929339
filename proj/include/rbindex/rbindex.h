// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the rbindex library. Reports are UTF-8 JSON strings owned by
 * the caller and released with rbx_string_free. */
#ifndef RBINDEX_RBINDEX_H_
#define RBINDEX_RBINDEX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RBX_API __declspec(dllexport)
#else
#define RBX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rbx_status {
  RBX_OK = 0,
  RBX_ERR_GENERIC = 1,
  RBX_ERR_INPUT = 2,
  RBX_ERR_ASSUMPTION = 3,
  RBX_ERR_CONSISTENCY = 4,
  RBX_ERR_ARGUMENT = 5,
  RBX_ERR_NUMERIC = 6,
  RBX_ERR_UNSUPPORTED = 7,
  RBX_ERR_MEMBERSHIP = 8,
  RBX_ERR_STRUCTURAL = 9,
  RBX_ERR_DOMAIN = 10,
  RBX_ERR_SIZE = 11,
  RBX_ERR_DEGENERATE = 12,
  RBX_ERR_BRANCH = 13,
  RBX_ERR_INFEASIBLE = 14
} rbx_status;

typedef struct rbx_model rbx_model;

RBX_API const char* rbx_version(void);

/* Message of the last failed call on this thread; never NULL. */
RBX_API const char* rbx_last_error(void);

RBX_API void rbx_string_free(char* s);

RBX_API rbx_status rbx_model_from_json(const char* text, rbx_model** out);
RBX_API rbx_status rbx_model_from_file(const char* path, rbx_model** out);
RBX_API void rbx_model_free(rbx_model* m);
/* Static string: "rb", "admission", "routing" or "mts". */
RBX_API const char* rbx_model_kind(const rbx_model* m);
RBX_API rbx_status rbx_model_to_json(const rbx_model* m, char** out);
RBX_API rbx_status rbx_model_digest(const rbx_model* m, char** out);

/* The command calls below fill *report even when they return
 * RBX_ERR_ASSUMPTION or RBX_ERR_CONSISTENCY; *log receives newline-separated
 * human-readable lines when log is not NULL. */

/* family: "auto", "threshold", "powerset" or "explicit". */
RBX_API rbx_status rbx_index(const rbx_model* m, const char* family,
                             char** report, char** log);
/* grid: extra uniform sweep points (0 for none); eps: indifference tolerance. */
RBX_API rbx_status rbx_dp_verify(const rbx_model* m, size_t grid, double eps,
                                 char** report, char** log);

typedef struct rbx_sim_options {
  const char* policies; /* comma-separated, NULL or "" for all */
  double horizon;       /* time budget, used when events == 0 */
  uint64_t events;      /* event budget per replication */
  size_t replications;
  uint64_t seed;
  double warmup_fraction;
  size_t threads; /* 0: RBINDEX_THREADS or hardware concurrency */
} rbx_sim_options;

RBX_API void rbx_sim_options_init(rbx_sim_options* o);
RBX_API rbx_status rbx_simulate(const rbx_model* m, const rbx_sim_options* o,
                                char** report, char** log);

RBX_API rbx_status rbx_counterexample(char** report, char** log);
RBX_API rbx_status rbx_switching_curve(const rbx_model* m, size_t bound,
                                       size_t slope_from, char** report,
                                       char** log);

/* Admission-control indices nu_0..nu_{n-1}. lambda and h have n + 1 entries,
 * mu has n entries (mu_1..mu_n). */
RBX_API rbx_status rbx_admission_indices(size_t n, const double* lambda,
                                         const double* mu, const double* h,
                                         double alpha, int check_assumptions,
                                         double* out);

/* Workload w^S_j for the set S (bit mask over 0..n-1) and element j in S.
 * Return a nonzero value to abort the run. */
typedef int (*rbx_workload_fn)(uint64_t set, size_t j, void* user,
                               double* out);

/* Adaptive-greedy run over the family given as bit masks. Outputs: pi
 * (n entries), nu (n entries by element), *admissible. */
RBX_API rbx_status rbx_adaptive_greedy(size_t n, const uint64_t* family,
                                       size_t family_size, const double* cost,
                                       rbx_workload_fn workload, void* user,
                                       int* admissible, size_t* pi,
                                       double* nu);

#ifdef __cplusplus
}
#endif

#endif /* RBINDEX_RBINDEX_H_ */
