// Copyright 2026 The spml Authors.
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

/* C interface to the spml core. Every function returns a status code; on
 * failure spml_last_error() describes the problem. Strings returned through
 * `char**` out-parameters are owned by the caller and released with
 * spml_string_free(). Outcomes are 1-based. */

#ifndef SPML_SPML_H_
#define SPML_SPML_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SPML_BUILDING_LIBRARY)
#define SPML_API __attribute__((visibility("default")))
#else
#define SPML_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spml_status {
  SPML_OK = 0,
  SPML_INVALID_ARGUMENT = 1,
  SPML_DOMAIN = 2,
  SPML_PROTOCOL = 3,
  SPML_STATE = 4,
  SPML_PARSE = 5,
  SPML_VALIDATION = 6,
  SPML_LIMIT = 7,
  SPML_UNSUPPORTED = 8,
  SPML_INTERNAL = 99
} spml_status;

typedef struct spml_market spml_market;

SPML_API const char* spml_version(void);
/* Message for the last failed call on this thread; "" after a success. */
SPML_API const char* spml_last_error(void);
SPML_API const char* spml_status_name(spml_status status);
SPML_API void spml_string_free(char* text);

/* Scoring rules. `rule` is "logarithmic" or "quadratic"; `offsets` may be
 * NULL for all-zero offsets. */
SPML_API spml_status spml_score(const char* rule, double scale, const double* offsets, const double* p,
                                size_t n, size_t outcome, double* out);
SPML_API spml_status spml_discrepancy(const char* rule, double scale, const double* offsets, const double* x,
                                      const double* y, size_t n, double* out);
SPML_API spml_status spml_expected_payoff_change(const char* rule, double scale, const double* offsets,
                                                 const double* belief, const double* report,
                                                 const double* previous, size_t n, double* out);

/* Live market. `protocol` is one of SRM, AP_SRM, NM_SRM, APNM_SRM, SP_SRM. */
SPML_API spml_status spml_market_open(const char* protocol, const char* rule, double scale,
                                      const double* offsets, const double* initial, size_t n,
                                      spml_market** out);
/* `private_estimate` may be NULL for protocols that do not take one. */
SPML_API spml_status spml_market_submit(spml_market* market, const char* agent_id, const double* final_estimate,
                                        const double* private_estimate);
SPML_API spml_status spml_market_current_estimate(const spml_market* market, double* out, size_t n);
/* Settlement as a JSON object. The market accepts no reports afterwards. */
SPML_API spml_status spml_market_close_and_settle(spml_market* market, size_t outcome, char** settlement_json);
SPML_API spml_status spml_market_ledger_jsonl(const spml_market* market, char** ledger_jsonl);
SPML_API void spml_market_free(spml_market* market);

/* Re-settles a ledger file. Either output pointer may be NULL. */
SPML_API spml_status spml_settle_ledger(const char* ledger_jsonl, size_t outcome, char** settlement_csv,
                                        char** settlement_jsonl);

/* Table for example 1, 2 or 3 as JSON; `matches` is 1 when every rounded
 * value equals the published one. */
SPML_API spml_status spml_reproduce_table(int example, char** table_json, int* matches);

/* Runs a scenario file. `outcome_override` 0 keeps the file's outcome.
 * The JSON result holds "ledger_jsonl", "settlement_csv",
 * "settlement_jsonl" and "report". */
SPML_API spml_status spml_run_scenario(const char* scenario_json, size_t outcome_override, char** result_json);

/* Worst-case loss rows for each epsilon. `initial` may be NULL (uniform). */
SPML_API spml_status spml_wcl(const char* rule, double scale, const char* protocol, size_t outcomes,
                              const double* initial, size_t agents, const double* epsilons, size_t count,
                              char** rows_json);

/* Theorem check; `theorem` is T1, T2, T3, T5, T7, T9 or T11 and `model` is
 * "branch_belief" or "realized_expectation" (NULL for the default). */
SPML_API spml_status spml_verify(const char* theorem, size_t trials, uint64_t seed, const char* model,
                                 char** summary_json, int* passed);

/* Top-ups that align each trader's LMSR payoff with `protocol`'s payment. */
SPML_API spml_status spml_cfm_topup(const char* trade_ledger_jsonl, const char* protocol, size_t outcome,
                                    char** topups_json);

#ifdef __cplusplus
}
#endif

#endif /* SPML_SPML_H_ */
