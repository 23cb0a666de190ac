/* didrf: fair-ranking simulation laboratory.
 *
 * C interface over the simulation core. A didrf_lab holds one resolved run
 * configuration plus the results of the last executed command. All functions
 * returning didrf_status leave a readable message behind on failure
 * (didrf_lab_error_message, or didrf_last_error for constructor failures).
 *
 * Status values double as CLI exit codes: 0 ok, 2 config error, 3 data error.
 */
#ifndef DIDRF_H
#define DIDRF_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum didrf_status {
    DIDRF_OK = 0,
    DIDRF_ERROR_CONFIG = 2,
    DIDRF_ERROR_DATA = 3,
    DIDRF_ERROR_INVALID_ARGUMENT = 4,
    DIDRF_ERROR_RUNTIME = 5
} didrf_status;

typedef struct didrf_lab didrf_lab;

const char* didrf_version(void);

/* Message from the most recent failed constructor call on this thread. */
const char* didrf_last_error(void);

/* ---- lifecycle ---------------------------------------------------------- */

didrf_status didrf_lab_open(const char* config_path, didrf_lab** out_lab);
didrf_status didrf_lab_open_json(const char* config_json, didrf_lab** out_lab);
void didrf_lab_close(didrf_lab* lab);

const char* didrf_lab_error_message(const didrf_lab* lab);

/* ---- config overrides (applied before run/sweep/timing) ----------------- */

didrf_status didrf_lab_set_policy(didrf_lab* lab, const char* policy);
didrf_status didrf_lab_set_gamma(didrf_lab* lab, double gamma);
didrf_status didrf_lab_set_eta(didrf_lab* lab, double eta);
didrf_status didrf_lab_set_trials(didrf_lab* lab, int trials);
didrf_status didrf_lab_set_seed(didrf_lab* lab, unsigned long long base_seed);
didrf_status didrf_lab_set_output_dir(didrf_lab* lab, const char* dir);

/* ---- commands ------------------------------------------------------------
 * validate: load the dataset and check every cross-field constraint.
 * run:      simulate the configured grid point(s) and write results.csv,
 *           frontier.csv, run_meta.json (and sessions.csv.gz when enabled).
 * sweep:    like run but requires a sweep grid in the config.
 * timing:   per-policy scoring+sorting cost; writes timing.csv.
 */

didrf_status didrf_lab_validate(didrf_lab* lab, char* summary, size_t summary_len);
didrf_status didrf_lab_run(didrf_lab* lab);
didrf_status didrf_lab_sweep(didrf_lab* lab);
didrf_status didrf_lab_timing(didrf_lab* lab);

/* ---- results of the last run ---------------------------------------------
 * Grid points are indexed in sweep order (single run: index 0). Cutoffs are
 * 1..5, capped by min(k, k_c).
 */

didrf_status didrf_lab_result_count(const didrf_lab* lab, size_t* out_count);
didrf_status didrf_lab_result_unfairness(const didrf_lab* lab, size_t index, double* out);
didrf_status didrf_lab_result_cndcg(const didrf_lab* lab, size_t index, int cutoff, double* out);
didrf_status didrf_lab_result_point(const didrf_lab* lab, size_t index, double* out_gamma,
                                    double* out_eta);

/* ---- stateless formula entry points -------------------------------------- */

/* epsilon + (1-epsilon) * (2^grade - 1) / (2^y_max - 1); NaN on bad input. */
double didrf_relevance_probability(int grade, int y_max, double epsilon);

/* 1/log2(rank+1) up to the cutoff, 0 beyond it; NaN for rank < 1. */
double didrf_examination_probability(int rank, int k_c);

/* -1/E^2 + 1/E^3 at prior-adjusted exposure E; NaN for E <= 0. */
double didrf_uncertainty_gain(double exposure_with_prior);

/* 4 / (n (n-1)); NaN for n < 2. */
double didrf_sigma_coefficient(size_t num_items);

/* Mean squared pairwise proportionality violation between value and
 * relevance vectors of length n; NaN on bad input. */
double didrf_pairwise_unfairness(const double* value, const double* relevance, size_t n);

#ifdef __cplusplus
}
#endif

#endif /* DIDRF_H */
