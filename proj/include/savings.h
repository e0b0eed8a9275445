/* C API of the savings library: optimal-savings solver with Markov-modulated
 * risk aversion, analytic asymptotic MPCs, and path simulation.
 *
 * All objects are opaque handles created and destroyed through this header.
 * Every fallible call returns a status code; sv_last_error() describes the
 * most recent failure on the calling thread. Strings returned through char**
 * out-parameters are owned by the caller and released with sv_string_free().
 */
#ifndef SAVINGS_H
#define SAVINGS_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sv_status {
    SV_OK = 0,
    SV_ERR_CONFIG = 2,   /* configuration parse or validation failure */
    SV_ERR_NUMERIC = 3,  /* divergent matrix entry or failed iteration */
    SV_ERR_INVALID = 4,  /* null handle or out-of-range argument */
    SV_ERR_IO = 5        /* file could not be read or written */
} sv_status;

typedef struct sv_run sv_run;       /* parsed configuration + environment */
typedef struct sv_policy sv_policy; /* solved consumption policy + diagnostics */
typedef struct sv_asym sv_asym;     /* asymptotic MPC classification report */

const char* sv_version(void);
const char* sv_last_error(void);
void sv_string_free(char* s);

/* --- run configuration ---------------------------------------------- */

sv_status sv_run_open_file(const char* config_path, sv_run** out);
sv_status sv_run_open_text(const char* config_json, sv_run** out);
void sv_run_close(sv_run* run);

int sv_run_state_count(const sv_run* run);
sv_status sv_run_state_label(const sv_run* run, int state, char** out);
sv_status sv_run_config_hash(const sv_run* run, char** out);
sv_status sv_run_override_seed(sv_run* run, uint64_t seed);

/* --- stability check -------------------------------------------------- */

/* assumptions_hold is 1 iff r(K(1)) < 1. */
sv_status sv_check(sv_run* run, int* assumptions_hold, double* r_k1);
sv_status sv_check_report(sv_run* run, char** text);

/* --- Euler-equation solve --------------------------------------------- */

/* Produces a policy even when the sweep limit is hit; inspect
 * sv_policy_converged. */
sv_status sv_solve(sv_run* run, sv_policy** out);
void sv_policy_free(sv_policy* policy);
int sv_policy_converged(const sv_policy* policy);
int sv_policy_iterations(const sv_policy* policy);
sv_status sv_policy_value(const sv_policy* policy, double wealth, int state, double* out);
/* Borrowing threshold w_bar(z); +infinity when the state is always
 * constrained. */
sv_status sv_policy_threshold(const sv_policy* policy, int state, double* out);
/* Writes policy.csv, diagnostics.txt, rho_history.csv into out_dir. */
sv_status sv_policy_write(const sv_policy* policy, const char* out_dir);

/* --- asymptotic MPCs --------------------------------------------------- */

sv_status sv_asymptotics(sv_run* run, sv_asym** out);
void sv_asym_free(sv_asym* asym);
sv_status sv_asym_case(const sv_asym* asym, int state, char** out);
/* determined is 0 when the MPC is UNDETERMINED; mpc is set only when 1. */
sv_status sv_asym_mpc(const sv_asym* asym, int state, int* determined, double* mpc);
/* Writes asymptotics.txt and asymptotics.csv into out_dir. */
sv_status sv_asym_write(const sv_asym* asym, const char* out_dir);
sv_status sv_asym_report(const sv_asym* asym, char** text);

/* --- simulation and cross-validation ----------------------------------- */

/* Writes paths.csv into out_dir; identical (seed, config) inputs reproduce
 * the file byte-for-byte. */
sv_status sv_simulate(sv_run* run, const sv_policy* policy, const char* out_dir);

/* all_pass is 1 iff every per-state cross-check passes; report receives the
 * full comparison table. */
sv_status sv_validate(sv_run* run, const sv_policy* policy, const sv_asym* asym, int* all_pass,
                      char** report);

#ifdef __cplusplus
}
#endif

#endif /* SAVINGS_H */
