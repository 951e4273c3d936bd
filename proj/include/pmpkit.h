/* C interface to the pmpkit toolkit.
 *
 * All functions return a pmpkit_status; on failure pmpkit_last_error() holds
 * a thread-local description of what went wrong. Objects are opaque handles
 * released with the matching _free function. File writers are atomic
 * (temp + rename), so no partial output is left behind on error.
 */

#ifndef PMPKIT_H
#define PMPKIT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  PMPKIT_OK = 0,
  PMPKIT_ERR_PARSE = 1,    /* config, expression or data-file parse failure */
  PMPKIT_ERR_SOLVER = 2,   /* blow-up, divergence, singular transition, ... */
  PMPKIT_ERR_INVALID = 3,  /* invalid argument or unsupported request */
  PMPKIT_ERR_IO = 4,       /* file system failure */
  PMPKIT_ERR_INTERNAL = 5
} pmpkit_status;

typedef struct pmpkit_problem pmpkit_problem;
typedef struct pmpkit_control pmpkit_control;
typedef struct pmpkit_trajectory pmpkit_trajectory;
typedef struct pmpkit_bvpath pmpkit_bvpath;
typedef struct pmpkit_measures pmpkit_measures;
typedef struct pmpkit_certificate pmpkit_certificate;
typedef struct pmpkit_solve_result pmpkit_solve_result;
typedef struct pmpkit_probe_table pmpkit_probe_table;

const char* pmpkit_version(void);
const char* pmpkit_last_error(void);
void pmpkit_string_free(char* text);

/* --- problems ------------------------------------------------------------ */

pmpkit_status pmpkit_problem_load_file(const char* path, pmpkit_problem** out);
pmpkit_status pmpkit_problem_load_string(const char* json_text, pmpkit_problem** out);
void pmpkit_problem_free(pmpkit_problem* problem);
int pmpkit_problem_state_dim(const pmpkit_problem* problem);
int pmpkit_problem_control_dim(const pmpkit_problem* problem);
int pmpkit_problem_constraint_count(const pmpkit_problem* problem);
double pmpkit_problem_horizon(const pmpkit_problem* problem);

/* --- controls ------------------------------------------------------------ */

pmpkit_status pmpkit_control_load_file(const char* path, pmpkit_control** out);
/* Constant control on a uniform grid with `cells` cells. */
pmpkit_status pmpkit_control_constant(const pmpkit_problem* problem, size_t cells,
                                      const double* value, pmpkit_control** out);
pmpkit_status pmpkit_control_save_file(const pmpkit_control* control, const char* path);
void pmpkit_control_free(pmpkit_control* control);

/* --- simulate ------------------------------------------------------------ */

/* Forward solve on a uniform grid of `cells` cells merged with the control
 * grid. Fails with PMPKIT_ERR_SOLVER on blow-up. */
pmpkit_status pmpkit_simulate(const pmpkit_problem* problem, const pmpkit_control* control,
                              size_t cells, pmpkit_trajectory** out);
pmpkit_status pmpkit_trajectory_save_file(const pmpkit_trajectory* trajectory, const char* path);
void pmpkit_trajectory_free(pmpkit_trajectory* trajectory);

/* --- multiplier measures --------------------------------------------------*/

/* Load one measure CSV per constraint; `count` must equal the problem's j. */
pmpkit_status pmpkit_measures_load_files(const char* const* paths, size_t count,
                                         pmpkit_measures** out);
pmpkit_status pmpkit_measures_save_file(const pmpkit_measures* measures, size_t index,
                                        const char* path);
size_t pmpkit_measures_count(const pmpkit_measures* measures);
void pmpkit_measures_free(pmpkit_measures* measures);

/* --- adjoint --------------------------------------------------------------*/

pmpkit_status pmpkit_adjoint(const pmpkit_problem* problem, const pmpkit_control* control,
                             double psi, const pmpkit_measures* measures_or_null, size_t cells,
                             pmpkit_bvpath** out);
pmpkit_status pmpkit_bvpath_save_file(const pmpkit_bvpath* path, const char* file_path);
void pmpkit_bvpath_free(pmpkit_bvpath* path);

/* --- certificate check ----------------------------------------------------*/

typedef struct {
  double feasibility;
  double hamiltonian_sup;
  double slackness;
  double transversality;
  double nontriviality_floor;
} pmpkit_check_options;

void pmpkit_check_options_init(pmpkit_check_options* options);

pmpkit_status pmpkit_check(const pmpkit_problem* problem, const pmpkit_control* control,
                           double psi, const pmpkit_measures* measures_or_null, size_t cells,
                           const pmpkit_check_options* options_or_null,
                           pmpkit_certificate** out);
/* 1 = PASS, 0 = FAIL or ERROR. */
int pmpkit_certificate_passed(const pmpkit_certificate* certificate);
/* Caller frees with pmpkit_string_free. structured != 0 selects JSON. */
pmpkit_status pmpkit_certificate_report(const pmpkit_certificate* certificate, int structured,
                                        char** out);
pmpkit_status pmpkit_certificate_save_report(const pmpkit_certificate* certificate,
                                             int structured, const char* path);
void pmpkit_certificate_free(pmpkit_certificate* certificate);

/* --- descent solver -------------------------------------------------------*/

typedef struct {
  int budget;            /* accepted-move budget */
  double eps_initial;    /* first penalization offset; quartered on stagnation */
  int eps_levels;        /* number of offsets in the schedule */
  const double* rho_ladder;
  size_t rho_count;      /* 0 selects the default ladder */
} pmpkit_solve_options;

void pmpkit_solve_options_init(pmpkit_solve_options* options);

pmpkit_status pmpkit_solve(const pmpkit_problem* problem, const pmpkit_control* initial_or_null,
                           size_t cells, const pmpkit_solve_options* options_or_null,
                           pmpkit_solve_result** out);
pmpkit_status pmpkit_solve_result_control(const pmpkit_solve_result* result, pmpkit_control** out);
pmpkit_status pmpkit_solve_result_measures(const pmpkit_solve_result* result,
                                           pmpkit_measures** out);
double pmpkit_solve_result_psi(const pmpkit_solve_result* result);
double pmpkit_solve_result_cost(const pmpkit_solve_result* result);
int pmpkit_solve_result_budget_exhausted(const pmpkit_solve_result* result);
pmpkit_status pmpkit_solve_result_save_history(const pmpkit_solve_result* result,
                                               const char* path);
void pmpkit_solve_result_free(pmpkit_solve_result* result);

/* --- differentiability probe -----------------------------------------------*/

pmpkit_status pmpkit_probe(const pmpkit_problem* problem, const pmpkit_control* control,
                           const pmpkit_control* control_prime, const double* rhos,
                           size_t rho_count, size_t cells, pmpkit_probe_table** out);
pmpkit_status pmpkit_probe_save_file(const pmpkit_probe_table* table, const char* path);
void pmpkit_probe_table_free(pmpkit_probe_table* table);

#ifdef __cplusplus
}
#endif

#endif /* PMPKIT_H */
