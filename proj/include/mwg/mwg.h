// Copyright 2026 The mwg Authors
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

/* C interface to the mwg library: optimal merit-with-guarantee allocation
 * with limited audits. Every call returns an mwg_status; on failure the
 * message is available from mwg_last_error() on the same thread. Strings
 * returned through char** are owned by the caller and released with
 * mwg_string_free(). */

#ifndef MWG_MWG_H_
#define MWG_MWG_H_

#include <stdint.h>

#if defined(_WIN32)
#define MWG_API __declspec(dllexport)
#else
#define MWG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mwg_status {
  MWG_OK = 0,
  MWG_ERR_INVALID_ARGUMENT = 1,
  MWG_ERR_INFEASIBLE = 2,
  MWG_ERR_INTERNAL = 3
} mwg_status;

typedef struct mwg_instance mwg_instance;
typedef struct mwg_solution mwg_solution;
typedef struct mwg_simulation mwg_simulation;
typedef struct mwg_discrete mwg_discrete;
typedef struct mwg_verdict mwg_verdict;

MWG_API const char* mwg_version(void);
MWG_API const char* mwg_last_error(void);
MWG_API void mwg_string_free(char* s);

/* n agents, m objects, k audits with 0 < k < m < n; dist is "uniform" or
 * "power:<alpha>" (NULL means uniform). */
MWG_API mwg_status mwg_instance_create(int n, int m, int k, const char* dist,
                                       mwg_instance** out);
MWG_API void mwg_instance_destroy(mwg_instance* inst);
MWG_API mwg_status mwg_instance_phi_range(const mwg_instance* inst,
                                          double* phi_min, double* phi_max);

/* Constraint curves at quantile q; any output pointer may be NULL. */
MWG_API mwg_status mwg_envelope(const mwg_instance* inst, double q, double phi,
                                double* c_allo, double* c_aud, double* c_ic,
                                double* envelope);
MWG_API mwg_status mwg_payoff(const mwg_instance* inst, double phi, double* out);
MWG_API mwg_status mwg_foc_residual(const mwg_instance* inst, double phi,
                                    double* out);
MWG_API mwg_status mwg_interim(const mwg_instance* inst, double phi, double t,
                               double* P, double* A);
MWG_API mwg_status mwg_partition_json(const mwg_instance* inst, double phi,
                                      char** out);

typedef struct mwg_solve_options {
  int grid_intervals;
  double root_tol;
} mwg_solve_options;

MWG_API void mwg_solve_options_init(mwg_solve_options* options);

typedef struct mwg_solution_summary {
  double phi_star;
  double payoff;
  double foc_residual; /* NaN without an ic region */
  double gamma1;
  double gamma2;
  double gamma3;
  double first_best;
  double random_lottery;
  double k_top;
  int interior;
  const char* case_tag; /* valid while the solution lives */
} mwg_solution_summary;

/* options may be NULL. */
MWG_API mwg_status mwg_solve(const mwg_instance* inst,
                             const mwg_solve_options* options,
                             mwg_solution** out);
MWG_API void mwg_solution_destroy(mwg_solution* solution);
MWG_API mwg_status mwg_solution_summary_get(const mwg_solution* solution,
                                            mwg_solution_summary* out);
MWG_API mwg_status mwg_solution_json(const mwg_solution* solution, char** out);
MWG_API mwg_status mwg_solution_csv(const mwg_solution* solution, char** out);

typedef struct mwg_sim_options {
  int bins;
  uint64_t seed;
  int threads; /* 0: all hardware threads */
  double z_band;
  int64_t calibration_trials; /* 0: max(1e5, 4 * trials) */
  int max_rounds;
} mwg_sim_options;

MWG_API void mwg_sim_options_init(mwg_sim_options* options);

typedef struct mwg_sim_summary {
  int64_t trials;
  uint64_t seed;
  double phi;
  int64_t capacity_violations;
  int bins;
  int bins_within_P;
  int bins_within_A;
  int bins_within_merit;
  int within_bands;
  double max_dev_P;
  double max_dev_A;
  double payoff_hat;
  double payoff_se;
  double payoff_target;
  int calibration_rounds;
} mwg_sim_summary;

/* options may be NULL. */
MWG_API mwg_status mwg_simulate(const mwg_instance* inst, double phi,
                                int64_t trials, const mwg_sim_options* options,
                                mwg_simulation** out);
MWG_API void mwg_simulation_destroy(mwg_simulation* sim);
MWG_API mwg_status mwg_simulation_summary_get(const mwg_simulation* sim,
                                              mwg_sim_summary* out);
MWG_API mwg_status mwg_simulation_json(const mwg_simulation* sim, char** out);
MWG_API mwg_status mwg_simulation_bins_csv(const mwg_simulation* sim, char** out);

typedef struct mwg_epic_witness {
  int agent;
  double true_type;
  double deviation;
  double truthful_allocation;
  double escape_probability;
  double uniform_escape_probability;
  double lower_bound;
  double gain;
} mwg_epic_witness;

/* Uses uniform audit weights unless sim is given, in which case its
 * calibrated audit weights are used. json may be NULL. */
MWG_API mwg_status mwg_epic_witness_get(const mwg_instance* inst, double phi,
                                        const mwg_simulation* sim,
                                        mwg_epic_witness* out, char** json);

MWG_API mwg_status mwg_discrete_from_json(const char* text, mwg_discrete** out);
MWG_API mwg_status mwg_discrete_to_json(const mwg_discrete* inst, char** out);
MWG_API void mwg_discrete_destroy(mwg_discrete* inst);

/* Cell-average discretization of the optimal rule family at phi:
 * writes the instance and the allocation rule as JSON. */
MWG_API mwg_status mwg_discretize(const mwg_instance* inst, double phi, int bins,
                                  mwg_discrete** out, char** rule_json);

typedef enum mwg_check_mode {
  MWG_CHECK_FLOW = 0,
  MWG_CHECK_UPPER_SETS = 1,
  MWG_CHECK_INTERIM_ALLOCATION = 2
} mwg_check_mode;

MWG_API mwg_status mwg_check(const mwg_discrete* inst, const char* rule_json,
                             mwg_check_mode mode, mwg_verdict** out);
MWG_API void mwg_verdict_destroy(mwg_verdict* verdict);
MWG_API int mwg_verdict_feasible(const mwg_verdict* verdict);
/* MWG_ERR_INVALID_ARGUMENT when the verdict has no violated set. */
MWG_API mwg_status mwg_verdict_violation(const mwg_verdict* verdict,
                                         double* lhs, double* rhs);
MWG_API mwg_status mwg_verdict_json(const mwg_verdict* verdict, char** out);

MWG_API mwg_status mwg_envelope_csv(const mwg_instance* inst, double phi,
                                    int points, char** out);
MWG_API mwg_status mwg_interim_csv(const mwg_instance* inst, double phi,
                                   int points, char** out);

#ifdef __cplusplus
}
#endif

#endif /* MWG_MWG_H_ */
