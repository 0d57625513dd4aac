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

#include "mwg/mwg.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "mwg/error.h"
#include "mwg/feasibility.h"
#include "mwg/interim.h"
#include "mwg/io.h"
#include "mwg/optimizer.h"
#include "mwg/simulation.h"

struct mwg_instance {
  mwg::ProblemInstance inst;
};

struct mwg_solution {
  mwg::ProblemInstance inst;
  mwg::SolveReport report;
  std::string case_tag;
};

struct mwg_simulation {
  mwg::ProblemInstance inst;
  mwg::SimReport report;
};

struct mwg_discrete {
  mwg::DiscreteInstance inst;
};

struct mwg_verdict {
  std::shared_ptr<const mwg::DiscreteInstance> inst;
  mwg::FeasibilityVerdict verdict;
};

namespace {

thread_local std::string last_error;

mwg_status fail(mwg_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename Fn>
mwg_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return MWG_OK;
  } catch (const mwg::Error& e) {
    return fail(static_cast<mwg_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MWG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MWG_ERR_INTERNAL, e.what());
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) {
    throw mwg::InvalidArgument(std::string(name) + " must not be NULL");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set(double* out, double v) {
  if (out != nullptr) *out = v;
}

}  // namespace

extern "C" {

const char* mwg_version(void) { return "1.0.0"; }

const char* mwg_last_error(void) { return last_error.c_str(); }

void mwg_string_free(char* s) { std::free(s); }

mwg_status mwg_instance_create(int n, int m, int k, const char* dist,
                               mwg_instance** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto d = mwg::parse_distribution(dist == nullptr ? "uniform" : dist);
    auto inst = mwg::make_instance(n, m, k, std::move(d));
    inst.validate();
    *out = new mwg_instance{std::move(inst)};
  });
}

void mwg_instance_destroy(mwg_instance* inst) { delete inst; }

mwg_status mwg_instance_phi_range(const mwg_instance* inst, double* phi_min,
                                  double* phi_max) {
  return guarded([&] {
    require(inst, "inst");
    set(phi_min, inst->inst.phi_min());
    set(phi_max, inst->inst.phi_max());
  });
}

mwg_status mwg_envelope(const mwg_instance* inst, double q, double phi,
                        double* c_allo, double* c_aud, double* c_ic,
                        double* envelope) {
  return guarded([&] {
    require(inst, "inst");
    const auto& p = inst->inst;
    const double a = mwg::c_allo(q, p);
    const double b = mwg::c_aud(q, phi, p);
    const double c = mwg::c_ic(q, phi, p);
    set(c_allo, a);
    set(c_aud, b);
    set(c_ic, c);
    set(envelope, mwg::envelope_value(q, phi, p).first);
  });
}

mwg_status mwg_payoff(const mwg_instance* inst, double phi, double* out) {
  return guarded([&] {
    require(inst, "inst");
    require(out, "out");
    *out = mwg::payoff(phi, inst->inst);
  });
}

mwg_status mwg_foc_residual(const mwg_instance* inst, double phi, double* out) {
  return guarded([&] {
    require(inst, "inst");
    require(out, "out");
    *out = mwg::foc_residual(phi, inst->inst);
  });
}

mwg_status mwg_interim(const mwg_instance* inst, double phi, double t, double* P,
                       double* A) {
  return guarded([&] {
    require(inst, "inst");
    const auto rules = mwg::merit_with_guarantee(phi, inst->inst);
    set(P, rules.P(t));
    set(A, rules.A(t));
  });
}

mwg_status mwg_partition_json(const mwg_instance* inst, double phi, char** out) {
  return guarded([&] {
    require(inst, "inst");
    require(out, "out");
    *out = copy_string(mwg::partition_json(mwg::partition(phi, inst->inst)));
  });
}

void mwg_solve_options_init(mwg_solve_options* options) {
  if (options == nullptr) return;
  const mwg::SolveOptions defaults;
  options->grid_intervals = defaults.grid_intervals;
  options->root_tol = defaults.root_tol;
}

mwg_status mwg_solve(const mwg_instance* inst, const mwg_solve_options* options,
                     mwg_solution** out) {
  return guarded([&] {
    require(inst, "inst");
    require(out, "out");
    *out = nullptr;
    mwg::SolveOptions opts;
    if (options != nullptr) {
      if (options->grid_intervals < 2 || !(options->root_tol > 0.0)) {
        throw mwg::InvalidArgument("solve needs grid_intervals >= 2 and root_tol > 0");
      }
      opts.grid_intervals = options->grid_intervals;
      opts.root_tol = options->root_tol;
    }
    auto report = mwg::solve(inst->inst, opts);
    std::string tag = mwg::to_string(report.partition.case_tag);
    *out = new mwg_solution{inst->inst, std::move(report), std::move(tag)};
  });
}

void mwg_solution_destroy(mwg_solution* solution) { delete solution; }

mwg_status mwg_solution_summary_get(const mwg_solution* solution,
                                    mwg_solution_summary* out) {
  return guarded([&] {
    require(solution, "solution");
    require(out, "out");
    const auto& r = solution->report;
    out->phi_star = r.phi_star;
    out->payoff = r.payoff;
    out->foc_residual = r.foc_residual;
    out->gamma1 = r.partition.gamma1;
    out->gamma2 = r.partition.gamma2;
    out->gamma3 = r.partition.gamma3;
    out->first_best = r.baselines.first_best;
    out->random_lottery = r.baselines.random_lottery;
    out->k_top = r.baselines.k_top;
    out->interior = r.interior ? 1 : 0;
    out->case_tag = solution->case_tag.c_str();
  });
}

mwg_status mwg_solution_json(const mwg_solution* solution, char** out) {
  return guarded([&] {
    require(solution, "solution");
    require(out, "out");
    *out = copy_string(mwg::solve_report_json(solution->report, solution->inst));
  });
}

mwg_status mwg_solution_csv(const mwg_solution* solution, char** out) {
  return guarded([&] {
    require(solution, "solution");
    require(out, "out");
    *out = copy_string(mwg::solve_report_csv(solution->report, solution->inst));
  });
}

void mwg_sim_options_init(mwg_sim_options* options) {
  if (options == nullptr) return;
  const mwg::SimOptions defaults;
  options->bins = defaults.bins;
  options->seed = defaults.seed;
  options->threads = defaults.threads;
  options->z_band = defaults.z_band;
  options->calibration_trials = defaults.calibration.trials;
  options->max_rounds = defaults.calibration.max_rounds;
}

mwg_status mwg_simulate(const mwg_instance* inst, double phi, int64_t trials,
                        const mwg_sim_options* options, mwg_simulation** out) {
  return guarded([&] {
    require(inst, "inst");
    require(out, "out");
    *out = nullptr;
    mwg::SimOptions opts;
    if (options != nullptr) {
      if (options->bins < 1 || options->threads < 0 || !(options->z_band > 0.0) ||
          options->calibration_trials < 0 || options->max_rounds < 1) {
        throw mwg::InvalidArgument("invalid simulation options");
      }
      opts.bins = options->bins;
      opts.seed = options->seed;
      opts.threads = options->threads;
      opts.z_band = options->z_band;
      opts.calibration.trials = options->calibration_trials;
      opts.calibration.max_rounds = options->max_rounds;
      opts.calibration.seed = options->seed;
    }
    auto report = mwg::simulate(inst->inst, phi, trials, opts);
    *out = new mwg_simulation{inst->inst, std::move(report)};
  });
}

void mwg_simulation_destroy(mwg_simulation* sim) { delete sim; }

mwg_status mwg_simulation_summary_get(const mwg_simulation* sim,
                                      mwg_sim_summary* out) {
  return guarded([&] {
    require(sim, "sim");
    require(out, "out");
    const auto& r = sim->report;
    out->trials = r.trials;
    out->seed = r.seed;
    out->phi = r.phi;
    out->capacity_violations = r.capacity_violations;
    out->bins = static_cast<int>(r.bins.size());
    out->bins_within_P = r.bins_within_P;
    out->bins_within_A = r.bins_within_A;
    out->bins_within_merit = r.bins_within_merit;
    out->within_bands = r.within_bands() ? 1 : 0;
    out->max_dev_P = r.max_dev_P;
    out->max_dev_A = r.max_dev_A;
    out->payoff_hat = r.payoff_hat;
    out->payoff_se = r.payoff_se;
    out->payoff_target = r.payoff_target;
    out->calibration_rounds = r.calibration.rounds;
  });
}

mwg_status mwg_simulation_json(const mwg_simulation* sim, char** out) {
  return guarded([&] {
    require(sim, "sim");
    require(out, "out");
    *out = copy_string(mwg::sim_report_json(sim->report, sim->inst));
  });
}

mwg_status mwg_simulation_bins_csv(const mwg_simulation* sim, char** out) {
  return guarded([&] {
    require(sim, "sim");
    require(out, "out");
    *out = copy_string(mwg::sim_bins_csv(sim->report));
  });
}

mwg_status mwg_epic_witness_get(const mwg_instance* inst, double phi,
                                const mwg_simulation* sim, mwg_epic_witness* out,
                                char** json) {
  return guarded([&] {
    require(inst, "inst");
    require(out, "out");
    const mwg::BinWeights* audit = nullptr;
    if (sim != nullptr && sim->report.calibration.rounds > 0) {
      audit = &sim->report.calibration.audit;
    }
    const auto w = mwg::epic_counterexample(inst->inst, phi, audit);
    out->agent = w.agent;
    out->true_type = w.true_type;
    out->deviation = w.deviation;
    out->truthful_allocation = w.truthful_allocation;
    out->escape_probability = w.escape_probability;
    out->uniform_escape_probability = w.uniform_escape_probability;
    out->lower_bound = w.lower_bound;
    out->gain = w.gain;
    if (json != nullptr) *json = copy_string(mwg::epic_witness_json(w, inst->inst, phi));
  });
}

mwg_status mwg_discrete_from_json(const char* text, mwg_discrete** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = nullptr;
    *out = new mwg_discrete{mwg::parse_discrete_instance(text)};
  });
}

mwg_status mwg_discrete_to_json(const mwg_discrete* inst, char** out) {
  return guarded([&] {
    require(inst, "inst");
    require(out, "out");
    *out = copy_string(mwg::discrete_instance_json(inst->inst));
  });
}

void mwg_discrete_destroy(mwg_discrete* inst) { delete inst; }

mwg_status mwg_discretize(const mwg_instance* inst, double phi, int bins,
                          mwg_discrete** out, char** rule_json) {
  return guarded([&] {
    require(inst, "inst");
    require(out, "out");
    *out = nullptr;
    const auto rules = mwg::merit_with_guarantee(phi, inst->inst);
    auto d = mwg::discretize(rules, {.bins = bins});
    if (rule_json != nullptr) *rule_json = copy_string(mwg::interim_table_json(d.P));
    *out = new mwg_discrete{std::move(d.instance)};
  });
}

mwg_status mwg_check(const mwg_discrete* inst, const char* rule_json,
                     mwg_check_mode mode, mwg_verdict** out) {
  return guarded([&] {
    require(inst, "inst");
    require(rule_json, "rule_json");
    require(out, "out");
    *out = nullptr;
    const auto P = mwg::parse_interim_table(rule_json);
    mwg::FeasibilityVerdict v;
    switch (mode) {
      case MWG_CHECK_FLOW:
        v = mwg::check_feasible(inst->inst, P);
        break;
      case MWG_CHECK_UPPER_SETS:
        v = mwg::check_upper_sets(inst->inst, P);
        break;
      case MWG_CHECK_INTERIM_ALLOCATION:
        v = mwg::check_interim_allocation(inst->inst, P);
        break;
      default:
        throw mwg::InvalidArgument("unknown check mode");
    }
    *out = new mwg_verdict{std::make_shared<const mwg::DiscreteInstance>(inst->inst),
                           std::move(v)};
  });
}

void mwg_verdict_destroy(mwg_verdict* verdict) { delete verdict; }

int mwg_verdict_feasible(const mwg_verdict* verdict) {
  return verdict != nullptr && verdict->verdict.feasible ? 1 : 0;
}

mwg_status mwg_verdict_violation(const mwg_verdict* verdict, double* lhs,
                                 double* rhs) {
  return guarded([&] {
    require(verdict, "verdict");
    if (!verdict->verdict.violation) {
      throw mwg::InvalidArgument("verdict has no violated set");
    }
    set(lhs, verdict->verdict.violation->lhs);
    set(rhs, verdict->verdict.violation->rhs);
  });
}

mwg_status mwg_verdict_json(const mwg_verdict* verdict, char** out) {
  return guarded([&] {
    require(verdict, "verdict");
    require(out, "out");
    *out = copy_string(mwg::verdict_json(verdict->verdict, *verdict->inst));
  });
}

mwg_status mwg_envelope_csv(const mwg_instance* inst, double phi, int points,
                            char** out) {
  return guarded([&] {
    require(inst, "inst");
    require(out, "out");
    if (!(phi >= 0.0 && phi <= inst->inst.phi_max() * (1 + 1e-12))) {
      throw mwg::InvalidArgument("phi must lie in [0, m/n]");
    }
    *out = copy_string(mwg::envelope_csv(inst->inst, phi, points));
  });
}

mwg_status mwg_interim_csv(const mwg_instance* inst, double phi, int points,
                           char** out) {
  return guarded([&] {
    require(inst, "inst");
    require(out, "out");
    const auto rules = mwg::merit_with_guarantee(phi, inst->inst);
    *out = copy_string(mwg::interim_csv(rules, points));
  });
}

}  // extern "C"
