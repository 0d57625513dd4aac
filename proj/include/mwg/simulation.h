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

// Monte Carlo realisation of the merit-with-guarantee mechanism: a merit
// stage, a weighted lottery for the leftover objects and a weighted audit
// selection among merit winners. Lottery and audit weights are piecewise
// constant on equal-probability type bins and calibrated by damped
// fixed-point iteration.

#ifndef MWG_SIMULATION_H_
#define MWG_SIMULATION_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mwg/envelope.h"

namespace mwg {

// A weight per equal-probability bin of the type distribution; bin b covers
// quantiles [b/B, (b+1)/B).
struct BinWeights {
  std::vector<double> w;

  int bins() const { return static_cast<int>(w.size()); }
  int bin_of_quantile(double q) const;
  double at_quantile(double q) const { return w[bin_of_quantile(q)]; }
  static BinWeights uniform(int bins) { return {std::vector<double>(bins, 1.0)}; }
};

enum class Stage { kNone, kMerit, kLottery };

const char* to_string(Stage s);

struct ProfileOutcome {
  std::vector<double> profile;
  std::vector<int> allocated;  // agent indices, ascending
  std::vector<int> audited;    // agent indices, ascending
  std::vector<Stage> stage;    // per agent
};

// Agents who win in the merit stage: an allo type among the m highest
// reports or an aud type among the k highest. A profile with two equal
// reports allocates nothing in this stage.
std::vector<int> merit_allocate(const std::vector<double>& profile,
                                const RegionPartition& part,
                                const ProblemInstance& inst);

// Allocates min(m - |merit_winners|, |eligible|) objects among agents of
// type aud or ic that did not win on merit, by sampling without replacement
// proportional to the lottery weights.
std::vector<int> lottery_allocate(const std::vector<double>& profile,
                                  const std::vector<int>& merit_winners,
                                  const BinWeights& weights,
                                  const RegionPartition& part,
                                  const ProblemInstance& inst,
                                  std::mt19937_64& rng);

// Audits every aud merit winner. The remaining k' = k - (aud winners)
// audits go to allo merit winners: all of them if there are at most k',
// otherwise a size-k' sample drawn proportional to the audit weights.
std::vector<int> audit_select(const std::vector<double>& profile,
                              const std::vector<int>& merit_winners,
                              const BinWeights& weights,
                              const RegionPartition& part,
                              const ProblemInstance& inst,
                              std::mt19937_64& rng);

// Runs the three stages on one profile.
ProfileOutcome run_mechanism(const std::vector<double>& profile,
                             const BinWeights& lottery,
                             const BinWeights& audit,
                             const RegionPartition& part,
                             const ProblemInstance& inst,
                             std::mt19937_64& rng);

struct CalibrationOptions {
  int bins = 64;
  // 0 selects max(1e5, 4 * simulation trials) in simulate(), 1e5 otherwise.
  std::int64_t trials = 0;
  int max_rounds = 100;
  double damping = 0.5;
  double z_tol = 2.0;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
};

struct Calibration {
  BinWeights lottery;
  BinWeights audit;
  int rounds = 0;
  bool converged = false;
  double lottery_max_z = 0.0;
  double audit_max_z = 0.0;
  // Sample total over target total; close to 1 when the targets are
  // consistent with the supply and audit capacity.
  double lottery_scale = 1.0;
  double audit_scale = 1.0;
  std::int64_t trials = 0;
};

// Calibrates both weight families on one fixed sample of profiles (common
// random numbers across rounds). Deviations are measured against targets
// rescaled to the sample's total lottery wins and audits, which the weights
// cannot change. Throws NumericalError if max |z| stays above z_tol after
// max_rounds.
Calibration calibrate(const ProblemInstance& inst, const RegionPartition& part,
                      const CalibrationOptions& options);

// Lottery half of calibrate().
BinWeights calibrate_lottery(const ProblemInstance& inst,
                             const RegionPartition& part, std::int64_t trials,
                             std::uint64_t seed = 1);

struct BinStat {
  double q_lo = 0.0;
  double q_hi = 0.0;
  double t_mid = 0.0;
  std::int64_t count = 0;
  double P_target = 0.0;
  double P_hat = 0.0;
  double A_target = 0.0;
  double A_hat = 0.0;
  double merit_target = 0.0;
  double merit_hat = 0.0;
  double se_P = 0.0;
  double se_A = 0.0;
  double se_merit = 0.0;
};

struct SimOptions {
  int bins = 64;
  std::uint64_t seed = 1;
  int threads = 0;
  double z_band = 3.0;
  CalibrationOptions calibration;
};

struct SimReport {
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double phi = 0.0;
  std::vector<BinStat> bins;
  double max_dev_P = 0.0;
  double max_dev_A = 0.0;
  int bins_within_P = 0;
  int bins_within_A = 0;
  int bins_within_merit = 0;
  std::int64_t capacity_violations = 0;
  double payoff_hat = 0.0;
  double payoff_se = 0.0;
  double payoff_target = 0.0;
  Calibration calibration;

  // At most bins/32 bins (2 of 64) may fall outside the z_band.
  bool within_bands() const;
};

SimReport simulate(const ProblemInstance& inst, double phi, std::int64_t trials,
                   const SimOptions& options = {});

// Ex-post IC failure witness.
struct EpicWitness {
  std::vector<double> profile;  // truthful profile, deviator first
  int agent = 0;
  double true_type = 0.0;
  double deviation = 0.0;
  double truthful_allocation = 0.0;
  // Probability that the deviator wins on merit and is not audited, under
  // the given audit weights.
  double escape_probability = 0.0;
  // Same with uniform audit weights, (m - k) / m.
  double uniform_escape_probability = 0.0;
  double lower_bound = 0.0;  // (m - k) / m
  double gain = 0.0;
};

// Expected allocation of agent i at the profile with i's report replaced,
// minus its allocation when truthful. A liar who is audited loses the
// object. Exact: inclusion probabilities of weighted sampling without
// replacement are enumerated (at most 20 candidates).
double deviation_gain(const std::vector<double>& profile, int agent,
                      double report, const BinWeights& lottery,
                      const BinWeights& audit, const RegionPartition& part,
                      const ProblemInstance& inst);

// Builds a truthful low type with zero allocation, m other agents in the
// top allo region, and a report above the m-th of them in the bin with the
// smallest audit weight. With uniform weights the escape probability is
// exactly (m - k) / m.
EpicWitness epic_counterexample(const ProblemInstance& inst, double phi,
                                const BinWeights* audit = nullptr);

// Probability that item i is among the first `picks` draws when sampling
// without replacement proportional to weights.
double inclusion_probability(const std::vector<double>& weights, int i,
                             int picks);

}  // namespace mwg

#endif  // MWG_SIMULATION_H_
