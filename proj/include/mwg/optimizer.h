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

#ifndef MWG_OPTIMIZER_H_
#define MWG_OPTIMIZER_H_

#include <string>
#include <vector>

#include "mwg/envelope.h"

namespace mwg {

// Total expected payoff n * E[P(t) t] of the merit-with-guarantee rule with
// guarantee phi, integrated piecewise over the envelope partition.
double payoff(double phi, const ProblemInstance& inst);
double payoff(const RegionPartition& part, const ProblemInstance& inst);

// Left side minus right side of the first-order condition in the cutoffs
// (gamma1, gamma2, gamma3); equals -(1/n) dU/dphi. Throws InvalidArgument
// when the envelope has no ic region.
double foc_residual(double phi, const ProblemInstance& inst);
double foc_residual(const RegionPartition& part, const ProblemInstance& inst);

struct Baselines {
  double first_best = 0.0;
  double random_lottery = 0.0;
  // Allocate to the k highest reports, then a uniform lottery for the
  // remaining m - k objects among the other n - k agents.
  double k_top = 0.0;
};

Baselines baseline_payoffs(const ProblemInstance& inst);

// Interim allocation probability of the k-top rule at quantile q.
double k_top_interim(double q, const ProblemInstance& inst);

enum class CandidateSource { kFocRoot, kEndpoint, kGrid };

const char* to_string(CandidateSource s);

struct Candidate {
  double phi = 0.0;
  double payoff = 0.0;
  CandidateSource source = CandidateSource::kGrid;
};

struct SolveOptions {
  int grid_intervals = 200;
  double root_tol = 1e-10;
  double golden_tol = 1e-9;
  // Largest tolerated payoff gap between the argmax and the golden-section
  // maximum.
  double agreement_tol = 1e-7;
};

struct SolveReport {
  double phi_star = 0.0;
  double payoff = 0.0;
  // NaN when the residual is undefined at phi_star (no ic region).
  double foc_residual = 0.0;
  bool interior = false;
  RegionPartition partition;
  Baselines baselines;
  // Sorted by phi, then by source.
  std::vector<Candidate> candidates;
  double golden_phi = 0.0;
  double golden_payoff = 0.0;
};

SolveReport solve(const ProblemInstance& inst, const SolveOptions& options = {});

// Maximizer of f on [a, b] by golden-section search; returns {x, f(x)}.
std::pair<double, double> golden_section_max(const RealFn& f,
                                             double a, double b, double tol);

}  // namespace mwg

#endif  // MWG_OPTIMIZER_H_
