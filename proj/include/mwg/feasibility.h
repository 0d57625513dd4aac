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

// Exact feasibility of interim rules on finite type grids with
// profile-dependent capacity h(t) and eligibility J(t). A rule is feasible
// iff for every check set E = (E_1, ..., E_n)
//   sum_i sum_{tau in E_i} f_i(tau) P_i(tau)
//       <= sum_t f(t) min{|J(t) & I(t, E)|, h(t)},
// where I(t, E) = {i : t_i in E_i}. The general check is a maximum flow on
// the profile network; a minimum cut yields a violated set.

#ifndef MWG_FEASIBILITY_H_
#define MWG_FEASIBILITY_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mwg/envelope.h"
#include "mwg/interim.h"

namespace mwg {

// Type index per agent.
using Profile = std::vector<int>;
// Interim probabilities indexed [agent][type index].
using InterimTable = std::vector<std::vector<double>>;

struct DiscreteInstance {
  // Strictly increasing types and their probabilities, per agent.
  std::vector<std::vector<double>> grids;
  std::vector<std::vector<double>> masses;
  // h(t): default plus overrides keyed by linear profile index.
  int default_capacity = 1;
  std::map<std::int64_t, int> capacity;
  // J(t) as an agent bitmask; profiles without an override admit everyone.
  std::map<std::int64_t, std::uint32_t> eligible;

  int agents() const { return static_cast<int>(grids.size()); }
  int grid_size(int agent) const { return static_cast<int>(grids[agent].size()); }
  // Throws InvalidArgument when the count does not fit in 62 bits.
  std::int64_t profile_count() const;
  // Agent 0 is the most significant digit.
  std::int64_t index(const Profile& t) const;
  Profile profile_at(std::int64_t index) const;
  int h(std::int64_t index) const;
  std::uint32_t J(std::int64_t index) const;
  double prob(const Profile& t) const;
  // Identical grids and masses for all agents.
  bool symmetric_grids() const;
  void validate() const;
};

// E_i as sorted type indices.
struct CheckSet {
  std::vector<std::vector<int>> members;
};

struct Violation {
  CheckSet set;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Allocation probabilities p_i(t), stored profile-major.
struct ExPostRule {
  int agents = 0;
  std::vector<double> p;

  double at(std::int64_t profile, int agent) const {
    return p[static_cast<size_t>(profile) * agents + agent];
  }
};

struct FeasibilityVerdict {
  bool feasible = false;
  std::optional<Violation> violation;
  // Present for feasible flow verdicts when requested.
  std::optional<ExPostRule> expost;
  // "flow", "upper-sets" or "threshold".
  std::string method;
  // Flow verdicts only, in probability units.
  double total_demand = 0.0;
  double max_flow = 0.0;
  // Probability represented by one unit of integer flow.
  double resolution = 0.0;
};

struct FlowOptions {
  std::int64_t max_profiles = std::int64_t{1} << 21;
  bool build_expost = true;
  // Every demand is lowered by this much before rounding, so floating-point
  // noise in a rule that meets some inequality with equality is not read as
  // a violation. Constructed rules match P within tolerance + resolution.
  double tolerance = 1e-12;
};

double border_lhs(const DiscreteInstance& inst, const InterimTable& P,
                  const CheckSet& E);
double border_rhs(const DiscreteInstance& inst, const CheckSet& E,
                  std::int64_t max_profiles = FlowOptions{}.max_profiles);

// Max-flow decision in integer units. When every mass is a multiple of 1/D
// for a small D the units are exact; otherwise capacities are rounded and
// each demand carries a margin covering the rounding.
FeasibilityVerdict check_feasible(const DiscreteInstance& inst,
                                  const InterimTable& P,
                                  const FlowOptions& options = {});

// Checks only sets whose components are upward closed (per-agent
// thresholds). Necessary, not sufficient, for feasibility.
FeasibilityVerdict check_upper_sets(const DiscreteInstance& inst,
                                    const InterimTable& P,
                                    const FlowOptions& options = {});

// Symmetric grids, h == default capacity everywhere, J == all agents and
// the same non-decreasing P for every agent: only common thresholds
// [e, top] are checked, with the binomial supply bound. Other inputs go to
// check_feasible.
FeasibilityVerdict check_interim_allocation(const DiscreteInstance& inst,
                                            const InterimTable& P,
                                            const FlowOptions& options = {});

// Deterministic allocation: bitmask of winners at a profile.
using AllocationRule = std::function<std::uint32_t(const Profile&)>;

// Grid index range of the aud region; the allo region is [aud_end, top].
struct AuditFamily {
  int aud_begin = 0;
  int aud_end = 0;
};

// Copy of `base` with h == k and J(t) = winners of `merit`.
DiscreteInstance audit_instance(const DiscreteInstance& base,
                                const AllocationRule& merit, int k,
                                std::int64_t max_profiles = FlowOptions{}.max_profiles);

// Audit feasibility given the merit allocation. With a family only the sets
// [a, aud_end) + [d, top] are checked, the same for every agent sharing agent
// 0's grid and empty for the others; otherwise the general flow decides.
FeasibilityVerdict check_interim_audit(const DiscreteInstance& base,
                                       const AllocationRule& merit, int k,
                                       const InterimTable& A,
                                       const AuditFamily* family = nullptr,
                                       const FlowOptions& options = {});

// Throws InfeasibleError when no ex-post rule exists.
ExPostRule construct_expost(const DiscreteInstance& inst, const InterimTable& P,
                            const FlowOptions& options = {});

InterimTable expost_marginals(const DiscreteInstance& inst, const ExPostRule& rule);

// Finite-grid version of a merit-with-guarantee rule. Types are cells of
// the quantile axis, represented by their midpoint type, and the tables hold
// cell averages of the continuous rule.
struct Discretization {
  DiscreteInstance instance;
  // Cell boundaries in quantile space, size cells + 1.
  std::vector<double> q_edges;
  std::vector<Constraint> labels;
  InterimTable P;
  InterimTable A;
  // Index of the tie-breaking coordinate, or -1.
  int tie_breaker = -1;
};

struct DiscretizeOptions {
  int bins = 64;
  // Split the cells containing region boundaries so every cell carries one
  // label.
  bool align_regions = false;
  // Append a public coordinate with n! equally likely agent orderings used to
  // break ties in the merit stage (never eligible, zero demand).
  bool tie_breaker = false;
};

// h == m and J == all agents.
Discretization discretize(const InterimRules& rules,
                          const DiscretizeOptions& options = {});

AuditFamily audit_family(const std::vector<Constraint>& labels);

// Merit stage on a grid shared by the first n agents: allo types among the m
// highest and aud types among the k highest win. Ties in type index
// allocate nothing, unless the profile carries a tie-breaking coordinate at
// position n, which then orders tied agents.
AllocationRule discrete_merit_rule(std::vector<Constraint> labels, int n, int m,
                                   int k);

}  // namespace mwg

#endif  // MWG_FEASIBILITY_H_
