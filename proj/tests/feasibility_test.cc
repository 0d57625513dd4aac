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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "border_oracle.h"
#include "mwg/error.h"
#include "mwg/feasibility.h"
#include "mwg/max_flow.h"
#include "mwg/optimizer.h"

namespace mwg {
namespace {

constexpr double kPhiStar = 0.347644426880308716;

TEST(MaxFlow, TextbookNetwork) {
  // Six-node network with maximum flow 23.
  MaxFlow f(6);
  f.add_edge(0, 1, 16);
  f.add_edge(0, 2, 13);
  f.add_edge(1, 2, 10);
  f.add_edge(2, 1, 4);
  f.add_edge(1, 3, 12);
  f.add_edge(3, 2, 9);
  f.add_edge(2, 4, 14);
  f.add_edge(4, 3, 7);
  f.add_edge(3, 5, 20);
  f.add_edge(4, 5, 4);
  EXPECT_EQ(f.run(0, 5), 23);
  const auto side = f.source_side(0);
  EXPECT_TRUE(side[0]);
  EXPECT_FALSE(side[5]);
  EXPECT_THROW(f.add_edge(0, 9, 1), InvalidArgument);
  EXPECT_THROW(f.add_edge(0, 1, -1), InvalidArgument);
}

// Two agents with two equally likely types; objects available per profile
// given by the table rows (low, high) of agent 1 against agent 2.
DiscreteInstance TwoAgent() {
  DiscreteInstance inst;
  inst.grids = {{0.0, 1.0}, {0.0, 1.0}};
  inst.masses = {{0.5, 0.5}, {0.5, 0.5}};
  inst.default_capacity = 0;
  inst.capacity = {{inst.index({0, 1}), 1}, {inst.index({1, 0}), 2}};
  return inst;
}

TEST(Border, TwoAgentRhs) {
  const auto inst = TwoAgent();
  EXPECT_DOUBLE_EQ(border_rhs(inst, CheckSet{{{0}, {1}}}), 0.25);
  EXPECT_EQ(border_rhs(inst, CheckSet{{{}, {}}}), 0.0);
  EXPECT_DOUBLE_EQ(border_lhs(inst, {{0.25, 0.25}, {0.25, 0.5}}, CheckSet{{{0}, {1}}}),
                   0.375);
}

TEST(Border, SupplyBoundOnFullSets) {
  DiscreteInstance inst;
  inst.grids.assign(4, {0.1, 0.5, 0.9});
  inst.masses.assign(4, {0.25, 0.5, 0.25});
  inst.default_capacity = 2;
  CheckSet all{std::vector<std::vector<int>>(4, {0, 1, 2})};
  EXPECT_NEAR(border_rhs(inst, all), 2.0, 1e-15);
}

TEST(Feasible, TwoAgentCounterexample) {
  const auto inst = TwoAgent();
  const InterimTable P{{0.25, 0.25}, {0.25, 0.5}};
  const auto v = check_feasible(inst, P);
  EXPECT_FALSE(v.feasible);
  ASSERT_TRUE(v.violation.has_value());
  EXPECT_EQ(v.violation->set.members, (std::vector<std::vector<int>>{{0}, {1}}));
  EXPECT_DOUBLE_EQ(v.violation->lhs, 0.375);
  EXPECT_DOUBLE_EQ(v.violation->rhs, 0.25);
  EXPECT_FALSE(v.expost.has_value());
  EXPECT_NEAR(v.total_demand - v.max_flow, 0.125, 1e-12);

  const auto upper = check_upper_sets(inst, P);
  EXPECT_TRUE(upper.feasible);
  EXPECT_EQ(upper.method, "upper-sets");
  EXPECT_THROW(construct_expost(inst, P), InfeasibleError);
}

TEST(Feasible, TwoAgentRepairedRuleIsRealized) {
  const auto inst = TwoAgent();
  const InterimTable P{{0.25, 0.25}, {0.25, 0.25}};
  const auto rule = construct_expost(inst, P, FlowOptions{.tolerance = 0.0});
  const auto marginals = expost_marginals(inst, rule);
  for (int i = 0; i < 2; ++i) {
    for (int t = 0; t < 2; ++t) EXPECT_DOUBLE_EQ(marginals[i][t], P[i][t]);
  }
}

TEST(Feasible, ZeroRule) {
  const auto inst = TwoAgent();
  const auto v = check_feasible(inst, {{0.0, 0.0}, {0.0, 0.0}});
  EXPECT_TRUE(v.feasible);
  ASSERT_TRUE(v.expost.has_value());
  for (double p : v.expost->p) EXPECT_EQ(p, 0.0);
}

TEST(Feasible, SingleAgentHalf) {
  DiscreteInstance inst;
  inst.grids = {{0.0, 0.3, 0.7}};
  inst.masses = {{0.2, 0.3, 0.5}};
  inst.default_capacity = 1;
  const auto rule = construct_expost(inst, {{0.5, 0.5, 0.5}});
  for (double p : rule.p) EXPECT_NEAR(p, 0.5, 1e-12);
}

TEST(Feasible, InputValidation) {
  auto inst = TwoAgent();
  EXPECT_THROW(check_feasible(inst, {{0.5, 1.5}, {0.0, 0.0}}), InvalidArgument);
  EXPECT_THROW(check_feasible(inst, {{0.5, 0.5}}), InvalidArgument);
  FlowOptions small;
  small.max_profiles = 3;
  EXPECT_THROW(check_feasible(inst, {{0, 0}, {0, 0}}, small), InvalidArgument);
  inst.masses[0] = {0.5, 0.6};
  EXPECT_THROW(inst.validate(), InvalidArgument);
  inst = TwoAgent();
  inst.grids[1] = {1.0, 0.0};
  EXPECT_THROW(inst.validate(), InvalidArgument);
}

using oracle::BruteForce;
using oracle::RandomInstance;
using oracle::RandomRule;

void CheckAgainstOracle(bool rational, double tol) {
  std::mt19937_64 rng(rational ? 101 : 202);
  int feasible = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = RandomInstance(rng, rational);
    const auto P = RandomRule(inst, rng);
    const auto brute = BruteForce(inst, P);
    FlowOptions options;
    options.tolerance = 0.0;
    const auto v = check_feasible(inst, P, options);
    // Max-flow equals total demand plus the smallest slack (E = {} gives 0).
    EXPECT_NEAR(v.max_flow - v.total_demand, brute.min_slack, tol) << trial;
    if (brute.min_slack < -1e-9) {
      ++infeasible;
      EXPECT_FALSE(v.feasible) << trial;
      ASSERT_TRUE(v.violation.has_value());
      // Recompute the witness independently.
      const CheckSet& E = v.violation->set;
      double lhs = 0.0;
      for (int i = 0; i < inst.agents(); ++i) {
        for (int t : E.members[i]) lhs += inst.masses[i][t] * P[i][t];
      }
      const double rhs = border_rhs(inst, E);
      EXPECT_GT(lhs, rhs) << trial;
      EXPECT_NEAR(rhs - lhs, brute.min_slack, tol) << trial;
    } else if (brute.min_slack > -1e-15) {
      ++feasible;
      EXPECT_TRUE(v.feasible) << trial;
    }
  }
  EXPECT_GT(feasible, 5);
  EXPECT_GT(infeasible, 5);
}

TEST(Feasible, MatchesExhaustiveEnumerationRational) { CheckAgainstOracle(true, 1e-12); }

TEST(Feasible, MatchesExhaustiveEnumerationReal) { CheckAgainstOracle(false, 1e-9); }

TEST(Feasible, ConstructedRulesRespectProfiles) {
  std::mt19937_64 rng(303);
  int built = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = RandomInstance(rng, trial % 2 == 0);
    auto P = RandomRule(inst, rng);
    for (auto& row : P) {
      for (double& p : row) p *= 0.3;
    }
    const auto v = check_feasible(inst, P);
    if (!v.feasible) continue;
    ++built;
    const auto& rule = *v.expost;
    for (std::int64_t idx = 0; idx < inst.profile_count(); ++idx) {
      double sum = 0.0;
      for (int i = 0; i < inst.agents(); ++i) {
        const double p = rule.at(idx, i);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0 + 1e-15);
        if (!(inst.J(idx) >> i & 1u)) EXPECT_EQ(p, 0.0);
        sum += p;
      }
      EXPECT_LE(sum, inst.h(idx) + 1e-12);
    }
    const auto marginals = expost_marginals(inst, rule);
    for (int i = 0; i < inst.agents(); ++i) {
      for (int t = 0; t < inst.grid_size(i); ++t) {
        EXPECT_NEAR(marginals[i][t], P[i][t], 1e-9);
      }
    }
  }
  EXPECT_GT(built, 10);
}

TEST(InterimAllocation, DiscretizedExampleIsFeasible) {
  const auto rules = merit_with_guarantee(kPhiStar, make_instance(3, 2, 1));
  const auto d = discretize(rules, {.bins = 16});
  const auto fast = check_interim_allocation(d.instance, d.P);
  EXPECT_TRUE(fast.feasible);
  EXPECT_EQ(fast.method, "upper-sets");
  const auto flow = check_feasible(d.instance, d.P);
  EXPECT_TRUE(flow.feasible);
  const auto marginals = expost_marginals(d.instance, *flow.expost);
  for (int i = 0; i < 3; ++i) {
    for (int b = 0; b < 16; ++b) EXPECT_NEAR(marginals[i][b], d.P[i][b], 1e-9);
  }
}

TEST(InterimAllocation, FullDemandExceedsSupply) {
  DiscreteInstance inst;
  inst.grids.assign(3, {0.2, 0.8});
  inst.masses.assign(3, {0.5, 0.5});
  inst.default_capacity = 2;
  const InterimTable ones(3, {1.0, 1.0});
  const auto v = check_interim_allocation(inst, ones);
  EXPECT_FALSE(v.feasible);
  ASSERT_TRUE(v.violation.has_value());
  EXPECT_EQ(v.violation->set.members,
            (std::vector<std::vector<int>>(3, {0, 1})));
  EXPECT_DOUBLE_EQ(v.violation->lhs, 3.0);
  EXPECT_DOUBLE_EQ(v.violation->rhs, 2.0);
  EXPECT_FALSE(check_feasible(inst, ones).feasible);
}

TEST(InterimAllocation, EfficientRuleBindsOnEveryUpperSet) {
  const auto inst = make_instance(4, 2, 1);
  const int bins = 8;
  DiscreteInstance d;
  std::vector<double> grid, mass(bins, 1.0 / bins), P(bins);
  for (int b = 0; b < bins; ++b) {
    grid.push_back((b + 0.5) / bins);
    // Cell average of the top-m probability.
    P[b] = (c_allo(double(b) / bins, inst) - c_allo(double(b + 1) / bins, inst)) *
           bins / inst.n;
  }
  d.grids.assign(4, grid);
  d.masses.assign(4, mass);
  d.default_capacity = 2;
  const InterimTable table(4, P);
  EXPECT_TRUE(check_interim_allocation(d, table).feasible);
  EXPECT_TRUE(check_feasible(d, table).feasible);
  for (int e = 0; e < bins; ++e) {
    CheckSet E;
    for (int i = 0; i < 4; ++i) {
      E.members.emplace_back();
      for (int b = e; b < bins; ++b) E.members.back().push_back(b);
    }
    EXPECT_NEAR(border_lhs(d, table, E), border_rhs(d, E), 1e-12) << e;
  }
}

TEST(MeritRule, TieBreaking) {
  const std::vector<Constraint> labels{Constraint::kIc, Constraint::kAud,
                                       Constraint::kAllo};
  const auto strict = discrete_merit_rule(labels, 3, 2, 1);
  EXPECT_EQ(strict({2, 2, 0}), 0u);
  EXPECT_EQ(strict({2, 1, 0}), 0b001u);
  EXPECT_EQ(strict({1, 2, 1}), 0u);
  EXPECT_EQ(strict({1, 0, 2}), 0b100u);
  EXPECT_EQ(strict({1, 0, 0}), 0u);
  // Ordering 0 is the identity: lower index first among ties.
  EXPECT_EQ(strict({2, 2, 2, 0}), 0b011u);
  // Ordering 5 (last) reverses the agents.
  EXPECT_EQ(strict({2, 2, 2, 5}), 0b110u);
  EXPECT_EQ(strict({1, 1, 0, 5}), 0b010u);
  EXPECT_THROW(strict({0, 1}), InvalidArgument);
}

class AuditFeasibility : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto inst = make_instance(3, 2, 1);
    const auto rules = merit_with_guarantee(kPhiStar, inst);
    d_ = discretize(rules, {.bins = 12, .align_regions = true, .tie_breaker = true});
    merit_ = discrete_merit_rule(d_.labels, 3, 2, 1);
    family_ = audit_family(d_.labels);
  }

  Discretization d_;
  AllocationRule merit_;
  AuditFamily family_;
};

TEST_F(AuditFeasibility, ExampleIsFeasible) {
  EXPECT_EQ(d_.labels[family_.aud_begin], Constraint::kAud);
  EXPECT_EQ(d_.labels[family_.aud_end], Constraint::kAllo);
  EXPECT_EQ(d_.labels[family_.aud_begin - 1], Constraint::kIc);
  const auto flow = check_interim_audit(d_.instance, merit_, 1, d_.A);
  EXPECT_TRUE(flow.feasible);
  EXPECT_EQ(flow.method, "flow");
  const auto fast = check_interim_audit(d_.instance, merit_, 1, d_.A, &family_);
  EXPECT_TRUE(fast.feasible);
  EXPECT_EQ(fast.method, "threshold");
}

TEST_F(AuditFeasibility, WorstThresholdSetEqualsWorstSet) {
  for (double factor : {1.02, 1.1, 1.3}) {
    auto A = d_.A;
    for (auto& row : A) {
      for (double& a : row) a = std::min(1.0, a * factor);
    }
    const auto flow = check_interim_audit(d_.instance, merit_, 1, A);
    const auto fast = check_interim_audit(d_.instance, merit_, 1, A, &family_);
    ASSERT_FALSE(flow.feasible);
    ASSERT_FALSE(fast.feasible);
    EXPECT_GT(flow.violation->lhs, flow.violation->rhs);
    EXPECT_NEAR(flow.total_demand - flow.max_flow,
                fast.violation->lhs - fast.violation->rhs, 1e-7)
        << factor;
  }
}

TEST_F(AuditFeasibility, AuditingEveryWinner) {
  // Interim merit probabilities by enumeration.
  const auto& inst = d_.instance;
  InterimTable M(inst.agents());
  for (int i = 0; i < inst.agents(); ++i) M[i].assign(inst.grid_size(i), 0.0);
  for (std::int64_t idx = 0; idx < inst.profile_count(); ++idx) {
    const auto t = inst.profile_at(idx);
    const auto winners = merit_(t);
    for (int i = 0; i < 3; ++i) {
      if (winners >> i & 1u) M[i][t[i]] += inst.prob(t) / inst.masses[i][t[i]];
    }
  }
  EXPECT_TRUE(check_interim_audit(inst, merit_, 3, M).feasible);
  // With one audit the same demand cannot be met.
  EXPECT_FALSE(check_interim_audit(inst, merit_, 1, M).feasible);
}

TEST(Discretize, CellsAndAverages) {
  const auto rules = merit_with_guarantee(kPhiStar, make_instance(3, 2, 1));
  const auto plain = discretize(rules, {.bins = 8});
  EXPECT_EQ(plain.instance.grid_size(0), 8);
  EXPECT_DOUBLE_EQ(plain.instance.masses[0][3], 0.125);
  EXPECT_NEAR(plain.P[0][0], kPhiStar, 1e-12);
  EXPECT_NEAR(plain.P[0][7], (c_allo(0.875, rules.instance()) - 0.0) * 8 / 3, 1e-12);
  const auto aligned = discretize(rules, {.bins = 8, .align_regions = true});
  EXPECT_EQ(aligned.instance.grid_size(0), 10);
  for (size_t c = 0; c + 1 < aligned.q_edges.size(); ++c) {
    const double lo = aligned.q_edges[c];
    const double hi = aligned.q_edges[c + 1];
    EXPECT_EQ(rules.partition().label_at_quantile(lo + 1e-9 * (hi - lo)),
              rules.partition().label_at_quantile(hi - 1e-9 * (hi - lo)));
  }
  EXPECT_THROW(discretize(rules, {.bins = 0}), InvalidArgument);
}

}  // namespace
}  // namespace mwg
