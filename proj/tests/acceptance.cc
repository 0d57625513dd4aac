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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "border_oracle.h"
#include "mwg/envelope.h"
#include "mwg/feasibility.h"
#include "mwg/interim.h"
#include "mwg/optimizer.h"
#include "mwg/simulation.h"

namespace mwg {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));

std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

ProblemInstance Example() { return make_instance(3, 2, 1); }

// Random (n, m, k) with 0 < k < m < n <= max_n.
ProblemInstance RandomShape(std::mt19937_64& rng, int max_n, TypeDistribution dist) {
  const int n = std::uniform_int_distribution<int>(3, max_n)(rng);
  const int m = std::uniform_int_distribution<int>(2, n - 1)(rng);
  const int k = std::uniform_int_distribution<int>(1, m - 1)(rng);
  return make_instance(n, m, k, std::move(dist));
}

Outcome ExampleReproduction() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = solve(Example());
  const double secs = Seconds(start);
  const bool pass = std::fabs(r.phi_star - 0.34764) <= 1e-4 &&
                    std::fabs(r.payoff - 1.223) <= 1e-3 &&
                    std::fabs(r.baselines.first_best - 1.25) <= 1e-9 &&
                    std::fabs(r.baselines.random_lottery - 1.0) <= 1e-12 && secs < 1.0;
  return {pass, Fmt("phi*=%.6f payoff=%.6f first_best=%.12f random_lottery=%.12f "
                    "time=%.3fs",
                    r.phi_star, r.payoff, r.baselines.first_best,
                    r.baselines.random_lottery, secs)};
}

Outcome ClosedForms() {
  const auto inst = Example();
  const double phi_star = solve(inst).phi_star;
  double worst = 0.0;
  for (double phi : {0.0, 1.0 / 3.0, phi_star, 0.5, 2.0 / 3.0}) {
    for (int i = 0; i < 1000; ++i) {
      const double t = i / 999.0;
      worst = std::max(worst, std::fabs(c_allo(t, inst) - (t * t * t - 3 * t * t + 2)));
      worst = std::max(worst, std::fabs(c_aud(t, phi, inst) -
                                        (-t * t * t - 3 * phi * t + 1 + 3 * phi)));
    }
  }
  return {worst <= 1e-12, Fmt("max |c - polynomial| = %.3g over 1000 points, 5 phi", worst)};
}

Outcome Derivatives() {
  std::mt19937_64 rng(11);
  const double h = 1e-6;
  double worst = 0.0;
  int max_n = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto inst = RandomShape(rng, 50, make_uniform());
    max_n = std::max(max_n, inst.n);
    const double phi = std::uniform_real_distribution<double>(0.0, inst.phi_max())(rng);
    for (int i = 0; i <= 980; ++i) {
      const double q = 0.01 + 0.001 * i;
      const double fd_allo = (c_allo(q + h, inst) - c_allo(q - h, inst)) / (2 * h);
      const double fd_aud = (c_aud(q + h, phi, inst) - c_aud(q - h, phi, inst)) / (2 * h);
      const double fd_ic = (c_ic(q + h, phi, inst) - c_ic(q - h, phi, inst)) / (2 * h);
      worst = std::max({worst, std::fabs(d_c_allo(q, inst) - fd_allo),
                        std::fabs(d_c_aud(q, phi, inst) - fd_aud),
                        std::fabs(d_c_ic(phi, inst) - fd_ic)});
    }
  }
  return {worst <= 1e-6,
          Fmt("max |formula - central difference| = %.3g (20 instances, n <= %d)", worst,
              max_n)};
}

// n * int_t^1 P dF by quadrature of P itself over the partition pieces.
double IntegrateP(const InterimRules& rules, double t) {
  const double q0 = rules.instance().dist.cdf(t);
  double total = 0.0;
  for (const auto& iv : rules.partition().intervals) {
    const double lo = std::max(iv.q_lo, q0);
    if (iv.q_hi <= lo) continue;
    // Evaluate strictly inside the piece so the rule's right-derivative
    // convention at the ends does not matter.
    const double width = iv.q_hi - lo;
    total += integrate(
        [&](double q) {
          return rules.P_at_quantile(std::clamp(q, lo + 1e-15 * width, iv.q_hi - 1e-15 * width));
        },
        lo, iv.q_hi, 1e-13);
  }
  return rules.instance().n * total;
}

Outcome InterimIdentity() {
  std::vector<ProblemInstance> cases{Example()};
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 5; ++rep) {
    const double alpha = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    cases.push_back(RandomShape(rng, 20, rep % 2 == 0 ? make_uniform() : make_power(alpha)));
  }
  double worst = 0.0;
  for (const auto& inst : cases) {
    const auto rules = merit_with_guarantee(solve(inst).phi_star, inst);
    for (int i = 0; i <= 100; ++i) {
      const double t = i / 100.0;
      const double c = envelope_value(inst.dist.cdf(t), rules.phi(), inst).first;
      worst = std::max(worst, std::fabs(IntegrateP(rules, t) - c));
    }
  }
  return {worst <= 1e-7,
          Fmt("max |n int_t^1 P dF - c_phi(F(t))| = %.3g (example + 5 random, 101 points)",
              worst)};
}

Outcome BicAndStructure() {
  std::vector<ProblemInstance> cases{Example()};
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 12; ++rep) {
    const double alpha = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    cases.push_back(RandomShape(rng, 25, rep % 2 == 0 ? make_uniform() : make_power(alpha)));
  }
  double worst_slack = 0.0;
  double worst_drop = 0.0;
  double worst_below = 0.0;
  int rules_checked = 0;
  int structure_failures = 0;
  for (const auto& inst : cases) {
    const auto r = solve(inst);
    if (!(r.partition.gamma2 < r.partition.gamma3) || r.phi_star < inst.phi_min()) {
      ++structure_failures;
    }
    std::vector<double> phis{r.phi_star};
    for (int j = 0; j <= 8; ++j) phis.push_back(inst.phi_max() * j / 8.0);
    for (double phi : phis) {
      const auto rules = merit_with_guarantee(phi, inst);
      const auto slack = bic_slack(rules);
      ++rules_checked;
      double prev = rules.P(0.0);
      for (int i = 0; i <= 2000; ++i) {
        const double t = i / 2000.0;
        const double p = rules.P(t);
        worst_slack = std::max(worst_slack, std::fabs(slack(t)));
        worst_drop = std::max(worst_drop, prev - p);
        worst_below = std::max(worst_below, phi - p);
        prev = p;
      }
    }
  }
  const bool pass = worst_slack <= 1e-9 && worst_drop <= 1e-12 && worst_below <= 1e-12 &&
                    structure_failures == 0;
  return {pass, Fmt("%d rules: max |bic slack| = %.3g, max decrease of P = %.3g, "
                    "max phi - P = %.3g; %zu optima, %d with an empty aud region "
                    "or phi* < (m-k)/n",
                    rules_checked, worst_slack, std::max(0.0, worst_drop),
                    std::max(0.0, worst_below), cases.size(), structure_failures)};
}

struct SimulationRun {
  SimReport report;
  double seconds = 0.0;
};

Outcome SimulationFidelity(SimulationRun& run) {
  const auto inst = Example();
  const double phi = solve(inst).phi_star;
  const auto start = std::chrono::steady_clock::now();
  run.report = simulate(inst, phi, 1000000);
  run.seconds = Seconds(start);
  const auto& r = run.report;
  const int bins = static_cast<int>(r.bins.size());
  const bool pass = r.capacity_violations == 0 && std::fabs(r.payoff_hat - 1.223) <= 0.01 &&
                    r.bins_within_P >= 62 && r.bins_within_A >= 62 && bins == 64 &&
                    run.seconds < 60.0;
  return {pass, Fmt("violations=%lld payoff=%.5f+-%.5f P within 3 SE in %d/%d bins, "
                    "A in %d/%d, calibration rounds=%d, time=%.1fs",
                    static_cast<long long>(r.capacity_violations), r.payoff_hat,
                    r.payoff_se, r.bins_within_P, bins, r.bins_within_A, bins,
                    r.calibration.rounds, run.seconds)};
}

Outcome DiscreteGroundTruth() {
  DiscreteInstance foot;
  foot.grids = {{0.0, 1.0}, {0.0, 1.0}};
  foot.masses = {{0.5, 0.5}, {0.5, 0.5}};
  foot.default_capacity = 0;
  foot.capacity = {{foot.index({0, 1}), 1}, {foot.index({1, 0}), 2}};
  const InterimTable P{{0.25, 0.25}, {0.25, 0.5}};
  const auto flow = check_feasible(foot, P);
  const auto upper = check_upper_sets(foot, P);
  const bool witness = !flow.feasible && flow.violation &&
                       flow.violation->set.members ==
                           std::vector<std::vector<int>>{{0}, {1}} &&
                       std::fabs(flow.violation->lhs - 0.375) <= 1e-12 &&
                       std::fabs(flow.violation->rhs - 0.25) <= 1e-12;

  std::mt19937_64 rng(41);
  int instances = 0;
  int disagreements = 0;
  int infeasible = 0;
  int max_points = 0;
  double worst_gap = 0.0;
  for (int rep = 0; rep < 300; ++rep) {
    const auto inst = oracle::RandomInstance(rng, rep % 2 == 0);
    int points = 0;
    for (int i = 0; i < inst.agents(); ++i) points += inst.grid_size(i);
    if (points > 12) continue;
    max_points = std::max(max_points, points);
    auto rule = oracle::RandomRule(inst, rng);
    // Every third rule is the marginal of an ex-post rule, so some checks
    // sit exactly on the boundary.
    if (rep % 3 == 0) {
      auto scaled = rule;
      for (auto& row : scaled) {
        for (double& p : row) p *= 0.2;
      }
      const auto v = check_feasible(inst, scaled);
      if (v.feasible) rule = expost_marginals(inst, *v.expost);
    }
    const auto brute = oracle::BruteForce(inst, rule);
    const auto v = check_feasible(inst, rule);
    ++instances;
    const bool brute_feasible = brute.min_slack >= -1e-9;
    if (v.feasible != brute_feasible) ++disagreements;
    if (!brute_feasible) {
      ++infeasible;
      if (!v.violation || border_lhs(inst, rule, v.violation->set) <=
                              border_rhs(inst, v.violation->set)) {
        ++disagreements;
      }
    }
    worst_gap = std::max(worst_gap, std::fabs((v.max_flow - v.total_demand) -
                                              std::min(0.0, brute.min_slack)));
  }
  const bool pass = witness && upper.feasible && disagreements == 0 && worst_gap <= 1e-9;
  return {pass, Fmt("two-agent instance: flow %s, witness ({0},{1}) lhs %.3f rhs %.3f, upper sets %s; "
                    "oracle: %d instances (<= %d points, %d infeasible), %d disagreements, "
                    "max |slack gap| = %.3g",
                    flow.feasible ? "feasible" : "infeasible",
                    flow.violation ? flow.violation->lhs : 0.0,
                    flow.violation ? flow.violation->rhs : 0.0,
                    upper.feasible ? "feasible" : "infeasible", instances, max_points,
                    infeasible, disagreements, worst_gap)};
}

Outcome ConstructiveRealization() {
  const auto inst = Example();
  const auto rules = merit_with_guarantee(solve(inst).phi_star, inst);
  const auto d = discretize(rules, DiscretizeOptions{.bins = 64});
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  bool built = false;
  try {
    const auto rule = construct_expost(d.instance, d.P);
    built = true;
    const auto marginals = expost_marginals(d.instance, rule);
    for (std::size_t i = 0; i < d.P.size(); ++i) {
      for (std::size_t t = 0; t < d.P[i].size(); ++t) {
        worst = std::max(worst, std::fabs(marginals[i][t] - d.P[i][t]));
      }
    }
  } catch (const std::exception& e) {
    return {false, std::string("construct_expost failed: ") + e.what()};
  }
  return {built && worst <= 1e-9,
          Fmt("64 bins, %lld profiles: max |marginal - P| = %.3g, time=%.1fs",
              static_cast<long long>(d.instance.profile_count()), worst, Seconds(start))};
}

Outcome EpicFailure(const SimulationRun& run) {
  const auto inst = Example();
  const double phi = run.report.phi;
  const double bound = double(inst.m - inst.k) / inst.m;
  const auto w = epic_counterexample(inst, phi);
  const auto wc = epic_counterexample(inst, phi, &run.report.calibration.audit);
  const bool pass = w.escape_probability >= bound && wc.escape_probability >= bound &&
                    w.gain > 0.0 && wc.gain > 0.0;
  return {pass, Fmt("type %.4f reports %.4f: escape %.4f (uniform audit weights), "
                    "%.4f (calibrated), bound (m-k)/m = %.4f, gain %.4f",
                    w.true_type, w.deviation, w.escape_probability,
                    wc.escape_probability, bound, w.gain)};
}

Outcome ComparativeStatics() {
  std::vector<double> payoffs;
  for (int k = 1; k <= 3; ++k) payoffs.push_back(solve(make_instance(6, 4, k)).payoff);
  bool monotone = true;
  for (std::size_t i = 1; i < payoffs.size(); ++i) {
    monotone = monotone && payoffs[i] >= payoffs[i - 1];
  }
  return {monotone, Fmt("n=6 m=4: U(k=1)=%.6f U(k=2)=%.6f U(k=3)=%.6f", payoffs[0],
                        payoffs[1], payoffs[2])};
}

int Report(int id, const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s  %2d %-28s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
  return o.pass ? 0 : 1;
}

}  // namespace
}  // namespace mwg

int main() {
  using namespace mwg;
  SimulationRun run;
  int failures = 0;
  failures += Report(1, "example reproduction", ExampleReproduction);
  failures += Report(2, "closed-form consistency", ClosedForms);
  failures += Report(3, "derivative correctness", Derivatives);
  failures += Report(4, "interim identity", InterimIdentity);
  failures += Report(5, "BIC and structure", BicAndStructure);
  failures += Report(6, "simulation fidelity", [&] { return SimulationFidelity(run); });
  failures += Report(7, "discrete feasibility", DiscreteGroundTruth);
  failures += Report(8, "constructive realization", ConstructiveRealization);
  failures += Report(9, "ex-post IC failure", [&] {
    if (run.report.bins.empty()) return Outcome{false, "needs the criterion 6 run"};
    return EpicFailure(run);
  });
  failures += Report(10, "comparative statics", ComparativeStatics);
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
