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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mwg/error.h"
#include "mwg/interim.h"
#include "mwg/optimizer.h"

namespace mwg {
namespace {

constexpr double kPhiStar = 0.347644426880308716;
constexpr double kPayoffStar = 1.22306830654829954;

// Integration by parts gives U = integral of c_phi(F(t)) dt, an evaluation
// route independent of the branch derivatives.
double EnvelopeAreaPayoff(double phi, const ProblemInstance& inst) {
  return integrate(
      [&](double t) { return envelope_value(inst.dist.cdf(t), phi, inst).first; },
      0.0, 1.0, 1e-11);
}

TEST(Payoff, ExampleValues) {
  const auto inst = make_instance(3, 2, 1);
  EXPECT_NEAR(payoff(kPhiStar, inst), 1.223, 1e-3);
  EXPECT_NEAR(payoff(kPhiStar, inst), kPayoffStar, 1e-10);
  EXPECT_NEAR(payoff(inst.phi_max(), inst), 1.0, 1e-12);
  EXPECT_NEAR(payoff(1.0 / 3.0, inst), 1.21875, 1e-10);
  EXPECT_LT(payoff(1.0 / 3.0, inst), payoff(kPhiStar, inst));
}

TEST(Payoff, MatchesEnvelopeArea) {
  for (auto [n, m, k, d] : {std::tuple{3, 2, 1, "uniform"},
                            {7, 4, 2, "power:2"},
                            {12, 5, 1, "power:0.7"}}) {
    const auto inst = make_instance(n, m, k, parse_distribution(d));
    for (int j = 0; j <= 6; ++j) {
      const double phi = inst.phi_max() * j / 6.0;
      EXPECT_NEAR(payoff(phi, inst), EnvelopeAreaPayoff(phi, inst), 1e-8)
          << n << " " << m << " " << k << " phi=" << phi;
    }
  }
}

TEST(Foc, ExampleForms) {
  const auto inst = make_instance(3, 2, 1);
  EXPECT_NEAR(foc_residual(kPhiStar, inst), 0.0, 1e-12);
  for (double phi : {0.34, 0.36, 0.4}) {
    const auto p = partition(phi, inst);
    if (p.case_tag != EnvelopeCase::kIcAudAllo) continue;
    const double g1 = p.gamma1;
    const double g3 = p.gamma3;
    EXPECT_NEAR(foc_residual(p, inst), g1 - g3 * (1 - g3) - g3 * g3 / 2, 1e-12);
  }
  EXPECT_THROW(foc_residual(0.2, inst), InvalidArgument);
  // Without an aud region the residual reduces to a positive quantity.
  const auto p = partition(0.6, inst);
  ASSERT_FALSE(p.has_aud_region());
  EXPECT_GT(foc_residual(p, inst), 0.0);
}

TEST(Foc, MatchesPayoffDerivative) {
  for (auto [n, m, k] : {std::tuple{3, 2, 1}, {6, 4, 2}, {10, 5, 2}}) {
    const auto inst = make_instance(n, m, k);
    for (double s : {0.1, 0.3, 0.6, 0.9}) {
      const double phi = inst.phi_min() + s * (inst.phi_max() - inst.phi_min());
      const double h = 1e-6;
      const double du = (payoff(phi + h, inst) - payoff(phi - h, inst)) / (2 * h);
      EXPECT_NEAR(-du / n, foc_residual(phi, inst), 1e-6);
    }
  }
}

TEST(Baselines, Example) {
  const auto b = baseline_payoffs(make_instance(3, 2, 1));
  EXPECT_NEAR(b.first_best, 1.25, 1e-12);
  EXPECT_NEAR(b.random_lottery, 1.0, 1e-12);
  EXPECT_NEAR(b.k_top, 1.125, 1e-12);
}

// Monte Carlo over profiles: top k win, then m - k uniform among the rest.
TEST(Baselines, KTopMonteCarlo) {
  const auto inst = make_instance(5, 3, 1, make_power(2.0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int trials = 400000;
  double total = 0.0;
  std::vector<double> t(inst.n);
  for (int r = 0; r < trials; ++r) {
    for (auto& x : t) x = inst.dist.quantile(u(rng));
    std::sort(t.begin(), t.end(), std::greater<>());
    for (int i = 0; i < inst.k; ++i) total += t[i];
    double rest = 0.0;
    for (int i = inst.k; i < inst.n; ++i) rest += t[i];
    total += rest * double(inst.m - inst.k) / (inst.n - inst.k);
  }
  EXPECT_NEAR(baseline_payoffs(inst).k_top, total / trials, 3e-3);
}

TEST(GoldenSection, Quadratic) {
  auto [x, fx] = golden_section_max([](double v) { return -(v - 0.3) * (v - 0.3); },
                                    0.0, 1.0, 1e-10);
  EXPECT_NEAR(x, 0.3, 1e-8);
  EXPECT_NEAR(fx, 0.0, 1e-15);
  auto [y, fy] = golden_section_max([](double v) { return v; }, 0.0, 1.0, 1e-10);
  EXPECT_EQ(y, 1.0);
  EXPECT_EQ(fy, 1.0);
}

TEST(Solve, Example) {
  const auto inst = make_instance(3, 2, 1);
  const auto r = solve(inst);
  EXPECT_NEAR(r.phi_star, kPhiStar, 1e-9);
  EXPECT_NEAR(r.payoff, kPayoffStar, 1e-10);
  EXPECT_TRUE(r.interior);
  EXPECT_LE(std::fabs(r.foc_residual), 1e-8);
  EXPECT_EQ(r.partition.case_tag, EnvelopeCase::kIcAudAllo);
  EXPECT_NEAR(r.golden_payoff, r.payoff, 1e-7);
  EXPECT_NEAR(r.baselines.first_best, 1.25, 1e-9);
  ASSERT_FALSE(r.candidates.empty());
  for (size_t i = 1; i < r.candidates.size(); ++i) {
    EXPECT_LE(r.candidates[i - 1].phi, r.candidates[i].phi);
  }
}

TEST(Solve, RandomInstancesProperties) {
  std::mt19937_64 rng(2026);
  for (int rep = 0; rep < 6; ++rep) {
    const int n = std::uniform_int_distribution<int>(3, 14)(rng);
    const int m = std::uniform_int_distribution<int>(2, n - 1)(rng);
    const int k = std::uniform_int_distribution<int>(1, m - 1)(rng);
    const double alpha = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    const auto inst = make_instance(n, m, k, make_power(alpha));
    const auto r = solve(inst);
    SCOPED_TRACE(testing::Message() << n << " " << m << " " << k << " a=" << alpha);
    EXPECT_GE(r.phi_star, inst.phi_min());
    EXPECT_LE(r.phi_star, inst.phi_max());
    EXPECT_GE(r.payoff, r.baselines.random_lottery - 1e-12);
    EXPECT_GE(r.payoff, r.baselines.k_top - 1e-12);
    EXPECT_LE(r.payoff, r.baselines.first_best + 1e-12);
    EXPECT_TRUE(r.partition.has_aud_region());
    if (r.interior) {
      EXPECT_LE(std::fabs(r.foc_residual), 1e-8);
      // The peak can be sharp (gamma1 moves quickly with phi), so the step
      // is kept small to hold the h^2 truncation term below the bound.
      const double h = 1e-6;
      const double du =
          (payoff(r.phi_star + h, inst) - payoff(r.phi_star - h, inst)) / (2 * h);
      EXPECT_LE(std::fabs(du), 1e-5);
    }
    EXPECT_NEAR(r.payoff, EnvelopeAreaPayoff(r.phi_star, inst), 1e-8);
    std::uniform_real_distribution<double> phi_dist(inst.phi_min(), inst.phi_max());
    for (int i = 0; i < 100; ++i) {
      EXPECT_GE(r.payoff, payoff(phi_dist(rng), inst) - 1e-12);
    }
  }
}

TEST(Solve, PowerInstanceBracket) {
  const auto r = solve(make_instance(10, 5, 2, make_power(2.0)));
  EXPECT_GE(r.phi_star, 0.3);
  EXPECT_LE(r.phi_star, 0.5);
}

}  // namespace
}  // namespace mwg
