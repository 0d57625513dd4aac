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

#include <gtest/gtest.h>

#include "mwg/distribution.h"
#include "mwg/error.h"

namespace mwg {
namespace {

TEST(Uniform, IdentityTriple) {
  const auto d = make_uniform();
  EXPECT_DOUBLE_EQ(d.cdf(0.5), 0.5);
  EXPECT_DOUBLE_EQ(d.quantile(0.25), 0.25);
  EXPECT_DOUBLE_EQ(d.pdf(0.7), 1.0);
  EXPECT_NEAR(truncated_mean(d, 0.0, 1.0), 0.5, 1e-12);
}

TEST(Power, Substitution) {
  EXPECT_DOUBLE_EQ(make_power(1.0).cdf(0.3), 0.3);
  const auto d = make_power(2.0);
  EXPECT_DOUBLE_EQ(d.cdf(0.5), 0.25);
  EXPECT_NEAR(truncated_mean(d, 0.0, 1.0), 2.0 / 3.0, 1e-10);
  EXPECT_EQ(d.spec(), "power:2");
}

TEST(Power, RejectsNonPositiveAlpha) {
  EXPECT_THROW(make_power(0.0), InvalidArgument);
  EXPECT_THROW(make_power(-1.5), InvalidArgument);
}

TEST(TruncatedMean, Values) {
  const auto d = make_uniform();
  EXPECT_EQ(truncated_mean(d, 0.5, 0.5), 0.0);
  EXPECT_NEAR(truncated_mean(d, 0.2, 0.8), 0.30, 1e-12);
  EXPECT_THROW(truncated_mean(d, 0.8, 0.2), InvalidArgument);
}

TEST(Parse, Forms) {
  EXPECT_EQ(parse_distribution("uniform").name(), "uniform");
  EXPECT_DOUBLE_EQ(parse_distribution("power:3").cdf(0.5), 0.125);
  EXPECT_DOUBLE_EQ(
      parse_distribution(R"({"family":"power","alpha":0.5})").cdf(0.25), 0.5);
  EXPECT_EQ(parse_distribution(R"({"family":"uniform"})").name(), "uniform");
  EXPECT_THROW(parse_distribution("normal"), InvalidArgument);
  EXPECT_THROW(parse_distribution("power:x"), InvalidArgument);
  EXPECT_THROW(parse_distribution(R"({"family":"power"})"), InvalidArgument);
  EXPECT_THROW(parse_distribution("{bad"), InvalidArgument);
}

class ShippedDistributions : public ::testing::TestWithParam<const char*> {};

TEST_P(ShippedDistributions, Invariants) {
  const auto d = parse_distribution(GetParam());
  EXPECT_EQ(d.cdf(0.0), 0.0);
  EXPECT_EQ(d.cdf(1.0), 1.0);
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    const double c = d.cdf(t);
    EXPECT_GE(c, prev);
    prev = c;
    EXPECT_NEAR(d.quantile(c), t, 1e-9) << "t=" << t;
    if (t > 0.0) EXPECT_GT(d.pdf(t), 0.0);
  }
  for (double a : {1e-3, 0.1, 0.37}) {
    for (double b : {0.5, 0.9, 1.0}) {
      const double integral =
          integrate([&d](double t) { return d.pdf(t); }, a, b, 1e-10);
      EXPECT_NEAR(d.cdf(b) - d.cdf(a), integral, 1e-8);
    }
  }
}

TEST_P(ShippedDistributions, TruncatedMeanAdditiveAndRiemann) {
  const auto d = parse_distribution(GetParam());
  const double whole = truncated_mean(d, 0.1, 0.9);
  EXPECT_NEAR(whole, truncated_mean(d, 0.1, 0.35) + truncated_mean(d, 0.35, 0.9),
              1e-9);
  // Midpoint sum of t f(t) on 1e6 cells.
  const int cells = 1000000;
  double riemann = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double t = 0.1 + 0.8 * (i + 0.5) / cells;
    riemann += t * d.pdf(t);
  }
  riemann *= 0.8 / cells;
  EXPECT_NEAR(whole, riemann, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(All, ShippedDistributions,
                         ::testing::Values("uniform", "power:2", "power:0.5",
                                           "power:3.5"));

}  // namespace
}  // namespace mwg
