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

// Merit-with-guarantee interim rules: P(t) = -c'_phi(F(t)) / n with the
// right derivative at kinks, and A(t) = P(t) - phi.

#ifndef MWG_INTERIM_H_
#define MWG_INTERIM_H_

#include <vector>

#include "mwg/distribution.h"
#include "mwg/envelope.h"

namespace mwg {

class InterimRules {
 public:
  InterimRules(ProblemInstance inst, RegionPartition partition);

  double phi() const { return partition_.phi; }
  const RegionPartition& partition() const { return partition_; }
  const ProblemInstance& instance() const { return inst_; }

  double P(double t) const;
  double A(double t) const { return P(t) - phi(); }
  // P as a function of the quantile q = F(t).
  double P_at_quantile(double q) const;

 private:
  ProblemInstance inst_;
  RegionPartition partition_;
};

InterimRules merit_with_guarantee(double phi, const ProblemInstance& inst);

// n times the integral of P over [t, 1] against dF, by piecewise quadrature
// in quantile space.
double interim_integral(const InterimRules& rules, double t);

// t -> A(t) - (P(t) - inf P). Nonnegative everywhere iff (P, A) is BIC.
// inf P is the minimum over a 1e4-point grid plus the given breakpoints.
RealFn bic_slack(const RealFn& P, const RealFn& A,
                 const std::vector<double>& breakpoints = {});
RealFn bic_slack(const InterimRules& rules);

struct InterimRow {
  double t;
  double P;
  double A;
};

// (t, P, A) on an equally spaced grid of the given size over [0, 1].
std::vector<InterimRow> sample_interim(const InterimRules& rules,
                                       int points = 1001);

}  // namespace mwg

#endif  // MWG_INTERIM_H_
