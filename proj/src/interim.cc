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

#include "mwg/interim.h"

#include <algorithm>
#include <limits>
#include <utility>

#include "mwg/error.h"

namespace mwg {

InterimRules::InterimRules(ProblemInstance inst, RegionPartition partition)
    : inst_(std::move(inst)), partition_(std::move(partition)) {}

double InterimRules::P_at_quantile(double q) const {
  q = std::clamp(q, 0.0, 1.0);
  switch (partition_.label_at_quantile(q)) {
    case Constraint::kIc:
      return phi();
    case Constraint::kAud:
      return -d_c_aud(q, phi(), inst_) / inst_.n;
    case Constraint::kAllo:
      return -d_c_allo(q, inst_) / inst_.n;
  }
  throw NumericalError("unreachable constraint label");
}

double InterimRules::P(double t) const {
  if (t < 0.0 || t > 1.0) {
    throw InvalidArgument("type " + std::to_string(t) + " outside [0, 1]");
  }
  // Cutoffs are stored in both spaces; comparing in quantile space keeps the
  // right-continuity at cutoffs exact.
  return P_at_quantile(inst_.dist.cdf(t));
}

InterimRules merit_with_guarantee(double phi, const ProblemInstance& inst) {
  return InterimRules(inst, partition(phi, inst));
}

double interim_integral(const InterimRules& rules, double t) {
  if (t < 0.0 || t > 1.0) {
    throw InvalidArgument("type " + std::to_string(t) + " outside [0, 1]");
  }
  const double q0 = rules.instance().dist.cdf(t);
  double total = 0.0;
  for (const auto& iv : rules.partition().intervals) {
    const double lo = std::max(iv.q_lo, q0);
    const double hi = iv.q_hi;
    if (hi <= lo) continue;
    // Use the piece's own branch so the label never flips at its ends.
    const Constraint label = iv.label;
    const auto& inst = rules.instance();
    const double phi = rules.phi();
    auto piece = [&](double q) {
      switch (label) {
        case Constraint::kIc:
          return phi;
        case Constraint::kAud:
          return -d_c_aud(q, phi, inst) / inst.n;
        case Constraint::kAllo:
          return -d_c_allo(q, inst) / inst.n;
      }
      return 0.0;
    };
    total += integrate(piece, lo, hi, 1e-12);
  }
  return rules.instance().n * total;
}

RealFn bic_slack(const RealFn& P, const RealFn& A,
                 const std::vector<double>& breakpoints) {
  double inf_p = std::numeric_limits<double>::infinity();
  const int grid = 10000;
  for (int i = 0; i <= grid; ++i) inf_p = std::min(inf_p, P(double(i) / grid));
  for (double b : breakpoints) {
    if (b >= 0.0 && b <= 1.0) inf_p = std::min(inf_p, P(b));
  }
  return [P, A, inf_p](double t) { return A(t) - (P(t) - inf_p); };
}

RealFn bic_slack(const InterimRules& rules) {
  std::vector<double> cuts;
  for (const auto& iv : rules.partition().intervals) {
    cuts.push_back(iv.t_lo);
    cuts.push_back(iv.t_hi);
  }
  return bic_slack([rules](double t) { return rules.P(t); },
                   [rules](double t) { return rules.A(t); }, cuts);
}

std::vector<InterimRow> sample_interim(const InterimRules& rules, int points) {
  if (points < 2) throw InvalidArgument("interim table needs >= 2 points");
  std::vector<InterimRow> rows;
  rows.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double t = double(i) / (points - 1);
    const double p = rules.P(t);
    rows.push_back({t, p, p - rules.phi()});
  }
  return rows;
}

}  // namespace mwg
