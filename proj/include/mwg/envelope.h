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

// The three upper bounds on n * int_t^1 P dF (supply, audit capacity and
// incentive compatibility), written as functions of the quantile q = F(t),
// together with their lower envelope and the induced partition of the type
// space.

#ifndef MWG_ENVELOPE_H_
#define MWG_ENVELOPE_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mwg/distribution.h"

namespace mwg {

// n agents, m identical objects, k audits, iid types drawn from dist.
// Requires 0 < k < m < n.
struct ProblemInstance {
  int n = 0;
  int m = 0;
  int k = 0;
  TypeDistribution dist = make_uniform();

  // Throws InvalidArgument unless 0 < k < m < n.
  void validate() const;
  double phi_min() const { return double(m - k) / n; }
  double phi_max() const { return double(m) / n; }
};

ProblemInstance make_instance(int n, int m, int k,
                              TypeDistribution dist = make_uniform());

// Probability that Binomial(trials, p) <= upto. Term recursion from the
// mode keeps it stable for trials in the thousands.
double binomial_cdf(int trials, double p, int upto);

// E[min(X, cap)] for X ~ Binomial(trials, p).
double binomial_capped_mean(int trials, double p, int cap);

double c_allo(double q, const ProblemInstance& inst);
double c_aud(double q, double phi, const ProblemInstance& inst);
double c_ic(double q, double phi, const ProblemInstance& inst);

double d_c_allo(double q, const ProblemInstance& inst);
double d_c_aud(double q, double phi, const ProblemInstance& inst);
double d_c_ic(double phi, const ProblemInstance& inst);

// Which constraint attains the envelope.
enum class Constraint { kIc, kAud, kAllo };

const char* to_string(Constraint c);

// Minimum of the three constraints and the one attaining it. Ties go to
// ic, then aud, then allo.
std::pair<double, Constraint> envelope_value(double q, double phi,
                                             const ProblemInstance& inst);

// Envelope structures. The names list the binding constraints from low to
// high types.
enum class EnvelopeCase {
  kAudAllo,        // phi <= (m-k)/n: no ic region
  kIcAlloAudAllo,  // allo binds on two separate intervals
  kIcAudAllo,      // the ic region is followed directly by the aud region
  kIcAllo,         // no interior aud region
};

const char* to_string(EnvelopeCase c);

// A maximal interval on which one constraint is the envelope. Bounds are
// kept both in quantile space and in type space.
struct LabeledInterval {
  double q_lo = 0.0;
  double q_hi = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  Constraint label = Constraint::kAllo;
};

struct RegionPartition {
  double phi = 0.0;
  EnvelopeCase case_tag = EnvelopeCase::kAudAllo;
  // Type-space cutoffs: ic on [0, gamma1], allo on [gamma1, gamma2), aud on
  // [gamma2, gamma3], allo on [gamma3, 1].
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 1.0;
  // Crossings in quantile space. z1: ic = allo; z2: ic = aud; r1 < r2:
  // interior zeros of allo - aud. Absent when the pair never crosses in the
  // interior.
  std::optional<double> z1;
  std::optional<double> z2;
  std::optional<double> r1;
  std::optional<double> r2;
  // Ordered, disjoint, covering [0, 1].
  std::vector<LabeledInterval> intervals;

  // Interval containing quantile q, where a point on a boundary belongs to
  // the interval on its right (q = 1 belongs to the last one).
  const LabeledInterval& interval_at_quantile(double q) const;
  Constraint label_at_quantile(double q) const {
    return interval_at_quantile(q).label;
  }
  bool has_aud_region() const { return gamma2 < gamma3; }
};

struct PartitionOptions {
  int scan_cells = 10000;
  double root_tol = 1e-12;
};

// Locates the crossings of the three constraints for a given guarantee phi
// in [0, m/n] and classifies the envelope.
RegionPartition partition(double phi, const ProblemInstance& inst,
                          const PartitionOptions& options = {});

// Boundary in [(m-k)/n, m/n] above which the envelope has no aud region,
// located by bisection to the given tolerance.
double phi_bar(const ProblemInstance& inst, double tol = 1e-10);

}  // namespace mwg

#endif  // MWG_ENVELOPE_H_
