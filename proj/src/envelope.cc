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

#include "mwg/envelope.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "mwg/error.h"

namespace mwg {
namespace {

// Calls visit(i, w_i) with w_i proportional to the Binomial(trials, p) pmf,
// normalised so the mode has weight 1, for every i whose weight does not
// underflow. Weights come from the ratio
// pmf_{i+1} / pmf_i = (trials - i) / (i + 1) * p / (1 - p); callers divide
// by the total visited weight.
template <typename Visit>
void for_each_binomial_term(int trials, double p, Visit&& visit) {
  if (p <= 0.0) {
    visit(0, 1.0);
    return;
  }
  if (p >= 1.0) {
    visit(trials, 1.0);
    return;
  }
  const int mode =
      std::min(trials, static_cast<int>(std::floor((trials + 1) * p)));
  const double odds = p / (1.0 - p);
  visit(mode, 1.0);
  double term = 1.0;
  for (int i = mode; i < trials; ++i) {
    term *= double(trials - i) / double(i + 1) * odds;
    if (term == 0.0) break;
    visit(i + 1, term);
  }
  term = 1.0;
  for (int i = mode; i > 0; --i) {
    term *= double(i) / double(trials - i + 1) / odds;
    if (term == 0.0) break;
    visit(i - 1, term);
  }
}

void check_quantile(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidArgument("quantile " + std::to_string(q) +
                          " outside [0, 1]");
  }
}

void check_phi(double phi, const ProblemInstance& inst) {
  if (!(phi >= 0.0 && phi <= inst.phi_max() * (1.0 + 1e-12))) {
    throw InvalidArgument("guarantee phi=" + std::to_string(phi) +
                          " outside [0, m/n]");
  }
}

// The pairwise differences are summed term by term so that the sign stays
// reliable where both constraints are tiny (q near 1) or both near m
// (q near 0).

// c_ic - c_allo = sum_{i<m} (m - i) pmf_i - n q phi.
double ic_minus_allo(double q, double phi, const ProblemInstance& inst) {
  double s = 0.0;
  double mass = 0.0;
  for_each_binomial_term(inst.n, 1.0 - q, [&](int i, double pmf) {
    if (i < inst.m) s += (inst.m - i) * pmf;
    mass += pmf;
  });
  return s / mass - inst.n * q * phi;
}

// c_aud - c_ic = n phi - sum_i (m - min(i, k)) pmf_i.
double aud_minus_ic(double q, double phi, const ProblemInstance& inst) {
  double s = 0.0;
  double mass = 0.0;
  for_each_binomial_term(inst.n, 1.0 - q, [&](int i, double pmf) {
    s += (inst.m - std::min(i, inst.k)) * pmf;
    mass += pmf;
  });
  return inst.n * phi - s / mass;
}

// c_allo - c_aud = sum_i (min(i, m) - min(i, k)) pmf_i - n (1 - q) phi.
double allo_minus_aud(double q, double phi, const ProblemInstance& inst) {
  double s = 0.0;
  double mass = 0.0;
  for_each_binomial_term(inst.n, 1.0 - q, [&](int i, double pmf) {
    if (i > inst.k) s += (std::min(i, inst.m) - inst.k) * pmf;
    mass += pmf;
  });
  return s / mass - inst.n * (1.0 - q) * phi;
}

}  // namespace

void ProblemInstance::validate() const {
  if (!(0 < k && k < m && m < n)) {
    throw InvalidArgument("instance needs 0 < k < m < n (got n=" +
                          std::to_string(n) + ", m=" + std::to_string(m) +
                          ", k=" + std::to_string(k) + ")");
  }
}

ProblemInstance make_instance(int n, int m, int k, TypeDistribution dist) {
  ProblemInstance inst{n, m, k, std::move(dist)};
  inst.validate();
  return inst;
}

double binomial_cdf(int trials, double p, int upto) {
  if (upto < 0) return 0.0;
  if (upto >= trials) return 1.0;
  double below = 0.0;
  double above = 0.0;
  for_each_binomial_term(trials, p, [&](int i, double pmf) {
    (i <= upto ? below : above) += pmf;
  });
  return below / (below + above);
}

double binomial_capped_mean(int trials, double p, int cap) {
  double s = 0.0;
  double mass = 0.0;
  for_each_binomial_term(trials, p, [&](int i, double pmf) {
    s += std::min(i, cap) * pmf;
    mass += pmf;
  });
  return s / mass;
}

double c_allo(double q, const ProblemInstance& inst) {
  check_quantile(q);
  if (q == 0.0) return inst.m;
  if (q == 1.0) return 0.0;
  return binomial_capped_mean(inst.n, 1.0 - q, inst.m);
}

double c_aud(double q, double phi, const ProblemInstance& inst) {
  check_quantile(q);
  check_phi(phi, inst);
  if (q == 1.0) return 0.0;
  return binomial_capped_mean(inst.n, 1.0 - q, inst.k) +
         inst.n * (1.0 - q) * phi;
}

double c_ic(double q, double phi, const ProblemInstance& inst) {
  check_quantile(q);
  check_phi(phi, inst);
  return inst.m - inst.n * q * phi;
}

double d_c_allo(double q, const ProblemInstance& inst) {
  check_quantile(q);
  return -inst.n * binomial_cdf(inst.n - 1, 1.0 - q, inst.m - 1);
}

double d_c_aud(double q, double phi, const ProblemInstance& inst) {
  check_quantile(q);
  check_phi(phi, inst);
  return -inst.n * binomial_cdf(inst.n - 1, 1.0 - q, inst.k - 1) -
         inst.n * phi;
}

double d_c_ic(double phi, const ProblemInstance& inst) {
  check_phi(phi, inst);
  return -inst.n * phi;
}

const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::kIc:
      return "ic";
    case Constraint::kAud:
      return "aud";
    case Constraint::kAllo:
      return "allo";
  }
  return "?";
}

const char* to_string(EnvelopeCase c) {
  switch (c) {
    case EnvelopeCase::kAudAllo:
      return "AudAllo";
    case EnvelopeCase::kIcAlloAudAllo:
      return "IcAlloAudAllo";
    case EnvelopeCase::kIcAudAllo:
      return "IcAudAllo";
    case EnvelopeCase::kIcAllo:
      return "IcAllo";
  }
  return "?";
}

std::pair<double, Constraint> envelope_value(double q, double phi,
                                             const ProblemInstance& inst) {
  const double ic = c_ic(q, phi, inst);
  const double aud = c_aud(q, phi, inst);
  const double allo = c_allo(q, inst);
  if (ic <= aud && ic <= allo) return {ic, Constraint::kIc};
  if (aud <= allo) return {aud, Constraint::kAud};
  return {allo, Constraint::kAllo};
}

const LabeledInterval& RegionPartition::interval_at_quantile(double q) const {
  // Last interval whose lower end is <= q.
  auto it = std::upper_bound(
      intervals.begin(), intervals.end(), q,
      [](double value, const LabeledInterval& iv) { return value < iv.q_lo; });
  if (it == intervals.begin()) return intervals.front();
  return *std::prev(it);
}

namespace {

// The three pairwise differences from one pass over the binomial terms.
std::array<double, 3> differences(double q, double phi,
                                  const ProblemInstance& inst) {
  double ic_allo = 0.0;
  double aud_ic = 0.0;
  double allo_aud = 0.0;
  double mass = 0.0;
  for_each_binomial_term(inst.n, 1.0 - q, [&](int i, double pmf) {
    if (i < inst.m) ic_allo += (inst.m - i) * pmf;
    aud_ic += (inst.m - std::min(i, inst.k)) * pmf;
    if (i > inst.k) allo_aud += (std::min(i, inst.m) - inst.k) * pmf;
    mass += pmf;
  });
  return {ic_allo / mass - inst.n * q * phi, inst.n * phi - aud_ic / mass,
          allo_aud / mass - inst.n * (1.0 - q) * phi};
}

// Interior sign changes of the three differences on a uniform grid, each
// refined to tol. Values within noise of zero are skipped so that rounding
// near a tangency or a shared endpoint value does not register as a
// crossing.
std::array<std::vector<double>, 3> interior_roots(double phi,
                                                  const ProblemInstance& inst,
                                                  int cells, double tol,
                                                  double noise) {
  using Fn = double (*)(double, double, const ProblemInstance&);
  const Fn exact[3] = {ic_minus_allo, aud_minus_ic, allo_minus_aud};
  std::array<std::vector<double>, 3> roots;
  std::array<double, 3> prev_q = {0.0, 0.0, 0.0};
  std::array<double, 3> prev_v = differences(0.0, phi, inst);
  for (double& v : prev_v) {
    if (std::fabs(v) <= noise) v = 0.0;
  }
  for (int j = 1; j <= cells; ++j) {
    const double q = double(j) / cells;
    const auto vs = differences(q, phi, inst);
    for (int c = 0; c < 3; ++c) {
      const double v = vs[c];
      if (std::fabs(v) <= noise) continue;
      if ((prev_v[c] < 0.0 && v > 0.0) || (prev_v[c] > 0.0 && v < 0.0)) {
        auto f = [&](double x) { return exact[c](x, phi, inst); };
        std::uintmax_t max_iter = 200;
        auto r = boost::math::tools::toms748_solve(
            f, prev_q[c], q, f(prev_q[c]), f(q),
            [tol](double a, double b) { return std::fabs(b - a) <= tol; },
            max_iter);
        if (max_iter >= 200) {
          throw NumericalError("crossing refinement did not converge");
        }
        roots[c].push_back(0.5 * (r.first + r.second));
      }
      prev_q[c] = q;
      prev_v[c] = v;
    }
  }
  return roots;
}

Constraint argmin_label(double q, double phi, const ProblemInstance& inst) {
  return envelope_value(q, phi, inst).second;
}

}  // namespace

RegionPartition partition(double phi, const ProblemInstance& inst,
                          const PartitionOptions& options) {
  inst.validate();
  check_phi(phi, inst);
  phi = std::min(phi, inst.phi_max());
  const int cells = std::max(options.scan_cells, 16);
  const double tol = options.root_tol;
  const double noise =
      32 * std::numeric_limits<double>::epsilon() * inst.n * inst.m;

  RegionPartition part;
  part.phi = phi;

  const auto roots = interior_roots(phi, inst, cells, tol, noise);
  const auto& zs1 = roots[0];
  const auto& zs2 = roots[1];
  const auto& rs = roots[2];
  if (zs1.size() > 1 || zs2.size() > 1 || rs.size() > 2) {
    throw NumericalError("constraint crossings exceed the analytic bound");
  }
  if (!zs1.empty()) part.z1 = zs1.front();
  if (phi == inst.phi_max()) part.z1 = 1.0;
  if (!zs2.empty()) part.z2 = zs2.front();
  if (rs.size() == 2) {
    part.r1 = rs[0];
    part.r2 = rs[1];
  } else if (rs.size() == 1) {
    part.r2 = rs[0];
  }

  std::vector<double> cuts = {0.0, 1.0};
  for (const auto& v : roots) cuts.insert(cuts.end(), v.begin(), v.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (hi - lo <= 0.0) continue;
    const Constraint label = argmin_label(0.5 * (lo + hi), phi, inst);
    if (!part.intervals.empty() && part.intervals.back().label == label) {
      part.intervals.back().q_hi = hi;
    } else {
      part.intervals.push_back({lo, hi, 0.0, 0.0, label});
    }
  }
  for (auto& iv : part.intervals) {
    iv.t_lo = iv.q_lo == 0.0 ? 0.0 : inst.dist.quantile(iv.q_lo);
    iv.t_hi = iv.q_hi == 1.0 ? 1.0 : inst.dist.quantile(iv.q_hi);
  }

  std::string seq;
  for (const auto& iv : part.intervals) {
    if (!seq.empty()) seq += ",";
    seq += to_string(iv.label);
  }
  const auto& ivs = part.intervals;
  if (seq == "aud,allo" || seq == "aud") {
    part.case_tag = EnvelopeCase::kAudAllo;
    part.gamma1 = 0.0;
    part.gamma2 = 0.0;
    part.gamma3 = ivs[0].t_hi;
  } else if (seq == "ic,allo,aud,allo") {
    part.case_tag = EnvelopeCase::kIcAlloAudAllo;
    part.gamma1 = ivs[0].t_hi;
    part.gamma2 = ivs[2].t_lo;
    part.gamma3 = ivs[2].t_hi;
  } else if (seq == "ic,aud,allo") {
    part.case_tag = EnvelopeCase::kIcAudAllo;
    part.gamma1 = ivs[0].t_hi;
    part.gamma2 = ivs[1].t_lo;
    part.gamma3 = ivs[1].t_hi;
  } else if (seq == "ic,allo" || seq == "ic") {
    part.case_tag = EnvelopeCase::kIcAllo;
    part.gamma1 = ivs[0].t_hi;
    part.gamma2 = 1.0;
    part.gamma3 = 1.0;
  } else {
    throw NumericalError("unexpected envelope structure [" + seq +
                         "] at phi=" + std::to_string(phi));
  }
  return part;
}

double phi_bar(const ProblemInstance& inst, double tol) {
  inst.validate();
  auto has_aud = [&](double phi) {
    return partition(phi, inst).has_aud_region();
  };
  double lo = inst.phi_min();
  double hi = inst.phi_max();
  if (has_aud(hi)) return hi;
  // Just above (m-k)/n the difference allo - aud starts at a small negative
  // value with positive slope, so an interior aud region exists.
  lo += 1e-9 * (hi - lo);
  if (!has_aud(lo)) return lo;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (has_aud(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace mwg
