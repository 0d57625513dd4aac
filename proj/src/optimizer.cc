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

#include "mwg/optimizer.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>

#include <boost/math/tools/toms748_solve.hpp>

#include "mwg/error.h"

namespace mwg {
namespace {

double branch_P(Constraint label, double q, double phi,
                const ProblemInstance& inst) {
  switch (label) {
    case Constraint::kIc:
      return phi;
    case Constraint::kAud:
      return -d_c_aud(q, phi, inst) / inst.n;
    case Constraint::kAllo:
      return -d_c_allo(q, inst) / inst.n;
  }
  return 0.0;
}

// n * integral over [0, 1] of g(q) Q(q) dq.
double weighted_mean(const RealFn& g, const ProblemInstance& inst) {
  return inst.n * integrate([&](double q) { return g(q) * inst.dist.quantile(q); },
                            0.0, 1.0, 1e-12);
}

}  // namespace

double payoff(const RegionPartition& part, const ProblemInstance& inst) {
  double total = 0.0;
  for (const auto& iv : part.intervals) {
    if (iv.q_hi <= iv.q_lo) continue;
    const Constraint label = iv.label;
    total += integrate(
        [&](double q) {
          return branch_P(label, q, part.phi, inst) * inst.dist.quantile(q);
        },
        iv.q_lo, iv.q_hi, 1e-12);
  }
  return inst.n * total;
}

double payoff(double phi, const ProblemInstance& inst) {
  return payoff(partition(phi, inst), inst);
}

double foc_residual(const RegionPartition& part, const ProblemInstance& inst) {
  if (part.case_tag == EnvelopeCase::kAudAllo) {
    throw InvalidArgument("first-order condition needs phi > (m-k)/n");
  }
  const auto& F = inst.dist;
  const double g1 = part.gamma1;
  const double g2 = part.gamma2;
  const double g3 = part.gamma3;
  return g1 * F.cdf(g1) + g2 * (1.0 - F.cdf(g2)) - g3 * (1.0 - F.cdf(g3)) -
         truncated_mean(F, 0.0, g1) - truncated_mean(F, g2, g3);
}

double foc_residual(double phi, const ProblemInstance& inst) {
  return foc_residual(partition(phi, inst), inst);
}

double k_top_interim(double q, const ProblemInstance& inst) {
  const double top = binomial_cdf(inst.n - 1, 1.0 - q, inst.k - 1);
  return top + (1.0 - top) * double(inst.m - inst.k) / (inst.n - inst.k);
}

Baselines baseline_payoffs(const ProblemInstance& inst) {
  inst.validate();
  Baselines b;
  b.first_best = weighted_mean(
      [&](double q) { return binomial_cdf(inst.n - 1, 1.0 - q, inst.m - 1); },
      inst);
  b.random_lottery =
      inst.m * integrate([&](double t) { return 1.0 - inst.dist.cdf(t); }, 0.0,
                         1.0, 1e-13);
  b.k_top = weighted_mean([&](double q) { return k_top_interim(q, inst); }, inst);
  return b;
}

const char* to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::kFocRoot:
      return "foc-root";
    case CandidateSource::kEndpoint:
      return "endpoint";
    case CandidateSource::kGrid:
      return "grid";
  }
  return "?";
}

std::pair<double, double> golden_section_max(
    const RealFn& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // Compare the final interior point with the bracket ends so a maximum at
  // an end of the search interval is not lost.
  double best_x = fc >= fd ? c : d;
  double best_f = std::max(fc, fd);
  for (double x : {a, b}) {
    const double fx = f(x);
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  return {best_x, best_f};
}

SolveReport solve(const ProblemInstance& inst, const SolveOptions& options) {
  inst.validate();
  if (options.grid_intervals < 2) {
    throw InvalidArgument("solve needs at least 2 grid intervals");
  }
  const double lo = inst.phi_min();
  const double hi = inst.phi_max();
  const int intervals = options.grid_intervals;

  SolveReport report;
  std::vector<double> grid(intervals + 1);
  std::vector<double> grid_payoff(intervals + 1);
  std::vector<double> residual(intervals + 1,
                               std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j <= intervals; ++j) {
    grid[j] = j == intervals ? hi : lo + (hi - lo) * j / intervals;
    const auto part = partition(grid[j], inst);
    grid_payoff[j] = payoff(part, inst);
    if (part.case_tag != EnvelopeCase::kAudAllo) {
      residual[j] = foc_residual(part, inst);
    }
  }
  // The left endpoint has no ic region; bracket from just inside instead.
  const double inner = lo + 1e-9 * (hi - lo);
  {
    const auto part = partition(inner, inst);
    if (part.case_tag != EnvelopeCase::kAudAllo) {
      residual[0] = foc_residual(part, inst);
      grid[0] = inner;
    }
  }

  auto& cands = report.candidates;
  auto f = [&](double phi) { return foc_residual(phi, inst); };
  for (int j = 0; j < intervals; ++j) {
    const double a = residual[j];
    const double b = residual[j + 1];
    if (std::isnan(a) || std::isnan(b)) continue;
    if (a == 0.0) {
      cands.push_back({grid[j], 0.0, CandidateSource::kFocRoot});
      continue;
    }
    if ((a < 0.0) == (b < 0.0) || b == 0.0) {
      if (b == 0.0 && j + 1 == intervals) {
        cands.push_back({grid[j + 1], 0.0, CandidateSource::kFocRoot});
      }
      continue;
    }
    std::uintmax_t max_iter = 200;
    auto r = boost::math::tools::toms748_solve(
        f, grid[j], grid[j + 1], a, b,
        [&](double x, double y) { return std::fabs(y - x) <= options.root_tol; },
        max_iter);
    cands.push_back({0.5 * (r.first + r.second), 0.0, CandidateSource::kFocRoot});
  }
  grid[0] = lo;
  cands.push_back({lo, grid_payoff[0], CandidateSource::kEndpoint});
  cands.push_back({hi, grid_payoff[intervals], CandidateSource::kEndpoint});
  const int best_j = static_cast<int>(
      std::max_element(grid_payoff.begin(), grid_payoff.end()) -
      grid_payoff.begin());
  cands.push_back({grid[best_j], grid_payoff[best_j], CandidateSource::kGrid});
  for (auto& c : cands) {
    if (c.source == CandidateSource::kFocRoot) c.payoff = payoff(c.phi, inst);
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.phi, x.source) < std::tie(y.phi, y.source);
  });

  const Candidate* best = &cands.front();
  for (const auto& c : cands) {
    if (c.payoff > best->payoff) best = &c;
  }
  report.phi_star = best->phi;
  report.payoff = best->payoff;

  const double ga = grid[std::max(best_j - 1, 0)];
  const double gb = grid[std::min(best_j + 1, intervals)];
  std::tie(report.golden_phi, report.golden_payoff) = golden_section_max(
      [&](double phi) { return payoff(phi, inst); }, ga, gb, options.golden_tol);
  if (std::fabs(report.golden_payoff - report.payoff) > options.agreement_tol) {
    throw NumericalError("golden-section payoff " +
                         std::to_string(report.golden_payoff) +
                         " disagrees with the candidate argmax " +
                         std::to_string(report.payoff));
  }

  report.partition = partition(report.phi_star, inst);
  report.interior = report.phi_star > lo && report.phi_star < hi;
  report.foc_residual = report.partition.case_tag == EnvelopeCase::kAudAllo
                            ? std::numeric_limits<double>::quiet_NaN()
                            : foc_residual(report.partition, inst);
  report.baselines = baseline_payoffs(inst);
  return report;
}

}  // namespace mwg
