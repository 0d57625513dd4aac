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

#include "mwg/feasibility.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "mwg/error.h"
#include "mwg/max_flow.h"

namespace mwg {
namespace {

constexpr double kMassTol = 1e-12;
constexpr std::int64_t kMaxDenominator = 65536;
constexpr std::int64_t kMaxDenominatorProduct = std::int64_t{1} << 40;
constexpr std::int64_t kMaxCombinedWork = 400'000'000;

void check_profile_cap(const DiscreteInstance& inst, std::int64_t max_profiles) {
  const std::int64_t count = inst.profile_count();
  if (count > max_profiles) {
    throw InvalidArgument(
        "profile space has " + std::to_string(count) +
        " profiles, above the cap of " + std::to_string(max_profiles) +
        "; use fewer grid points or agents, or raise the cap");
  }
}

void check_table(const DiscreteInstance& inst, const InterimTable& P,
                 const char* what) {
  if (static_cast<int>(P.size()) != inst.agents()) {
    throw InvalidArgument(std::string(what) + " has " +
                          std::to_string(P.size()) + " rows, expected " +
                          std::to_string(inst.agents()));
  }
  for (int i = 0; i < inst.agents(); ++i) {
    if (static_cast<int>(P[i].size()) != inst.grid_size(i)) {
      throw InvalidArgument(std::string(what) + " row " + std::to_string(i) +
                            " does not match the type grid");
    }
    for (double p : P[i]) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument(std::string(what) + " value " +
                              std::to_string(p) + " outside [0, 1]");
      }
    }
  }
}

std::vector<std::vector<bool>> membership(const DiscreteInstance& inst,
                                          const CheckSet& E) {
  if (static_cast<int>(E.members.size()) != inst.agents()) {
    throw InvalidArgument("check set does not list every agent");
  }
  std::vector<std::vector<bool>> in(inst.agents());
  for (int i = 0; i < inst.agents(); ++i) {
    in[i].assign(inst.grid_size(i), false);
    for (int tau : E.members[i]) {
      if (tau < 0 || tau >= inst.grid_size(i)) {
        throw InvalidArgument("check set names a type outside the grid");
      }
      in[i][tau] = true;
    }
  }
  return in;
}

// Odometer over profiles in linear index order.
void advance(Profile& t, const DiscreteInstance& inst) {
  for (int i = inst.agents() - 1; i >= 0; --i) {
    if (++t[i] < inst.grid_size(i)) return;
    t[i] = 0;
  }
}

// Per-profile data in linear index order.
struct ProfileRow {
  double prob = 0.0;
  std::uint32_t J = 0;
  int h = 0;
};

std::vector<ProfileRow> tabulate(const DiscreteInstance& inst) {
  const std::int64_t count = inst.profile_count();
  std::vector<ProfileRow> rows(count);
  const std::uint32_t all = (std::uint32_t{1} << inst.agents()) - 1;
  auto cap = inst.capacity.begin();
  auto elig = inst.eligible.begin();
  Profile t(inst.agents(), 0);
  for (std::int64_t idx = 0; idx < count; ++idx, advance(t, inst)) {
    ProfileRow& r = rows[idx];
    r.prob = inst.prob(t);
    r.h = inst.default_capacity;
    r.J = all;
    if (cap != inst.capacity.end() && cap->first == idx) r.h = (cap++)->second;
    if (elig != inst.eligible.end() && elig->first == idx) r.J = (elig++)->second;
  }
  return rows;
}

double rhs_with(const DiscreteInstance& inst, const std::vector<ProfileRow>& rows,
                const std::vector<std::vector<bool>>& in) {
  Profile t(inst.agents(), 0);
  long double total = 0.0L;
  for (const ProfileRow& r : rows) {
    int covered = 0;
    for (int i = 0; i < inst.agents(); ++i) {
      covered += (r.J >> i & 1u) && in[i][t[i]];
    }
    if (covered > 0) total += static_cast<long double>(r.prob) * std::min(covered, r.h);
    advance(t, inst);
  }
  return static_cast<double>(total);
}

// Integer flow units. With rational masses of small denominator every
// profile probability is an exact multiple of one unit.
class Scaling {
 public:
  explicit Scaling(const DiscreteInstance& inst) : inst_(inst) {
    const int n = inst.agents();
    const std::int64_t budget = (std::int64_t{1} << 58) / std::max(1, n);
    num_.resize(n);
    den_.resize(n);
    exact_ = true;
    __int128 product = 1;
    for (int i = 0; i < n && exact_; ++i) {
      den_[i] = rational_denominator(inst.masses[i], &num_[i]);
      if (den_[i] == 0) exact_ = false;
      product *= den_[i];
      if (product > kMaxDenominatorProduct) exact_ = false;
    }
    if (exact_) {
      denominator_product_ = static_cast<std::int64_t>(product);
      multiplier_ = 1;
      while (denominator_product_ * multiplier_ * 2 <= budget) multiplier_ *= 2;
      scale_ = static_cast<double>(denominator_product_) * multiplier_;
    } else {
      scale_ = static_cast<double>(std::int64_t{1} << 50);
      while (scale_ * 2 > static_cast<double>(budget)) scale_ /= 2;
    }
  }

  bool exact() const { return exact_; }
  double scale() const { return scale_; }

  std::int64_t prob_units(const Profile& t) const {
    if (!exact_) return static_cast<std::int64_t>(std::floor(inst_.prob(t) * scale_));
    std::int64_t units = multiplier_;
    for (int i = 0; i < inst_.agents(); ++i) units *= num_[i][t[i]];
    return units;
  }

  // floor(f_i(tau) * p * scale), exact on the rational path. Otherwise the
  // rounded-down capacities lose under one unit per arc, so each demand
  // gives up two units per profile that can reach it.
  std::int64_t demand_units(int i, int tau, double p) const {
    if (!exact_) {
      const auto raw = static_cast<std::int64_t>(std::floor(
          static_cast<long double>(inst_.masses[i][tau]) * p * scale_));
      const std::int64_t margin = 2 * (inst_.profile_count() / inst_.grid_size(i));
      return std::max<std::int64_t>(0, raw - margin);
    }
    const __int128 x = static_cast<__int128>(num_[i][tau]) *
                       (denominator_product_ / den_[i]) * multiplier_;
    if (p <= 0.0) return 0;
    int e = 0;
    const double frac = std::frexp(p, &e);
    const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
    const __int128 prod = x * mant;
    const int shift = 53 - e;
    return static_cast<std::int64_t>(shift >= 0 ? prod >> shift : prod << -shift);
  }

 private:
  // Smallest D with every mass a multiple of 1/D; 0 if none up to the cap.
  static std::int64_t rational_denominator(const std::vector<double>& masses,
                                           std::vector<std::int64_t>* num) {
    for (std::int64_t d = 1; d <= kMaxDenominator; ++d) {
      num->clear();
      std::int64_t sum = 0;
      bool ok = true;
      for (double f : masses) {
        const double scaled = f * static_cast<double>(d);
        const double r = std::round(scaled);
        if (std::fabs(scaled - r) > 1e-9) {
          ok = false;
          break;
        }
        num->push_back(static_cast<std::int64_t>(r));
        sum += static_cast<std::int64_t>(r);
      }
      if (ok && sum == d) return d;
    }
    num->clear();
    return 0;
  }

  const DiscreteInstance& inst_;
  bool exact_ = false;
  std::vector<std::vector<std::int64_t>> num_;
  std::vector<std::int64_t> den_;
  std::int64_t denominator_product_ = 1;
  std::int64_t multiplier_ = 1;
  double scale_ = 1.0;
};

CheckSet threshold_set(const DiscreteInstance& inst,
                       const std::vector<int>& thresholds) {
  CheckSet E;
  E.members.resize(inst.agents());
  for (int i = 0; i < inst.agents(); ++i) {
    for (int tau = thresholds[i]; tau < inst.grid_size(i); ++tau) {
      E.members[i].push_back(tau);
    }
  }
  return E;
}

}  // namespace

std::int64_t DiscreteInstance::profile_count() const {
  std::int64_t count = 1;
  for (const auto& g : grids) {
    if (g.empty()) return 0;
    if (count > (std::int64_t{1} << 62) / static_cast<std::int64_t>(g.size())) {
      throw InvalidArgument("profile space too large to index");
    }
    count *= static_cast<std::int64_t>(g.size());
  }
  return count;
}

std::int64_t DiscreteInstance::index(const Profile& t) const {
  if (static_cast<int>(t.size()) != agents()) {
    throw InvalidArgument("profile length does not match the agent count");
  }
  std::int64_t idx = 0;
  for (int i = 0; i < agents(); ++i) {
    if (t[i] < 0 || t[i] >= grid_size(i)) {
      throw InvalidArgument("profile type index outside the grid");
    }
    idx = idx * grid_size(i) + t[i];
  }
  return idx;
}

Profile DiscreteInstance::profile_at(std::int64_t idx) const {
  if (idx < 0 || idx >= profile_count()) {
    throw InvalidArgument("profile index out of range");
  }
  Profile t(agents());
  for (int i = agents() - 1; i >= 0; --i) {
    t[i] = static_cast<int>(idx % grid_size(i));
    idx /= grid_size(i);
  }
  return t;
}

int DiscreteInstance::h(std::int64_t idx) const {
  auto it = capacity.find(idx);
  return it == capacity.end() ? default_capacity : it->second;
}

std::uint32_t DiscreteInstance::J(std::int64_t idx) const {
  auto it = eligible.find(idx);
  if (it != eligible.end()) return it->second;
  return agents() >= 32 ? ~std::uint32_t{0}
                        : (std::uint32_t{1} << agents()) - 1;
}

double DiscreteInstance::prob(const Profile& t) const {
  double p = 1.0;
  for (int i = 0; i < agents(); ++i) p *= masses[i][t[i]];
  return p;
}

bool DiscreteInstance::symmetric_grids() const {
  for (int i = 1; i < agents(); ++i) {
    if (grids[i] != grids[0] || masses[i] != masses[0]) return false;
  }
  return true;
}

void DiscreteInstance::validate() const {
  if (grids.empty()) throw InvalidArgument("instance needs at least one agent");
  if (agents() > 31) throw InvalidArgument("at most 31 agents are supported");
  if (masses.size() != grids.size()) {
    throw InvalidArgument("grids and masses list different agent counts");
  }
  for (int i = 0; i < agents(); ++i) {
    if (grids[i].empty()) {
      throw InvalidArgument("agent " + std::to_string(i) + " has an empty grid");
    }
    if (masses[i].size() != grids[i].size()) {
      throw InvalidArgument("agent " + std::to_string(i) +
                            " has mismatched grid and mass lengths");
    }
    for (size_t j = 1; j < grids[i].size(); ++j) {
      if (!(grids[i][j] > grids[i][j - 1])) {
        throw InvalidArgument("agent " + std::to_string(i) +
                              " grid is not strictly increasing");
      }
    }
    double sum = 0.0;
    for (double f : masses[i]) {
      if (!(f >= 0.0)) throw InvalidArgument("negative type probability");
      sum += f;
    }
    if (std::fabs(sum - 1.0) > kMassTol) {
      throw InvalidArgument("agent " + std::to_string(i) +
                            " type probabilities sum to " + std::to_string(sum));
    }
  }
  if (default_capacity < 0) throw InvalidArgument("negative capacity");
  const std::int64_t count = profile_count();
  for (const auto& [idx, h] : capacity) {
    if (idx < 0 || idx >= count) throw InvalidArgument("capacity entry out of range");
    if (h < 0) throw InvalidArgument("negative capacity");
  }
  const std::uint32_t all = (std::uint32_t{1} << agents()) - 1;
  for (const auto& [idx, mask] : eligible) {
    if (idx < 0 || idx >= count) {
      throw InvalidArgument("eligibility entry out of range");
    }
    if (mask & ~all) throw InvalidArgument("eligibility names an unknown agent");
  }
}

double border_lhs(const DiscreteInstance& inst, const InterimTable& P,
                  const CheckSet& E) {
  check_table(inst, P, "interim rule");
  const auto in = membership(inst, E);
  long double total = 0.0L;
  for (int i = 0; i < inst.agents(); ++i) {
    for (int tau = 0; tau < inst.grid_size(i); ++tau) {
      if (in[i][tau]) total += static_cast<long double>(inst.masses[i][tau]) * P[i][tau];
    }
  }
  return static_cast<double>(total);
}

double border_rhs(const DiscreteInstance& inst, const CheckSet& E,
                  std::int64_t max_profiles) {
  inst.validate();
  check_profile_cap(inst, max_profiles);
  return rhs_with(inst, tabulate(inst), membership(inst, E));
}

FeasibilityVerdict check_feasible(const DiscreteInstance& inst,
                                  const InterimTable& P,
                                  const FlowOptions& options) {
  inst.validate();
  check_table(inst, P, "interim rule");
  check_profile_cap(inst, options.max_profiles);
  const int n = inst.agents();
  const Scaling scaling(inst);

  std::vector<int> demand_node(n);
  int nodes = 2;
  for (int i = 0; i < n; ++i) {
    demand_node[i] = nodes;
    nodes += inst.grid_size(i);
  }
  const int source = 0;
  const int sink = 1;
  MaxFlow flow(nodes);
  std::int64_t total_demand = 0;
  for (int i = 0; i < n; ++i) {
    for (int tau = 0; tau < inst.grid_size(i); ++tau) {
      const std::int64_t d = scaling.demand_units(
          i, tau, std::max(0.0, P[i][tau] - options.tolerance));
      if (d > 0) flow.add_edge(demand_node[i] + tau, sink, d);
      total_demand += d;
    }
  }

  const std::int64_t count = inst.profile_count();
  const auto rows = tabulate(inst);
  std::vector<int> arc(static_cast<size_t>(count) * n, -1);
  std::vector<std::int64_t> units(count, 0);
  Profile t(n, 0);
  for (std::int64_t idx = 0; idx < count; ++idx, advance(t, inst)) {
    const std::uint32_t J = rows[idx].J;
    const int eligible = std::popcount(J);
    const int h = std::min(rows[idx].h, eligible);
    const std::int64_t u = scaling.prob_units(t);
    units[idx] = u;
    if (h == 0 || u == 0) continue;
    const int node = flow.add_node();
    flow.add_edge(source, node, u * h);
    for (int i = 0; i < n; ++i) {
      if (J >> i & 1u) {
        arc[static_cast<size_t>(idx) * n + i] =
            flow.add_edge(node, demand_node[i] + t[i], u);
      }
    }
  }
  const std::int64_t value = flow.run(source, sink);

  FeasibilityVerdict verdict;
  verdict.method = "flow";
  verdict.resolution = 1.0 / scaling.scale();
  verdict.total_demand = total_demand / scaling.scale();
  verdict.max_flow = value / scaling.scale();
  verdict.feasible = value == total_demand;
  if (!verdict.feasible) {
    const auto side = flow.source_side(source);
    Violation v;
    v.set.members.resize(n);
    for (int i = 0; i < n; ++i) {
      for (int tau = 0; tau < inst.grid_size(i); ++tau) {
        if (!side[demand_node[i] + tau] && P[i][tau] > 0.0) {
          v.set.members[i].push_back(tau);
        }
      }
    }
    v.lhs = border_lhs(inst, P, v.set);
    v.rhs = rhs_with(inst, rows, membership(inst, v.set));
    verdict.violation = std::move(v);
  } else if (options.build_expost) {
    ExPostRule rule;
    rule.agents = n;
    rule.p.assign(static_cast<size_t>(count) * n, 0.0);
    for (size_t j = 0; j < arc.size(); ++j) {
      if (arc[j] < 0) continue;
      rule.p[j] = static_cast<double>(flow.flow(arc[j])) /
                  static_cast<double>(units[j / n]);
    }
    verdict.expost = std::move(rule);
  }
  return verdict;
}

FeasibilityVerdict check_upper_sets(const DiscreteInstance& inst,
                                    const InterimTable& P,
                                    const FlowOptions& options) {
  inst.validate();
  check_table(inst, P, "interim rule");
  check_profile_cap(inst, options.max_profiles);
  const int n = inst.agents();
  std::int64_t combos = 1;
  for (int i = 0; i < n; ++i) combos *= inst.grid_size(i) + 1;
  if (combos > kMaxCombinedWork / std::max<std::int64_t>(1, inst.profile_count())) {
    throw InvalidArgument("too many upper sets to enumerate for this instance");
  }
  const auto rows = tabulate(inst);
  FeasibilityVerdict verdict;
  verdict.method = "upper-sets";
  verdict.feasible = true;
  double worst = 0.0;
  std::vector<int> e(n, 0);
  for (std::int64_t c = 0; c < combos; ++c) {
    const CheckSet E = threshold_set(inst, e);
    const double lhs = border_lhs(inst, P, E);
    const double rhs = rhs_with(inst, rows, membership(inst, E));
    if (lhs - rhs > options.tolerance && lhs - rhs > worst) {
      worst = lhs - rhs;
      verdict.feasible = false;
      verdict.violation = Violation{E, lhs, rhs};
    }
    for (int i = n - 1; i >= 0; --i) {
      if (++e[i] <= inst.grid_size(i)) break;
      e[i] = 0;
    }
  }
  return verdict;
}

FeasibilityVerdict check_interim_allocation(const DiscreteInstance& inst,
                                            const InterimTable& P,
                                            const FlowOptions& options) {
  inst.validate();
  check_table(inst, P, "interim rule");
  bool fast = inst.symmetric_grids() && inst.capacity.empty() &&
              inst.eligible.empty();
  for (int i = 1; fast && i < inst.agents(); ++i) fast = P[i] == P[0];
  for (size_t j = 1; fast && j < P[0].size(); ++j) {
    fast = P[0][j] >= P[0][j - 1] - options.tolerance;
  }
  if (!fast) return check_feasible(inst, P, options);

  const int n = inst.agents();
  const int G = inst.grid_size(0);
  FeasibilityVerdict verdict;
  verdict.method = "upper-sets";
  verdict.feasible = true;
  double worst = 0.0;
  double lhs = 0.0;
  double mass = 0.0;
  for (int e = G - 1; e >= 0; --e) {
    lhs += n * inst.masses[0][e] * P[0][e];
    mass += inst.masses[0][e];
    const double rhs =
        binomial_capped_mean(n, std::min(1.0, mass), inst.default_capacity);
    if (lhs - rhs > options.tolerance && lhs - rhs > worst) {
      worst = lhs - rhs;
      verdict.feasible = false;
      verdict.violation = Violation{threshold_set(inst, std::vector<int>(n, e)),
                                    lhs, rhs};
    }
  }
  return verdict;
}

DiscreteInstance audit_instance(const DiscreteInstance& base,
                                const AllocationRule& merit, int k,
                                std::int64_t max_profiles) {
  base.validate();
  check_profile_cap(base, max_profiles);
  if (k < 0) throw InvalidArgument("audit capacity must be >= 0");
  DiscreteInstance out = base;
  out.default_capacity = k;
  out.capacity.clear();
  out.eligible.clear();
  const std::int64_t count = base.profile_count();
  Profile t(base.agents(), 0);
  for (std::int64_t idx = 0; idx < count; ++idx, advance(t, base)) {
    const std::uint32_t winners = merit(t);
    if (winners != out.J(idx)) out.eligible.emplace_hint(out.eligible.end(), idx, winners);
  }
  return out;
}

FeasibilityVerdict check_interim_audit(const DiscreteInstance& base,
                                       const AllocationRule& merit, int k,
                                       const InterimTable& A,
                                       const AuditFamily* family,
                                       const FlowOptions& options) {
  const DiscreteInstance inst = audit_instance(base, merit, k, options.max_profiles);
  check_table(inst, A, "interim audit rule");
  if (family == nullptr) return check_feasible(inst, A, options);
  const int G = inst.grid_size(0);
  if (family->aud_begin < 0 || family->aud_begin > family->aud_end ||
      family->aud_end > G) {
    throw InvalidArgument("audit family range outside the grid");
  }
  std::vector<bool> shares_grid(inst.agents());
  for (int i = 0; i < inst.agents(); ++i) {
    shares_grid[i] = inst.grids[i] == inst.grids[0] && inst.masses[i] == inst.masses[0];
  }
  // Profiles reduced to (probability, h, types of eligible grid-sharing
  // agents); every candidate set is then one pass over this list.
  std::vector<long double> prob;
  std::vector<int> cap;
  std::vector<int> offsets{0};
  std::vector<int> types;
  {
    const auto rows = tabulate(inst);
    Profile t(inst.agents(), 0);
    for (const ProfileRow& r : rows) {
      const size_t before = types.size();
      for (int i = 0; i < inst.agents(); ++i) {
        if (shares_grid[i] && (r.J >> i & 1u)) types.push_back(t[i]);
      }
      if (types.size() > before && r.h > 0 && r.prob > 0.0) {
        prob.push_back(r.prob);
        cap.push_back(r.h);
        offsets.push_back(static_cast<int>(types.size()));
      } else {
        types.resize(before);
      }
      advance(t, inst);
    }
  }
  FeasibilityVerdict verdict;
  verdict.method = "threshold";
  verdict.feasible = true;
  double worst = 0.0;
  std::vector<bool> in(G);
  for (int a = family->aud_begin; a <= family->aud_end; ++a) {
    for (int d = family->aud_end; d <= G; ++d) {
      for (int tau = 0; tau < G; ++tau) {
        in[tau] = (tau >= a && tau < family->aud_end) || tau >= d;
      }
      long double rhs = 0.0L;
      for (size_t r = 0; r < prob.size(); ++r) {
        int covered = 0;
        for (int j = offsets[r]; j < offsets[r + 1]; ++j) covered += in[types[j]];
        if (covered > 0) rhs += prob[r] * std::min(covered, cap[r]);
      }
      CheckSet E;
      E.members.resize(inst.agents());
      for (int i = 0; i < inst.agents(); ++i) {
        if (!shares_grid[i]) continue;
        for (int tau = 0; tau < G; ++tau) {
          if (in[tau]) E.members[i].push_back(tau);
        }
      }
      const double lhs = border_lhs(inst, A, E);
      const double gap = lhs - static_cast<double>(rhs);
      if (gap > options.tolerance && gap > worst) {
        worst = gap;
        verdict.feasible = false;
        verdict.violation = Violation{E, lhs, static_cast<double>(rhs)};
      }
    }
  }
  return verdict;
}

ExPostRule construct_expost(const DiscreteInstance& inst, const InterimTable& P,
                            const FlowOptions& options) {
  FlowOptions opts = options;
  opts.build_expost = true;
  auto verdict = check_feasible(inst, P, opts);
  if (!verdict.feasible) {
    const auto& v = *verdict.violation;
    throw InfeasibleError("interim rule is not feasible: a check set has demand " +
                          std::to_string(v.lhs) + " above supply " +
                          std::to_string(v.rhs));
  }
  return std::move(*verdict.expost);
}

InterimTable expost_marginals(const DiscreteInstance& inst, const ExPostRule& rule) {
  inst.validate();
  const int n = inst.agents();
  if (rule.agents != n ||
      rule.p.size() != static_cast<size_t>(inst.profile_count()) * n) {
    throw InvalidArgument("ex-post rule does not match the instance");
  }
  InterimTable out(n);
  for (int i = 0; i < n; ++i) out[i].assign(inst.grid_size(i), 0.0);
  const std::int64_t count = inst.profile_count();
  Profile t(n, 0);
  for (std::int64_t idx = 0; idx < count; ++idx, advance(t, inst)) {
    const double prob = inst.prob(t);
    for (int i = 0; i < n; ++i) {
      // Conditional on t_i: divide the joint mass by f_i(t_i) at the end.
      out[i][t[i]] += prob * rule.at(idx, i);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int tau = 0; tau < inst.grid_size(i); ++tau) {
      if (inst.masses[i][tau] > 0.0) out[i][tau] /= inst.masses[i][tau];
    }
  }
  return out;
}

Discretization discretize(const InterimRules& rules,
                          const DiscretizeOptions& options) {
  if (options.bins < 1) {
    throw InvalidArgument("discretization needs at least one bin");
  }
  const auto& inst = rules.instance();
  const auto& part = rules.partition();
  const int bins = options.bins;
  Discretization out;
  for (int b = 0; b <= bins; ++b) out.q_edges.push_back(double(b) / bins);
  if (options.align_regions) {
    for (const auto& iv : part.intervals) {
      for (double q : {iv.q_lo, iv.q_hi}) {
        // Pieces thinner than this would collapse onto a neighbouring type.
        auto near = [&](double e) { return std::fabs(e - q) < 1e-12; };
        if (std::none_of(out.q_edges.begin(), out.q_edges.end(), near)) {
          out.q_edges.push_back(q);
        }
      }
    }
    std::sort(out.q_edges.begin(), out.q_edges.end());
  }
  const int cells = static_cast<int>(out.q_edges.size()) - 1;
  std::vector<double> grid(cells), mass(cells), P(cells), A(cells);
  for (int c = 0; c < cells; ++c) {
    const double lo = out.q_edges[c];
    const double hi = out.q_edges[c + 1];
    const double mid = 0.5 * (lo + hi);
    grid[c] = inst.dist.quantile(mid);
    mass[c] = options.align_regions ? hi - lo : 1.0 / bins;
    out.labels.push_back(part.label_at_quantile(mid));
    // Cell average through the envelope identity n * int P dq = -dc.
    const double drop = envelope_value(lo, rules.phi(), inst).first -
                        envelope_value(hi, rules.phi(), inst).first;
    P[c] = std::clamp(drop / (inst.n * (hi - lo)), 0.0, 1.0);
    A[c] = std::max(0.0, P[c] - rules.phi());
  }
  auto& d = out.instance;
  d.grids.assign(inst.n, grid);
  d.masses.assign(inst.n, mass);
  d.default_capacity = inst.m;
  out.P.assign(inst.n, P);
  out.A.assign(inst.n, A);
  if (options.tie_breaker) {
    if (inst.n > 8) {
      throw InvalidArgument("tie-breaking coordinate supports at most 8 agents");
    }
    int orderings = 1;
    for (int j = 2; j <= inst.n; ++j) orderings *= j;
    std::vector<double> ids(orderings);
    std::iota(ids.begin(), ids.end(), 0.0);
    d.grids.push_back(ids);
    d.masses.emplace_back(orderings, 1.0 / orderings);
    out.P.emplace_back(orderings, 0.0);
    out.A.emplace_back(orderings, 0.0);
    out.tie_breaker = inst.n;
  }
  d.validate();
  return out;
}

AuditFamily audit_family(const std::vector<Constraint>& labels) {
  const int G = static_cast<int>(labels.size());
  int first_allo = G;
  while (first_allo > 0 && labels[first_allo - 1] == Constraint::kAllo) --first_allo;
  int first_aud = first_allo;
  while (first_aud > 0 && labels[first_aud - 1] == Constraint::kAud) --first_aud;
  return {first_aud, first_allo};
}

AllocationRule discrete_merit_rule(std::vector<Constraint> labels, int n, int m,
                                   int k) {
  if (n < 1 || n > 31 || m < 0 || k < 0) {
    throw InvalidArgument("merit rule needs 1 <= n <= 31 and m, k >= 0");
  }
  return [labels = std::move(labels), n, m, k](const Profile& t) -> std::uint32_t {
    if (static_cast<int>(t.size()) != n && static_cast<int>(t.size()) != n + 1) {
      throw InvalidArgument("merit rule profile has the wrong length");
    }
    // Priority among tied agents: position in the ordering decoded from the
    // tie-breaking coordinate (factorial number system).
    std::vector<int> priority;
    if (static_cast<int>(t.size()) == n + 1) {
      std::vector<int> pool(n);
      std::iota(pool.begin(), pool.end(), 0);
      priority.assign(n, 0);
      int code = t[n];
      for (int pos = 0; pos < n; ++pos) {
        int radix = 1;
        for (int j = 2; j <= n - 1 - pos; ++j) radix *= j;
        const int pick = code / radix;
        code %= radix;
        priority[pool[pick]] = pos;
        pool.erase(pool.begin() + pick);
      }
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (t[a] != t[b]) return t[a] > t[b];
      return !priority.empty() && priority[a] < priority[b];
    });
    if (priority.empty()) {
      for (int r = 1; r < n; ++r) {
        if (t[order[r]] == t[order[r - 1]]) return 0;
      }
    }
    std::uint32_t winners = 0;
    for (int r = 0; r < n; ++r) {
      const Constraint c = labels.at(t[order[r]]);
      if ((c == Constraint::kAllo && r < m) || (c == Constraint::kAud && r < k)) {
        winners |= std::uint32_t{1} << order[r];
      }
    }
    return winners;
  };
}

}  // namespace mwg
