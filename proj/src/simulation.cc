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

#include "mwg/simulation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <utility>

#include "mwg/error.h"
#include "mwg/optimizer.h"

namespace mwg {
namespace {

constexpr std::int64_t kChunk = std::int64_t{1} << 16;
constexpr std::uint32_t kStreamSimulation = 0;
constexpr std::uint32_t kStreamCalibration = 1;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exponential(std::mt19937_64& rng) { return -std::log1p(-uniform01(rng)); }

std::mt19937_64 chunk_rng(std::uint64_t seed, std::int64_t chunk,
                          std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk),
                    static_cast<std::uint32_t>(chunk >> 32), stream};
  return std::mt19937_64(seq);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Per-agent state of one profile.
struct Agent {
  double q = 0.0;
  double t = 0.0;
  Constraint label = Constraint::kAllo;
  int bin = 0;
  bool merit = false;
  bool lottery = false;
  bool audit = false;
};

// Merit stage on agents whose q, label are set. Returns the number of
// winners.
int merit_stage(std::vector<Agent>& agents, std::vector<int>& order,
                const ProblemInstance& inst) {
  const int n = static_cast<int>(agents.size());
  order.resize(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return agents[a].q > agents[b].q; });
  for (auto& a : agents) a.merit = false;
  for (int r = 1; r < n; ++r) {
    if (agents[order[r]].q == agents[order[r - 1]].q) return 0;
  }
  int winners = 0;
  for (int r = 0; r < n; ++r) {
    Agent& a = agents[order[r]];
    if ((a.label == Constraint::kAllo && r < inst.m) ||
        (a.label == Constraint::kAud && r < inst.k)) {
      a.merit = true;
      ++winners;
    }
  }
  return winners;
}

// Indices of the `picks` smallest keys.
void smallest_keys(std::vector<std::pair<double, int>>& keyed, int picks) {
  std::nth_element(keyed.begin(), keyed.begin() + (picks - 1), keyed.end());
}

void lottery_stage(std::vector<Agent>& agents, int merit_winners,
                   const double* keys, const BinWeights& w,
                   const ProblemInstance& inst,
                   std::vector<std::pair<double, int>>& scratch) {
  for (auto& a : agents) a.lottery = false;
  const int remaining = inst.m - merit_winners;
  if (remaining <= 0) return;
  scratch.clear();
  for (int i = 0; i < static_cast<int>(agents.size()); ++i) {
    const Agent& a = agents[i];
    if (a.merit || a.label == Constraint::kAllo) continue;
    scratch.push_back({keys[i] / w.w[a.bin], i});
  }
  if (static_cast<int>(scratch.size()) <= remaining) {
    for (const auto& [key, i] : scratch) agents[i].lottery = true;
    return;
  }
  smallest_keys(scratch, remaining);
  for (int j = 0; j < remaining; ++j) agents[scratch[j].second].lottery = true;
}

void audit_stage(std::vector<Agent>& agents, const double* keys,
                 const BinWeights& w, const ProblemInstance& inst,
                 std::vector<std::pair<double, int>>& scratch) {
  int aud_winners = 0;
  scratch.clear();
  for (int i = 0; i < static_cast<int>(agents.size()); ++i) {
    Agent& a = agents[i];
    a.audit = false;
    if (!a.merit) continue;
    if (a.label == Constraint::kAud) {
      a.audit = true;
      ++aud_winners;
    } else {
      scratch.push_back({keys[i] / w.w[a.bin], i});
    }
  }
  const int capacity = inst.k - aud_winners;
  if (capacity <= 0) return;
  if (static_cast<int>(scratch.size()) <= capacity) {
    for (const auto& [key, i] : scratch) agents[i].audit = true;
    return;
  }
  smallest_keys(scratch, capacity);
  for (int j = 0; j < capacity; ++j) agents[scratch[j].second].audit = true;
}

std::vector<Agent> agents_from_profile(const std::vector<double>& profile,
                                       const RegionPartition& part,
                                       const ProblemInstance& inst, int bins) {
  if (static_cast<int>(profile.size()) != inst.n) {
    throw InvalidArgument("profile has " + std::to_string(profile.size()) +
                          " types, expected n=" + std::to_string(inst.n));
  }
  std::vector<Agent> agents(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    const double t = profile[i];
    if (!(t >= 0.0 && t <= 1.0)) {
      throw InvalidArgument("type " + std::to_string(t) + " outside [0, 1]");
    }
    agents[i].t = t;
    agents[i].q = inst.dist.cdf(t);
    agents[i].label = part.label_at_quantile(agents[i].q);
    agents[i].bin = std::min(bins - 1, static_cast<int>(agents[i].q * bins));
  }
  return agents;
}

std::vector<int> flagged(const std::vector<Agent>& agents, bool Agent::*flag) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(agents.size()); ++i) {
    if (agents[i].*flag) out.push_back(i);
  }
  return out;
}

// Per-bin counters for one chunk of trials.
struct Tally {
  explicit Tally(int bins)
      : count(bins), alloc(bins), audit(bins), merit(bins), eligible(bins),
        lottery(bins), allo(bins), allo_audit(bins) {}

  void add(const Tally& o) {
    for (size_t b = 0; b < count.size(); ++b) {
      count[b] += o.count[b];
      alloc[b] += o.alloc[b];
      audit[b] += o.audit[b];
      merit[b] += o.merit[b];
      eligible[b] += o.eligible[b];
      lottery[b] += o.lottery[b];
      allo[b] += o.allo[b];
      allo_audit[b] += o.allo_audit[b];
    }
    payoff += o.payoff;
    payoff_sq += o.payoff_sq;
    violations += o.violations;
    trials += o.trials;
  }

  std::vector<std::int64_t> count, alloc, audit, merit, eligible, lottery,
      allo, allo_audit;
  double payoff = 0.0;
  double payoff_sq = 0.0;
  std::int64_t violations = 0;
  std::int64_t trials = 0;
};

// Simulates `trials` profiles in fixed chunks; chunk c always uses the same
// random numbers for a given (seed, stream), whatever the thread count.
Tally run_trials(const ProblemInstance& inst, const RegionPartition& part,
                 const BinWeights& lottery_w, const BinWeights& audit_w,
                 std::int64_t trials, std::uint64_t seed, std::uint32_t stream,
                 int threads) {
  const int bins = lottery_w.bins();
  const std::int64_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<Tally> parts(chunks, Tally(bins));
  std::atomic<std::int64_t> next{0};

  auto worker = [&]() {
    const int n = inst.n;
    std::vector<Agent> agents(n);
    std::vector<int> order;
    std::vector<double> lot_keys(n), aud_keys(n);
    std::vector<std::pair<double, int>> scratch;
    scratch.reserve(n);
    for (std::int64_t c = next++; c < chunks; c = next++) {
      Tally& tally = parts[c];
      auto rng = chunk_rng(seed, c, stream);
      const std::int64_t begin = c * kChunk;
      const std::int64_t end = std::min(trials, begin + kChunk);
      for (std::int64_t r = begin; r < end; ++r) {
        for (auto& a : agents) {
          a.q = uniform01(rng);
          a.t = inst.dist.quantile(a.q);
          a.label = part.label_at_quantile(a.q);
          a.bin = std::min(bins - 1, static_cast<int>(a.q * bins));
        }
        for (auto& e : lot_keys) e = exponential(rng);
        for (auto& e : aud_keys) e = exponential(rng);
        const int winners = merit_stage(agents, order, inst);
        lottery_stage(agents, winners, lot_keys.data(), lottery_w, inst, scratch);
        audit_stage(agents, aud_keys.data(), audit_w, inst, scratch);

        int allocated = 0;
        int audited = 0;
        double value = 0.0;
        bool bad = false;
        for (const auto& a : agents) {
          const bool got = a.merit || a.lottery;
          if (a.merit && a.lottery) bad = true;
          if (a.audit && !got) bad = true;
          allocated += got;
          audited += a.audit;
          if (got) value += a.t;
          tally.count[a.bin] += 1;
          tally.alloc[a.bin] += got;
          tally.audit[a.bin] += a.audit;
          tally.merit[a.bin] += a.merit;
          if (a.label != Constraint::kAllo) {
            tally.eligible[a.bin] += 1;
            tally.lottery[a.bin] += a.lottery;
          } else {
            tally.allo[a.bin] += 1;
            tally.allo_audit[a.bin] += a.audit;
          }
        }
        if (allocated > inst.m || audited > inst.k || bad) ++tally.violations;
        tally.payoff += value;
        tally.payoff_sq += value * value;
        ++tally.trials;
      }
    }
  };

  const int t = static_cast<int>(
      std::max<std::int64_t>(1, std::min<std::int64_t>(resolve_threads(threads), chunks)));
  if (t <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  Tally total(bins);
  for (const auto& p : parts) total.add(p);
  return total;
}

// Measure of each label inside quantile bin b.
struct BinComposition {
  double ic = 0.0;
  double aud = 0.0;
  double allo = 0.0;
};

std::vector<BinComposition> compose_bins(const RegionPartition& part, int bins) {
  std::vector<BinComposition> out(bins);
  for (int b = 0; b < bins; ++b) {
    const double lo = double(b) / bins;
    const double hi = double(b + 1) / bins;
    for (const auto& iv : part.intervals) {
      const double len = std::min(hi, iv.q_hi) - std::max(lo, iv.q_lo);
      if (len <= 0.0) continue;
      switch (iv.label) {
        case Constraint::kIc:
          out[b].ic += len;
          break;
        case Constraint::kAud:
          out[b].aud += len;
          break;
        case Constraint::kAllo:
          out[b].allo += len;
          break;
      }
    }
  }
  return out;
}

// Average of A = P - phi over the allo part of each bin (0 where empty).
std::vector<double> allo_audit_targets(const ProblemInstance& inst,
                                       const RegionPartition& part, int bins) {
  std::vector<double> out(bins, 0.0);
  for (int b = 0; b < bins; ++b) {
    const double lo = double(b) / bins;
    const double hi = double(b + 1) / bins;
    double mass = 0.0;
    double integral = 0.0;
    for (const auto& iv : part.intervals) {
      if (iv.label != Constraint::kAllo) continue;
      const double a = std::max(lo, iv.q_lo);
      const double c = std::min(hi, iv.q_hi);
      if (c <= a) continue;
      mass += c - a;
      integral += integrate(
          [&](double q) { return -d_c_allo(q, inst) / inst.n - part.phi; }, a,
          c, 1e-13);
    }
    if (mass > 0.0) out[b] = std::clamp(integral / mass, 0.0, 1.0);
  }
  return out;
}

struct Group {
  std::vector<int> bins;
  double target = 0.0;
};

// One damped fixed-point step for a family of groups. Returns max |z|.
double calibration_step(const std::vector<Group>& groups,
                        const std::vector<std::int64_t>& hits,
                        const std::vector<std::int64_t>& counts,
                        double damping, double* scale_out, BinWeights* w,
                        bool update) {
  double total_hits = 0.0;
  double total_target = 0.0;
  for (const auto& g : groups) {
    for (int b : g.bins) {
      total_hits += hits[b];
      total_target += g.target * counts[b];
    }
  }
  const double scale = total_target > 0.0 ? total_hits / total_target : 1.0;
  *scale_out = scale;
  double max_z = 0.0;
  for (const auto& g : groups) {
    double h = 0.0;
    double c = 0.0;
    for (int b : g.bins) {
      h += hits[b];
      c += counts[b];
    }
    if (c == 0.0) continue;
    const double target = std::min(1.0, scale * g.target);
    const double emp = h / c;
    const double var = target * (1.0 - target) / c;
    if (var <= 0.0) continue;
    max_z = std::max(max_z, std::fabs(emp - target) / std::sqrt(var));
    if (!update) continue;
    const double factor =
        emp > 0.0 ? std::pow(target / emp, damping) : 2.0;
    for (int b : g.bins) w->w[b] *= factor;
  }
  if (update) {
    const double top = *std::max_element(w->w.begin(), w->w.end());
    if (top > 0.0) {
      for (double& x : w->w) x /= top;
    }
  }
  return max_z;
}

}  // namespace

int BinWeights::bin_of_quantile(double q) const {
  const int b = static_cast<int>(std::clamp(q, 0.0, 1.0) * bins());
  return std::min(b, bins() - 1);
}

const char* to_string(Stage s) {
  switch (s) {
    case Stage::kNone:
      return "none";
    case Stage::kMerit:
      return "merit";
    case Stage::kLottery:
      return "lottery";
  }
  return "?";
}

std::vector<int> merit_allocate(const std::vector<double>& profile,
                                const RegionPartition& part,
                                const ProblemInstance& inst) {
  auto agents = agents_from_profile(profile, part, inst, 1);
  std::vector<int> order;
  merit_stage(agents, order, inst);
  return flagged(agents, &Agent::merit);
}

std::vector<int> lottery_allocate(const std::vector<double>& profile,
                                  const std::vector<int>& merit_winners,
                                  const BinWeights& weights,
                                  const RegionPartition& part,
                                  const ProblemInstance& inst,
                                  std::mt19937_64& rng) {
  auto agents = agents_from_profile(profile, part, inst, weights.bins());
  for (int i : merit_winners) agents.at(i).merit = true;
  std::vector<double> keys(inst.n);
  for (auto& e : keys) e = exponential(rng);
  std::vector<std::pair<double, int>> scratch;
  lottery_stage(agents, static_cast<int>(merit_winners.size()), keys.data(),
                weights, inst, scratch);
  return flagged(agents, &Agent::lottery);
}

std::vector<int> audit_select(const std::vector<double>& profile,
                              const std::vector<int>& merit_winners,
                              const BinWeights& weights,
                              const RegionPartition& part,
                              const ProblemInstance& inst,
                              std::mt19937_64& rng) {
  auto agents = agents_from_profile(profile, part, inst, weights.bins());
  for (int i : merit_winners) agents.at(i).merit = true;
  std::vector<double> keys(inst.n);
  for (auto& e : keys) e = exponential(rng);
  std::vector<std::pair<double, int>> scratch;
  audit_stage(agents, keys.data(), weights, inst, scratch);
  return flagged(agents, &Agent::audit);
}

ProfileOutcome run_mechanism(const std::vector<double>& profile,
                             const BinWeights& lottery,
                             const BinWeights& audit,
                             const RegionPartition& part,
                             const ProblemInstance& inst,
                             std::mt19937_64& rng) {
  if (lottery.bins() != audit.bins()) {
    throw InvalidArgument("lottery and audit weights use different bins");
  }
  auto agents = agents_from_profile(profile, part, inst, lottery.bins());
  std::vector<int> order;
  std::vector<double> lot_keys(inst.n), aud_keys(inst.n);
  for (auto& e : lot_keys) e = exponential(rng);
  for (auto& e : aud_keys) e = exponential(rng);
  std::vector<std::pair<double, int>> scratch;
  const int winners = merit_stage(agents, order, inst);
  lottery_stage(agents, winners, lot_keys.data(), lottery, inst, scratch);
  audit_stage(agents, aud_keys.data(), audit, inst, scratch);

  ProfileOutcome out;
  out.profile = profile;
  for (int i = 0; i < inst.n; ++i) {
    const auto& a = agents[i];
    if (a.merit || a.lottery) out.allocated.push_back(i);
    if (a.audit) out.audited.push_back(i);
    out.stage.push_back(a.merit     ? Stage::kMerit
                        : a.lottery ? Stage::kLottery
                                    : Stage::kNone);
  }
  return out;
}

Calibration calibrate(const ProblemInstance& inst, const RegionPartition& part,
                      const CalibrationOptions& options) {
  inst.validate();
  const int bins = options.bins;
  if (bins < 1) throw InvalidArgument("calibration needs at least one bin");
  const std::int64_t trials = options.trials > 0 ? options.trials : 100000;
  if (trials < 100000) {
    throw InvalidArgument("calibration needs at least 1e5 trials");
  }
  const auto comp = compose_bins(part, bins);
  const auto audit_targets = allo_audit_targets(inst, part, bins);

  // Bins whose eligible types are all ic share one weight: those types never
  // win on merit, so they are exchangeable in the lottery.
  std::vector<Group> lottery_groups;
  Group pooled_ic{{}, part.phi};
  for (int b = 0; b < bins; ++b) {
    if (comp[b].aud > 0.0) {
      lottery_groups.push_back({{b}, part.phi});
    } else if (comp[b].ic > 0.0) {
      pooled_ic.bins.push_back(b);
    }
  }
  if (!pooled_ic.bins.empty()) lottery_groups.push_back(pooled_ic);
  std::vector<Group> audit_groups;
  for (int b = 0; b < bins; ++b) {
    if (comp[b].allo > 0.0) audit_groups.push_back({{b}, audit_targets[b]});
  }

  Calibration cal;
  cal.lottery = BinWeights::uniform(bins);
  cal.audit = BinWeights::uniform(bins);
  cal.trials = trials;
  // Converge on a small sample first and grow it fourfold per level; each
  // level then starts close to its fixed point.
  std::int64_t level = trials;
  while (level / 4 >= 100000) level /= 4;
  for (int round = 1; round <= options.max_rounds; ++round) {
    const Tally tally =
        run_trials(inst, part, cal.lottery, cal.audit, level, options.seed,
                   kStreamCalibration, options.threads);
    double scale = 1.0;
    cal.lottery_max_z = calibration_step(lottery_groups, tally.lottery,
                                         tally.eligible, options.damping,
                                         &scale, &cal.lottery, false);
    cal.lottery_scale = scale;
    cal.audit_max_z = calibration_step(audit_groups, tally.allo_audit,
                                       tally.allo, options.damping, &scale,
                                       &cal.audit, false);
    cal.audit_scale = scale;
    cal.rounds = round;
    if (cal.lottery_max_z < options.z_tol && cal.audit_max_z < options.z_tol) {
      if (level == trials) {
        cal.converged = true;
        return cal;
      }
      level = std::min(trials, level * 4);
      continue;
    }
    calibration_step(lottery_groups, tally.lottery, tally.eligible,
                     options.damping, &scale, &cal.lottery, true);
    calibration_step(audit_groups, tally.allo_audit, tally.allo,
                     options.damping, &scale, &cal.audit, true);
  }
  throw NumericalError(
      "weight calibration did not converge after " +
      std::to_string(options.max_rounds) + " rounds (lottery max |z| = " +
      std::to_string(cal.lottery_max_z) + ", audit max |z| = " +
      std::to_string(cal.audit_max_z) + ")");
}

BinWeights calibrate_lottery(const ProblemInstance& inst,
                             const RegionPartition& part, std::int64_t trials,
                             std::uint64_t seed) {
  CalibrationOptions options;
  options.trials = trials;
  options.seed = seed;
  return calibrate(inst, part, options).lottery;
}

bool SimReport::within_bands() const {
  const int allowed = static_cast<int>(bins.size()) / 32;
  const int total = static_cast<int>(bins.size());
  return capacity_violations == 0 && bins_within_P >= total - allowed &&
         bins_within_A >= total - allowed;
}

SimReport simulate(const ProblemInstance& inst, double phi, std::int64_t trials,
                   const SimOptions& options) {
  inst.validate();
  if (trials < 0) throw InvalidArgument("trials must be >= 0");
  const int bins = options.bins;
  if (bins < 1) throw InvalidArgument("simulation needs at least one bin");
  const auto part = partition(phi, inst);

  SimReport report;
  report.trials = trials;
  report.seed = options.seed;
  report.phi = part.phi;
  report.payoff_target = payoff(part, inst);
  report.bins.resize(bins);
  const auto comp = compose_bins(part, bins);
  for (int b = 0; b < bins; ++b) {
    BinStat& s = report.bins[b];
    s.q_lo = double(b) / bins;
    s.q_hi = double(b + 1) / bins;
    s.t_mid = inst.dist.quantile(0.5 * (s.q_lo + s.q_hi));
    // Integral identity: n * int_{bin} P dq = c_phi(q_lo) - c_phi(q_hi).
    const double c_lo = envelope_value(s.q_lo, part.phi, inst).first;
    const double c_hi = envelope_value(s.q_hi, part.phi, inst).first;
    s.P_target = std::clamp((c_lo - c_hi) * bins / inst.n, 0.0, 1.0);
    s.A_target = std::max(0.0, s.P_target - part.phi);
    s.merit_target = std::max(
        0.0, s.P_target - part.phi * (comp[b].ic + comp[b].aud) * bins);
  }
  if (trials == 0) return report;

  CalibrationOptions cal_options = options.calibration;
  cal_options.bins = bins;
  if (cal_options.trials <= 0) {
    cal_options.trials = std::max<std::int64_t>(100000, 4 * trials);
  }
  if (cal_options.threads <= 0) cal_options.threads = options.threads;
  report.calibration = calibrate(inst, part, cal_options);

  const Tally tally =
      run_trials(inst, part, report.calibration.lottery,
                 report.calibration.audit, trials, options.seed,
                 kStreamSimulation, options.threads);
  report.capacity_violations = tally.violations;
  report.payoff_hat = tally.payoff / trials;
  const double var =
      std::max(0.0, tally.payoff_sq / trials - report.payoff_hat * report.payoff_hat);
  report.payoff_se = std::sqrt(var / trials);
  for (int b = 0; b < bins; ++b) {
    BinStat& s = report.bins[b];
    s.count = tally.count[b];
    if (s.count == 0) continue;
    const double c = static_cast<double>(s.count);
    s.P_hat = tally.alloc[b] / c;
    s.A_hat = tally.audit[b] / c;
    s.merit_hat = tally.merit[b] / c;
    s.se_P = std::sqrt(s.P_target * (1.0 - s.P_target) / c);
    s.se_A = std::sqrt(s.A_target * (1.0 - s.A_target) / c);
    s.se_merit = std::sqrt(s.merit_target * (1.0 - s.merit_target) / c);
    const double dp = std::fabs(s.P_hat - s.P_target);
    const double da = std::fabs(s.A_hat - s.A_target);
    const double dm = std::fabs(s.merit_hat - s.merit_target);
    report.max_dev_P = std::max(report.max_dev_P, dp);
    report.max_dev_A = std::max(report.max_dev_A, da);
    // A zero standard error (target exactly 0 or 1) demands an exact match.
    auto within = [&](double dev, double se) {
      return se > 0.0 ? dev <= options.z_band * se : dev == 0.0;
    };
    report.bins_within_P += within(dp, s.se_P);
    report.bins_within_A += within(da, s.se_A);
    report.bins_within_merit += within(dm, s.se_merit);
  }
  return report;
}

double inclusion_probability(const std::vector<double>& weights, int i,
                             int picks) {
  const int size = static_cast<int>(weights.size());
  if (i < 0 || i >= size) throw InvalidArgument("inclusion: index out of range");
  if (picks <= 0) return 0.0;
  if (picks >= size) return 1.0;
  if (size > 20) {
    throw InvalidArgument("inclusion probabilities enumerate at most 20 items");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw InvalidArgument("sampling weights must be positive");
  }
  // miss(mask): probability that i is not drawn in the remaining draws when
  // `mask` holds the items still available.
  std::unordered_map<std::uint32_t, double> memo;
  const std::uint32_t full = (std::uint32_t{1} << size) - 1;
  std::function<double(std::uint32_t)> miss = [&](std::uint32_t mask) {
    const int drawn = size - __builtin_popcount(mask);
    if (drawn == picks) return 1.0;
    if (auto it = memo.find(mask); it != memo.end()) return it->second;
    double total = 0.0;
    for (int j = 0; j < size; ++j) {
      if (mask >> j & 1u) total += weights[j];
    }
    double p = 0.0;
    for (int j = 0; j < size; ++j) {
      if (j == i || !(mask >> j & 1u)) continue;
      p += weights[j] / total * miss(mask & ~(std::uint32_t{1} << j));
    }
    memo.emplace(mask, p);
    return p;
  };
  return 1.0 - miss(full);
}

namespace {

// Probability that `agent` ends up holding an object when the mechanism
// sees `reports` and the agent's true type is `truth`.
double keep_probability(const std::vector<double>& reports, int agent,
                        double truth, const BinWeights& lottery,
                        const BinWeights& audit, const RegionPartition& part,
                        const ProblemInstance& inst) {
  auto agents = agents_from_profile(reports, part, inst, lottery.bins());
  std::vector<int> order;
  const int winners = merit_stage(agents, order, inst);
  const bool lying = reports[agent] != truth;
  const Agent& me = agents[agent];
  if (me.merit) {
    if (me.label == Constraint::kAud) return lying ? 0.0 : 1.0;
    int aud_winners = 0;
    std::vector<double> w;
    int self = -1;
    for (int i = 0; i < inst.n; ++i) {
      if (!agents[i].merit) continue;
      if (agents[i].label == Constraint::kAud) {
        ++aud_winners;
      } else {
        if (i == agent) self = static_cast<int>(w.size());
        w.push_back(audit.w[agents[i].bin]);
      }
    }
    const int capacity = inst.k - aud_winners;
    const double audited = inclusion_probability(w, self, capacity);
    return lying ? 1.0 - audited : 1.0;
  }
  if (me.label == Constraint::kAllo) return 0.0;
  std::vector<double> w;
  int self = -1;
  for (int i = 0; i < inst.n; ++i) {
    if (agents[i].merit || agents[i].label == Constraint::kAllo) continue;
    if (i == agent) self = static_cast<int>(w.size());
    w.push_back(lottery.w[agents[i].bin]);
  }
  return inclusion_probability(w, self, inst.m - winners);
}

}  // namespace

double deviation_gain(const std::vector<double>& profile, int agent,
                      double report, const BinWeights& lottery,
                      const BinWeights& audit, const RegionPartition& part,
                      const ProblemInstance& inst) {
  if (agent < 0 || agent >= static_cast<int>(profile.size())) {
    throw InvalidArgument("deviating agent out of range");
  }
  if (lottery.bins() != audit.bins()) {
    throw InvalidArgument("lottery and audit weights use different bins");
  }
  std::vector<double> reports = profile;
  reports[agent] = report;
  const double truth = profile[agent];
  return keep_probability(reports, agent, truth, lottery, audit, part, inst) -
         keep_probability(profile, agent, truth, lottery, audit, part, inst);
}

EpicWitness epic_counterexample(const ProblemInstance& inst, double phi,
                                const BinWeights* audit) {
  inst.validate();
  if (inst.n < inst.m + 1) {
    throw InvalidArgument("witness needs m other agents besides the deviator");
  }
  const auto part = partition(phi, inst);
  const auto& top = part.intervals.back();
  if (top.label != Constraint::kAllo || !(top.q_lo < 1.0)) {
    throw InvalidArgument("witness needs a non-empty allo region at the top");
  }
  const auto& bottom = part.intervals.front();
  if (bottom.label == Constraint::kAllo) {
    throw InvalidArgument("witness needs a non-allo region at the bottom");
  }
  const BinWeights weights = audit ? *audit : BinWeights::uniform(64);
  const BinWeights lottery = BinWeights::uniform(weights.bins());

  // Quantile layout: deviator at the middle of the bottom region, n - m - 1
  // fillers below it, m agents spread over the top allo region.
  const double b_hi = std::min(bottom.q_hi, top.q_lo);
  std::vector<double> q(inst.n);
  q[0] = 0.5 * b_hi;
  const int fillers = inst.n - inst.m - 1;
  for (int j = 0; j < fillers; ++j) q[1 + j] = 0.5 * b_hi * (j + 1) / (fillers + 1);
  const double a = top.q_lo;
  for (int j = 0; j < inst.m; ++j) {
    q[1 + fillers + j] = a + (1.0 - a) * (j + 1) / (inst.m + 1);
  }
  const double q_mth = a + (1.0 - a) / (inst.m + 1);

  // Report in the bin above q_mth with the smallest audit weight.
  int best_bin = -1;
  for (int b = weights.bin_of_quantile(q_mth); b < weights.bins(); ++b) {
    if (best_bin < 0 || weights.w[b] < weights.w[best_bin]) best_bin = b;
  }
  const double lo = std::max(q_mth, double(best_bin) / weights.bins());
  const double hi = double(best_bin + 1) / weights.bins();
  double q_dev = 0.5 * (lo + hi);
  for (int j = 0; j < inst.m; ++j) {
    if (q_dev == q[1 + fillers + j]) q_dev = 0.5 * (q_dev + hi);
  }

  EpicWitness w;
  w.agent = 0;
  for (double x : q) w.profile.push_back(inst.dist.quantile(x));
  w.true_type = w.profile[0];
  w.deviation = inst.dist.quantile(q_dev);
  w.lower_bound = double(inst.m - inst.k) / inst.m;
  std::vector<double> reports = w.profile;
  reports[0] = w.deviation;
  w.truthful_allocation = keep_probability(w.profile, 0, w.true_type, lottery,
                                           weights, part, inst);
  w.escape_probability = keep_probability(reports, 0, w.true_type, lottery,
                                          weights, part, inst);
  const BinWeights flat = BinWeights::uniform(weights.bins());
  w.uniform_escape_probability =
      keep_probability(reports, 0, w.true_type, lottery, flat, part, inst);
  w.gain = w.escape_probability - w.truthful_allocation;
  return w;
}

}  // namespace mwg
