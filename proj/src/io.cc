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

#include "mwg/io.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mwg/error.h"

namespace mwg {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// NaN has no JSON literal.
ordered_json number(double x) {
  if (std::isnan(x)) return nullptr;
  return x;
}

ordered_json optional_number(const std::optional<double>& x) {
  return x ? number(*x) : ordered_json(nullptr);
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string join_csv(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + "\n";
}

ordered_json instance_json(const ProblemInstance& inst) {
  return {{"n", inst.n}, {"m", inst.m}, {"k", inst.k}, {"dist", inst.dist.spec()}};
}

ordered_json partition_object(const RegionPartition& p) {
  ordered_json intervals = ordered_json::array();
  for (const auto& iv : p.intervals) {
    intervals.push_back({{"label", to_string(iv.label)},
                         {"q_lo", iv.q_lo},
                         {"q_hi", iv.q_hi},
                         {"t_lo", iv.t_lo},
                         {"t_hi", iv.t_hi}});
  }
  return {{"phi", p.phi},
          {"case", to_string(p.case_tag)},
          {"gamma1", p.gamma1},
          {"gamma2", p.gamma2},
          {"gamma3", p.gamma3},
          {"z1", optional_number(p.z1)},
          {"z2", optional_number(p.z2)},
          {"r1", optional_number(p.r1)},
          {"r2", optional_number(p.r2)},
          {"intervals", intervals}};
}

ordered_json check_set_json(const CheckSet& E) {
  ordered_json sets = ordered_json::array();
  for (const auto& row : E.members) sets.push_back(row);
  return sets;
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed ") + what + ": " + e.what());
  }
}

template <typename T>
T get(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) {
    throw InvalidArgument(std::string(what) + " is missing \"" + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string(what) + " field \"" + key + "\": " + e.what());
  }
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x,
                                 std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string partition_json(const RegionPartition& part) {
  return dump(partition_object(part));
}

std::string solve_report_json(const SolveReport& r, const ProblemInstance& inst) {
  ordered_json candidates = ordered_json::array();
  for (const auto& c : r.candidates) {
    candidates.push_back(
        {{"phi", c.phi}, {"payoff", c.payoff}, {"source", to_string(c.source)}});
  }
  ordered_json j = {
      {"instance", instance_json(inst)},
      {"phi_star", r.phi_star},
      {"payoff", r.payoff},
      {"foc_residual", number(r.foc_residual)},
      {"interior", r.interior},
      {"partition", partition_object(r.partition)},
      {"baselines",
       {{"first_best", r.baselines.first_best},
        {"random_lottery", r.baselines.random_lottery},
        {"k_top", r.baselines.k_top}}},
      {"golden", {{"phi", r.golden_phi}, {"payoff", r.golden_payoff}}},
      {"candidates", candidates}};
  return dump(j);
}

std::string solve_report_csv(const SolveReport& r, const ProblemInstance& inst) {
  const auto& p = r.partition;
  return join_csv({"n", "m", "k", "dist", "phi_star", "payoff", "case", "gamma1",
                   "gamma2", "gamma3", "foc_residual", "first_best",
                   "random_lottery", "k_top"}) +
         join_csv({std::to_string(inst.n), std::to_string(inst.m),
                   std::to_string(inst.k), inst.dist.spec(),
                   format_number(r.phi_star), format_number(r.payoff),
                   to_string(p.case_tag), format_number(p.gamma1),
                   format_number(p.gamma2), format_number(p.gamma3),
                   format_number(r.foc_residual),
                   format_number(r.baselines.first_best),
                   format_number(r.baselines.random_lottery),
                   format_number(r.baselines.k_top)});
}

std::string sim_report_json(const SimReport& r, const ProblemInstance& inst) {
  ordered_json bins = ordered_json::array();
  for (const auto& b : r.bins) {
    bins.push_back({{"q_lo", b.q_lo},
                    {"q_hi", b.q_hi},
                    {"t_mid", b.t_mid},
                    {"count", b.count},
                    {"P_target", b.P_target},
                    {"P_hat", b.P_hat},
                    {"A_target", b.A_target},
                    {"A_hat", b.A_hat},
                    {"merit_target", b.merit_target},
                    {"merit_hat", b.merit_hat},
                    {"se_P", b.se_P},
                    {"se_A", b.se_A},
                    {"se_merit", b.se_merit}});
  }
  const auto& c = r.calibration;
  ordered_json j = {
      {"instance", instance_json(inst)},
      {"phi", r.phi},
      {"trials", r.trials},
      {"seed", r.seed},
      {"rng", "mt19937_64 per 65536-trial chunk"},
      {"capacity_violations", r.capacity_violations},
      {"within_bands", r.within_bands()},
      {"max_dev_P", r.max_dev_P},
      {"max_dev_A", r.max_dev_A},
      {"bins_within_P", r.bins_within_P},
      {"bins_within_A", r.bins_within_A},
      {"bins_within_merit", r.bins_within_merit},
      {"payoff", {{"estimate", r.payoff_hat}, {"se", r.payoff_se}, {"target", r.payoff_target}}},
      {"calibration",
       {{"rounds", c.rounds},
        {"converged", c.converged},
        {"trials", c.trials},
        {"lottery_max_z", c.lottery_max_z},
        {"audit_max_z", c.audit_max_z},
        {"lottery_scale", c.lottery_scale},
        {"audit_scale", c.audit_scale},
        {"lottery_weights", c.lottery.w},
        {"audit_weights", c.audit.w}}},
      {"bins", bins}};
  return dump(j);
}

std::string sim_bins_csv(const SimReport& r) {
  std::string out = join_csv({"bin", "q_lo", "q_hi", "t_mid", "count", "P_target",
                              "P_hat", "se_P", "A_target", "A_hat", "se_A",
                              "merit_target", "merit_hat", "se_merit"});
  for (size_t j = 0; j < r.bins.size(); ++j) {
    const auto& b = r.bins[j];
    out += join_csv({std::to_string(j), format_number(b.q_lo), format_number(b.q_hi),
                     format_number(b.t_mid), std::to_string(b.count),
                     format_number(b.P_target), format_number(b.P_hat),
                     format_number(b.se_P), format_number(b.A_target),
                     format_number(b.A_hat), format_number(b.se_A),
                     format_number(b.merit_target), format_number(b.merit_hat),
                     format_number(b.se_merit)});
  }
  return out;
}

std::string epic_witness_json(const EpicWitness& w, const ProblemInstance& inst,
                              double phi) {
  ordered_json j = {{"instance", instance_json(inst)},
                    {"phi", phi},
                    {"profile", w.profile},
                    {"agent", w.agent},
                    {"true_type", w.true_type},
                    {"deviation", w.deviation},
                    {"truthful_allocation", w.truthful_allocation},
                    {"escape_probability", w.escape_probability},
                    {"uniform_escape_probability", w.uniform_escape_probability},
                    {"lower_bound", w.lower_bound},
                    {"gain", w.gain}};
  return dump(j);
}

DiscreteInstance parse_discrete_instance(const std::string& text) {
  const json j = parse(text, "instance file");
  DiscreteInstance inst;
  const auto agents = get<std::vector<json>>(j, "agents", "instance file");
  for (const auto& a : agents) {
    inst.grids.push_back(get<std::vector<double>>(a, "types", "agent entry"));
    inst.masses.push_back(get<std::vector<double>>(a, "masses", "agent entry"));
  }
  if (inst.grids.empty() || inst.grids.size() > 31) {
    throw InvalidArgument("instance file needs between 1 and 31 agents");
  }
  for (const auto& g : inst.grids) {
    if (g.empty()) throw InvalidArgument("instance file has an empty type grid");
  }
  auto profile_index = [&](const json& entry) {
    return inst.index(get<std::vector<int>>(entry, "profile", "table entry"));
  };
  if (j.contains("capacity")) {
    const json& c = j.at("capacity");
    inst.default_capacity = get<int>(c, "default", "capacity table");
    if (c.contains("entries")) {
      for (const auto& e : c.at("entries")) {
        inst.capacity[profile_index(e)] = get<int>(e, "value", "capacity entry");
      }
    }
  }
  if (j.contains("eligible") && j.at("eligible").contains("entries")) {
    for (const auto& e : j.at("eligible").at("entries")) {
      std::uint32_t mask = 0;
      for (int i : get<std::vector<int>>(e, "agents", "eligibility entry")) {
        if (i < 0 || i >= inst.agents()) {
          throw InvalidArgument("eligibility entry names an unknown agent");
        }
        mask |= std::uint32_t{1} << i;
      }
      inst.eligible[profile_index(e)] = mask;
    }
  }
  inst.validate();
  return inst;
}

std::string discrete_instance_json(const DiscreteInstance& inst) {
  ordered_json agents = ordered_json::array();
  for (int i = 0; i < inst.agents(); ++i) {
    agents.push_back({{"types", inst.grids[i]}, {"masses", inst.masses[i]}});
  }
  ordered_json caps = ordered_json::array();
  for (const auto& [idx, h] : inst.capacity) {
    caps.push_back({{"profile", inst.profile_at(idx)}, {"value", h}});
  }
  ordered_json elig = ordered_json::array();
  for (const auto& [idx, mask] : inst.eligible) {
    std::vector<int> members;
    for (int i = 0; i < inst.agents(); ++i) {
      if (mask >> i & 1u) members.push_back(i);
    }
    elig.push_back({{"profile", inst.profile_at(idx)}, {"agents", members}});
  }
  ordered_json j = {{"agents", agents},
                    {"capacity", {{"default", inst.default_capacity}, {"entries", caps}}},
                    {"eligible", {{"entries", elig}}}};
  return dump(j);
}

InterimTable parse_interim_table(const std::string& text) {
  const json j = parse(text, "rule file");
  try {
    if (j.is_object()) return j.at("P").get<InterimTable>();
    return j.get<InterimTable>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("rule file: ") + e.what());
  }
}

std::string interim_table_json(const InterimTable& table) {
  ordered_json j = {{"P", table}};
  return dump(j);
}

std::string verdict_json(const FeasibilityVerdict& v, const DiscreteInstance& inst) {
  ordered_json j = {{"feasible", v.feasible}, {"method", v.method}};
  if (v.method == "flow") {
    j["total_demand"] = v.total_demand;
    j["max_flow"] = v.max_flow;
    j["resolution"] = v.resolution;
  }
  if (v.violation) {
    j["violation"] = {{"set", check_set_json(v.violation->set)},
                      {"lhs", v.violation->lhs},
                      {"rhs", v.violation->rhs}};
  }
  if (v.expost) {
    ordered_json rows = ordered_json::array();
    const std::int64_t count = inst.profile_count();
    for (std::int64_t idx = 0; idx < count; ++idx) {
      std::vector<double> p(inst.agents());
      bool any = false;
      for (int i = 0; i < inst.agents(); ++i) {
        p[i] = v.expost->at(idx, i);
        any = any || p[i] > 0.0;
      }
      if (any) rows.push_back({{"profile", inst.profile_at(idx)}, {"p", p}});
    }
    j["expost"] = rows;
  }
  return dump(j);
}

std::string envelope_csv(const ProblemInstance& inst, double phi, int points) {
  if (points < 2) throw InvalidArgument("need at least 2 points");
  std::string out = join_csv({"q", "c_allo", "c_aud", "c_ic", "envelope", "label"});
  for (int j = 0; j < points; ++j) {
    const double q = j == points - 1 ? 1.0 : double(j) / (points - 1);
    const auto [value, label] = envelope_value(q, phi, inst);
    out += join_csv({format_number(q), format_number(c_allo(q, inst)),
                     format_number(c_aud(q, phi, inst)),
                     format_number(c_ic(q, phi, inst)), format_number(value),
                     to_string(label)});
  }
  return out;
}

std::string interim_csv(const InterimRules& rules, int points) {
  std::string out = join_csv({"t", "P", "A"});
  for (const auto& row : sample_interim(rules, points)) {
    out += join_csv({format_number(row.t), format_number(row.P), format_number(row.A)});
  }
  return out;
}

}  // namespace mwg
