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

// mwg: solve, simulate, check, sweep and plot-data front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mwg/mwg.h"

namespace {

using json = nlohmann::ordered_json;

// Carries an mwg_status out of nested helpers to main().
class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

void ok(mwg_status status) {
  if (status != MWG_OK) throw Failure(status, mwg_last_error());
}

struct InstanceDeleter {
  void operator()(mwg_instance* p) const { mwg_instance_destroy(p); }
};
struct SolutionDeleter {
  void operator()(mwg_solution* p) const { mwg_solution_destroy(p); }
};
struct SimulationDeleter {
  void operator()(mwg_simulation* p) const { mwg_simulation_destroy(p); }
};
struct DiscreteDeleter {
  void operator()(mwg_discrete* p) const { mwg_discrete_destroy(p); }
};
struct VerdictDeleter {
  void operator()(mwg_verdict* p) const { mwg_verdict_destroy(p); }
};

using Instance = std::unique_ptr<mwg_instance, InstanceDeleter>;
using Solution = std::unique_ptr<mwg_solution, SolutionDeleter>;
using Simulation = std::unique_ptr<mwg_simulation, SimulationDeleter>;
using Discrete = std::unique_ptr<mwg_discrete, DiscreteDeleter>;
using Verdict = std::unique_ptr<mwg_verdict, VerdictDeleter>;

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  std::string out = s == nullptr ? "" : s;
  mwg_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(MWG_ERR_INVALID_ARGUMENT, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw Failure(MWG_ERR_INVALID_ARGUMENT, "cannot write " + path.string());
  }
}

// Writes to --out when given, stdout otherwise.
void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    std::cout.flush();
  } else {
    write_file(out, text);
  }
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

struct RunConfig {
  int n = 3;
  int m = 2;
  int k = 1;
  std::string dist = "uniform";
  double phi = -1.0;  // negative: solved optimum
  std::int64_t trials = 1000000;
  std::uint64_t seed = 1;
  int bins = 64;
  int grid = 200;
  double root_tol = 1e-10;
  int points = 1001;
  int threads = 0;
  double z_band = 3.0;
  std::int64_t calibration_trials = 0;
  int max_rounds = 100;
  bool epic_witness = false;
  std::string out;
  std::string format = "table";
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--out", cfg.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
}

void add_instance(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--n", cfg.n, "Number of agents")->capture_default_str();
  cmd->add_option("--m", cfg.m, "Number of objects")->capture_default_str();
  cmd->add_option("--k", cfg.k, "Number of audits")->capture_default_str();
  cmd->add_option("--dist", cfg.dist, "Type distribution: uniform or power:<alpha>")
      ->capture_default_str();
}

void add_solver(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--grid", cfg.grid, "Grid intervals for the phi scan")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--root-tol", cfg.root_tol, "Root-finding tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

Instance make_instance(const RunConfig& cfg) {
  mwg_instance* raw = nullptr;
  ok(mwg_instance_create(cfg.n, cfg.m, cfg.k, cfg.dist.c_str(), &raw));
  return Instance(raw);
}

Solution solve(const mwg_instance* inst, const RunConfig& cfg) {
  mwg_solve_options opts;
  mwg_solve_options_init(&opts);
  opts.grid_intervals = cfg.grid;
  opts.root_tol = cfg.root_tol;
  mwg_solution* raw = nullptr;
  ok(mwg_solve(inst, &opts, &raw));
  return Solution(raw);
}

double resolve_phi(const mwg_instance* inst, const RunConfig& cfg) {
  if (cfg.phi >= 0.0) return cfg.phi;
  auto sol = solve(inst, cfg);
  mwg_solution_summary s;
  ok(mwg_solution_summary_get(sol.get(), &s));
  return s.phi_star;
}

std::string solution_table(const mwg_solution_summary& s) {
  std::ostringstream o;
  o << "phi*            " << fmt(s.phi_star) << '\n'
    << "payoff          " << fmt(s.payoff) << '\n'
    << "case            " << s.case_tag << '\n'
    << "gamma1          " << fmt(s.gamma1) << '\n'
    << "gamma2          " << fmt(s.gamma2) << '\n'
    << "gamma3          " << fmt(s.gamma3) << '\n'
    << "foc residual    " << fmt(s.foc_residual) << '\n'
    << "interior        " << (s.interior ? "yes" : "no") << '\n'
    << "first best      " << fmt(s.first_best) << '\n'
    << "random lottery  " << fmt(s.random_lottery) << '\n'
    << "k-top           " << fmt(s.k_top) << '\n';
  return o.str();
}

int cmd_solve(const RunConfig& cfg) {
  auto inst = make_instance(cfg);
  auto sol = solve(inst.get(), cfg);
  if (cfg.format == "json") {
    char* s = nullptr;
    ok(mwg_solution_json(sol.get(), &s));
    emit(cfg.out, take(s));
  } else if (cfg.format == "csv") {
    char* s = nullptr;
    ok(mwg_solution_csv(sol.get(), &s));
    emit(cfg.out, take(s));
  } else {
    mwg_solution_summary s;
    ok(mwg_solution_summary_get(sol.get(), &s));
    emit(cfg.out, solution_table(s));
  }
  return 0;
}

std::string witness_table(const mwg_epic_witness& w) {
  std::ostringstream o;
  o << "epic witness\n"
    << "  agent               " << w.agent << '\n'
    << "  true type           " << fmt(w.true_type) << '\n'
    << "  deviation           " << fmt(w.deviation) << '\n'
    << "  truthful allocation " << fmt(w.truthful_allocation) << '\n'
    << "  escape probability  " << fmt(w.escape_probability) << '\n'
    << "  uniform escape      " << fmt(w.uniform_escape_probability) << '\n'
    << "  bound (m-k)/m       " << fmt(w.lower_bound) << '\n'
    << "  gain                " << fmt(w.gain) << '\n';
  return o.str();
}

int cmd_simulate(const RunConfig& cfg) {
  if (cfg.trials < 0) throw Failure(MWG_ERR_INVALID_ARGUMENT, "--trials must be >= 0");
  auto inst = make_instance(cfg);
  const double phi = resolve_phi(inst.get(), cfg);

  mwg_sim_options opts;
  mwg_sim_options_init(&opts);
  opts.bins = cfg.bins;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  opts.z_band = cfg.z_band;
  opts.calibration_trials = cfg.calibration_trials;
  opts.max_rounds = cfg.max_rounds;
  mwg_simulation* raw = nullptr;
  ok(mwg_simulate(inst.get(), phi, cfg.trials, &opts, &raw));
  Simulation sim(raw);
  mwg_sim_summary s;
  ok(mwg_simulation_summary_get(sim.get(), &s));

  mwg_epic_witness w{};
  std::string witness_json;
  if (cfg.epic_witness) {
    char* j = nullptr;
    ok(mwg_epic_witness_get(inst.get(), phi, sim.get(), &w, &j));
    witness_json = take(j);
  }

  if (cfg.format == "json") {
    char* j = nullptr;
    ok(mwg_simulation_json(sim.get(), &j));
    json doc = json::parse(take(j));
    if (cfg.epic_witness) doc["epic_witness"] = json::parse(witness_json);
    emit(cfg.out, doc.dump(2));
  } else if (cfg.format == "csv") {
    char* j = nullptr;
    ok(mwg_simulation_bins_csv(sim.get(), &j));
    emit(cfg.out, take(j));
    if (cfg.epic_witness) std::cerr << witness_table(w);
  } else {
    std::ostringstream o;
    o << "phi             " << fmt(s.phi) << '\n'
      << "trials          " << s.trials << '\n'
      << "seed            " << s.seed << '\n';
    if (s.trials > 0) {
      o << "violations      " << s.capacity_violations << '\n'
        << "payoff          " << fmt(s.payoff_hat) << " +- " << fmt(s.payoff_se)
        << " (target " << fmt(s.payoff_target) << ")\n"
        << "bins within P   " << s.bins_within_P << '/' << s.bins << '\n'
        << "bins within A   " << s.bins_within_A << '/' << s.bins << '\n'
        << "max |P - P*|    " << fmt(s.max_dev_P) << '\n'
        << "max |A - A*|    " << fmt(s.max_dev_A) << '\n'
        << "calibration     " << s.calibration_rounds << " rounds\n"
        << "within bands    " << (s.within_bands ? "yes" : "no") << '\n';
    } else {
      o << "payoff target   " << fmt(s.payoff_target) << '\n';
    }
    if (cfg.epic_witness) o << witness_table(w);
    emit(cfg.out, o.str());
  }

  if (s.trials > 0) {
    if (s.capacity_violations > 0) {
      std::cerr << "mwg: " << s.capacity_violations << " capacity violations\n";
      return 2;
    }
    if (!s.within_bands) {
      std::cerr << "mwg: interim estimates outside the " << fmt(cfg.z_band)
                << "-SE bands (P " << s.bins_within_P << '/' << s.bins << ", A "
                << s.bins_within_A << '/' << s.bins << ")\n";
      return 2;
    }
  }
  return 0;
}

struct CheckConfig {
  std::string instance;
  std::string rule;
  bool upper_sets_only = false;
  bool interim_allocation = false;
};

std::string set_text(const json& set) {
  std::string out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    out += "  agent " + std::to_string(i) + ": {";
    for (std::size_t j = 0; j < set[i].size(); ++j) {
      if (j > 0) out += ", ";
      out += fmt(set[i][j].get<double>());
    }
    out += "}\n";
  }
  return out;
}

int cmd_check(const CheckConfig& check, const RunConfig& cfg) {
  mwg_discrete* raw = nullptr;
  ok(mwg_discrete_from_json(read_file(check.instance).c_str(), &raw));
  Discrete inst(raw);
  const std::string rule = read_file(check.rule);
  mwg_check_mode mode = MWG_CHECK_FLOW;
  if (check.upper_sets_only) mode = MWG_CHECK_UPPER_SETS;
  if (check.interim_allocation) mode = MWG_CHECK_INTERIM_ALLOCATION;

  mwg_verdict* vraw = nullptr;
  ok(mwg_check(inst.get(), rule.c_str(), mode, &vraw));
  Verdict verdict(vraw);
  const bool feasible = mwg_verdict_feasible(verdict.get()) != 0;
  char* j = nullptr;
  ok(mwg_verdict_json(verdict.get(), &j));
  const std::string text = take(j);

  if (cfg.format == "json") {
    emit(cfg.out, text);
  } else {
    const json doc = json::parse(text);
    std::ostringstream o;
    if (cfg.format == "csv") {
      o << "feasible,method,lhs,rhs\n" << (feasible ? "true" : "false") << ','
        << doc["method"].get<std::string>() << ',';
      if (doc.contains("violation")) {
        o << fmt(doc["violation"]["lhs"].get<double>()) << ','
          << fmt(doc["violation"]["rhs"].get<double>());
      } else {
        o << ',';
      }
      o << '\n';
    } else {
      o << "feasible        " << (feasible ? "yes" : "no") << '\n'
        << "method          " << doc["method"].get<std::string>() << '\n';
      if (doc.contains("max_flow")) {
        o << "total demand    " << fmt(doc["total_demand"].get<double>()) << '\n'
          << "max flow        " << fmt(doc["max_flow"].get<double>()) << '\n';
      }
      if (doc.contains("violation")) {
        const auto& v = doc["violation"];
        o << "violated set\n" << set_text(v["set"])
          << "lhs             " << fmt(v["lhs"].get<double>()) << '\n'
          << "rhs             " << fmt(v["rhs"].get<double>()) << '\n';
      }
      if (doc.contains("expost")) {
        o << "ex-post rule    " << doc["expost"].size()
          << " profiles with positive allocation\n";
      }
    }
    emit(cfg.out, o.str());
  }
  return feasible ? 0 : 2;
}

// "3", "1:4" (inclusive) or "1,2,5".
std::vector<int> parse_int_list(const std::string& text, const char* name) {
  std::vector<int> out;
  try {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        out.push_back(std::stoi(item));
        continue;
      }
      const int lo = std::stoi(item.substr(0, colon));
      const int hi = std::stoi(item.substr(colon + 1));
      if (hi < lo) throw std::invalid_argument("empty range");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
  } catch (const std::exception&) {
    throw Failure(MWG_ERR_INVALID_ARGUMENT,
                  std::string("--") + name + ": expected a list like 3, 1:4 or 1,2,5");
  }
  if (out.empty()) throw Failure(MWG_ERR_INVALID_ARGUMENT, std::string("--") + name + " is empty");
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

struct SweepConfig {
  std::string n = "3";
  std::string m = "2";
  std::string k = "1";
  std::string dist = "uniform";
};

int cmd_sweep(const SweepConfig& sweep, const RunConfig& cfg) {
  const auto ns = parse_int_list(sweep.n, "n");
  const auto ms = parse_int_list(sweep.m, "m");
  const auto ks = parse_int_list(sweep.k, "k");
  const auto dists = split(sweep.dist, ',');

  struct Row {
    int n = 0;
    int m = 0;
    int k = 0;
    std::string dist;
    bool ok = false;
    std::string error;
    mwg_solution_summary s{};
    std::string case_tag;
    std::string csv;
    json doc;
  };
  std::vector<Row> rows;
  std::string csv_header;
  for (const auto& dist : dists) {
    for (int n : ns) {
      for (int m : ms) {
        for (int k : ks) {
          Row row;
          row.n = n;
          row.m = m;
          row.k = k;
          row.dist = dist;
          try {
            RunConfig one = cfg;
            one.n = n;
            one.m = m;
            one.k = k;
            one.dist = dist;
            auto inst = make_instance(one);
            auto sol = solve(inst.get(), one);
            ok(mwg_solution_summary_get(sol.get(), &row.s));
            row.case_tag = row.s.case_tag;
            char* text = nullptr;
            if (cfg.format == "json") {
              ok(mwg_solution_json(sol.get(), &text));
              row.doc = json::parse(take(text));
            } else {
              ok(mwg_solution_csv(sol.get(), &text));
              const std::string csv = take(text);
              const auto nl = csv.find('\n');
              csv_header = csv.substr(0, nl);
              row.csv = csv.substr(nl + 1);
              while (!row.csv.empty() && row.csv.back() == '\n') row.csv.pop_back();
            }
            row.ok = true;
          } catch (const Failure& e) {
            row.error = e.what();
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }

  std::ostringstream o;
  if (cfg.format == "json") {
    json out = json::array();
    for (const auto& r : rows) {
      if (r.ok) {
        json entry = r.doc;
        entry["status"] = "ok";
        out.push_back(entry);
      } else {
        out.push_back({{"instance", {{"n", r.n}, {"m", r.m}, {"k", r.k}, {"dist", r.dist}}},
                       {"status", "error"},
                       {"error", r.error}});
      }
    }
    o << out.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    if (csv_header.empty()) {
      csv_header = "n,m,k,dist,phi_star,payoff,case,gamma1,gamma2,gamma3,"
                   "foc_residual,first_best,random_lottery,k_top";
    }
    const auto columns = split(csv_header, ',').size();
    o << csv_header << ",status,error\n";
    for (const auto& r : rows) {
      if (r.ok) {
        o << r.csv << ",ok,\n";
      } else {
        o << r.n << ',' << r.m << ',' << r.k << ',' << csv_quote(r.dist);
        for (std::size_t c = 4; c < columns; ++c) o << ',';
        o << ",error," << csv_quote(r.error) << '\n';
      }
    }
  } else {
    char line[256];
    std::snprintf(line, sizeof line, "%4s %4s %4s  %-10s %-12s %-12s %-16s %s\n", "n",
                  "m", "k", "dist", "phi*", "payoff", "case", "status");
    o << line;
    for (const auto& r : rows) {
      if (r.ok) {
        std::snprintf(line, sizeof line, "%4d %4d %4d  %-10s %-12.8f %-12.8f %-16s ok\n",
                      r.n, r.m, r.k, r.dist.c_str(), r.s.phi_star, r.s.payoff,
                      r.case_tag.c_str());
        o << line;
      } else {
        std::snprintf(line, sizeof line, "%4d %4d %4d  %-10s %-12s %-12s %-16s ", r.n,
                      r.m, r.k, r.dist.c_str(), "-", "-", "-");
        o << line << "error: " << r.error << '\n';
      }
    }
  }
  emit(cfg.out, o.str());
  return 0;
}

int cmd_plot_data(const RunConfig& cfg) {
  auto inst = make_instance(cfg);
  const double phi = resolve_phi(inst.get(), cfg);
  char* env = nullptr;
  ok(mwg_envelope_csv(inst.get(), phi, cfg.points, &env));
  const std::string envelope = take(env);
  char* rule = nullptr;
  ok(mwg_interim_csv(inst.get(), phi, cfg.points, &rule));
  const std::string interim = take(rule);
  if (cfg.out.empty()) {
    std::cout << envelope << '\n' << interim;
    return 0;
  }
  std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Failure(MWG_ERR_INVALID_ARGUMENT, "cannot create " + cfg.out);
  write_file(dir / "envelope.csv", envelope);
  write_file(dir / "interim.csv", interim);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal allocation with limited audits"};
  app.set_config("--config", "", "TOML file with option values, one table per subcommand");
  app.set_version_flag("--version", std::string(mwg_version()));
  app.require_subcommand(1);

  RunConfig cfg;
  CheckConfig check;
  SweepConfig sweep;

  auto* solve_cmd = app.add_subcommand("solve", "Optimal guarantee, cutoffs and payoff");
  add_instance(solve_cmd, cfg);
  add_solver(solve_cmd, cfg);
  add_common(solve_cmd, cfg);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo run of the ex-post mechanism");
  add_instance(sim_cmd, cfg);
  add_solver(sim_cmd, cfg);
  add_common(sim_cmd, cfg);
  sim_cmd->add_option("--phi", cfg.phi, "Guarantee (default: the optimum)");
  sim_cmd->add_option("--trials", cfg.trials, "Simulated profiles")->capture_default_str();
  sim_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--bins", cfg.bins, "Equal-probability type bins")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--threads", cfg.threads, "Worker cap (0: all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sim_cmd->add_option("--z-band", cfg.z_band, "Band width in standard errors")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--calibration-trials", cfg.calibration_trials,
                      "Calibration profiles (0: max(1e5, 4 * trials))")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sim_cmd->add_option("--max-rounds", cfg.max_rounds, "Calibration round limit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_flag("--epic-witness", cfg.epic_witness,
                    "Also print an ex-post incentive violation");

  auto* check_cmd = app.add_subcommand("check", "Feasibility of a discrete interim rule");
  add_common(check_cmd, cfg);
  check_cmd->add_option("--instance", check.instance, "Discrete instance JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  check_cmd->add_option("--rule", check.rule, "Interim rule JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* upper = check_cmd->add_flag("--upper-sets-only", check.upper_sets_only,
                                    "Only test products of upper sets");
  check_cmd->add_flag("--interim-allocation", check.interim_allocation,
                      "Symmetric allocation-only instances: use the closed-form test")
      ->excludes(upper);

  auto* sweep_cmd = app.add_subcommand("sweep", "Solve over a grid of instances");
  add_solver(sweep_cmd, cfg);
  add_common(sweep_cmd, cfg);
  sweep_cmd->add_option("--n", sweep.n, "Agents: 3, 4:8 or 3,5")->capture_default_str();
  sweep_cmd->add_option("--m", sweep.m, "Objects")->capture_default_str();
  sweep_cmd->add_option("--k", sweep.k, "Audits")->capture_default_str();
  sweep_cmd->add_option("--dist", sweep.dist, "Comma-separated distributions")
      ->capture_default_str();

  auto* plot_cmd = app.add_subcommand("plot-data", "Envelope and interim rule CSVs");
  add_instance(plot_cmd, cfg);
  add_solver(plot_cmd, cfg);
  plot_cmd->add_option("--phi", cfg.phi, "Guarantee (default: the optimum)");
  plot_cmd->add_option("--points", cfg.points, "Grid points")
      ->check(CLI::Range(2, 10000000))
      ->capture_default_str();
  plot_cmd->add_option("--out", cfg.out, "Directory for envelope.csv and interim.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) return cmd_solve(cfg);
    if (*sim_cmd) return cmd_simulate(cfg);
    if (*check_cmd) return cmd_check(check, cfg);
    if (*sweep_cmd) return cmd_sweep(sweep, cfg);
    if (*plot_cmd) return cmd_plot_data(cfg);
  } catch (const Failure& e) {
    std::cerr << "mwg: " << e.what() << '\n';
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "mwg: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
