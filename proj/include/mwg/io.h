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

// Text formats for reports and instances. JSON keeps full double precision;
// CSV and tables print 12 significant digits with a '.' separator.

#ifndef MWG_IO_H_
#define MWG_IO_H_

#include <string>

#include "mwg/feasibility.h"
#include "mwg/optimizer.h"
#include "mwg/simulation.h"

namespace mwg {

// 12 significant digits, independent of the global locale; "nan", "inf".
std::string format_number(double x);

std::string partition_json(const RegionPartition& part);
std::string solve_report_json(const SolveReport& report,
                              const ProblemInstance& inst);
// Header row plus one row.
std::string solve_report_csv(const SolveReport& report,
                             const ProblemInstance& inst);

std::string sim_report_json(const SimReport& report, const ProblemInstance& inst);
// Per bin: t_mid, targets, estimates and standard errors.
std::string sim_bins_csv(const SimReport& report);
std::string epic_witness_json(const EpicWitness& witness,
                              const ProblemInstance& inst, double phi);

// Instance file layout:
// {"agents": [{"types": [...], "masses": [...]}, ...],
//  "capacity": {"default": h, "entries": [{"profile": [...], "value": h}]},
//  "eligible": {"entries": [{"profile": [...], "agents": [...]}]}}
// Missing "eligible" means every agent is eligible everywhere.
DiscreteInstance parse_discrete_instance(const std::string& text);
std::string discrete_instance_json(const DiscreteInstance& inst);

// {"P": [[...], ...]} with one row per agent, or the bare array.
InterimTable parse_interim_table(const std::string& text);
std::string interim_table_json(const InterimTable& table);

// The ex-post rule is listed for profiles with a positive allocation.
std::string verdict_json(const FeasibilityVerdict& verdict,
                         const DiscreteInstance& inst);

// Columns q, c_allo, c_aud, c_ic, envelope, label on points equally spaced
// quantiles from 0 to 1.
std::string envelope_csv(const ProblemInstance& inst, double phi, int points);
// Columns t, P, A on points equally spaced types from 0 to 1.
std::string interim_csv(const InterimRules& rules, int points);

}  // namespace mwg

#endif  // MWG_IO_H_
