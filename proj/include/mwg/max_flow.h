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

#ifndef MWG_MAX_FLOW_H_
#define MWG_MAX_FLOW_H_

#include <cstdint>
#include <vector>

namespace mwg {

// Dinic's algorithm on integer capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes);

  int add_node();
  // Returns the edge id; the reverse residual edge is id ^ 1.
  int add_edge(int from, int to, std::int64_t capacity);

  std::int64_t run(int source, int sink);

  std::int64_t flow(int edge) const { return cap_[edge ^ 1]; }
  int nodes() const { return static_cast<int>(adj_.size()); }
  int edges() const { return static_cast<int>(to_.size()); }
  // Nodes reachable from the source in the residual graph after run().
  std::vector<bool> source_side(int source) const;

 private:
  bool bfs(int source, int sink);
  std::int64_t dfs(int v, int sink, std::int64_t limit);

  std::vector<std::vector<int>> adj_;
  std::vector<int> to_;
  std::vector<std::int64_t> cap_;
  std::vector<int> level_;
  std::vector<size_t> cursor_;
};

}  // namespace mwg

#endif  // MWG_MAX_FLOW_H_
