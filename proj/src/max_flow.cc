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

#include "mwg/max_flow.h"

#include <algorithm>
#include <limits>
#include <queue>

#include "mwg/error.h"

namespace mwg {

MaxFlow::MaxFlow(int nodes) : adj_(nodes) {}

int MaxFlow::add_node() {
  adj_.emplace_back();
  return nodes() - 1;
}

int MaxFlow::add_edge(int from, int to, std::int64_t capacity) {
  if (from < 0 || from >= nodes() || to < 0 || to >= nodes()) {
    throw InvalidArgument("flow edge endpoint out of range");
  }
  if (capacity < 0) throw InvalidArgument("negative flow capacity");
  const int id = edges();
  to_.push_back(to);
  cap_.push_back(capacity);
  adj_[from].push_back(id);
  to_.push_back(from);
  cap_.push_back(0);
  adj_[to].push_back(id + 1);
  return id;
}

bool MaxFlow::bfs(int source, int sink) {
  level_.assign(nodes(), -1);
  std::queue<int> queue;
  level_[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    for (int e : adj_[v]) {
      if (cap_[e] > 0 && level_[to_[e]] < 0) {
        level_[to_[e]] = level_[v] + 1;
        queue.push(to_[e]);
      }
    }
  }
  return level_[sink] >= 0;
}

std::int64_t MaxFlow::dfs(int v, int sink, std::int64_t limit) {
  if (v == sink) return limit;
  for (size_t& i = cursor_[v]; i < adj_[v].size(); ++i) {
    const int e = adj_[v][i];
    const int w = to_[e];
    if (cap_[e] <= 0 || level_[w] != level_[v] + 1) continue;
    const std::int64_t pushed = dfs(w, sink, std::min(limit, cap_[e]));
    if (pushed > 0) {
      cap_[e] -= pushed;
      cap_[e ^ 1] += pushed;
      return pushed;
    }
  }
  return 0;
}

std::int64_t MaxFlow::run(int source, int sink) {
  if (source == sink) throw InvalidArgument("source equals sink");
  std::int64_t total = 0;
  while (bfs(source, sink)) {
    cursor_.assign(nodes(), 0);
    while (const std::int64_t pushed =
               dfs(source, sink, std::numeric_limits<std::int64_t>::max())) {
      total += pushed;
    }
  }
  return total;
}

std::vector<bool> MaxFlow::source_side(int source) const {
  std::vector<bool> seen(nodes(), false);
  std::vector<int> stack{source};
  seen[source] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int e : adj_[v]) {
      if (cap_[e] > 0 && !seen[to_[e]]) {
        seen[to_[e]] = true;
        stack.push_back(to_[e]);
      }
    }
  }
  return seen;
}

}  // namespace mwg
