#pragma once

// Path-enumeration d-separation oracle. Deliberately shares nothing with the
// reachability implementation beyond the graph accessors: it lists every
// simple undirected path and checks each interior triple directly.

#include <cstddef>
#include <vector>

#include "causalfair/graph.hpp"

namespace causalfair::testing {

inline bool has_observed_descendant(const CausalDag& dag, std::size_t node,
                                    const std::vector<bool>& given) {
  std::vector<bool> seen(dag.size(), false);
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const std::size_t n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = true;
    if (given[n]) return true;
    for (std::size_t c : dag.children(n)) stack.push_back(c);
  }
  return false;
}

inline bool path_active(const CausalDag& dag, const std::vector<std::size_t>& path,
                        const std::vector<bool>& given) {
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const std::size_t prev = path[i - 1];
    const std::size_t mid = path[i];
    const std::size_t next = path[i + 1];
    const bool collider = dag.has_edge(prev, mid) && dag.has_edge(next, mid);
    if (collider) {
      if (!has_observed_descendant(dag, mid, given)) return false;
    } else if (given[mid]) {
      return false;
    }
  }
  return true;
}

inline bool any_active_path(const CausalDag& dag, std::vector<std::size_t>& path,
                            std::vector<bool>& on_path, std::size_t target,
                            const std::vector<bool>& given) {
  const std::size_t last = path.back();
  if (last == target) return path_active(dag, path, given);
  for (std::size_t next = 0; next < dag.size(); ++next) {
    if (on_path[next] || !dag.adjacent(last, next)) continue;
    path.push_back(next);
    on_path[next] = true;
    const bool found = any_active_path(dag, path, on_path, target, given);
    on_path[next] = false;
    path.pop_back();
    if (found) return true;
  }
  return false;
}

inline bool oracle_d_separated(const CausalDag& dag, std::size_t x, std::size_t y,
                               const std::vector<bool>& given) {
  std::vector<std::size_t> path{x};
  std::vector<bool> on_path(dag.size(), false);
  on_path[x] = true;
  return !any_active_path(dag, path, on_path, y, given);
}

}  // namespace causalfair::testing
