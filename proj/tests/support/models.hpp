#pragma once

// Test-only generators: random and exhaustive DAGs, random CPD
// parameterizations, and a hand-expanded hiring joint.

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "causalfair/error.hpp"
#include "causalfair/graph.hpp"
#include "causalfair/scm.hpp"

namespace causalfair::testing {

inline std::vector<std::string> node_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
  return names;
}

// Random DAG: shuffle a topological order, then keep each forward pair with
// probability `density`.
inline CausalDag random_dag(std::size_t n, double density, std::mt19937_64& rng) {
  auto names = node_names(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution keep(density);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (keep(rng)) edges.push_back({names[order[i]], names[order[j]]});
    }
  }
  return CausalDag(names, edges);
}

// Calls `visit` for every labelled DAG on n nodes: each unordered pair is
// absent, i -> j or j -> i, and cyclic assignments are skipped.
inline std::size_t for_each_dag(std::size_t n,
                                const std::function<void(const CausalDag&)>& visit) {
  const auto names = node_names(n);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<int> choice(pairs.size(), 0);
  std::size_t visited = 0;
  while (true) {
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      if (choice[k] == 1) edges.push_back({names[i], names[j]});
      if (choice[k] == 2) edges.push_back({names[j], names[i]});
    }
    try {
      const CausalDag dag(names, edges);
      visit(dag);
      ++visited;
    } catch (const CycleError&) {
    }
    std::size_t k = 0;
    while (k < choice.size() && ++choice[k] == 3) choice[k++] = 0;
    if (k == choice.size()) break;
  }
  return visited;
}

// Binary SCM over `dag` with every CPD row entry drawn from (lo, hi).
inline ScmSpec random_binary_scm(const CausalDag& dag, std::mt19937_64& rng,
                                 double lo = 0.05, double hi = 0.95) {
  std::uniform_real_distribution<double> draw(lo, hi);
  std::vector<ScmVariable> vars;
  for (std::size_t idx : dag.topological_order()) {
    ScmVariable v{dag.name_of(idx), 2, {}, {}};
    for (std::size_t p : dag.parents(idx)) v.parents.push_back(dag.name_of(p));
    const std::size_t rows = std::size_t{1} << v.parents.size();
    for (std::size_t r = 0; r < rows; ++r) {
      double p1 = draw(rng);
      while (!(p1 > lo && p1 < hi)) p1 = draw(rng);
      v.cpd.push_back({1.0 - p1, p1});
    }
    vars.push_back(std::move(v));
  }
  return ScmSpec(std::move(vars));
}

// Hiring joint written out by hand, indexed [a * 4 + y * 2 + yhat].
inline std::array<double, 8> hiring_joint_by_hand() {
  std::array<double, 8> p{};
  const double p_a = 0.5;
  const double p_y1[2] = {0.6, 0.3};
  const double p_yhat1[2] = {0.1, 0.8};
  for (int a = 0; a < 2; ++a) {
    for (int y = 0; y < 2; ++y) {
      for (int yh = 0; yh < 2; ++yh) {
        const double py = y ? p_y1[a] : 1.0 - p_y1[a];
        const double pyh = yh ? p_yhat1[y] : 1.0 - p_yhat1[y];
        p[a * 4 + y * 2 + yh] = p_a * py * pyh;
      }
    }
  }
  return p;
}

}  // namespace causalfair::testing
