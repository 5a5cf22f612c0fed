#include "causalfair/graph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <queue>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "causalfair/error.hpp"

namespace causalfair {

bool is_valid_node_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '_';
  });
}

CausalDag::CausalDag(std::vector<std::string> nodes,
                     const std::vector<Edge>& edges)
    : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  if (auto dup = std::adjacent_find(nodes_.begin(), nodes_.end());
      dup != nodes_.end()) {
    throw InvalidArgumentError(fmt::format("duplicate node '{}'", *dup));
  }
  for (const auto& name : nodes_) {
    if (!is_valid_node_name(name)) {
      throw InvalidArgumentError(fmt::format("invalid node name '{}'", name));
    }
  }
  parents_.assign(nodes_.size(), {});
  children_.assign(nodes_.size(), {});
  for (const auto& edge : edges) {
    const std::size_t from = index_of(edge.from);
    const std::size_t to = index_of(edge.to);
    if (from == to) {
      throw InvalidArgumentError(fmt::format("self-loop on '{}'", edge.from));
    }
    if (has_edge(from, to)) {
      throw InvalidArgumentError(
          fmt::format("duplicate edge {} -> {}", edge.from, edge.to));
    }
    if (reaches(to, from)) {
      throw CycleError(fmt::format("edge {} -> {} closes a directed cycle",
                                   edge.from, edge.to));
    }
    children_[from].insert(
        std::lower_bound(children_[from].begin(), children_[from].end(), to),
        to);
    parents_[to].insert(
        std::lower_bound(parents_[to].begin(), parents_[to].end(), from),
        from);
  }
}

CausalDag CausalDag::with_node(std::string name) const {
  auto names = nodes_;
  names.push_back(std::move(name));
  return CausalDag(std::move(names), edges());
}

CausalDag CausalDag::with_edge(std::string_view from,
                               std::string_view to) const {
  auto all = edges();
  all.push_back({std::string(from), std::string(to)});
  return CausalDag(nodes_, all);
}

std::vector<Edge> CausalDag::edges() const {
  std::vector<Edge> out;
  for (std::size_t from = 0; from < nodes_.size(); ++from) {
    for (std::size_t to : children_[from]) {
      out.push_back({nodes_[from], nodes_[to]});
    }
  }
  return out;
}

std::size_t CausalDag::edge_count() const {
  std::size_t count = 0;
  for (const auto& c : children_) count += c.size();
  return count;
}

bool CausalDag::contains(std::string_view name) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), name);
}

std::size_t CausalDag::index_of(std::string_view name) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), name);
  if (it == nodes_.end() || *it != name) {
    throw UnknownNodeError(fmt::format("unknown node '{}'", name));
  }
  return static_cast<std::size_t>(it - nodes_.begin());
}

bool CausalDag::has_edge(std::size_t from, std::size_t to) const {
  const auto& c = children_[from];
  return std::binary_search(c.begin(), c.end(), to);
}

bool CausalDag::has_edge(std::string_view from, std::string_view to) const {
  return has_edge(index_of(from), index_of(to));
}

std::vector<std::size_t> CausalDag::topological_order() const {
  std::vector<std::size_t> in_degree(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    in_degree[i] = parents_[i].size();
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>>
      ready;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (in_degree[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(nodes_.size());
  while (!ready.empty()) {
    const std::size_t node = ready.top();
    ready.pop();
    order.push_back(node);
    for (std::size_t child : children_[node]) {
      if (--in_degree[child] == 0) ready.push(child);
    }
  }
  return order;
}

bool CausalDag::reaches(std::size_t from, std::size_t to) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    const std::size_t node = stack.back();
    stack.pop_back();
    if (node == to) return true;
    for (std::size_t child : children_[node]) {
      if (!seen[child]) {
        seen[child] = true;
        stack.push_back(child);
      }
    }
  }
  return false;
}

CausalDag add_edge(const CausalDag& dag, std::string_view from,
                   std::string_view to) {
  return dag.with_edge(from, to);
}

std::string_view to_string(TripletKind kind) {
  switch (kind) {
    case TripletKind::chain:
      return "chain";
    case TripletKind::fork:
      return "fork";
    case TripletKind::collider:
      return "collider";
  }
  return "unknown";
}

TripletKind classify_triplet(const CausalDag& dag, std::string_view a,
                             std::string_view b, std::string_view c) {
  const std::size_t ia = dag.index_of(a);
  const std::size_t ib = dag.index_of(b);
  const std::size_t ic = dag.index_of(c);
  if (!dag.adjacent(ia, ib) || !dag.adjacent(ib, ic)) {
    throw NotAdjacentError(
        fmt::format("{} - {} - {} is not a path triple", a, b, c));
  }
  const bool into_b_from_a = dag.has_edge(ia, ib);
  const bool into_b_from_c = dag.has_edge(ic, ib);
  if (into_b_from_a && into_b_from_c) return TripletKind::collider;
  if (!into_b_from_a && !into_b_from_c) return TripletKind::fork;
  return TripletKind::chain;
}

IndependenceStatement::IndependenceStatement(
    std::string a, std::string b, std::vector<std::string> conditioning)
    : x(std::move(a)), y(std::move(b)), given(std::move(conditioning)) {
  if (x == y) {
    throw InvalidArgumentError(fmt::format("statement relates '{}' to itself", x));
  }
  if (y < x) std::swap(x, y);
  std::sort(given.begin(), given.end());
  given.erase(std::unique(given.begin(), given.end()), given.end());
  if (std::binary_search(given.begin(), given.end(), x) ||
      std::binary_search(given.begin(), given.end(), y)) {
    throw InvalidArgumentError("statement endpoint appears in conditioning set");
  }
}

std::string to_string(const IndependenceStatement& statement) {
  return fmt::format("{} _||_ {} | {{{}}}", statement.x, statement.y,
                     fmt::join(statement.given, ", "));
}

namespace {

// Marks every node that is observed or has an observed descendant.
std::vector<bool> observed_or_ancestor(const CausalDag& dag,
                                       const std::vector<bool>& given_mask) {
  std::vector<bool> marked(dag.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < dag.size(); ++i) {
    if (given_mask[i]) {
      marked[i] = true;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t node = stack.back();
    stack.pop_back();
    for (std::size_t parent : dag.parents(node)) {
      if (!marked[parent]) {
        marked[parent] = true;
        stack.push_back(parent);
      }
    }
  }
  return marked;
}

}  // namespace

bool d_separated(const CausalDag& dag, std::size_t x, std::size_t y,
                 const std::vector<bool>& given_mask) {
  const auto collider_open = observed_or_ancestor(dag, given_mask);

  // State index: 2 * node + direction. `up` means the trail entered the node
  // from one of its children, `down` from one of its parents.
  constexpr std::size_t up = 0;
  constexpr std::size_t down = 1;
  std::vector<bool> visited(2 * dag.size(), false);
  std::deque<std::pair<std::size_t, std::size_t>> frontier;
  frontier.emplace_back(x, up);

  while (!frontier.empty()) {
    const auto [node, direction] = frontier.front();
    frontier.pop_front();
    if (visited[2 * node + direction]) continue;
    visited[2 * node + direction] = true;

    if (node == y) return false;
    const bool observed = given_mask[node];

    if (direction == up && !observed) {
      for (std::size_t parent : dag.parents(node)) frontier.emplace_back(parent, up);
      for (std::size_t child : dag.children(node)) frontier.emplace_back(child, down);
    } else if (direction == down) {
      if (!observed) {
        for (std::size_t child : dag.children(node)) {
          frontier.emplace_back(child, down);
        }
      }
      if (collider_open[node]) {
        for (std::size_t parent : dag.parents(node)) {
          frontier.emplace_back(parent, up);
        }
      }
    }
  }
  return true;
}

bool d_separated(const CausalDag& dag, std::string_view x, std::string_view y,
                 std::span<const std::string> given) {
  const std::size_t ix = dag.index_of(x);
  const std::size_t iy = dag.index_of(y);
  if (ix == iy) {
    throw InvalidArgumentError(fmt::format("d-separation of '{}' from itself", x));
  }
  std::vector<bool> mask(dag.size(), false);
  for (const auto& name : given) mask[dag.index_of(name)] = true;
  if (mask[ix] || mask[iy]) {
    throw InvalidArgumentError("query endpoint appears in conditioning set");
  }
  return d_separated(dag, ix, iy, mask);
}

std::vector<IndependenceStatement> implied_independencies(const CausalDag& dag) {
  const std::size_t n = dag.size();
  if (n > kMaxImpliedIndependenceNodes) {
    throw TooLargeError(fmt::format(
        "implied_independencies supports at most {} nodes, got {}",
        kMaxImpliedIndependenceNodes, n));
  }
  std::vector<IndependenceStatement> out;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      std::vector<std::size_t> others;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != x && i != y) others.push_back(i);
      }
      const std::size_t subsets = std::size_t{1} << others.size();
      for (std::size_t bits = 0; bits < subsets; ++bits) {
        std::vector<bool> mask(n, false);
        std::vector<std::string> given;
        for (std::size_t k = 0; k < others.size(); ++k) {
          if (bits & (std::size_t{1} << k)) {
            mask[others[k]] = true;
            given.push_back(dag.name_of(others[k]));
          }
        }
        if (d_separated(dag, x, y, mask)) {
          out.emplace_back(dag.name_of(x), dag.name_of(y), std::move(given));
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

constexpr std::array kCanonicalNames = {
    std::pair{CanonicalGraph::dp, std::string_view{"dp"}},
    std::pair{CanonicalGraph::eo_chain_ay, std::string_view{"eo_chain_ay"}},
    std::pair{CanonicalGraph::eo_chain_ya, std::string_view{"eo_chain_ya"}},
    std::pair{CanonicalGraph::eo_fork, std::string_view{"eo_fork"}},
    std::pair{CanonicalGraph::pp_chain_ay, std::string_view{"pp_chain_ay"}},
    std::pair{CanonicalGraph::pp_chain_ya, std::string_view{"pp_chain_ya"}},
    std::pair{CanonicalGraph::pp_fork, std::string_view{"pp_fork"}},
    std::pair{CanonicalGraph::correction, std::string_view{"correction"}},
};

constexpr std::array kMetricGraphs = {
    CanonicalGraph::dp,          CanonicalGraph::eo_chain_ay,
    CanonicalGraph::eo_chain_ya, CanonicalGraph::eo_fork,
    CanonicalGraph::pp_chain_ay, CanonicalGraph::pp_chain_ya,
    CanonicalGraph::pp_fork,
};

Edge edge(std::string_view from, std::string_view to) {
  return {std::string(from), std::string(to)};
}

}  // namespace

std::string_view to_string(CanonicalGraph kind) {
  for (const auto& [k, name] : kCanonicalNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

CanonicalGraph parse_canonical_graph(std::string_view name) {
  for (const auto& [k, n] : kCanonicalNames) {
    if (n == name) return k;
  }
  throw InvalidArgumentError(fmt::format("unknown canonical graph '{}'", name));
}

std::span<const CanonicalGraph> metric_canonical_graphs() {
  return kMetricGraphs;
}

CausalDag canonical_graph(CanonicalGraph kind) {
  const std::string_view a = kSensitiveNode;
  const std::string_view y = kTruthNode;
  const std::string_view yhat = kPredictionNode;
  const std::vector<std::string> triple{std::string(a), std::string(y),
                                        std::string(yhat)};
  switch (kind) {
    case CanonicalGraph::dp:
      return CausalDag(triple, {edge(a, y), edge(yhat, y)});
    case CanonicalGraph::eo_chain_ay:
      return CausalDag(triple, {edge(a, y), edge(y, yhat)});
    case CanonicalGraph::eo_chain_ya:
      return CausalDag(triple, {edge(yhat, y), edge(y, a)});
    case CanonicalGraph::eo_fork:
      return CausalDag(triple, {edge(y, a), edge(y, yhat)});
    case CanonicalGraph::pp_chain_ay:
      return CausalDag(triple, {edge(a, yhat), edge(yhat, y)});
    case CanonicalGraph::pp_chain_ya:
      return CausalDag(triple, {edge(y, yhat), edge(yhat, a)});
    case CanonicalGraph::pp_fork:
      return CausalDag(triple, {edge(yhat, a), edge(yhat, y)});
    case CanonicalGraph::correction: {
      const std::string_view c = kCorrectionNode;
      const std::string_view u = kCorrectionNoiseNode;
      return CausalDag({std::string(a), std::string(y), std::string(yhat),
                        std::string(c), std::string(u)},
                       {edge(a, c), edge(u, c), edge(a, y), edge(y, yhat),
                        edge(c, yhat), edge(a, yhat)});
    }
  }
  throw InvalidArgumentError("unknown canonical graph");
}

}  // namespace causalfair
