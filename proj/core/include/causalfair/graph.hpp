#pragma once

#include <cstddef>
#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace causalfair {

// Conventional role names used by the canonical diagrams and the CLI.
// Node names in exchange formats are restricted to [A-Za-z0-9_]+, so the
// prediction is spelled "Yhat".
inline constexpr std::string_view kSensitiveNode = "A";
inline constexpr std::string_view kTruthNode = "Y";
inline constexpr std::string_view kPredictionNode = "Yhat";
inline constexpr std::string_view kCorrectionNode = "C";
inline constexpr std::string_view kCorrectionNoiseNode = "U_C";

// True when `name` matches [A-Za-z0-9_]+.
bool is_valid_node_name(std::string_view name);

struct Edge {
  std::string from;
  std::string to;

  auto operator<=>(const Edge&) const = default;
};

// Immutable directed acyclic graph over named nodes. Nodes are kept in
// lexicographic order; node indices follow that order and are stable for a
// given node set.
class CausalDag {
 public:
  CausalDag() = default;

  // Throws InvalidArgumentError on duplicate nodes or self-loops,
  // UnknownNodeError on undeclared endpoints and CycleError on cycles.
  // Duplicate edges are rejected as well.
  explicit CausalDag(std::vector<std::string> nodes,
                     const std::vector<Edge>& edges = {});

  [[nodiscard]] CausalDag with_node(std::string name) const;
  [[nodiscard]] CausalDag with_edge(std::string_view from,
                                    std::string_view to) const;

  const std::vector<std::string>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  bool contains(std::string_view name) const;
  // Throws UnknownNodeError.
  std::size_t index_of(std::string_view name) const;
  const std::string& name_of(std::size_t index) const { return nodes_[index]; }

  bool has_edge(std::size_t from, std::size_t to) const;
  bool has_edge(std::string_view from, std::string_view to) const;
  bool adjacent(std::size_t a, std::size_t b) const {
    return has_edge(a, b) || has_edge(b, a);
  }

  const std::vector<std::size_t>& parents(std::size_t index) const {
    return parents_[index];
  }
  const std::vector<std::size_t>& children(std::size_t index) const {
    return children_[index];
  }

  // Kahn's algorithm with the smallest ready index first.
  std::vector<std::size_t> topological_order() const;
  // True when a directed path from `from` to `to` exists (length >= 0).
  bool reaches(std::size_t from, std::size_t to) const;

  bool operator==(const CausalDag& other) const {
    return nodes_ == other.nodes_ && children_ == other.children_;
  }

 private:
  std::vector<std::string> nodes_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
};

// Returns a copy of `dag` with the edge added. Throws CycleError when the edge
// would close a directed cycle and UnknownNodeError for undeclared nodes.
CausalDag add_edge(const CausalDag& dag, std::string_view from,
                   std::string_view to);

enum class TripletKind { chain, fork, collider };

std::string_view to_string(TripletKind kind);

// Shape of the path triple a - b - c. Throws NotAdjacentError when a-b or b-c
// carries no edge.
TripletKind classify_triplet(const CausalDag& dag, std::string_view a,
                             std::string_view b, std::string_view c);

// x _||_ y | given. Stored with x < y and `given` sorted, so a statement and
// its (x, y) swap compare equal.
struct IndependenceStatement {
  std::string x;
  std::string y;
  std::vector<std::string> given;

  IndependenceStatement(std::string a, std::string b,
                        std::vector<std::string> conditioning = {});

  auto operator<=>(const IndependenceStatement&) const = default;
};

std::string to_string(const IndependenceStatement& statement);

// Reachability over (node, direction) states. `given_mask[i]` marks node i as
// observed; x and y must not be observed.
bool d_separated(const CausalDag& dag, std::size_t x, std::size_t y,
                 const std::vector<bool>& given_mask);

// Throws UnknownNodeError for unknown names and InvalidArgumentError when
// x == y or either endpoint is in `given`.
bool d_separated(const CausalDag& dag, std::string_view x, std::string_view y,
                 std::span<const std::string> given = {});

inline constexpr std::size_t kMaxImpliedIndependenceNodes = 12;

// Every d-separation statement over unordered pairs and all conditioning
// subsets of the remaining nodes, sorted. Throws TooLargeError above
// kMaxImpliedIndependenceNodes.
std::vector<IndependenceStatement> implied_independencies(const CausalDag& dag);

enum class CanonicalGraph {
  dp,
  eo_chain_ay,
  eo_chain_ya,
  eo_fork,
  pp_chain_ay,
  pp_chain_ya,
  pp_fork,
  correction,
};

std::string_view to_string(CanonicalGraph kind);
// Throws InvalidArgumentError for unknown names.
CanonicalGraph parse_canonical_graph(std::string_view name);

// Data-generating diagrams over A, Y, Yhat. Each unblocked path of the
// original drawings is collapsed to one direct edge.
//   dp          A -> Y <- Yhat
//   eo_*        Y in the middle of A - Y - Yhat (chain either way, or fork)
//   pp_*        Yhat in the middle of A - Yhat - Y
//   correction  A -> C <- U_C, A -> Y -> Yhat, C -> Yhat, A -> Yhat
CausalDag canonical_graph(CanonicalGraph kind);

// The seven metric diagrams (everything except `correction`).
std::span<const CanonicalGraph> metric_canonical_graphs();

}  // namespace causalfair
