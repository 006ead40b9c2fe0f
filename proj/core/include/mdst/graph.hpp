#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mdst/counters.hpp"

namespace mdst {

using Node = std::int32_t;
using EdgeId = std::int32_t;

inline constexpr Node kNoNode = -1;
inline constexpr EdgeId kNoEdge = -1;

struct Edge {
    Node u = kNoNode;
    Node v = kNoNode;
};

struct AdjEntry {
    Node to = kNoNode;
    EdgeId edge = kNoEdge;
};

// Raised on malformed edge-list input (bad tokens, out-of-range ids, wrong
// edge count, self loops).
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Raised on structurally invalid input: disconnected graphs, n < 1, or
// inconsistent solver inputs (bad bounds, malformed bounds files).
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct LoadReport {
    int duplicate_edges_dropped = 0;
};

// Immutable simple undirected graph. Nodes are 0-indexed; edge ids are
// assigned in load order after duplicate removal. Adjacency lists iterate
// neighbors in ascending edge-id order.
class Graph {
  public:
    // Builds a graph from an explicit edge list. Parallel edges are
    // deduplicated (count reported through `report` if non-null). Self loops
    // and out-of-range endpoints raise ParseError; a disconnected graph or
    // n < 1 raises InputError.
    static Graph from_edges(Node n, const std::vector<Edge>& raw, LoadReport* report = nullptr);

    // Parses the textual edge-list format: a header line "n m" followed by m
    // lines "u v". Lines starting with '#' and blank lines are ignored.
    static Graph parse(std::string_view text, LoadReport* report = nullptr);

    // Writes the graph in the same edge-list format, byte-exactly:
    // "n m\n" then one "u v\n" line per edge in edge-id order.
    std::string write_edge_list() const;

    Node node_count() const { return n_; }
    EdgeId edge_count() const { return static_cast<EdgeId>(edges_.size()); }
    Edge edge(EdgeId id) const { return edges_[static_cast<std::size_t>(id)]; }

    // Neighbors of u in ascending edge-id order.
    std::span<const AdjEntry> neighbors(Node u) const {
        return {adj_[static_cast<std::size_t>(u)].data(), adj_[static_cast<std::size_t>(u)].size()};
    }
    int degree(Node u) const { return static_cast<int>(adj_[static_cast<std::size_t>(u)].size()); }

    // Id of the edge {u, v}, or kNoEdge if absent. Linear in min degree.
    EdgeId find_edge(Node u, Node v) const;

  private:
    Graph() = default;

    Node n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<AdjEntry>> adj_;
};

// Union-find over 0..n-1 with path compression and union by size.
class Dsu {
  public:
    explicit Dsu(int n) { reset(n); }
    void reset(int n);
    int find(int a);
    // Merges the sets of a and b; returns false if they were already one set.
    bool unite(int a, int b);
    bool same(int a, int b) { return find(a) == find(b); }
    int set_count() const { return sets_; }

  private:
    std::vector<int> parent_;
    std::vector<int> size_;
    int sets_ = 0;
};

// The edit set applied to a forest: a cut or a link of one edge.
struct EdgeEdit {
    bool insert = false;
    Node u = kNoNode;
    Node v = kNoNode;
    EdgeId edge = kNoEdge;
};

// A spanning forest of a graph, holding two layers of state:
//
//  * Live state: the current edge set, degrees, and component structure,
//    updated by link/cut. Component labels are recomputed lazily.
//  * A rooted snapshot: parent/depth/jump tables frozen by rebuild(). The
//    snapshot does not track later link/cut calls; callers that rely on it
//    while mutating the forest do so deliberately (the layered search reads
//    the invocation-start snapshot by design) and can check staleness via
//    snapshot_fresh().
class RootedForest {
  public:
    explicit RootedForest(const Graph& g);

    const Graph& graph() const { return *graph_; }
    Node node_count() const { return n_; }

    // --- live forest state ---

    // Adds edge `id` (must join two distinct components). Marks the snapshot
    // stale.
    void link(Node u, Node v, EdgeId id);
    // Removes the forest edge {u, v}. Marks the snapshot stale.
    void cut(Node u, Node v);
    void apply(const EdgeEdit& edit);

    bool has_forest_edge(EdgeId id) const { return in_forest_[static_cast<std::size_t>(id)] != 0; }
    // Forest edge id between u and v, or kNoEdge. Linear in min forest degree.
    EdgeId forest_edge_between(Node u, Node v) const;
    int degree(Node v) const { return degree_[static_cast<std::size_t>(v)]; }
    int max_degree() const;
    int edge_count_in_forest() const { return forest_edge_count_; }
    // Number of components (n minus forest edges).
    int component_count() const { return n_ - forest_edge_count_; }
    // Component label of v; labels are the smallest node id in the component.
    int component_of(Node v) const;
    std::span<const AdjEntry> forest_neighbors(Node v) const {
        return {adj_[static_cast<std::size_t>(v)].data(), adj_[static_cast<std::size_t>(v)].size()};
    }
    // All forest edge ids, ascending.
    std::vector<EdgeId> forest_edges() const;
    // Nodes of v's component, ascending.
    std::vector<Node> component_nodes(Node v) const;
    // Unique forest path from a to b (inclusive); empty if disconnected.
    std::vector<Node> path_between(Node a, Node b) const;

    // Node set of the subtree of u hanging away from `blocked` (the component
    // of u in the forest with node `blocked` removed). u must differ from
    // blocked. Nodes are returned ascending, with a membership bitmap.
    struct Subtree {
        std::vector<Node> nodes;
        std::vector<char> member;
        bool contains(Node v) const { return member[static_cast<std::size_t>(v)] != 0; }
    };
    Subtree subtree_of(Node u, Node blocked) const;

    // --- rooted snapshot ---

    // Freezes a rooted orientation of the current forest. Components whose
    // preferred root is listed are rooted there; every other component is
    // rooted at its smallest node id. Children lists are sorted by node id.
    void rebuild(std::span<const Node> preferred_roots = {});
    bool snapshot_built() const { return snapshot_built_; }
    // True while no link/cut has happened since the last rebuild().
    bool snapshot_fresh() const { return snapshot_built_ && version_ == snapshot_version_; }

    Node parent(Node v) const { return parent_[static_cast<std::size_t>(v)]; }
    EdgeId parent_edge(Node v) const { return parent_edge_[static_cast<std::size_t>(v)]; }
    int depth(Node v) const { return depth_[static_cast<std::size_t>(v)]; }
    Node root_of(Node v) const { return root_[static_cast<std::size_t>(v)]; }
    std::span<const Node> children(Node v) const {
        return {children_[static_cast<std::size_t>(v)].data(),
                children_[static_cast<std::size_t>(v)].size()};
    }
    // Snapshot ancestor of v at the given depth, or kNoNode if the component
    // root is deeper than that. Logarithmic via the jump table.
    Node ancestor_at_depth(Node v, int target_depth) const;
    bool is_snapshot_ancestor(Node x, Node v) const;
    // Membership of q in the subtree of u hanging from snapshot ancestor x
    // (pass kNoNode for x to mean u's whole component). Snapshot-based.
    bool in_subtree(Node q, Node u, Node x) const;

    // Counters charged for ancestor hops; may be null.
    void attach_counters(WorkCounters* wc) { counters_ = wc; }

  private:
    void refresh_components() const;

    const Graph* graph_ = nullptr;
    Node n_ = 0;
    std::vector<std::vector<AdjEntry>> adj_;
    std::vector<char> in_forest_;
    std::vector<int> degree_;
    int forest_edge_count_ = 0;
    std::uint64_t version_ = 0;

    mutable std::vector<int> component_;
    mutable bool components_fresh_ = false;

    bool snapshot_built_ = false;
    std::uint64_t snapshot_version_ = ~std::uint64_t{0};
    std::vector<Node> parent_;
    std::vector<EdgeId> parent_edge_;
    std::vector<int> depth_;
    std::vector<Node> root_;
    std::vector<std::vector<Node>> children_;
    std::vector<std::vector<Node>> up_;

    WorkCounters* counters_ = nullptr;
};

}  // namespace mdst
