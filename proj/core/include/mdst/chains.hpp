#pragma once

#include <span>
#include <string>
#include <vector>

#include "mdst/decomposition.hpp"
#include "mdst/graph.hpp"

namespace mdst {

// A forest plus its decomposition, per-node degree bounds, and the dirty set
// of nodes excluded from serving as a chain's final endpoint.
struct Configuration {
    RootedForest forest;
    Decomposition decomposition;
    std::vector<int> bounds;
    std::vector<char> dirty;

    const Graph& graph() const { return forest.graph(); }
    bool is_dirty(Node v) const { return dirty[static_cast<std::size_t>(v)] != 0; }
};

// Verdict of a chain validator; on failure, reason names the violated
// property and position.
struct ChainCheck {
    bool ok = true;
    std::string reason;

    explicit operator bool() const { return ok; }
};

// An augmenting chain (w_0, z_1, w_1, ..., z_l, w_l, z_{l+1}) of length l+1,
// the length counting the edges to be inserted. w holds w_0..w_l; z holds
// z_1..z_{l+1}, so z[i] is z_{i+1}. connect optionally carries the graph edge
// id of (w_{i-1}, z_i) per z; kNoEdge entries are resolved by lookup.
struct AugmentingChain {
    std::vector<Node> w;
    std::vector<Node> z;
    std::vector<EdgeId> connect;

    int length() const { return static_cast<int>(z.size()); }
    std::vector<Node> sequence() const;
};

// Splits a flat sequence (w_0, z_1, w_1, ..., z_l, w_l, z_{l+1}) into an
// AugmentingChain shell without validating it. The sequence must have
// positive even size.
AugmentingChain make_chain(std::span<const Node> sequence);

// Record of one chain application: the applied sequence, every edge edit in
// execution order (degree-reduction edits, then deletions, then insertions),
// the nodes newly added to the dirty set, and the molecules removed.
struct ApplyRecord {
    std::vector<Node> sequence;
    std::vector<EdgeEdit> edits;
    std::vector<Node> dirtied;
    std::vector<MoleculeId> removed_molecules;
};

// Checks the four alternating-chain properties on a flat odd-size sequence
// (w_0, z_1, w_1, ..., z_l, w_l): w_0 in an atom of a special molecule; per
// hop, same component, hanging-subtree block, and w_i in an atom; each w_i
// outside every earlier block; chain edges present and non-forest.
ChainCheck is_alternating_chain(const Configuration& config, std::span<const Node> sequence);

// Checks a flat even-size sequence ending in z_{l+1}: the prefix must be an
// alternating chain, z_{l+1} must avoid every block, (w_l, z_{l+1}) must be a
// non-forest edge, and z_{l+1} must be reducible or a clean free node (degree
// within bound and not dirty).
ChainCheck is_augmenting_chain(const Configuration& config, std::span<const Node> sequence);

// The relaxed variant: duplicates allowed, no block-exclusion requirements;
// the final pair only needs to avoid sharing an atom.
ChainCheck is_pseudo_chain(const Configuration& config, std::span<const Node> sequence);

// Applies an augmenting chain: reduces the degree of every w_i (and of a
// covered z_{l+1}), deletes (z_i, y_i) per hop, inserts the chain edges,
// removes every molecule containing a chain node, and marks previously
// non-reducible y_i nodes dirty. The component count decreases by one.
ApplyRecord apply_chain(Configuration& config, const AugmentingChain& chain,
                        WorkCounters* wc = nullptr);

// Shortens a pseudo-chain until it is a genuine augmenting chain, splicing
// out duplicates and block violations; returns the input unchanged if it
// already validates. Throws std::invalid_argument if the input is not a
// pseudo-chain.
AugmentingChain normalize_pseudo_chain(const Configuration& config,
                                       std::span<const Node> sequence);

// One-line trace of an application, "CHAIN <l> <sequence> | deleted: <u-v
// list> | inserted: <u-v list>", consumed by golden tests.
std::string chain_trace_line(const ApplyRecord& record);

}  // namespace mdst
