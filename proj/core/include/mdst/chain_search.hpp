#pragma once

#include <iosfwd>
#include <vector>

#include "mdst/chains.hpp"

namespace mdst {

// Layer structure for the chain search at a fixed target length. Layer 0 is
// the set of special molecules (their dummy roots); layers[t] for t in
// [1, ell-1] holds the candidate t-th block roots. Scan labels persist from
// layer construction into the search phase.
struct LayerSet {
    int ell = 1;
    std::vector<MoleculeId> special_roots;
    std::vector<std::vector<Node>> layers;
    std::vector<std::int32_t> layer_of;   // t if the node is in layers[t], else -1
    std::vector<char> node_scanned;
    std::vector<char> subtree_scanned;    // the node's hanging subtree is fully scanned
    // Nearest strict ancestor (snapshot order) that lies in any layer,
    // stopping past the node's molecule root; kNoNode when there is none.
    std::vector<Node> nearest_layered;
};

struct RaiseStats {
    int chains_applied = 0;
};

// Re-roots the forest snapshot so every molecule hangs downward: special
// components at their attach node, other components at their smallest free
// node. Must be called after the decomposition is (re)built and before
// build_layers.
void refresh_snapshot(Configuration& config);

// Layer construction: starting from the special molecules, repeatedly scans
// the hanging subtree of every current-layer member and admits non-forest
// neighbors that escape the scanned branch, then prunes admitted nodes that
// were scanned or cannot root a block. Requires a fresh snapshot.
LayerSet build_layers(Configuration& config, int ell, WorkCounters* wc = nullptr,
                      std::ostream* trace = nullptr);

// Search phase: scans the last layer for candidate final edges, walks the
// layers backward through effective ancestors and edges, applies every chain
// found, and continues scanning against the updated configuration. Returns
// the number of chains applied.
int find_chains_and_apply(Configuration& config, int ell, LayerSet& layers,
                          WorkCounters* wc = nullptr, std::ostream* trace = nullptr,
                          std::vector<ApplyRecord>* records = nullptr);

// One full pass at the given length: refresh the snapshot, build layers,
// find and apply chains. Afterwards no augmenting chain of length at most
// ell exists, and every applied chain had length exactly ell.
RaiseStats raise_configuration(Configuration& config, int ell, WorkCounters* wc = nullptr,
                               std::ostream* trace = nullptr,
                               std::vector<ApplyRecord>* records = nullptr);

}  // namespace mdst
