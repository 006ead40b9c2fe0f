#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdst/graph.hpp"

namespace mdst {

using MoleculeId = std::int32_t;
using AtomId = std::int32_t;
inline constexpr MoleculeId kNoMolecule = -1;
inline constexpr AtomId kNoAtom = -1;

enum class NodeStatus : std::uint8_t {
    // Not contained in any molecule.
    free_node,
    // Covered by a molecule but in no atom.
    non_reducible,
    // Member of an atom (implies covered).
    reducible,
};

enum class MoleculeKind : std::uint8_t { normal, special };

// A molecule: either a subtree hanging from a single forest edge
// (attach, root) with the root outside ("normal"), or an entire forest
// component rooted at a dummy attached to its lowest-id node ("special").
struct Molecule {
    MoleculeKind kind = MoleculeKind::special;
    // Outside root for normal molecules; kNoNode (the dummy) for special.
    Node root = kNoNode;
    // Inside endpoint of the connecting edge for normal molecules; the
    // dummy's attachment (lowest node id of the component) for special.
    Node attach = kNoNode;
    // Member nodes, ascending.
    std::vector<Node> nodes;
    bool alive = true;
};

// One step of the atom merge procedure: a graph edge (x, y) joined two atoms
// of the same molecule, absorbing every bad node on the forest path between
// x and y. Forest-edge causes have an empty absorbed list.
struct MergeEvent {
    MoleculeId molecule = kNoMolecule;
    bool via_forest_edge = false;
    Node x = kNoNode;
    Node y = kNoNode;
    EdgeId edge = kNoEdge;

    struct Absorbed {
        Node node = kNoNode;
        // The absorbed node's two neighbors on the merge path, with the
        // connecting forest edges, ordered from the x side to the y side.
        Node toward_x = kNoNode;
        EdgeId toward_x_edge = kNoEdge;
        Node toward_y = kNoNode;
        EdgeId toward_y_edge = kNoEdge;
    };
    std::vector<Absorbed> absorbed;
    std::vector<AtomId> merged_atoms;
};

struct Atom {
    MoleculeId molecule = kNoMolecule;
    std::vector<Node> nodes;
    bool alive = true;
};

// A molecular decomposition of a forest: molecules, per-node status, atoms,
// and the merge-event log that makes degree reduction replayable.
class Decomposition {
  public:
    std::vector<Molecule> molecules;
    std::vector<Atom> atoms;
    // Per node: owning molecule, or kNoMolecule if free.
    std::vector<MoleculeId> molecule_of;
    std::vector<NodeStatus> status;
    // Per node: owning atom, or kNoAtom unless reducible.
    std::vector<AtomId> atom_of;
    // Merge-event log, in event order across all molecules.
    std::vector<MergeEvent> events;
    // Per node: index into `events` of the event that absorbed it as a bad
    // node, or -1 (atom seeds and free/non-reducible nodes).
    std::vector<std::int32_t> absorb_event;
    // Per node: number of alive normal molecules rooted there.
    std::vector<std::int32_t> normal_root_count;
    std::optional<int> theta;

    bool is_free(Node v) const { return status[static_cast<std::size_t>(v)] == NodeStatus::free_node; }
    bool is_covered(Node v) const { return status[static_cast<std::size_t>(v)] != NodeStatus::free_node; }
    bool is_reducible(Node v) const { return status[static_cast<std::size_t>(v)] == NodeStatus::reducible; }
    bool is_normal_root(Node v) const { return normal_root_count[static_cast<std::size_t>(v)] > 0; }

    // Frees every node of molecule m and retires its atoms. Used when a chain
    // application affects the molecule.
    void remove_molecule(MoleculeId m);

    // Molecules then atoms, each sorted by smallest member node. Layout:
    // "kind root |size| node-list" per molecule, "atom-id molecule-id
    // node-list" per atom.
    std::string debug_dump() const;
};

// Decomposition where every component is one special molecule.
Decomposition trivial_decomposition(const RootedForest& forest, std::span<const int> bounds,
                                    WorkCounters* wc = nullptr);

// Theta-molecular decomposition: components with at most 2*theta nodes become
// special molecules; larger components are covered by maximal normal
// molecules of at most theta nodes each, leaving free separator nodes.
Decomposition theta_decomposition(const RootedForest& forest, int theta,
                                  std::span<const int> bounds, WorkCounters* wc = nullptr);

// Runs the atom merge procedure for one molecule of `decomp`, recording
// events and assigning atom ids. Nodes of the molecule must already carry
// their molecule id in decomp.molecule_of. Exposed for tests; the builders
// above call it per molecule.
void compute_atoms(Decomposition& decomp, const RootedForest& forest, MoleculeId molecule,
                   std::span<const int> bounds, WorkCounters* wc = nullptr);

// Lowers deg(u) to at most bounds[u] by replaying u's merge witnesses: cuts
// and inserts edges whose endpoints all lie inside u's atom. Every other
// node's degree changes by at most one. Returns the edit list in application
// order. Throws std::logic_error if u is not reducible.
std::vector<EdgeEdit> reduce_degree(RootedForest& forest, Decomposition& decomp,
                                    std::span<const int> bounds, Node u,
                                    WorkCounters* wc = nullptr);

}  // namespace mdst
