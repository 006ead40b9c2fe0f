#include "mdst/chains.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mdst {

namespace {

std::string at_index(const char* what, int i) {
    return std::string(what) + "@" + std::to_string(i);
}

std::string at_pair(const char* what, int j, int i) {
    return std::string(what) + "@" + std::to_string(j) + "," + std::to_string(i);
}

// Membership handle for the j-th block of a chain: j = 0 is the special
// molecule of w_0 (tested by molecule id), j >= 1 is the hanging subtree
// T_{w_j <- z_j} (tested by an explicit node set).
struct BlockHandle {
    MoleculeId special = kNoMolecule;
    RootedForest::Subtree subtree;

    bool contains(const Decomposition& d, Node v) const {
        if (special != kNoMolecule)
            return d.molecule_of[static_cast<std::size_t>(v)] == special;
        return subtree.contains(v);
    }
};

struct CoreResult {
    ChainCheck check;
    std::vector<BlockHandle> blocks;  // one per w index, valid when check.ok
};

// Shared validation of (w_0, z_1, ..., w_l) with the trailing z handled by
// the callers: distinctness and block exclusion are skipped for pseudo-chain
// checks.
CoreResult check_prefix(const Configuration& config, std::span<const Node> seq, int ell,
                        bool require_distinct, bool exclude_blocks) {
    const RootedForest& forest = config.forest;
    const Decomposition& d = config.decomposition;
    const Graph& graph = config.graph();
    CoreResult out;

    auto fail = [&](std::string reason) {
        out.check = {false, std::move(reason)};
        return out;
    };
    for (Node v : seq)
        if (v < 0 || v >= forest.node_count()) return fail("node-range");
    if (require_distinct) {
        std::vector<Node> sorted(seq.begin(), seq.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            return fail("distinct");
    }

    auto w_at = [&](int i) { return seq[2 * static_cast<std::size_t>(i)]; };
    auto z_at = [&](int i) { return seq[2 * static_cast<std::size_t>(i) - 1]; };

    // Property 1: w_0 sits in an atom of a special molecule.
    const Node w0 = w_at(0);
    MoleculeId m0 = d.molecule_of[static_cast<std::size_t>(w0)];
    if (m0 == kNoMolecule ||
        d.molecules[static_cast<std::size_t>(m0)].kind != MoleculeKind::special ||
        d.atom_of[static_cast<std::size_t>(w0)] == kNoAtom)
        return fail("property-1");
    out.blocks.push_back({m0, {}});

    for (int i = 1; i <= ell; ++i) {
        Node wi = w_at(i);
        Node zi = z_at(i);
        // Property 2a: the hop endpoints share a forest component.
        if (forest.component_of(wi) != forest.component_of(zi))
            return fail(at_index("property-2a", i));
        // Property 2b: T_{w_i <- z_i} is a block: z_i is non-reducible or a
        // normal-molecule root, and the subtree sits inside one molecule.
        bool root_like = d.status[static_cast<std::size_t>(zi)] == NodeStatus::non_reducible ||
                         d.normal_root_count[static_cast<std::size_t>(zi)] > 0;
        if (!root_like) return fail(at_index("property-2b", i));
        RootedForest::Subtree sub = forest.subtree_of(wi, zi);
        MoleculeId mi = d.molecule_of[static_cast<std::size_t>(wi)];
        if (mi == kNoMolecule) return fail(at_index("property-2b", i));
        for (Node v : sub.nodes)
            if (d.molecule_of[static_cast<std::size_t>(v)] != mi)
                return fail(at_index("property-2b", i));
        // Property 2c: w_i is in an atom.
        if (d.atom_of[static_cast<std::size_t>(wi)] == kNoAtom)
            return fail(at_index("property-2c", i));
        // Property 3: w_i lies outside every earlier block.
        if (exclude_blocks)
            for (int j = 0; j < i; ++j)
                if (out.blocks[static_cast<std::size_t>(j)].contains(d, wi))
                    return fail(at_pair("property-3", j, i));
        // Property 4: (w_{i-1}, z_i) is a non-forest edge.
        EdgeId eid = graph.find_edge(w_at(i - 1), zi);
        if (eid == kNoEdge || forest.has_forest_edge(eid))
            return fail(at_index("property-4", i));
        out.blocks.push_back({kNoMolecule, std::move(sub)});
    }
    out.check = {true, {}};
    return out;
}

// Final-endpoint status rule: reducible, or free with degree within bound
// and not dirty.
ChainCheck check_tail_status(const Configuration& config, Node z) {
    const Decomposition& d = config.decomposition;
    if (d.is_reducible(z)) return {true, {}};
    if (!d.is_free(z)) return {false, "tail-status"};
    if (config.forest.degree(z) > config.bounds[static_cast<std::size_t>(z)])
        return {false, "tail-degree"};
    if (config.is_dirty(z)) return {false, "dirty"};
    return {true, {}};
}

}  // namespace

std::vector<Node> AugmentingChain::sequence() const {
    std::vector<Node> seq;
    seq.reserve(w.size() + z.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        seq.push_back(w[i]);
        seq.push_back(z[i]);
    }
    return seq;
}

AugmentingChain make_chain(std::span<const Node> sequence) {
    if (sequence.empty() || sequence.size() % 2 != 0)
        throw std::invalid_argument("make_chain: sequence must alternate w and z, ending in z");
    AugmentingChain chain;
    for (std::size_t i = 0; i < sequence.size(); i += 2) {
        chain.w.push_back(sequence[i]);
        chain.z.push_back(sequence[i + 1]);
    }
    chain.connect.assign(chain.z.size(), kNoEdge);
    return chain;
}

ChainCheck is_alternating_chain(const Configuration& config, std::span<const Node> sequence) {
    if (sequence.empty() || sequence.size() % 2 == 0) return {false, "shape"};
    const int ell = static_cast<int>(sequence.size() / 2);
    return check_prefix(config, sequence, ell, true, true).check;
}

ChainCheck is_augmenting_chain(const Configuration& config, std::span<const Node> sequence) {
    if (sequence.empty() || sequence.size() % 2 != 0) return {false, "shape"};
    const int ell = static_cast<int>(sequence.size() / 2) - 1;
    CoreResult core = check_prefix(config, sequence, ell, true, true);
    if (!core.check.ok) return core.check;

    const Node w_last = sequence[sequence.size() - 2];
    const Node z_last = sequence.back();
    for (int j = 0; j <= ell; ++j)
        if (core.blocks[static_cast<std::size_t>(j)].contains(config.decomposition, z_last))
            return {false, at_index("tail-block", j)};
    EdgeId eid = config.graph().find_edge(w_last, z_last);
    if (eid == kNoEdge || config.forest.has_forest_edge(eid)) return {false, "tail-edge"};
    return check_tail_status(config, z_last);
}

ChainCheck is_pseudo_chain(const Configuration& config, std::span<const Node> sequence) {
    if (sequence.empty() || sequence.size() % 2 != 0) return {false, "shape"};
    const int ell = static_cast<int>(sequence.size() / 2) - 1;
    CoreResult core = check_prefix(config, sequence, ell, false, false);
    if (!core.check.ok) return core.check;

    const Node w_last = sequence[sequence.size() - 2];
    const Node z_last = sequence.back();
    EdgeId eid = config.graph().find_edge(w_last, z_last);
    if (eid == kNoEdge || config.forest.has_forest_edge(eid)) return {false, "tail-edge"};
    ChainCheck tail = check_tail_status(config, z_last);
    if (!tail.ok) return tail;
    AtomId aw = config.decomposition.atom_of[static_cast<std::size_t>(w_last)];
    AtomId az = config.decomposition.atom_of[static_cast<std::size_t>(z_last)];
    if (aw != kNoAtom && aw == az) return {false, "tail-atom"};
    return {true, {}};
}

ApplyRecord apply_chain(Configuration& config, const AugmentingChain& chain, WorkCounters* wc) {
    RootedForest& forest = config.forest;
    Decomposition& decomp = config.decomposition;
    const Graph& graph = config.graph();
    if (chain.w.empty() || chain.w.size() != chain.z.size())
        throw std::invalid_argument("apply_chain: malformed chain");
    const int ell = static_cast<int>(chain.w.size()) - 1;
#ifndef NDEBUG
    {
        std::vector<Node> seq = chain.sequence();
        ChainCheck chk = is_augmenting_chain(config, seq);
        if (!chk.ok) throw std::logic_error("apply_chain: stale chain: " + chk.reason);
    }
#endif

    ApplyRecord rec;
    rec.sequence = chain.sequence();

    // Resolve every deleted-edge partner y_i (the neighbor of z_i toward w_i)
    // before any mutation, preferring the jump table over a path walk.
    std::vector<Node> y(static_cast<std::size_t>(ell) + 1, kNoNode);
    for (int i = 1; i <= ell; ++i) {
        Node zi = chain.z[static_cast<std::size_t>(i) - 1];
        Node wi = chain.w[static_cast<std::size_t>(i)];
        Node yi = kNoNode;
        if (forest.snapshot_built() && forest.is_snapshot_ancestor(zi, wi)) {
            Node cand = forest.ancestor_at_depth(wi, forest.depth(zi) + 1);
            if (cand != kNoNode && forest.parent(cand) == zi &&
                forest.has_forest_edge(forest.parent_edge(cand)))
                yi = cand;
        }
        if (yi == kNoNode) {
            std::vector<Node> path = forest.path_between(zi, wi);
            if (path.size() < 2)
                throw std::logic_error("apply_chain: no forest path behind a deletion hop");
            yi = path[1];
        }
        y[static_cast<std::size_t>(i)] = yi;
    }
    {
        std::vector<Node> sorted(y.begin() + 1, y.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::logic_error("apply_chain: deletion partners are not distinct");
    }

    // Nodes that lose their only excess edge become dirty; capture their
    // status before any molecule is removed.
    for (int i = 1; i <= ell; ++i) {
        Node yi = y[static_cast<std::size_t>(i)];
        if (decomp.status[static_cast<std::size_t>(yi)] == NodeStatus::non_reducible)
            rec.dirtied.push_back(yi);
    }

    // Step 1: bring every chain endpoint within its bound.
    for (int i = 0; i <= ell; ++i) {
        std::vector<EdgeEdit> edits =
            reduce_degree(forest, decomp, config.bounds, chain.w[static_cast<std::size_t>(i)], wc);
        rec.edits.insert(rec.edits.end(), edits.begin(), edits.end());
    }
    const Node z_last = chain.z.back();
    if (decomp.is_reducible(z_last)) {
        std::vector<EdgeEdit> edits = reduce_degree(forest, decomp, config.bounds, z_last, wc);
        rec.edits.insert(rec.edits.end(), edits.begin(), edits.end());
    }

    // Step 2: delete (z_i, y_i) per hop.
    for (int i = 1; i <= ell; ++i) {
        Node zi = chain.z[static_cast<std::size_t>(i) - 1];
        Node yi = y[static_cast<std::size_t>(i)];
        EdgeId eid = forest.forest_edge_between(zi, yi);
        if (eid == kNoEdge) throw std::logic_error("apply_chain: deletion edge is missing");
        forest.cut(zi, yi);
        rec.edits.push_back({false, zi, yi, eid});
    }

    // Step 3: insert the chain edges (w_{i-1}, z_i).
    for (int i = 1; i <= ell + 1; ++i) {
        Node a = chain.w[static_cast<std::size_t>(i) - 1];
        Node b = chain.z[static_cast<std::size_t>(i) - 1];
        EdgeId eid = kNoEdge;
        if (chain.connect.size() >= static_cast<std::size_t>(i))
            eid = chain.connect[static_cast<std::size_t>(i) - 1];
        if (eid == kNoEdge) {
            eid = graph.find_edge(a, b);
            if (wc) ++wc->edge_scans;
        }
        if (eid == kNoEdge) throw std::logic_error("apply_chain: chain edge is not in the graph");
        forest.link(a, b, eid);
        rec.edits.push_back({true, a, b, eid});
    }

    // Remove every molecule containing a chain endpoint.
    for (int i = 0; i <= ell; ++i) {
        MoleculeId m = decomp.molecule_of[static_cast<std::size_t>(chain.w[static_cast<std::size_t>(i)])];
        if (m != kNoMolecule) rec.removed_molecules.push_back(m);
    }
    if (MoleculeId m = decomp.molecule_of[static_cast<std::size_t>(z_last)]; m != kNoMolecule)
        rec.removed_molecules.push_back(m);
    std::sort(rec.removed_molecules.begin(), rec.removed_molecules.end());
    rec.removed_molecules.erase(
        std::unique(rec.removed_molecules.begin(), rec.removed_molecules.end()),
        rec.removed_molecules.end());
    for (MoleculeId m : rec.removed_molecules) decomp.remove_molecule(m);

    for (Node v : rec.dirtied) config.dirty[static_cast<std::size_t>(v)] = 1;
    return rec;
}

AugmentingChain normalize_pseudo_chain(const Configuration& config,
                                       std::span<const Node> sequence) {
    {
        ChainCheck chk = is_pseudo_chain(config, sequence);
        if (!chk.ok)
            throw std::invalid_argument("normalize_pseudo_chain: not a pseudo-chain: " + chk.reason);
    }
    const Decomposition& d = config.decomposition;
    const RootedForest& forest = config.forest;

    std::vector<Node> seq(sequence.begin(), sequence.end());
    for (std::size_t guard = sequence.size() + 2; guard > 0; --guard) {
        if (is_augmenting_chain(config, seq).ok) return make_chain(seq);

        const int k = static_cast<int>(seq.size() / 2) - 1;
        auto w_at = [&](int i) { return seq[2 * static_cast<std::size_t>(i)]; };
        auto z_at = [&](int i) { return seq[2 * static_cast<std::size_t>(i) - 1]; };
        const Node z_final = seq.back();

        // Splice helpers: all rewrites keep the sequence a pseudo-chain and
        // strictly shorten it.
        auto rewrite = [&](std::vector<Node> next) { seq = std::move(next); };
        auto head_then_tail_swap = [&](int j) {
            // (w_0, ..., z_j, z_final, w_k): z_final takes the w_j slot and
            // the old w_k becomes the final endpoint.
            std::vector<Node> next(seq.begin(), seq.begin() + 2 * j);
            next.push_back(z_final);
            next.push_back(w_at(k));
            rewrite(std::move(next));
        };

        bool changed = false;

        // Duplicate w nodes: drop the loop between the two occurrences.
        for (int j = 0; j <= k && !changed; ++j)
            for (int i = j + 1; i <= k && !changed; ++i)
                if (w_at(j) == w_at(i)) {
                    std::vector<Node> next(seq.begin(), seq.begin() + 2 * j + 1);
                    next.insert(next.end(), seq.begin() + 2 * i + 1, seq.end());
                    rewrite(std::move(next));
                    changed = true;
                }
        if (changed) continue;

        // Duplicate z nodes: reconnect the earlier prefix to the later hop.
        for (int j = 1; j <= k && !changed; ++j)
            for (int i = j + 1; i <= k + 1 && !changed; ++i) {
                Node zi = (i == k + 1) ? z_final : z_at(i);
                if (z_at(j) == zi) {
                    std::vector<Node> next(seq.begin(), seq.begin() + 2 * (j - 1) + 1);
                    next.insert(next.end(), seq.begin() + 2 * i - 1, seq.end());
                    rewrite(std::move(next));
                    changed = true;
                }
            }
        if (changed) continue;

        // Final endpoint equals some w_i: fold the chain back onto that hop.
        for (int i = 0; i < k && !changed; ++i)
            if (z_final == w_at(i)) {
                head_then_tail_swap(i);
                changed = true;
            }
        if (changed) continue;

        // Block membership handles for the violation cases.
        auto in_block = [&](int j, Node v) {
            if (j == 0)
                return d.molecule_of[static_cast<std::size_t>(v)] ==
                       d.molecule_of[static_cast<std::size_t>(w_at(0))];
            return forest.subtree_of(w_at(j), z_at(j)).contains(v);
        };

        // Final endpoint inside the j-th block.
        for (int j = 0; j <= k && !changed; ++j)
            if (in_block(j, z_final)) {
                head_then_tail_swap(j);
                changed = true;
            }
        if (changed) continue;

        // Some w_i inside an earlier block: the blocks coincide, so replace
        // the earlier w by the later one and drop the detour.
        for (int j = 0; j < k && !changed; ++j)
            for (int i = j + 1; i <= k && !changed; ++i)
                if (in_block(j, w_at(i))) {
                    std::vector<Node> next(seq.begin(), seq.begin() + 2 * j);
                    next.insert(next.end(), seq.begin() + 2 * i, seq.end());
                    rewrite(std::move(next));
                    changed = true;
                }
        if (!changed)
            throw std::logic_error("normalize_pseudo_chain: no applicable rewrite");
    }
    throw std::logic_error("normalize_pseudo_chain: rewriting did not terminate");
}

std::string chain_trace_line(const ApplyRecord& record) {
    std::string line = "CHAIN " + std::to_string(record.sequence.size() / 2);
    for (Node v : record.sequence) line += ' ' + std::to_string(v);
    line += " | deleted:";
    for (const EdgeEdit& e : record.edits)
        if (!e.insert) line += ' ' + std::to_string(e.u) + '-' + std::to_string(e.v);
    line += " | inserted:";
    for (const EdgeEdit& e : record.edits)
        if (e.insert) line += ' ' + std::to_string(e.u) + '-' + std::to_string(e.v);
    return line;
}

}  // namespace mdst
