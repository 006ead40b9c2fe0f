#include "mdst/chain_search.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace mdst {

namespace {

// Depth-first scan over the hanging subtrees of the given roots, honoring the
// persistent scan labels: a node whose subtree is already scanned is skipped
// with its whole branch, a node already scanned individually is not processed
// again. Every newly visited node is marked scanned and reported through
// `process` when it belongs to an atom. Visited nodes are appended to
// `visited` so the caller can mark their subtrees scanned once the region is
// done.
template <typename Process>
void scan_region(const RootedForest& forest, const Decomposition& decomp, LayerSet& ls,
                 const std::vector<Node>& roots, std::vector<Node>& visited,
                 std::vector<Node>& stack, Process&& process) {
    stack.assign(roots.rbegin(), roots.rend());
    while (!stack.empty()) {
        Node v = stack.back();
        stack.pop_back();
        if (ls.subtree_scanned[v]) continue;
        visited.push_back(v);
        if (!ls.node_scanned[v]) {
            ls.node_scanned[v] = 1;
            if (decomp.atom_of[v] != kNoAtom) process(v);
        }
        auto kids = forest.children(v);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
}

void mark_region_scanned(LayerSet& ls, Node top, const std::vector<Node>& visited) {
    ls.subtree_scanned[top] = 1;
    for (Node v : visited) ls.subtree_scanned[v] = 1;
}

// Roots of the scan region for a layer node x: when x is covered its whole
// hanging subtree belongs to one molecule; when x is free only the molecules
// still rooted at x (its covered children's subtrees) are part of the region.
void region_roots(const RootedForest& forest, const Decomposition& decomp, Node x,
                  std::vector<Node>& roots) {
    roots.clear();
    if (decomp.molecule_of[x] != kNoMolecule) {
        roots.push_back(x);
        return;
    }
    for (Node c : forest.children(x)) {
        if (decomp.molecule_of[c] != kNoMolecule) roots.push_back(c);
    }
}

// Per-search effectiveness state. Edges and nodes only ever turn ineffective.
// Adjacency slots carry a monotone "next possibly effective slot" pointer so
// repeated walks over a node's neighbors skip dead entries in near-constant
// amortized time.
struct SearchState {
    std::vector<char> edge_ineffective;
    std::vector<char> node_ineffective;
    std::vector<std::int32_t> adj_base;   // first slot of each node
    std::vector<std::int32_t> next_slot;  // slot -> next slot worth checking

    explicit SearchState(const Graph& g)
        : edge_ineffective(static_cast<std::size_t>(g.edge_count()), 0),
          node_ineffective(static_cast<std::size_t>(g.node_count()), 0),
          adj_base(static_cast<std::size_t>(g.node_count()) + 1, 0) {
        for (Node v = 0; v < g.node_count(); ++v) {
            adj_base[static_cast<std::size_t>(v) + 1] =
                adj_base[v] + static_cast<std::int32_t>(g.neighbors(v).size());
        }
        next_slot.resize(static_cast<std::size_t>(adj_base.back()));
        for (std::size_t s = 0; s < next_slot.size(); ++s) {
            next_slot[s] = static_cast<std::int32_t>(s);
        }
    }

    // First slot at or after s (below end) still marked worth checking,
    // compressing the skip pointers along the way.
    std::int32_t skip_to(std::int32_t s, std::int32_t end) {
        std::int32_t root = s;
        while (root < end && next_slot[root] != root) root = next_slot[root];
        while (s < end && next_slot[s] != s) {
            std::int32_t nxt = next_slot[s];
            next_slot[s] = std::min(root, end);
            s = nxt;
        }
        return std::min(root, end);
    }

    void retire_slot(std::int32_t s) { next_slot[s] = s + 1; }
};

bool inside_special_molecule(const Decomposition& decomp, Node v) {
    MoleculeId m = decomp.molecule_of[v];
    return m != kNoMolecule && decomp.molecules[m].kind == MoleculeKind::special;
}

}  // namespace

void refresh_snapshot(Configuration& config) {
    RootedForest& forest = config.forest;
    const Decomposition& decomp = config.decomposition;
    const Node n = forest.graph().node_count();
    std::vector<char> assigned(static_cast<std::size_t>(n), 0);
    std::vector<Node> preferred;
    for (Node v = 0; v < n; ++v) {
        Node label = forest.component_of(v);
        if (assigned[label]) continue;
        MoleculeId m = decomp.molecule_of[v];
        if (m != kNoMolecule && decomp.molecules[m].kind == MoleculeKind::special) {
            preferred.push_back(decomp.molecules[m].attach);
            assigned[label] = 1;
        } else if (decomp.is_free(v)) {
            preferred.push_back(v);
            assigned[label] = 1;
        }
    }
    forest.rebuild(preferred);
}

LayerSet build_layers(Configuration& config, int ell, WorkCounters* wc, std::ostream* trace) {
    if (ell < 1) throw std::invalid_argument("build_layers: length must be at least 1");
    RootedForest& forest = config.forest;
    const Decomposition& decomp = config.decomposition;
    const Graph& graph = forest.graph();
    if (!forest.snapshot_fresh()) {
        throw std::logic_error("build_layers: snapshot is stale, call refresh_snapshot first");
    }
    const Node n = graph.node_count();

    LayerSet ls;
    ls.ell = ell;
    ls.layers.resize(static_cast<std::size_t>(ell));
    ls.layer_of.assign(static_cast<std::size_t>(n), -1);
    ls.node_scanned.assign(static_cast<std::size_t>(n), 0);
    ls.subtree_scanned.assign(static_cast<std::size_t>(n), 0);
    ls.nearest_layered.assign(static_cast<std::size_t>(n), kNoNode);

    for (MoleculeId m = 0; m < static_cast<MoleculeId>(decomp.molecules.size()); ++m) {
        if (decomp.molecules[m].alive && decomp.molecules[m].kind == MoleculeKind::special) {
            ls.special_roots.push_back(m);
        }
    }

    std::vector<Node> visited;
    std::vector<Node> stack;
    std::vector<Node> roots;
    std::vector<Node> candidates;
    std::vector<char> pending(static_cast<std::size_t>(n), 0);

    for (int t = 0; t + 1 < ell; ++t) {
        candidates.clear();

        auto admit_from = [&](Node u, Node x, bool component_wide) {
            for (const AdjEntry& a : graph.neighbors(u)) {
                if (wc) ++wc->edge_scans;
                if (forest.has_forest_edge(a.edge)) continue;
                Node v = a.to;
                bool inside = component_wide ? forest.root_of(v) == forest.root_of(u)
                                             : forest.in_subtree(v, u, x);
                if (inside) continue;
                if (pending[v]) continue;
                pending[v] = 1;
                candidates.push_back(v);
                if (trace) *trace << "ADMIT " << (t + 1) << ' ' << v << '\n';
            }
        };

        if (t == 0) {
            for (MoleculeId m : ls.special_roots) {
                Node attach = decomp.molecules[m].attach;
                if (trace) *trace << "SCAN 0 M" << m << '\n';
                roots.assign(1, attach);
                visited.clear();
                scan_region(forest, decomp, ls, roots, visited, stack,
                            [&](Node u) { admit_from(u, kNoNode, true); });
                mark_region_scanned(ls, attach, visited);
            }
        } else {
            for (Node x : ls.layers[static_cast<std::size_t>(t)]) {
                if (trace) *trace << "SCAN " << t << ' ' << x << '\n';
                ls.node_scanned[x] = 1;
                region_roots(forest, decomp, x, roots);
                visited.clear();
                scan_region(forest, decomp, ls, roots, visited, stack,
                            [&](Node u) { admit_from(u, x, false); });
                mark_region_scanned(ls, x, visited);
            }
        }

        auto& next = ls.layers[static_cast<std::size_t>(t) + 1];
        for (Node v : candidates) {
            pending[v] = 0;
            if (ls.node_scanned[v]) {
                if (trace) *trace << "PRUNE " << (t + 1) << ' ' << v << " scanned\n";
                continue;
            }
            bool can_root = decomp.molecule_of[v] != kNoMolecule ||
                            decomp.normal_root_count[v] > 0;
            if (!can_root) {
                if (trace) *trace << "PRUNE " << (t + 1) << ' ' << v << " status\n";
                continue;
            }
            next.push_back(v);
            ls.layer_of[v] = t + 1;
        }
    }

    if (ell >= 2) {
        // One pass over the snapshot computing, per node, its nearest strict
        // ancestor that sits in a layer. Free nodes act as barriers: a
        // molecule's search for layered ancestors stops at the molecule root.
        struct Frame {
            Node node;
            Node head;
        };
        std::vector<Frame> dfs;
        for (Node r = 0; r < n; ++r) {
            if (forest.root_of(r) != r) continue;
            dfs.push_back({r, kNoNode});
            while (!dfs.empty()) {
                Frame f = dfs.back();
                dfs.pop_back();
                bool covered = decomp.molecule_of[f.node] != kNoMolecule;
                bool layered = ls.layer_of[f.node] >= 1;
                ls.nearest_layered[f.node] = covered ? f.head : kNoNode;
                Node down = layered ? f.node : (covered ? f.head : kNoNode);
                for (Node c : forest.children(f.node)) dfs.push_back({c, down});
            }
        }
    }

    return ls;
}

int find_chains_and_apply(Configuration& config, int ell, LayerSet& ls, WorkCounters* wc,
                          std::ostream* trace, std::vector<ApplyRecord>* records) {
    if (ell < 1) throw std::invalid_argument("find_chains_and_apply: length must be at least 1");
    if (ls.ell != ell) throw std::invalid_argument("find_chains_and_apply: layer set length mismatch");
    RootedForest& forest = config.forest;
    Decomposition& decomp = config.decomposition;
    const Graph& graph = forest.graph();

    SearchState st(graph);
    int applied = 0;

    std::vector<Node> chain_w(static_cast<std::size_t>(ell));
    std::vector<Node> chain_z(static_cast<std::size_t>(ell));
    std::vector<EdgeId> chain_connect(static_cast<std::size_t>(ell));

    // Backward walk over one layer node's incident edges: each viable edge
    // (non-forest, reducible far end) extends the chain one block down; a
    // failed extension retires the edge, exhausting the node retires it too.
    auto try_node = [&](auto&& descend, int t, Node x) -> bool {
        auto nbrs = graph.neighbors(x);
        std::int32_t base = st.adj_base[x];
        std::int32_t end = st.adj_base[static_cast<std::size_t>(x) + 1];
        std::int32_t s = st.skip_to(base, end);
        while (s < end) {
            const AdjEntry& a = nbrs[static_cast<std::size_t>(s - base)];
            if (st.edge_ineffective[a.edge]) {
                st.retire_slot(s);
                s = st.skip_to(s + 1, end);
                continue;
            }
            if (wc) ++wc->edge_scans;
            Node y = a.to;
            if (!forest.has_forest_edge(a.edge) && decomp.is_reducible(y)) {
                chain_w[static_cast<std::size_t>(t) - 1] = y;
                chain_z[static_cast<std::size_t>(t) - 1] = x;
                chain_connect[static_cast<std::size_t>(t) - 1] = a.edge;
                bool ok = (t == 1) ? inside_special_molecule(decomp, y) : descend(descend, t - 1, y);
                if (ok) return true;
            }
            st.edge_ineffective[a.edge] = 1;
            st.retire_slot(s);
            if (trace) *trace << "INEFFECTIVE-EDGE " << x << ' ' << y << '\n';
            s = st.skip_to(s + 1, end);
        }
        st.node_ineffective[x] = 1;
        if (trace) *trace << "INEFFECTIVE-NODE " << t << ' ' << x << '\n';
        return false;
    };

    // Walks the layered ancestors of the current front node deepest-first.
    // Hitting an ancestor already known ineffective ends the walk: everything
    // above it was exhausted through that ancestor before.
    auto descend = [&](auto&& self, int t, Node front) -> bool {
        Node x = ls.nearest_layered[front];
        while (x != kNoNode) {
            if (wc) ++wc->ancestor_hops;
            if (ls.layer_of[x] == t) {
                if (st.node_ineffective[x]) return false;
                if (try_node(self, t, x)) return true;
            }
            x = ls.nearest_layered[x];
        }
        return false;
    };

    auto process = [&](Node u, Node x_ctx, bool component_wide) {
        for (const AdjEntry& a : graph.neighbors(u)) {
            if (decomp.atom_of[u] == kNoAtom) break;  // freed by a chain applied just now
            if (wc) ++wc->edge_scans;
            if (forest.has_forest_edge(a.edge)) continue;
            Node v = a.to;
            bool tail_ok = decomp.is_reducible(v) ||
                           (decomp.is_free(v) && forest.degree(v) <= config.bounds[v] &&
                            !config.is_dirty(v));
            if (!tail_ok) continue;
            bool inside = component_wide ? forest.root_of(v) == forest.root_of(u)
                                         : forest.in_subtree(v, u, x_ctx);
            if (inside) continue;
            chain_w[static_cast<std::size_t>(ell) - 1] = u;
            chain_z[static_cast<std::size_t>(ell) - 1] = v;
            chain_connect[static_cast<std::size_t>(ell) - 1] = a.edge;
            bool ok = (ell == 1) ? true : descend(descend, ell - 1, u);
            if (!ok) continue;
            AugmentingChain chain;
            chain.w = chain_w;
            chain.z = chain_z;
            chain.connect = chain_connect;
            ApplyRecord record = apply_chain(config, chain, wc);
            if (trace) *trace << chain_trace_line(record) << '\n';
            if (records) records->push_back(std::move(record));
            ++applied;
        }
    };

    std::vector<Node> visited;
    std::vector<Node> stack;
    std::vector<Node> roots;

    if (ell == 1) {
        for (MoleculeId m : ls.special_roots) {
            if (!decomp.molecules[m].alive) continue;
            Node attach = decomp.molecules[m].attach;
            if (trace) *trace << "SCAN 0 M" << m << '\n';
            roots.assign(1, attach);
            visited.clear();
            scan_region(forest, decomp, ls, roots, visited, stack,
                        [&](Node u) { process(u, kNoNode, true); });
            mark_region_scanned(ls, attach, visited);
        }
    } else {
        for (Node x : ls.layers[static_cast<std::size_t>(ell) - 1]) {
            if (trace) *trace << "SCAN " << (ell - 1) << ' ' << x << '\n';
            ls.node_scanned[x] = 1;
            region_roots(forest, decomp, x, roots);
            visited.clear();
            scan_region(forest, decomp, ls, roots, visited, stack,
                        [&](Node u) { process(u, x, false); });
            mark_region_scanned(ls, x, visited);
        }
    }

    return applied;
}

RaiseStats raise_configuration(Configuration& config, int ell, WorkCounters* wc,
                               std::ostream* trace, std::vector<ApplyRecord>* records) {
    config.forest.attach_counters(wc);
    refresh_snapshot(config);
    LayerSet ls = build_layers(config, ell, wc, trace);
    RaiseStats stats;
    stats.chains_applied = find_chains_and_apply(config, ell, ls, wc, trace, records);
    return stats;
}

}  // namespace mdst
