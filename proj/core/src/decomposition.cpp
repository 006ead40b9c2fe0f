#include "mdst/decomposition.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace mdst {

namespace {

// Reusable scratch for the per-molecule atom merge procedure. Global-size
// arrays are reset through touched-lists so that a pass over all molecules
// costs O(n + m) total, not O(n * molecules).
struct AtomScratch {
    // Global node -> local index + 1; 0 means not in the current molecule.
    std::vector<std::int32_t> local_plus1;
    std::vector<Node> touched;

    // Per local index:
    std::vector<Node> global;
    std::vector<std::int32_t> parent;       // local parent index, -1 at root
    std::vector<EdgeId> parent_edge;
    std::vector<std::int32_t> depth;
    std::vector<char> in_set;               // currently part of an atom set
    std::vector<std::int32_t> dsu_parent;
    std::vector<std::int32_t> dsu_size;
    std::vector<std::int32_t> set_top;      // per set root: shallowest member
    std::vector<AtomId> set_atom;           // per set root: atom id
    std::vector<std::vector<EdgeId>> pending;  // per bad node: edges to retry

    void reset(std::size_t n_global) {
        if (local_plus1.size() < n_global) local_plus1.resize(n_global, 0);
        for (Node v : touched) local_plus1[static_cast<std::size_t>(v)] = 0;
        touched.clear();
        global.clear();
        parent.clear();
        parent_edge.clear();
        depth.clear();
        in_set.clear();
        dsu_parent.clear();
        dsu_size.clear();
        set_top.clear();
        set_atom.clear();
        pending.clear();
    }

    int add(Node v) {
        int idx = static_cast<int>(global.size());
        local_plus1[static_cast<std::size_t>(v)] = idx + 1;
        touched.push_back(v);
        global.push_back(v);
        parent.push_back(-1);
        parent_edge.push_back(kNoEdge);
        depth.push_back(0);
        in_set.push_back(0);
        dsu_parent.push_back(idx);
        dsu_size.push_back(1);
        set_top.push_back(idx);
        set_atom.push_back(kNoAtom);
        pending.emplace_back();
        return idx;
    }

    int local_of(Node v) const {
        return local_plus1[static_cast<std::size_t>(v)] - 1;
    }

    int find(int a) {
        int root = a;
        while (dsu_parent[static_cast<std::size_t>(root)] != root)
            root = dsu_parent[static_cast<std::size_t>(root)];
        while (dsu_parent[static_cast<std::size_t>(a)] != root) {
            int next = dsu_parent[static_cast<std::size_t>(a)];
            dsu_parent[static_cast<std::size_t>(a)] = root;
            a = next;
        }
        return root;
    }
};

// Runs the merge procedure for one molecule: seeds atoms at nodes within
// their degree bound, then repeatedly takes a graph edge joining two distinct
// atoms of the molecule and merges every atom and bad node on the connecting
// forest path, logging a MergeEvent per merge.
void run_merge_procedure(Decomposition& decomp, const RootedForest& forest, MoleculeId mol_id,
                         std::span<const int> bounds, std::span<const EdgeId> mol_edges,
                         AtomScratch& s, WorkCounters* wc) {
    const Molecule& mol = decomp.molecules[static_cast<std::size_t>(mol_id)];
    const Graph& graph = forest.graph();
    s.reset(static_cast<std::size_t>(forest.node_count()));

    for (Node v : mol.nodes) s.add(v);
    const int k = static_cast<int>(mol.nodes.size());

    // Root the molecule internally at its attach node and record parents.
    {
        const int root = s.local_of(mol.attach);
        std::vector<int> stack{root};
        std::vector<char> seen(static_cast<std::size_t>(k), 0);
        seen[static_cast<std::size_t>(root)] = 1;
        while (!stack.empty()) {
            int lu = stack.back();
            stack.pop_back();
            Node u = s.global[static_cast<std::size_t>(lu)];
            for (const AdjEntry& a : forest.forest_neighbors(u)) {
                int lv = s.local_of(a.to);
                if (lv < 0 || seen[static_cast<std::size_t>(lv)]) continue;
                seen[static_cast<std::size_t>(lv)] = 1;
                s.parent[static_cast<std::size_t>(lv)] = lu;
                s.parent_edge[static_cast<std::size_t>(lv)] = a.edge;
                s.depth[static_cast<std::size_t>(lv)] = s.depth[static_cast<std::size_t>(lu)] + 1;
                stack.push_back(lv);
            }
        }
        for (int i = 0; i < k; ++i)
            if (!seen[static_cast<std::size_t>(i)])
                throw std::logic_error("compute_atoms: molecule is not connected in the forest");
    }

    // Seed singleton atoms at nodes within their bound; the rest start bad.
    for (int i = 0; i < k; ++i) {
        Node v = s.global[static_cast<std::size_t>(i)];
        if (forest.degree(v) <= bounds[static_cast<std::size_t>(v)]) {
            s.in_set[static_cast<std::size_t>(i)] = 1;
            AtomId id = static_cast<AtomId>(decomp.atoms.size());
            decomp.atoms.push_back({mol_id, {}, true});
            s.set_atom[static_cast<std::size_t>(i)] = id;
        }
    }

    // Queue of candidate edges; an edge is retried when a bad endpoint is
    // absorbed into an atom, so each edge enters the queue O(1) times.
    std::vector<EdgeId> queue;
    queue.reserve(mol_edges.size());
    for (EdgeId e : mol_edges) {
        Edge ed = graph.edge(e);
        int lu = s.local_of(ed.u);
        int lv = s.local_of(ed.v);
        if (s.in_set[static_cast<std::size_t>(lu)] && s.in_set[static_cast<std::size_t>(lv)]) {
            queue.push_back(e);
        } else {
            if (!s.in_set[static_cast<std::size_t>(lu)])
                s.pending[static_cast<std::size_t>(lu)].push_back(e);
            if (!s.in_set[static_cast<std::size_t>(lv)])
                s.pending[static_cast<std::size_t>(lv)].push_back(e);
        }
    }

    std::vector<int> absorbed_now;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        EdgeId eid = queue[head];
        if (wc) ++wc->edge_scans;
        Edge ed = graph.edge(eid);
        int lx = s.local_of(ed.u);
        int ly = s.local_of(ed.v);
        if (!s.in_set[static_cast<std::size_t>(lx)] || !s.in_set[static_cast<std::size_t>(ly)])
            continue;
        int rx = s.find(lx);
        int ry = s.find(ly);
        if (rx == ry) continue;

        // Merge: climb both sides of the forest path toward the meeting
        // point, jumping over whole atom sets via their shallowest member.
        MergeEvent event;
        event.molecule = mol_id;
        event.via_forest_edge = forest.has_forest_edge(eid);
        event.x = ed.u;
        event.y = ed.v;
        event.edge = eid;

        std::vector<int> sets{rx, ry};
        std::vector<MergeEvent::Absorbed> side_x, side_y;
        absorbed_now.clear();

        // Each side is either inside an atom set or at a bad node.
        int a = lx, b = ly;
        // Arrival edge of the current position, from below (toward x / y).
        Node below_a = kNoNode, below_b = kNoNode;
        EdgeId below_ea = kNoEdge, below_eb = kNoEdge;

        auto super_top = [&](int v) {
            return s.in_set[static_cast<std::size_t>(v)] ? s.set_top[static_cast<std::size_t>(s.find(v))] : v;
        };
        auto step = [&](int& cur, Node& below, EdgeId& below_edge,
                        std::vector<MergeEvent::Absorbed>& side) {
            int top = super_top(cur);
            int p = s.parent[static_cast<std::size_t>(top)];
            EdgeId pe = s.parent_edge[static_cast<std::size_t>(top)];
            if (p < 0) throw std::logic_error("compute_atoms: path climb escaped the molecule");
            if (wc) ++wc->ancestor_hops;
            if (!s.in_set[static_cast<std::size_t>(cur)]) {
                // Leaving a bad node: record it with both path neighbors.
                side.push_back({s.global[static_cast<std::size_t>(cur)], below, below_edge,
                                s.global[static_cast<std::size_t>(p)], pe});
                absorbed_now.push_back(cur);
            }
            below = s.global[static_cast<std::size_t>(top)];
            below_edge = pe;
            cur = p;
            if (s.in_set[static_cast<std::size_t>(p)]) {
                int rp = s.find(p);
                if (std::find(sets.begin(), sets.end(), rp) == sets.end()) sets.push_back(rp);
            }
        };

        while (true) {
            bool a_set = s.in_set[static_cast<std::size_t>(a)] != 0;
            bool b_set = s.in_set[static_cast<std::size_t>(b)] != 0;
            if (a_set && b_set && s.find(a) == s.find(b)) break;
            if (!a_set && !b_set && a == b) {
                // The paths meet at a bad node; record it with one arrival
                // edge per side.
                side_x.push_back({s.global[static_cast<std::size_t>(a)], below_a, below_ea,
                                  below_b, below_eb});
                absorbed_now.push_back(a);
                break;
            }
            int da = s.depth[static_cast<std::size_t>(super_top(a))];
            int db = s.depth[static_cast<std::size_t>(super_top(b))];
            if (da >= db)
                step(a, below_a, below_ea, side_x);
            else
                step(b, below_b, below_eb, side_y);
        }

        // Record the event's absorbed nodes in path order from x to y.
        event.absorbed = std::move(side_x);
        for (auto it = side_y.rbegin(); it != side_y.rend(); ++it) {
            // Side-y records were collected climbing from y, so their
            // neighbor fields are oriented toward y; swap to the x-to-y view.
            MergeEvent::Absorbed rec = *it;
            std::swap(rec.toward_x, rec.toward_y);
            std::swap(rec.toward_x_edge, rec.toward_y_edge);
            event.absorbed.push_back(rec);
        }

        // Union everything and keep the smallest participating atom id.
        AtomId survivor = kNoAtom;
        for (int r : sets) {
            AtomId id = s.set_atom[static_cast<std::size_t>(r)];
            event.merged_atoms.push_back(id);
            if (survivor == kNoAtom || id < survivor) survivor = id;
        }
        std::sort(event.merged_atoms.begin(), event.merged_atoms.end());
        int merged = sets[0];
        for (std::size_t i = 1; i < sets.size(); ++i) {
            int r2 = sets[i];
            int ra = s.find(merged), rb = s.find(r2);
            if (ra == rb) continue;
            if (s.dsu_size[static_cast<std::size_t>(ra)] < s.dsu_size[static_cast<std::size_t>(rb)])
                std::swap(ra, rb);
            s.dsu_parent[static_cast<std::size_t>(rb)] = ra;
            s.dsu_size[static_cast<std::size_t>(ra)] += s.dsu_size[static_cast<std::size_t>(rb)];
            if (s.depth[static_cast<std::size_t>(s.set_top[static_cast<std::size_t>(rb)])] <
                s.depth[static_cast<std::size_t>(s.set_top[static_cast<std::size_t>(ra)])])
                s.set_top[static_cast<std::size_t>(ra)] = s.set_top[static_cast<std::size_t>(rb)];
            merged = ra;
        }
        const std::int32_t event_index = static_cast<std::int32_t>(decomp.events.size());
        for (int bad : absorbed_now) {
            s.in_set[static_cast<std::size_t>(bad)] = 1;
            int ra = s.find(merged), rb = s.find(bad);
            if (ra != rb) {
                if (s.dsu_size[static_cast<std::size_t>(ra)] < s.dsu_size[static_cast<std::size_t>(rb)])
                    std::swap(ra, rb);
                s.dsu_parent[static_cast<std::size_t>(rb)] = ra;
                s.dsu_size[static_cast<std::size_t>(ra)] += s.dsu_size[static_cast<std::size_t>(rb)];
                if (s.depth[static_cast<std::size_t>(s.set_top[static_cast<std::size_t>(rb)])] <
                    s.depth[static_cast<std::size_t>(s.set_top[static_cast<std::size_t>(ra)])])
                    s.set_top[static_cast<std::size_t>(ra)] = s.set_top[static_cast<std::size_t>(rb)];
                merged = ra;
            }
            Node g = s.global[static_cast<std::size_t>(bad)];
            decomp.absorb_event[static_cast<std::size_t>(g)] = event_index;
            for (EdgeId pe : s.pending[static_cast<std::size_t>(bad)]) queue.push_back(pe);
            s.pending[static_cast<std::size_t>(bad)].clear();
        }
        // Mark dead atoms and stamp the survivor on the merged set root.
        for (int r : sets) {
            AtomId id = s.set_atom[static_cast<std::size_t>(r)];
            if (id != survivor) decomp.atoms[static_cast<std::size_t>(id)].alive = false;
        }
        s.set_atom[static_cast<std::size_t>(s.find(merged))] = survivor;
        decomp.events.push_back(std::move(event));
    }

    // Finalize statuses and atom membership for this molecule.
    for (Node v : mol.nodes) {
        int lv = s.local_of(v);
        if (s.in_set[static_cast<std::size_t>(lv)]) {
            AtomId id = s.set_atom[static_cast<std::size_t>(s.find(lv))];
            decomp.status[static_cast<std::size_t>(v)] = NodeStatus::reducible;
            decomp.atom_of[static_cast<std::size_t>(v)] = id;
            decomp.atoms[static_cast<std::size_t>(id)].nodes.push_back(v);
        } else {
            decomp.status[static_cast<std::size_t>(v)] = NodeStatus::non_reducible;
            decomp.atom_of[static_cast<std::size_t>(v)] = kNoAtom;
        }
    }
}

Decomposition make_empty(const RootedForest& forest) {
    Decomposition d;
    const std::size_t n = static_cast<std::size_t>(forest.node_count());
    d.molecule_of.assign(n, kNoMolecule);
    d.status.assign(n, NodeStatus::free_node);
    d.atom_of.assign(n, kNoAtom);
    d.absorb_event.assign(n, -1);
    d.normal_root_count.assign(n, 0);
    return d;
}

// Buckets every graph edge whose endpoints share a molecule, then runs the
// merge procedure molecule by molecule.
void compute_all_atoms(Decomposition& d, const RootedForest& forest, std::span<const int> bounds,
                       WorkCounters* wc) {
    const Graph& graph = forest.graph();
    std::vector<std::vector<EdgeId>> buckets(d.molecules.size());
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        Edge ed = graph.edge(e);
        MoleculeId mu = d.molecule_of[static_cast<std::size_t>(ed.u)];
        if (mu != kNoMolecule && mu == d.molecule_of[static_cast<std::size_t>(ed.v)])
            buckets[static_cast<std::size_t>(mu)].push_back(e);
        if (wc) ++wc->edge_scans;
    }
    AtomScratch scratch;
    for (MoleculeId m = 0; m < static_cast<MoleculeId>(d.molecules.size()); ++m)
        run_merge_procedure(d, forest, m, bounds, buckets[static_cast<std::size_t>(m)], scratch, wc);
}

}  // namespace

void compute_atoms(Decomposition& decomp, const RootedForest& forest, MoleculeId molecule,
                   std::span<const int> bounds, WorkCounters* wc) {
    const Graph& graph = forest.graph();
    std::vector<EdgeId> edges;
    for (Node v : decomp.molecules[static_cast<std::size_t>(molecule)].nodes)
        for (const AdjEntry& a : graph.neighbors(v))
            if (a.to > v &&
                decomp.molecule_of[static_cast<std::size_t>(a.to)] == molecule &&
                decomp.molecule_of[static_cast<std::size_t>(v)] == molecule)
                edges.push_back(a.edge);
    std::sort(edges.begin(), edges.end());
    AtomScratch scratch;
    run_merge_procedure(decomp, forest, molecule, bounds, edges, scratch, wc);
}

Decomposition trivial_decomposition(const RootedForest& forest, std::span<const int> bounds,
                                    WorkCounters* wc) {
    Decomposition d = make_empty(forest);
    const Node n = forest.node_count();
    // Group nodes by component; labels are smallest member ids, so iterating
    // nodes in ascending order builds each molecule's node list ascending.
    std::vector<MoleculeId> comp_mol(static_cast<std::size_t>(n), kNoMolecule);
    for (Node v = 0; v < n; ++v) {
        int label = forest.component_of(v);
        MoleculeId m = comp_mol[static_cast<std::size_t>(label)];
        if (m == kNoMolecule) {
            m = static_cast<MoleculeId>(d.molecules.size());
            comp_mol[static_cast<std::size_t>(label)] = m;
            Molecule mol;
            mol.kind = MoleculeKind::special;
            mol.root = kNoNode;
            mol.attach = static_cast<Node>(label);
            d.molecules.push_back(std::move(mol));
        }
        d.molecules[static_cast<std::size_t>(m)].nodes.push_back(v);
        d.molecule_of[static_cast<std::size_t>(v)] = m;
        d.status[static_cast<std::size_t>(v)] = NodeStatus::non_reducible;
    }
    compute_all_atoms(d, forest, bounds, wc);
    return d;
}

Decomposition theta_decomposition(const RootedForest& forest, int theta,
                                  std::span<const int> bounds, WorkCounters* wc) {
    if (theta < 1) throw std::logic_error("theta_decomposition: theta must be positive");
    Decomposition d = make_empty(forest);
    d.theta = theta;
    const Node n = forest.node_count();

    // Component grouping; labels are smallest member node ids.
    std::vector<std::vector<Node>> comps;
    {
        std::vector<std::int32_t> comp_idx(static_cast<std::size_t>(n), -1);
        for (Node v = 0; v < n; ++v) {
            int label = forest.component_of(v);
            if (comp_idx[static_cast<std::size_t>(label)] < 0) {
                comp_idx[static_cast<std::size_t>(label)] = static_cast<std::int32_t>(comps.size());
                comps.emplace_back();
            }
            comps[static_cast<std::size_t>(comp_idx[static_cast<std::size_t>(label)])].push_back(v);
        }
    }

    std::vector<std::int32_t> down_size(static_cast<std::size_t>(n), 0);
    std::vector<Node> order;
    std::vector<Node> parent(static_cast<std::size_t>(n), kNoNode);
    std::vector<EdgeId> parent_edge(static_cast<std::size_t>(n), kNoEdge);

    for (const std::vector<Node>& comp : comps) {
        if (static_cast<int>(comp.size()) <= 2 * theta) {
            MoleculeId m = static_cast<MoleculeId>(d.molecules.size());
            Molecule mol;
            mol.kind = MoleculeKind::special;
            mol.root = kNoNode;
            mol.attach = comp.front();
            mol.nodes = comp;
            d.molecules.push_back(std::move(mol));
            for (Node v : comp) {
                d.molecule_of[static_cast<std::size_t>(v)] = m;
                d.status[static_cast<std::size_t>(v)] = NodeStatus::non_reducible;
            }
            continue;
        }

        // Big component: find every direction (u -> v) of a forest edge whose
        // hanging subtree T_{u <- v} has at most theta nodes and all of whose
        // inward edge directions are likewise done; the maximal such
        // directions become normal molecules.
        const int comp_n = static_cast<int>(comp.size());
        // Root at the smallest node; compute subtree sizes bottom-up.
        order.clear();
        Node root = comp.front();
        parent[static_cast<std::size_t>(root)] = kNoNode;
        order.push_back(root);
        for (std::size_t head = 0; head < order.size(); ++head) {
            Node u = order[head];
            for (const AdjEntry& a : forest.forest_neighbors(u)) {
                if (a.to == parent[static_cast<std::size_t>(u)]) continue;
                parent[static_cast<std::size_t>(a.to)] = u;
                parent_edge[static_cast<std::size_t>(a.to)] = a.edge;
                order.push_back(a.to);
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            down_size[static_cast<std::size_t>(*it)] = 1;
            for (const AdjEntry& a : forest.forest_neighbors(*it))
                if (a.to != parent[static_cast<std::size_t>(*it)])
                    down_size[static_cast<std::size_t>(*it)] +=
                        down_size[static_cast<std::size_t>(a.to)];
        }

        // Directed edges are indexed as 2*edge + (0 if child -> parent).
        auto dir_index = [&](Node child, bool toward_parent) {
            EdgeId e = parent_edge[static_cast<std::size_t>(child)];
            return 2 * static_cast<std::size_t>(e) + (toward_parent ? 0 : 1);
        };
        auto subtree_size = [&](Node u, Node v) {
            // Size of T_{u <- v} for forest edge (u, v).
            if (parent[static_cast<std::size_t>(u)] == v)
                return down_size[static_cast<std::size_t>(u)];
            return comp_n - down_size[static_cast<std::size_t>(v)];
        };

        const Graph& graph = forest.graph();
        std::vector<char> done(2 * static_cast<std::size_t>(graph.edge_count()), 0);
        std::vector<std::int32_t> need(2 * static_cast<std::size_t>(graph.edge_count()), 0);

        struct DirEdge {
            Node from, to;
            EdgeId edge;
        };
        std::vector<DirEdge> ready;
        for (Node u : comp) {
            int deg = static_cast<int>(forest.forest_neighbors(u).size());
            for (const AdjEntry& a : forest.forest_neighbors(u)) {
                bool toward_parent = (a.to == parent[static_cast<std::size_t>(u)]);
                std::size_t idx = toward_parent ? dir_index(u, true) : dir_index(a.to, false);
                need[idx] = deg - 1;
                if (deg == 1 && subtree_size(u, a.to) <= theta) ready.push_back({u, a.to, a.edge});
            }
        }
        std::sort(ready.begin(), ready.end(), [](const DirEdge& l, const DirEdge& r) {
            if (l.edge != r.edge) return l.edge < r.edge;
            return l.from < r.from;
        });
        std::vector<DirEdge> queue(ready.begin(), ready.end());
        for (std::size_t head = 0; head < queue.size(); ++head) {
            DirEdge de = queue[head];
            bool toward_parent = (parent[static_cast<std::size_t>(de.from)] == de.to);
            std::size_t idx = toward_parent ? dir_index(de.from, true) : dir_index(de.to, false);
            if (done[idx]) continue;
            done[idx] = 1;
            if (wc) ++wc->edge_scans;
            // (de.from -> de.to) became done; relax every direction
            // (de.to -> t), t != de.from.
            for (const AdjEntry& a : forest.forest_neighbors(de.to)) {
                if (a.to == de.from) continue;
                bool tp = (parent[static_cast<std::size_t>(de.to)] == a.to);
                std::size_t out = tp ? dir_index(de.to, true) : dir_index(a.to, false);
                if (--need[out] == 0 && subtree_size(de.to, a.to) <= theta)
                    queue.push_back({de.to, a.to, a.edge});
            }
        }

        // Maximal done directions become normal molecules.
        for (Node u : comp) {
            for (const AdjEntry& a : forest.forest_neighbors(u)) {
                bool toward_parent = (a.to == parent[static_cast<std::size_t>(u)]);
                std::size_t idx = toward_parent ? dir_index(u, true) : dir_index(a.to, false);
                if (!done[idx]) continue;
                bool maximal = true;
                for (const AdjEntry& b : forest.forest_neighbors(a.to)) {
                    if (b.to == u) continue;
                    bool tp = (parent[static_cast<std::size_t>(a.to)] == b.to);
                    std::size_t out = tp ? dir_index(a.to, true) : dir_index(b.to, false);
                    if (done[out]) {
                        maximal = false;
                        break;
                    }
                }
                if (!maximal) continue;
                MoleculeId m = static_cast<MoleculeId>(d.molecules.size());
                Molecule mol;
                mol.kind = MoleculeKind::normal;
                mol.root = a.to;
                mol.attach = u;
                // Collect T_{u <- a.to} by a forest walk avoiding the root.
                std::vector<Node> stack{u};
                mol.nodes.push_back(u);
                d.molecule_of[static_cast<std::size_t>(u)] = m;
                while (!stack.empty()) {
                    Node x = stack.back();
                    stack.pop_back();
                    for (const AdjEntry& e2 : forest.forest_neighbors(x)) {
                        if (e2.to == a.to) continue;
                        if (d.molecule_of[static_cast<std::size_t>(e2.to)] == m) continue;
                        d.molecule_of[static_cast<std::size_t>(e2.to)] = m;
                        mol.nodes.push_back(e2.to);
                        stack.push_back(e2.to);
                    }
                }
                std::sort(mol.nodes.begin(), mol.nodes.end());
                for (Node v : mol.nodes)
                    d.status[static_cast<std::size_t>(v)] = NodeStatus::non_reducible;
                d.normal_root_count[static_cast<std::size_t>(a.to)] += 1;
                d.molecules.push_back(std::move(mol));
            }
        }
    }

    compute_all_atoms(d, forest, bounds, wc);
    return d;
}

void Decomposition::remove_molecule(MoleculeId m) {
    Molecule& mol = molecules[static_cast<std::size_t>(m)];
    if (!mol.alive) return;
    mol.alive = false;
    if (mol.kind == MoleculeKind::normal)
        normal_root_count[static_cast<std::size_t>(mol.root)] -= 1;
    for (Node v : mol.nodes) {
        AtomId a = atom_of[static_cast<std::size_t>(v)];
        if (a != kNoAtom) atoms[static_cast<std::size_t>(a)].alive = false;
        molecule_of[static_cast<std::size_t>(v)] = kNoMolecule;
        status[static_cast<std::size_t>(v)] = NodeStatus::free_node;
        atom_of[static_cast<std::size_t>(v)] = kNoAtom;
        absorb_event[static_cast<std::size_t>(v)] = -1;
    }
}

std::string Decomposition::debug_dump() const {
    std::vector<MoleculeId> mol_order;
    for (MoleculeId m = 0; m < static_cast<MoleculeId>(molecules.size()); ++m)
        if (molecules[static_cast<std::size_t>(m)].alive) mol_order.push_back(m);
    std::sort(mol_order.begin(), mol_order.end(), [&](MoleculeId l, MoleculeId r) {
        return molecules[static_cast<std::size_t>(l)].nodes.front() <
               molecules[static_cast<std::size_t>(r)].nodes.front();
    });
    std::string out;
    for (MoleculeId m : mol_order) {
        const Molecule& mol = molecules[static_cast<std::size_t>(m)];
        out += (mol.kind == MoleculeKind::normal) ? "normal " : "special ";
        out += (mol.root == kNoNode) ? std::string("-") : std::to_string(mol.root);
        out += " |" + std::to_string(mol.nodes.size()) + "|";
        for (Node v : mol.nodes) out += ' ' + std::to_string(v);
        out += '\n';
    }
    std::vector<AtomId> atom_order;
    for (AtomId a = 0; a < static_cast<AtomId>(atoms.size()); ++a)
        if (atoms[static_cast<std::size_t>(a)].alive) atom_order.push_back(a);
    std::sort(atom_order.begin(), atom_order.end(), [&](AtomId l, AtomId r) {
        return atoms[static_cast<std::size_t>(l)].nodes.front() <
               atoms[static_cast<std::size_t>(r)].nodes.front();
    });
    for (AtomId a : atom_order) {
        const Atom& atom = atoms[static_cast<std::size_t>(a)];
        out += std::to_string(a) + ' ' + std::to_string(atom.molecule);
        for (Node v : atom.nodes) out += ' ' + std::to_string(v);
        out += '\n';
    }
    return out;
}

namespace {

struct ReduceContext {
    RootedForest& forest;
    Decomposition& decomp;
    std::span<const int> bounds;
    std::vector<EdgeEdit>& edits;
    WorkCounters* wc;
    // Per-call degree drift, reset through the touched list.
    std::vector<std::int32_t>& delta;
    std::vector<Node>& touched;
    // Per-call replay guard, versioned to avoid O(events) resets.
    std::vector<std::uint32_t>& stamp;
    std::uint32_t epoch;

    void bump(Node v, int by) {
        if (delta[static_cast<std::size_t>(v)] == 0) touched.push_back(v);
        delta[static_cast<std::size_t>(v)] += by;
    }

    void reduce(Node v) {
        if (forest.degree(v) <= bounds[static_cast<std::size_t>(v)]) return;
        std::int32_t ev_i = decomp.absorb_event[static_cast<std::size_t>(v)];
        if (ev_i < 0)
            throw std::logic_error("reduce_degree: node exceeds its bound but has no witness");
        if (stamp[static_cast<std::size_t>(ev_i)] == epoch)
            throw std::logic_error("reduce_degree: witness event replayed twice");
        stamp[static_cast<std::size_t>(ev_i)] = epoch;
        if (wc) ++wc->witness_replays;
        const MergeEvent& e = decomp.events[static_cast<std::size_t>(ev_i)];
        reduce(e.x);
        reduce(e.y);
        const MergeEvent::Absorbed* rec = nullptr;
        for (const MergeEvent::Absorbed& a : e.absorbed) {
            if (wc) ++wc->edge_scans;
            if (a.node == v) {
                rec = &a;
                break;
            }
        }
        if (!rec) throw std::logic_error("reduce_degree: witness event lacks the absorbed node");
        // Drop one of v's two path edges; prefer the neighbor whose degree
        // has not already drifted downward in this call, and skip a side
        // whose edge an earlier replay already removed.
        bool x_ok = forest.has_forest_edge(rec->toward_x_edge);
        bool y_ok = forest.has_forest_edge(rec->toward_y_edge);
        Node nb;
        EdgeId nb_edge;
        if (x_ok && y_ok) {
            bool pick_x = delta[static_cast<std::size_t>(rec->toward_x)] >=
                          delta[static_cast<std::size_t>(rec->toward_y)];
            nb = pick_x ? rec->toward_x : rec->toward_y;
            nb_edge = pick_x ? rec->toward_x_edge : rec->toward_y_edge;
        } else if (x_ok || y_ok) {
            nb = x_ok ? rec->toward_x : rec->toward_y;
            nb_edge = x_ok ? rec->toward_x_edge : rec->toward_y_edge;
        } else {
            throw std::logic_error("reduce_degree: both path edges of a witness already removed");
        }
        forest.cut(v, nb);
        edits.push_back({false, v, nb, nb_edge});
        bump(v, -1);
        bump(nb, -1);
        forest.link(e.x, e.y, e.edge);
        edits.push_back({true, e.x, e.y, e.edge});
        bump(e.x, 1);
        bump(e.y, 1);
    }
};

}  // namespace

std::vector<EdgeEdit> reduce_degree(RootedForest& forest, Decomposition& decomp,
                                    std::span<const int> bounds, Node u, WorkCounters* wc) {
    if (!decomp.is_reducible(u)) throw std::logic_error("reduce_degree: node is not reducible");
    std::vector<EdgeEdit> edits;

    static thread_local std::vector<std::int32_t> delta;
    static thread_local std::vector<Node> touched;
    static thread_local std::vector<std::uint32_t> stamp;
    static thread_local std::uint32_t epoch = 0;
    if (delta.size() < static_cast<std::size_t>(forest.node_count()))
        delta.resize(static_cast<std::size_t>(forest.node_count()), 0);
    if (stamp.size() < decomp.events.size()) stamp.resize(decomp.events.size(), 0);
    ++epoch;
    if (epoch == 0) {
        std::fill(stamp.begin(), stamp.end(), 0);
        ++epoch;
    }
    touched.clear();

    ReduceContext ctx{forest, decomp, bounds, edits, wc, delta, touched, stamp, epoch};
    ctx.reduce(u);
    for (Node v : touched) delta[static_cast<std::size_t>(v)] = 0;
    return edits;
}

}  // namespace mdst
