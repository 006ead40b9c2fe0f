#include "mdst/oracle.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace mdst {

namespace {

// Union-find with an undo stack, for the include/exclude tree search.
class UndoDsu {
  public:
    explicit UndoDsu(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
        for (int i = 0; i < n; ++i) parent_[static_cast<std::size_t>(i)] = i;
        sets_ = n;
    }

    int find(int a) const {
        while (parent_[static_cast<std::size_t>(a)] != a) a = parent_[static_cast<std::size_t>(a)];
        return a;
    }

    // Merges the sets of a and b; returns false (and records nothing) if they
    // already coincide.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
        size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
        trail_.push_back(b);
        --sets_;
        return true;
    }

    void undo() {
        int b = trail_.back();
        trail_.pop_back();
        int a = parent_[static_cast<std::size_t>(b)];
        parent_[static_cast<std::size_t>(b)] = b;
        size_[static_cast<std::size_t>(a)] -= size_[static_cast<std::size_t>(b)];
        ++sets_;
    }

    int set_count() const { return sets_; }

  private:
    std::vector<int> parent_;
    std::vector<int> size_;
    std::vector<int> trail_;
    int sets_ = 0;
};

// Shared include/exclude search over spanning trees. For every spanning tree
// that survives the degree caps it invokes `accept(chosen)`; accept returns
// the new per-node degree cap to keep searching under (or -1 to stop). With a
// constant cap this decides feasibility; with a shrinking cap it minimizes
// the maximum degree.
struct TreeSearch {
    const Graph& graph;
    std::span<const int> caps;       // per-node inclusive caps; nullptr-like when uniform
    int uniform_cap;                 // active when caps.empty()
    UndoDsu dsu;
    std::vector<int> degree;
    std::vector<EdgeId> chosen;
    long long trees_examined = 0;
    bool stop = false;

    TreeSearch(const Graph& g, std::span<const int> c, int uniform)
        : graph(g), caps(c), uniform_cap(uniform), dsu(g.node_count()),
          degree(static_cast<std::size_t>(g.node_count()), 0) {}

    int cap(Node v) const { return caps.empty() ? uniform_cap : caps[static_cast<std::size_t>(v)]; }

    template <typename Accept>
    void run(EdgeId next, Accept&& accept) {
        if (stop) return;
        const Node n = graph.node_count();
        if (static_cast<Node>(chosen.size()) == n - 1) {
            ++trees_examined;
            accept(*this);
            return;
        }
        if (next >= graph.edge_count()) return;
        // Connectivity prune: every remaining merge needs one more edge.
        if (graph.edge_count() - next < dsu.set_count() - 1) return;

        const Edge e = graph.edge(next);
        bool under_cap = degree[static_cast<std::size_t>(e.u)] < cap(e.u) &&
                         degree[static_cast<std::size_t>(e.v)] < cap(e.v);
        if (under_cap && dsu.unite(e.u, e.v)) {
            ++degree[static_cast<std::size_t>(e.u)];
            ++degree[static_cast<std::size_t>(e.v)];
            chosen.push_back(next);
            run(next + 1, accept);
            chosen.pop_back();
            --degree[static_cast<std::size_t>(e.u)];
            --degree[static_cast<std::size_t>(e.v)];
            dsu.undo();
            if (stop) return;
        }
        run(next + 1, accept);
    }
};

void check_size_guard(const Graph& graph, Node max_nodes, const char* who) {
    if (graph.node_count() > max_nodes) {
        throw std::invalid_argument(std::string(who) + ": instance exceeds the size guard");
    }
}

}  // namespace

OracleResult brute_force_mdst(const Graph& graph, Node max_nodes) {
    check_size_guard(graph, max_nodes, "brute_force_mdst");
    const Node n = graph.node_count();
    OracleResult result;
    if (n == 1) {
        result.delta_star = 0;
        result.trees_examined = 1;
        return result;
    }
    const int floor_degree = (n <= 2) ? 1 : 2;  // no spanning tree can do better
    TreeSearch search(graph, {}, n - 1);
    int best = n;  // strictly above any possible tree degree, so nothing is pruned at first
    std::vector<EdgeId> best_tree;
    search.run(0, [&](TreeSearch& s) {
        int got = *std::max_element(s.degree.begin(), s.degree.end());
        if (got < best) {
            best = got;
            best_tree = s.chosen;
            s.uniform_cap = best - 1;  // only strictly better trees from here on
            if (best == floor_degree) s.stop = true;
        }
    });
    result.delta_star = best;
    result.witness_tree = std::move(best_tree);
    std::sort(result.witness_tree.begin(), result.witness_tree.end());
    result.trees_examined = search.trees_examined;
    return result;
}

BdstOracleResult brute_force_bdst(const Graph& graph, std::span<const int> bounds, Node max_nodes) {
    check_size_guard(graph, max_nodes, "brute_force_bdst");
    const Node n = graph.node_count();
    if (static_cast<Node>(bounds.size()) != n) {
        throw std::invalid_argument("brute_force_bdst: bounds must list one value per node");
    }
    BdstOracleResult result;
    if (n == 1) {
        result.feasible = true;
        return result;
    }
    TreeSearch search(graph, bounds, 0);
    search.run(0, [&](TreeSearch& s) {
        result.feasible = true;
        result.witness_tree = s.chosen;
        s.stop = true;
    });
    std::sort(result.witness_tree.begin(), result.witness_tree.end());
    return result;
}

std::vector<std::vector<Node>> enumerate_chains(const Configuration& config, int max_len) {
    const Graph& graph = config.graph();
    if (graph.node_count() > 30) {
        throw std::invalid_argument("enumerate_chains: instance exceeds the size guard");
    }
    if (max_len > 8) {
        throw std::invalid_argument("enumerate_chains: length exceeds the guard");
    }
    std::vector<std::vector<Node>> found;
    if (max_len < 1) return found;

    const RootedForest& forest = config.forest;
    std::vector<Node> seq;

    // Grows (w_0, z_1, ..., w_{i-1}) one (z, w) hop at a time. Every odd
    // prefix of an augmenting chain is an alternating chain, so pruning on
    // the alternating validator loses nothing; every candidate closure is
    // confirmed by the full validator.
    auto extend = [&](auto&& self) -> void {
        Node w_last = seq.back();
        for (const AdjEntry& a : graph.neighbors(w_last)) {
            if (forest.has_forest_edge(a.edge)) continue;
            // Close the chain with z = a.to.
            seq.push_back(a.to);
            if (is_augmenting_chain(config, seq)) found.push_back(seq);
            seq.pop_back();
            // Or pass through z = a.to and another covered node w, while the
            // closed chain can still fit in max_len.
            int w_count = static_cast<int>(seq.size() + 1) / 2;
            if (w_count >= max_len) continue;
            for (Node w = 0; w < graph.node_count(); ++w) {
                if (config.decomposition.atom_of[w] == kNoAtom) continue;
                seq.push_back(a.to);
                seq.push_back(w);
                if (is_alternating_chain(config, seq)) self(self);
                seq.pop_back();
                seq.pop_back();
            }
        }
    };

    for (Node w0 = 0; w0 < graph.node_count(); ++w0) {
        seq.assign(1, w0);
        if (!is_alternating_chain(config, seq)) continue;
        extend(extend);
    }
    return found;
}

GenFamily parse_family(std::string_view name) {
    if (name == "gnm") return GenFamily::gnm;
    if (name == "path") return GenFamily::path;
    if (name == "cycle") return GenFamily::cycle;
    if (name == "star") return GenFamily::star;
    if (name == "grid") return GenFamily::grid;
    if (name == "lot") return GenFamily::lot;
    throw std::invalid_argument("unknown generator family: " + std::string(name));
}

std::string_view family_name(GenFamily family) {
    switch (family) {
        case GenFamily::gnm: return "gnm";
        case GenFamily::path: return "path";
        case GenFamily::cycle: return "cycle";
        case GenFamily::star: return "star";
        case GenFamily::grid: return "grid";
        case GenFamily::lot: return "lot";
    }
    throw std::invalid_argument("unknown generator family");
}

std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t k) {
    if (k <= 1) return 0;
    std::uint64_t wrap = (std::numeric_limits<std::uint64_t>::max() % k + 1) % k;  // 2^64 mod k
    if (wrap == 0) return rng() % k;
    std::uint64_t bound = 0 - wrap;  // largest multiple of k that fits
    for (;;) {
        std::uint64_t r = rng();
        if (r < bound) return r % k;
    }
}

namespace {

// Decodes a uniformly random Prufer sequence into a labeled tree on n >= 2
// nodes, appending its n-1 edges.
void random_tree_edges(Node n, std::mt19937_64& rng, std::vector<Edge>& edges) {
    if (n == 2) {
        edges.push_back({0, 1});
        return;
    }
    std::vector<Node> code(static_cast<std::size_t>(n) - 2);
    for (Node& c : code) c = static_cast<Node>(rand_below(rng, static_cast<std::uint64_t>(n)));
    std::vector<int> degree(static_cast<std::size_t>(n), 1);
    for (Node c : code) ++degree[static_cast<std::size_t>(c)];

    Node ptr = 0;
    while (degree[static_cast<std::size_t>(ptr)] != 1) ++ptr;
    Node leaf = ptr;
    for (Node c : code) {
        edges.push_back({leaf, c});
        if (--degree[static_cast<std::size_t>(c)] == 1 && c < ptr) {
            leaf = c;
        } else {
            ++ptr;
            while (degree[static_cast<std::size_t>(ptr)] != 1) ++ptr;
            leaf = ptr;
        }
    }
    edges.push_back({leaf, static_cast<Node>(n - 1)});
}

Graph generate_gnm(Node n, long long m, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gnm: need at least one node");
    const long long complete = static_cast<long long>(n) * (n - 1) / 2;
    if (m < n - 1 || m > complete) {
        throw std::invalid_argument("gnm: edge count must lie in [n-1, n(n-1)/2]");
    }
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    if (n >= 2) random_tree_edges(n, rng, edges);

    auto key = [n](Node u, Node v) {
        if (u > v) std::swap(u, v);
        return static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(n) +
               static_cast<std::uint64_t>(v);
    };
    std::unordered_set<std::uint64_t> used;
    used.reserve(static_cast<std::size_t>(m) * 2);
    for (const Edge& e : edges) used.insert(key(e.u, e.v));
    while (static_cast<long long>(edges.size()) < m) {
        Node u = static_cast<Node>(rand_below(rng, static_cast<std::uint64_t>(n)));
        Node v = static_cast<Node>(rand_below(rng, static_cast<std::uint64_t>(n)));
        if (u == v) continue;
        if (!used.insert(key(u, v)).second) continue;
        edges.push_back({std::min(u, v), std::max(u, v)});
    }
    return Graph::from_edges(n, edges);
}

Graph generate_grid(Node side) {
    if (side < 1) throw std::invalid_argument("grid: side must be at least 1");
    const Node n = side * side;
    std::vector<Edge> edges;
    auto id = [side](Node r, Node c) { return r * side + c; };
    for (Node r = 0; r < side; ++r) {
        for (Node c = 0; c < side; ++c) {
            if (c + 1 < side) edges.push_back({id(r, c), id(r, c + 1)});
            if (r + 1 < side) edges.push_back({id(r, c), id(r + 1, c)});
        }
    }
    return Graph::from_edges(n, edges);
}

// Recursive layered-overlap-tree builder. Allocates the apex first, then the
// level's copies in order, so node ids are deterministic. Returns the apex.
struct LotBuilder {
    Node next_node = 0;
    std::vector<Edge> edges;
    std::vector<Edge> bad_tree;
    std::vector<Edge> good_tree;

    Node build(int level) {
        Node apex = next_node++;
        if (level == 0) return apex;
        std::vector<Node> copy_apex(static_cast<std::size_t>(level));
        for (int j = 0; j < level; ++j) copy_apex[static_cast<std::size_t>(j)] = build(level - 1);
        for (int j = 0; j < level; ++j) {
            edges.push_back({apex, copy_apex[static_cast<std::size_t>(j)]});
            bad_tree.push_back({apex, copy_apex[static_cast<std::size_t>(j)]});
            if (j == 0) good_tree.push_back({apex, copy_apex[0]});
        }
        for (int j = 0; j + 1 < level; ++j) {
            Edge link{copy_apex[static_cast<std::size_t>(j)], copy_apex[static_cast<std::size_t>(j) + 1]};
            edges.push_back(link);
            good_tree.push_back(link);
        }
        return apex;
    }
};

}  // namespace

LotInstance generate_lot(int q) {
    if (q < 0 || q > 9) throw std::invalid_argument("lot: level must lie in [0, 9]");
    LotBuilder builder;
    builder.build(q);
    return LotInstance{Graph::from_edges(builder.next_node, builder.edges),
                       std::move(builder.bad_tree), std::move(builder.good_tree)};
}

Graph generate(const GenSpec& spec) {
    switch (spec.family) {
        case GenFamily::gnm:
            return generate_gnm(spec.n, spec.m, spec.seed);
        case GenFamily::path: {
            if (spec.n < 1) throw std::invalid_argument("path: need at least one node");
            std::vector<Edge> edges;
            for (Node i = 0; i + 1 < spec.n; ++i) edges.push_back({i, i + 1});
            return Graph::from_edges(spec.n, edges);
        }
        case GenFamily::cycle: {
            if (spec.n < 3) throw std::invalid_argument("cycle: need at least three nodes");
            std::vector<Edge> edges;
            for (Node i = 0; i + 1 < spec.n; ++i) edges.push_back({i, i + 1});
            edges.push_back({0, spec.n - 1});
            return Graph::from_edges(spec.n, edges);
        }
        case GenFamily::star: {
            if (spec.n < 1) throw std::invalid_argument("star: need at least one node");
            std::vector<Edge> edges;
            for (Node i = 1; i < spec.n; ++i) edges.push_back({0, i});
            return Graph::from_edges(spec.n, edges);
        }
        case GenFamily::grid:
            return generate_grid(spec.n);
        case GenFamily::lot:
            return generate_lot(spec.q).graph;
    }
    throw std::invalid_argument("unknown generator family");
}

}  // namespace mdst
