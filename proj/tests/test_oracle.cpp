#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

using namespace mdst;

namespace {

std::vector<int> degrees_of(const Graph& g, std::span<const EdgeId> tree) {
    std::vector<int> deg(static_cast<std::size_t>(g.node_count()), 0);
    for (EdgeId id : tree) {
        Edge e = g.edge(id);
        ++deg[static_cast<std::size_t>(e.u)];
        ++deg[static_cast<std::size_t>(e.v)];
    }
    return deg;
}

int max_tree_degree(const Graph& g, std::span<const EdgeId> tree) {
    if (tree.empty()) return 0;
    std::vector<int> deg = degrees_of(g, tree);
    return *std::max_element(deg.begin(), deg.end());
}

std::vector<EdgeId> ids_of(const Graph& g, const std::vector<Edge>& edges) {
    std::vector<EdgeId> ids;
    ids.reserve(edges.size());
    for (const Edge& e : edges) {
        EdgeId id = g.find_edge(e.u, e.v);
        REQUIRE(id != kNoEdge);
        ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

Graph gnm_graph(Node n, long long m, std::uint64_t seed) {
    GenSpec spec;
    spec.family = GenFamily::gnm;
    spec.n = n;
    spec.m = m;
    spec.seed = seed;
    return generate(spec);
}

}  // namespace

TEST_CASE("exact optimum on structured instances") {
    struct Case {
        const char* text;
        int expected;
    };
    for (Case c : {Case{"1 0\n", 0}, Case{"2 1\n0 1\n", 1},
                   Case{"4 3\n0 1\n1 2\n2 3\n", 2},
                   Case{"6 5\n0 1\n0 2\n0 3\n0 4\n0 5\n", 5},
                   Case{"4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n", 2},
                   Case{"5 5\n0 1\n1 2\n2 3\n3 4\n0 4\n", 2}}) {
        CAPTURE(c.text);
        Graph g = Graph::parse(c.text);
        OracleResult r = brute_force_mdst(g);
        CHECK(r.delta_star == c.expected);
        CHECK(r.trees_examined >= 1);
        CHECK(testutil::check_spanning_tree(g, r.witness_tree) == "");
        CHECK(max_tree_degree(g, r.witness_tree) == r.delta_star);
        CHECK(std::is_sorted(r.witness_tree.begin(), r.witness_tree.end()));
    }
}

TEST_CASE("decision oracle honors per-node bounds") {
    Graph p3 = Graph::parse("3 2\n0 1\n1 2\n");
    BdstOracleResult r = brute_force_bdst(p3, std::vector<int>{1, 2, 1});
    CHECK(r.feasible);
    CHECK(r.witness_tree == std::vector<EdgeId>{0, 1});
    CHECK_FALSE(brute_force_bdst(p3, std::vector<int>{1, 1, 1}).feasible);

    Graph star = Graph::parse("4 3\n0 1\n0 2\n0 3\n");
    CHECK_FALSE(brute_force_bdst(star, std::vector<int>(4, 1)).feasible);

    Graph k4 = Graph::parse("4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    CHECK_FALSE(brute_force_bdst(k4, std::vector<int>(4, 1)).feasible);
    BdstOracleResult ham = brute_force_bdst(k4, std::vector<int>(4, 2));
    CHECK(ham.feasible);
    CHECK(testutil::check_spanning_tree(k4, ham.witness_tree, std::vector<int>(4, 2)) == "");

    CHECK_THROWS_AS((void)brute_force_bdst(p3, std::vector<int>{1, 2}), std::invalid_argument);
}

TEST_CASE("uniform-bound feasibility matches the exact optimum") {
    std::mt19937_64 rng(777);
    for (int round = 0; round < 40; ++round) {
        Node n = 4 + static_cast<Node>(rand_below(rng, 6));
        long long max_extra = static_cast<long long>(n) * (n - 1) / 2 - (n - 1);
        long long m =
            n - 1 + static_cast<long long>(rand_below(rng, static_cast<std::uint64_t>(max_extra + 1)));
        Graph g = gnm_graph(n, m, rng());
        OracleResult opt = brute_force_mdst(g);
        for (int b = 1; b <= 4; ++b) {
            BdstOracleResult dec = brute_force_bdst(g, std::vector<int>(static_cast<std::size_t>(n), b));
            CAPTURE(round);
            CAPTURE(b);
            CHECK(dec.feasible == (b >= opt.delta_star));
            if (dec.feasible) {
                CHECK(testutil::check_spanning_tree(
                          g, dec.witness_tree,
                          std::vector<int>(static_cast<std::size_t>(n), b)) == "");
            } else {
                CHECK(dec.witness_tree.empty());
            }
        }
    }
}

TEST_CASE("size guards hold until explicitly raised") {
    Graph g13 = gnm_graph(13, 20, 99);
    CHECK_THROWS_AS((void)brute_force_mdst(g13), std::invalid_argument);
    CHECK_THROWS_AS((void)brute_force_bdst(g13, std::vector<int>(13, 2)), std::invalid_argument);
    OracleResult raised = brute_force_mdst(g13, 13);
    CHECK(raised.delta_star >= 1);
    CHECK(testutil::check_spanning_tree(g13, raised.witness_tree) == "");

    GenSpec big;
    big.family = GenFamily::path;
    big.n = 31;
    Graph big_graph = generate(big);
    Configuration big_cfg = testutil::make_config(big_graph, 2);
    testutil::rebuild_decomposition(big_cfg);
    CHECK_THROWS_AS((void)enumerate_chains(big_cfg, 1), std::invalid_argument);

    Graph small_graph = Graph::parse("2 1\n0 1\n");
    Configuration small_cfg = testutil::make_config(small_graph, 1);
    testutil::rebuild_decomposition(small_cfg);
    CHECK_THROWS_AS((void)enumerate_chains(small_cfg, 9), std::invalid_argument);
}

TEST_CASE("layered overlap family ground truth") {
    CHECK_THROWS_AS((void)generate_lot(-1), std::invalid_argument);
    CHECK_THROWS_AS((void)generate_lot(10), std::invalid_argument);

    const Node expected_nodes[] = {1, 2, 5, 16, 65};
    const EdgeId expected_edges[] = {0, 1, 5, 20, 87};
    for (int q = 0; q <= 4; ++q) {
        LotInstance lot = generate_lot(q);
        CAPTURE(q);
        // Graph construction itself rejects disconnected input, so a built
        // instance is already certified connected.
        CHECK(lot.graph.node_count() == expected_nodes[q]);
        CHECK(lot.graph.edge_count() == expected_edges[q]);

        std::vector<EdgeId> bad = ids_of(lot.graph, lot.bad_tree);
        std::vector<EdgeId> good = ids_of(lot.graph, lot.good_tree);
        if (q == 0) {
            CHECK(bad.empty());
            CHECK(good.empty());
            continue;
        }
        CHECK(testutil::check_spanning_tree(lot.graph, bad) == "");
        CHECK(testutil::check_spanning_tree(lot.graph, good) == "");
        CHECK(max_tree_degree(lot.graph, bad) == q);
        CHECK(max_tree_degree(lot.graph, good) <= 3);
        if (q >= 2) CHECK(max_tree_degree(lot.graph, good) == 3);
    }

    // The distinguished low-degree tree is optimal only from level 3 up: the
    // level-2 instance still admits a maximum-degree-2 spanning path through
    // the apex and the chain edge.
    CHECK(brute_force_mdst(generate_lot(2).graph).delta_star == 2);
    CHECK(brute_force_mdst(generate_lot(3).graph, 16).delta_star == 3);
}

TEST_CASE("random generator is seeded, connected, and exact in size") {
    GenSpec spec;
    spec.family = GenFamily::gnm;
    spec.n = 24;
    spec.m = 40;
    spec.seed = 12345;
    Graph a = generate(spec);  // construction rejects disconnected graphs
    Graph b = generate(spec);
    CHECK(a.edge_count() == 40);
    CHECK(a.write_edge_list() == b.write_edge_list());

    spec.seed = 54321;
    CHECK(a.write_edge_list() != generate(spec).write_edge_list());

    spec.m = spec.n - 2;
    CHECK_THROWS_AS((void)generate(spec), std::invalid_argument);
    spec.m = static_cast<long long>(spec.n) * (spec.n - 1) / 2 + 1;
    CHECK_THROWS_AS((void)generate(spec), std::invalid_argument);
    spec.m = 40;
    spec.n = 0;
    CHECK_THROWS_AS((void)generate(spec), std::invalid_argument);
}

TEST_CASE("family dispatch builds the advertised shapes") {
    GenSpec spec;
    spec.family = GenFamily::path;
    spec.n = 5;
    Graph path = generate(spec);
    CHECK(path.edge_count() == 4);
    CHECK(path.find_edge(0, 1) != kNoEdge);
    CHECK(path.find_edge(0, 2) == kNoEdge);

    spec.family = GenFamily::cycle;
    spec.n = 3;
    Graph cycle = generate(spec);
    CHECK(cycle.edge_count() == 3);
    for (Node v = 0; v < 3; ++v) CHECK(cycle.neighbors(v).size() == 2);
    spec.n = 2;
    CHECK_THROWS_AS((void)generate(spec), std::invalid_argument);

    spec.family = GenFamily::star;
    spec.n = 6;
    Graph star = generate(spec);
    CHECK(star.edge_count() == 5);
    CHECK(star.neighbors(0).size() == 5);

    spec.family = GenFamily::grid;
    spec.n = 3;  // side length
    Graph grid = generate(spec);
    CHECK(grid.node_count() == 9);
    CHECK(grid.edge_count() == 12);
    CHECK(grid.neighbors(0).size() == 2);  // corner
    CHECK(grid.neighbors(4).size() == 4);  // center

    spec.family = GenFamily::lot;
    spec.q = 2;
    CHECK(generate(spec).edge_count() == generate_lot(2).graph.edge_count());

    for (GenFamily f : {GenFamily::gnm, GenFamily::path, GenFamily::cycle, GenFamily::star,
                        GenFamily::grid, GenFamily::lot}) {
        CHECK(parse_family(family_name(f)) == f);
    }
    CHECK_THROWS_AS((void)parse_family("einstein"), std::invalid_argument);
}

TEST_CASE("chain enumerator reports the symmetric singleton pair") {
    Graph g = Graph::parse("2 1\n0 1\n");
    Configuration cfg = testutil::make_config(g, 1);
    testutil::rebuild_decomposition(cfg);
    std::vector<std::vector<Node>> chains = enumerate_chains(cfg, 3);
    REQUIRE(chains.size() == 2);
    CHECK(chains[0] == std::vector<Node>{0, 1});
    CHECK(chains[1] == std::vector<Node>{1, 0});

    cfg.forest.link(0, 1, 0);
    testutil::rebuild_decomposition(cfg);
    CHECK(enumerate_chains(cfg, 3).empty());
}

TEST_CASE("every enumerated sequence passes the chain validator") {
    std::mt19937_64 rng(31337);
    int seen = 0;
    for (int round = 0; round < 30; ++round) {
        Node n = 5 + static_cast<Node>(rand_below(rng, 6));
        long long max_extra = static_cast<long long>(n) * (n - 1) / 2 - (n - 1);
        long long m = n - 1 + static_cast<long long>(rand_below(
                                  rng, static_cast<std::uint64_t>(std::min<long long>(max_extra, 8) + 1)));
        Graph g = gnm_graph(n, m, rng());
        Configuration cfg = testutil::make_config(g, 1 + static_cast<int>(rand_below(rng, 2)));
        testutil::random_valid_forest(cfg, rng, 2 + static_cast<int>(rand_below(rng, 3)));
        testutil::rebuild_decomposition(cfg);
        for (const auto& seq : enumerate_chains(cfg, 4)) {
            ChainCheck chk = is_augmenting_chain(cfg, seq);
            CAPTURE(chk.reason);
            CHECK(chk.ok);
            ++seen;
        }
    }
    CHECK(seen > 50);
}

TEST_CASE("bounded uniform sampling is exact and deterministic") {
    std::mt19937_64 a(2024), b(2024);
    for (int i = 0; i < 200; ++i) CHECK(rand_below(a, 1000) == rand_below(b, 1000));

    std::mt19937_64 rng(7);
    CHECK(rand_below(rng, 0) == 0);
    CHECK(rand_below(rng, 1) == 0);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 200; ++i) {
        std::uint64_t v = rand_below(rng, 7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}
