#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

using namespace mdst;
using testutil::make_config;
using testutil::rebuild_decomposition;

namespace {

// Singleton {0} plus path 1-2 with bound 1 and one crossing edge (0,1).
Configuration three_node_config(const Graph& g) {
    Configuration cfg = make_config(g, 1);
    cfg.forest.link(1, 2, 0);
    rebuild_decomposition(cfg);
    return cfg;
}

// The six-node instance with one length-2 chain through a block (see the
// chains tests): components {0}, path 3-1-2-4, {5}.
Graph chain2_graph() { return Graph::parse("6 5\n1 3\n1 2\n2 4\n0 2\n3 5"); }

Configuration chain2_config(const Graph& g) {
    Configuration cfg = make_config(g, 1);
    cfg.forest.link(1, 3, 0);
    cfg.forest.link(1, 2, 1);
    cfg.forest.link(2, 4, 2);
    rebuild_decomposition(cfg);
    return cfg;
}

GenSpec random_spec(std::mt19937_64& rng, Node lo, Node hi, long long extra_cap) {
    GenSpec spec;
    spec.family = GenFamily::gnm;
    spec.n = lo + static_cast<Node>(rand_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
    long long max_extra = static_cast<long long>(spec.n) * (spec.n - 1) / 2 - (spec.n - 1);
    spec.m = spec.n - 1 + static_cast<long long>(rand_below(
                              rng, static_cast<std::uint64_t>(std::min(max_extra, extra_cap)) + 1));
    spec.seed = rng();
    return spec;
}

}  // namespace

TEST_CASE("snapshot refresh roots components at attach or free nodes") {
    Graph g = Graph::parse("3 2\n1 2\n0 1");
    Configuration cfg = three_node_config(g);
    CHECK(cfg.forest.snapshot_fresh());
    CHECK(cfg.forest.root_of(0) == 0);
    CHECK(cfg.forest.root_of(1) == 1);
    CHECK(cfg.forest.root_of(2) == 1);

    // With a theta decomposition, a big component is rooted at a free node.
    Graph path = Graph::parse("9 8\n0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8");
    Configuration big = make_config(path, 2);
    for (EdgeId id = 0; id < 8; ++id) big.forest.link(path.edge(id).u, path.edge(id).v, id);
    rebuild_decomposition(big, 4);
    Node root = big.forest.root_of(0);
    CHECK(big.decomposition.is_free(root));
}

TEST_CASE("layer construction rejects bad inputs") {
    Graph g = Graph::parse("3 2\n1 2\n0 1");
    Configuration cfg = three_node_config(g);
    CHECK_THROWS_AS(build_layers(cfg, 0), std::invalid_argument);
    cfg.forest.link(0, 1, 1);
    CHECK_THROWS_AS(build_layers(cfg, 2), std::logic_error);  // stale snapshot
}

TEST_CASE("at unit length the layer set is just the special molecules") {
    Graph g = Graph::parse("3 2\n1 2\n0 1");
    Configuration cfg = three_node_config(g);
    LayerSet ls = build_layers(cfg, 1);
    CHECK(ls.ell == 1);
    CHECK(ls.special_roots == std::vector<MoleculeId>{0, 1});
    CHECK(ls.layers.size() == 1);
    for (Node v = 0; v < 3; ++v) CHECK(ls.layer_of[static_cast<std::size_t>(v)] == -1);
}

TEST_CASE("layer construction trace on the three-node instance") {
    Graph g = Graph::parse("3 2\n1 2\n0 1");
    Configuration cfg = three_node_config(g);
    std::ostringstream trace;
    LayerSet ls = build_layers(cfg, 2, nullptr, &trace);
    // Both admissions happen, then both candidates fall to the scanned prune.
    CHECK(trace.str() ==
          "SCAN 0 M0\n"
          "ADMIT 1 1\n"
          "SCAN 0 M1\n"
          "ADMIT 1 0\n"
          "PRUNE 1 1 scanned\n"
          "PRUNE 1 0 scanned\n");
    CHECK(ls.layers[1].empty());
}

TEST_CASE("unit-length search joins the two singletons") {
    Graph g = Graph::parse("2 1\n0 1");
    Configuration cfg = make_config(g, 1);
    rebuild_decomposition(cfg);
    std::ostringstream trace;
    RaiseStats stats = raise_configuration(cfg, 1, nullptr, &trace);
    CHECK(stats.chains_applied == 1);
    CHECK(cfg.forest.component_count() == 1);
    CHECK(trace.str() ==
          "SCAN 0 M0\n"
          "CHAIN 1 0 1 | deleted: | inserted: 0-1\n");
}

TEST_CASE("unit-length search trace on the six-node instance") {
    Graph g = chain2_graph();
    Configuration cfg = chain2_config(g);
    std::ostringstream trace;
    std::vector<ApplyRecord> records;
    RaiseStats stats = raise_configuration(cfg, 1, nullptr, &trace, &records);
    CHECK(stats.chains_applied == 1);
    CHECK(trace.str() ==
          "SCAN 0 M0\n"
          "SCAN 0 M1\n"
          "CHAIN 1 3 5 | deleted: | inserted: 3-5\n");
    REQUIRE(records.size() == 1);
    CHECK(records[0].sequence == std::vector<Node>{3, 5});
    CHECK(cfg.forest.component_count() == 2);

    // No unit chain is left, and the follow-up pass at length 2 prunes the
    // only candidate: node 2 is free now and roots nothing.
    CHECK(enumerate_chains(cfg, 1).empty());
    std::ostringstream trace2;
    RaiseStats stats2 = raise_configuration(cfg, 2, nullptr, &trace2);
    CHECK(stats2.chains_applied == 0);
    CHECK(trace2.str() ==
          "SCAN 0 M0\n"
          "ADMIT 1 2\n"
          "PRUNE 1 2 status\n");
}

TEST_CASE("search and application leave no shorter chain behind") {
    std::mt19937_64 rng(31337);
    for (int round = 0; round < 30; ++round) {
        GenSpec spec = random_spec(rng, 8, 24, 20);
        Graph g = generate(spec);
        Configuration cfg = make_config(g, 1 + static_cast<int>(rand_below(rng, 2)));
        testutil::random_valid_forest(cfg, rng, 3 + static_cast<int>(rand_below(rng, 4)));
        bool use_theta = rand_below(rng, 2) == 0;
        rebuild_decomposition(cfg, use_theta ? 2 + static_cast<int>(rand_below(rng, 3)) : 0);

        const int max_len = 1 + static_cast<int>(rand_below(rng, 4));
        for (int ell = 1; ell <= max_len; ++ell) {
            std::vector<ApplyRecord> records;
            raise_configuration(cfg, ell, nullptr, nullptr, &records);
            for (const ApplyRecord& rec : records) {
                CHECK(static_cast<int>(rec.sequence.size()) == 2 * ell);
            }
            auto remaining = enumerate_chains(cfg, ell);
            CAPTURE(round);
            CAPTURE(ell);
            CHECK_MESSAGE(remaining.empty(), "a chain of length <= ell survived the raise");
        }
    }
}

TEST_CASE("every enumerated chain runs through the layers") {
    // After raising to an ell-configuration, build the layers for ell and
    // check that each length-ell chain found by the exhaustive enumerator has
    // its t-th inner node in layer t, that layers are disjoint, and that no
    // layered node sits inside an atom. Dense graphs at bound 1 with several
    // components are the recipe that actually leaves multi-hop chains behind.
    std::mt19937_64 rng(5150);
    int chains_seen = 0;
    for (int round = 0; round < 120; ++round) {
        GenSpec spec;
        spec.family = GenFamily::gnm;
        spec.n = 18 + static_cast<Node>(rand_below(rng, 13));
        long long max_extra = static_cast<long long>(spec.n) * (spec.n - 1) / 2 - (spec.n - 1);
        spec.m = spec.n - 1 +
                 std::min<long long>(max_extra, 25 + static_cast<long long>(rand_below(rng, 26)));
        spec.seed = rng();
        Graph g = generate(spec);
        Configuration cfg = make_config(g, 1);
        testutil::random_valid_forest(cfg, rng, 4 + static_cast<int>(rand_below(rng, 5)));
        bool use_theta = rand_below(rng, 2) == 0;
        rebuild_decomposition(cfg, use_theta ? 2 + static_cast<int>(rand_below(rng, 3)) : 0);

        for (int ell = 2; ell <= 3; ++ell) {
            raise_configuration(cfg, ell - 1);
            refresh_snapshot(cfg);
            LayerSet ls = build_layers(cfg, ell);

            std::set<Node> seen;
            for (int t = 1; t < ell; ++t) {
                for (Node v : ls.layers[static_cast<std::size_t>(t)]) {
                    CHECK(seen.insert(v).second);
                    CHECK(ls.layer_of[static_cast<std::size_t>(v)] == t);
                    CHECK(cfg.decomposition.atom_of[static_cast<std::size_t>(v)] == kNoAtom);
                }
            }

            for (const auto& seq : enumerate_chains(cfg, ell)) {
                if (static_cast<int>(seq.size()) != 2 * ell) continue;
                // Sequence is (w_0, z_1, ..., z_ell); z_t sits at index 2t-1.
                for (int t = 1; t < ell; ++t) {
                    Node zt = seq[static_cast<std::size_t>(2 * t - 1)];
                    CAPTURE(round);
                    CAPTURE(ell);
                    CAPTURE(t);
                    CHECK(ls.layer_of[static_cast<std::size_t>(zt)] == t);
                }
                ++chains_seen;
            }
        }
    }
    // The battery must hit real multi-hop chains to mean anything.
    CHECK(chains_seen >= 10);
}

TEST_CASE("applied chains validate against a shadow replay") {
    std::mt19937_64 rng(90210);
    int chains_checked = 0;
    for (int round = 0; round < 30 && chains_checked < 120; ++round) {
        GenSpec spec = random_spec(rng, 8, 22, 18);
        Graph g = generate(spec);
        Configuration cfg = make_config(g, 1 + static_cast<int>(rand_below(rng, 2)));
        testutil::random_valid_forest(cfg, rng, 4 + static_cast<int>(rand_below(rng, 4)));
        rebuild_decomposition(cfg);

        Configuration shadow = cfg;
        std::vector<ApplyRecord> records;
        for (int ell = 1; ell <= 3; ++ell) raise_configuration(cfg, ell, nullptr, nullptr, &records);

        std::string audit = testutil::check_apply_records(shadow, records);
        CHECK_MESSAGE(audit.empty(), audit);
        CHECK(shadow.forest.forest_edges() == cfg.forest.forest_edges());
        chains_checked += static_cast<int>(records.size());
    }
    CHECK(chains_checked >= 60);
}

TEST_CASE("repeated runs produce identical traces") {
    std::mt19937_64 seeder(777);
    for (int round = 0; round < 6; ++round) {
        GenSpec spec = random_spec(seeder, 10, 20, 16);
        std::uint64_t forest_seed = seeder();
        auto run = [&]() {
            Graph g = generate(spec);
            Configuration cfg = make_config(g, 2);
            std::mt19937_64 rng(forest_seed);
            testutil::random_valid_forest(cfg, rng, 4);
            rebuild_decomposition(cfg);
            std::ostringstream trace;
            for (int ell = 1; ell <= 3; ++ell) raise_configuration(cfg, ell, nullptr, &trace);
            return trace.str();
        };
        CHECK(run() == run());
    }
}

TEST_CASE("search charges the work counters") {
    Graph g = chain2_graph();
    Configuration cfg = chain2_config(g);
    WorkCounters wc;
    raise_configuration(cfg, 1, &wc);
    CHECK(wc.edge_scans > 0);
}

TEST_CASE("layer set and search length must match") {
    Graph g = Graph::parse("2 1\n0 1");
    Configuration cfg = make_config(g, 1);
    rebuild_decomposition(cfg);
    LayerSet ls = build_layers(cfg, 1);
    CHECK_THROWS_AS(find_chains_and_apply(cfg, 2, ls), std::invalid_argument);
}
