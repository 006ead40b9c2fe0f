#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

using namespace mdst;
using testutil::make_config;
using testutil::rebuild_decomposition;

namespace {

// Two singleton components joined by one graph edge, bound 1 everywhere.
Configuration two_singletons(const Graph& g) {
    Configuration cfg = make_config(g, 1);
    rebuild_decomposition(cfg);
    return cfg;
}

// A three-component instance carrying one valid length-2 chain
// (0, 2, 3, 5): special molecules {0}, {1,2,3,4} (path 3-1-2-4), {5}; nodes
// 1 and 2 sit above their bound, so the middle hop needs the block {1,3}.
Graph chain2_graph() {
    return Graph::parse("6 5\n1 3\n1 2\n2 4\n0 2\n3 5");
}

Configuration chain2_config(const Graph& g) {
    Configuration cfg = make_config(g, 1);
    cfg.forest.link(1, 3, 0);
    cfg.forest.link(1, 2, 1);
    cfg.forest.link(2, 4, 2);
    rebuild_decomposition(cfg);
    return cfg;
}

}  // namespace

TEST_CASE("alternating chain validation covers the base cases") {
    Graph g = Graph::parse("2 1\n0 1");
    Configuration cfg = two_singletons(g);

    std::vector<Node> just_w0{0};
    CHECK(is_alternating_chain(cfg, just_w0).ok);

    // A free node cannot start a chain: drop node 0's molecule.
    cfg.decomposition.remove_molecule(cfg.decomposition.molecule_of[0]);
    ChainCheck chk = is_alternating_chain(cfg, just_w0);
    CHECK_FALSE(chk.ok);
    CHECK_FALSE(chk.reason.empty());
}

TEST_CASE("alternating chain validation requires an atom start") {
    // Star with the center above bound: the center is covered but not in any
    // atom, so it cannot serve as w_0.
    Graph g = Graph::parse("5 4\n0 1\n0 2\n0 3\n0 4");
    Configuration cfg = make_config(g, 3);
    for (EdgeId id = 0; id < 4; ++id) cfg.forest.link(g.edge(id).u, g.edge(id).v, id);
    rebuild_decomposition(cfg);
    std::vector<Node> seq{0};
    CHECK_FALSE(is_alternating_chain(cfg, seq).ok);
    seq[0] = 1;
    CHECK(is_alternating_chain(cfg, seq).ok);
}

TEST_CASE("augmenting chain validation handles the singleton pair") {
    Graph g = Graph::parse("2 1\n0 1");
    Configuration cfg = two_singletons(g);
    std::vector<Node> seq{0, 1};
    CHECK(is_augmenting_chain(cfg, seq).ok);

    // Forest edges are not chain edges.
    cfg.forest.link(0, 1, 0);
    rebuild_decomposition(cfg);
    CHECK_FALSE(is_augmenting_chain(cfg, seq).ok);
}

TEST_CASE("a dirty free endpoint is rejected as the chain tail") {
    Graph g = Graph::parse("2 1\n0 1");
    Configuration cfg = two_singletons(g);
    cfg.decomposition.remove_molecule(cfg.decomposition.molecule_of[1]);
    std::vector<Node> seq{0, 1};
    CHECK(is_augmenting_chain(cfg, seq).ok);
    cfg.dirty[1] = 1;
    ChainCheck chk = is_augmenting_chain(cfg, seq);
    CHECK_FALSE(chk.ok);
    CHECK(chk.reason == "dirty");
}

TEST_CASE("a free endpoint above its bound is rejected as the chain tail") {
    Graph g = Graph::parse("4 4\n0 1\n1 2\n1 3\n2 3");
    Configuration cfg = make_config(g, 1);
    cfg.forest.link(1, 2, 1);
    cfg.forest.link(1, 3, 2);
    rebuild_decomposition(cfg);
    // Node 1 has degree 2 = bound + 1; make it free by dropping its molecule.
    cfg.decomposition.remove_molecule(cfg.decomposition.molecule_of[1]);
    std::vector<Node> seq{0, 1};
    ChainCheck chk = is_augmenting_chain(cfg, seq);
    CHECK_FALSE(chk.ok);
    CHECK(chk.reason == "tail-degree");
}

TEST_CASE("the length-2 block chain validates and rejects perturbations") {
    Graph g = chain2_graph();
    Configuration cfg = chain2_config(g);
    REQUIRE(cfg.decomposition.status[1] == NodeStatus::non_reducible);
    REQUIRE(cfg.decomposition.status[2] == NodeStatus::non_reducible);

    std::vector<Node> seq{0, 2, 3, 5};
    CHECK(is_augmenting_chain(cfg, seq).ok);

    // Tail landing inside the block {1, 3} is rejected.
    std::vector<Node> bad_tail{0, 2, 3, 1};
    CHECK_FALSE(is_augmenting_chain(cfg, bad_tail).ok);

    // w_1 must live in an atom: node 4 does, but it is outside the block of
    // z_1 = 2 (the subtree away from 2 through node 4 contains 4 only), and
    // there is no graph edge (2, 4) outside the forest anyway.
    std::vector<Node> bad_mid{0, 2, 1, 5};
    CHECK_FALSE(is_augmenting_chain(cfg, bad_mid).ok);
}

TEST_CASE("applying the singleton chain links the components") {
    Graph g = Graph::parse("2 1\n0 1");
    Configuration cfg = two_singletons(g);
    AugmentingChain chain = make_chain(std::vector<Node>{0, 1});
    ApplyRecord rec = apply_chain(cfg, chain);
    CHECK(cfg.forest.component_count() == 1);
    CHECK(cfg.forest.has_forest_edge(0));
    REQUIRE(rec.edits.size() == 1);
    CHECK(rec.edits[0].insert);
    CHECK(rec.dirtied.empty());
    CHECK(rec.removed_molecules.size() == 2);
    CHECK(chain_trace_line(rec) == "CHAIN 1 0 1 | deleted: | inserted: 0-1");
    // Both endpoint molecules are gone.
    CHECK(cfg.decomposition.is_free(0));
    CHECK(cfg.decomposition.is_free(1));
}

TEST_CASE("applying the length-2 chain rewires, dirties, and removes molecules") {
    Graph g = chain2_graph();
    Configuration cfg = chain2_config(g);
    int f_before = cfg.forest.component_count();
    REQUIRE(f_before == 3);

    AugmentingChain chain = make_chain(std::vector<Node>{0, 2, 3, 5});
    ApplyRecord rec = apply_chain(cfg, chain);

    CHECK(cfg.forest.component_count() == f_before - 1);
    CHECK(testutil::check_forest_valid(cfg.forest, cfg.bounds).empty());
    CHECK(chain_trace_line(rec) == "CHAIN 2 0 2 3 5 | deleted: 2-1 | inserted: 0-2 3-5");

    // y_1 = 1 was non-reducible, so it is now dirty, free, and at its bound.
    REQUIRE(rec.dirtied == std::vector<Node>{1});
    CHECK(cfg.is_dirty(1));
    CHECK(cfg.decomposition.is_free(1));
    CHECK(cfg.forest.degree(1) == cfg.bounds[1]);

    // All three touched molecules died; every node is free now.
    for (Node v = 0; v < g.node_count(); ++v) CHECK(cfg.decomposition.is_free(v));
}

TEST_CASE("chain application keeps previously valid chains valid") {
    // After one application, any surviving augmenting chain must have been an
    // augmenting chain before the application as well.
    std::mt19937_64 rng(771);
    int applications = 0;
    while (applications < 40) {
        GenSpec spec;
        spec.family = GenFamily::gnm;
        spec.n = 6 + static_cast<Node>(rand_below(rng, 11));
        long long max_extra = static_cast<long long>(spec.n) * (spec.n - 1) / 2 - (spec.n - 1);
        spec.m = spec.n - 1 + static_cast<long long>(rand_below(
                                  rng, static_cast<std::uint64_t>(std::min<long long>(max_extra, 14)) + 1));
        spec.seed = rng();
        Graph g = generate(spec);
        Configuration cfg = make_config(g, 1 + static_cast<int>(rand_below(rng, 2)));
        testutil::random_valid_forest(cfg, rng, 2 + static_cast<int>(rand_below(rng, 3)));
        rebuild_decomposition(cfg);

        auto before = enumerate_chains(cfg, 4);
        if (before.empty()) continue;
        std::set<std::vector<Node>> before_set(before.begin(), before.end());
        const auto& pick = before[static_cast<std::size_t>(rand_below(rng, before.size()))];

        apply_chain(cfg, make_chain(pick));
        refresh_snapshot(cfg);
        auto after = enumerate_chains(cfg, 4);
        for (const auto& seq : after) {
            CHECK_MESSAGE(before_set.count(seq) == 1, "new chain appeared after an application");
        }
        ++applications;
    }
}

TEST_CASE("pseudo-chain checking accepts genuine chains") {
    std::mt19937_64 rng(8181);
    int checked = 0;
    while (checked < 60) {
        GenSpec spec;
        spec.family = GenFamily::gnm;
        spec.n = 6 + static_cast<Node>(rand_below(rng, 9));
        spec.m = spec.n + 4;
        spec.seed = rng();
        Graph g = generate(spec);
        Configuration cfg = make_config(g, 1 + static_cast<int>(rand_below(rng, 2)));
        testutil::random_valid_forest(cfg, rng, 2 + static_cast<int>(rand_below(rng, 2)));
        rebuild_decomposition(cfg);
        for (const auto& seq : enumerate_chains(cfg, 4)) {
            ChainCheck chk = is_pseudo_chain(cfg, seq);
            CHECK_MESSAGE(chk.ok, chk.reason);
            ++checked;
        }
    }
}

TEST_CASE("normalization returns genuine chains unchanged") {
    Graph g = chain2_graph();
    Configuration cfg = chain2_config(g);
    std::vector<Node> seq{0, 2, 3, 5};
    AugmentingChain out = normalize_pseudo_chain(cfg, seq);
    CHECK(out.sequence() == seq);
}

TEST_CASE("normalization rejects non-pseudo input") {
    Graph g = Graph::parse("2 1\n0 1");
    Configuration cfg = two_singletons(g);
    cfg.forest.link(0, 1, 0);
    rebuild_decomposition(cfg);
    std::vector<Node> seq{0, 1};  // forest edge, so not even a pseudo-chain
    CHECK_THROWS_AS(normalize_pseudo_chain(cfg, seq), std::invalid_argument);
}

TEST_CASE("glued chain pairs normalize into genuine chains") {
    // Concatenating the prefix of one valid chain with the suffix of another
    // through a shared middle node yields a pseudo-chain; normalization must
    // recover a genuine chain that is no longer than the splice.
    std::mt19937_64 rng(4242);
    int glued_checked = 0;
    int rounds = 0;
    while (glued_checked < 120 && rounds < 400) {
        ++rounds;
        GenSpec spec;
        spec.family = GenFamily::gnm;
        spec.n = 6 + static_cast<Node>(rand_below(rng, 11));
        long long max_extra = static_cast<long long>(spec.n) * (spec.n - 1) / 2 - (spec.n - 1);
        spec.m = spec.n - 1 + static_cast<long long>(rand_below(
                                  rng, static_cast<std::uint64_t>(std::min<long long>(max_extra, 16)) + 1));
        spec.seed = rng();
        Graph g = generate(spec);
        Configuration cfg = make_config(g, 1 + static_cast<int>(rand_below(rng, 2)));
        testutil::random_valid_forest(cfg, rng, 2 + static_cast<int>(rand_below(rng, 3)));
        rebuild_decomposition(cfg);

        auto chains = enumerate_chains(cfg, 4);
        if (chains.size() < 2) continue;
        std::size_t limit = std::min<std::size_t>(chains.size(), 24);
        for (std::size_t a = 0; a < limit; ++a) {
            for (std::size_t b = 0; b < limit; ++b) {
                if (a == b) continue;
                const auto& s = chains[a];
                const auto& t = chains[b];
                for (std::size_t i = 1; i < s.size(); i += 2) {
                    for (std::size_t j = 1; j < t.size(); j += 2) {
                        if (s[i] != t[j]) continue;
                        std::vector<Node> glued(s.begin(), s.begin() + static_cast<long>(i) + 1);
                        glued.insert(glued.end(), t.begin() + static_cast<long>(j) + 1, t.end());
                        if (glued.size() < 2 || glued.size() % 2 != 0) continue;
                        if (!is_pseudo_chain(cfg, glued).ok) continue;
                        AugmentingChain out = normalize_pseudo_chain(cfg, glued);
                        std::vector<Node> out_seq = out.sequence();
                        ChainCheck chk = is_augmenting_chain(cfg, out_seq);
                        CHECK_MESSAGE(chk.ok, chk.reason);
                        CHECK(out_seq.size() <= glued.size());
                        ++glued_checked;
                    }
                }
            }
        }
    }
    // The battery must actually exercise splices.
    CHECK(glued_checked >= 60);
}

TEST_CASE("chain shells round-trip their flat sequences") {
    std::vector<Node> seq{0, 2, 3, 5};
    AugmentingChain chain = make_chain(seq);
    CHECK(chain.w == std::vector<Node>{0, 3});
    CHECK(chain.z == std::vector<Node>{2, 5});
    CHECK(chain.length() == 2);
    CHECK(chain.sequence() == seq);
    CHECK_THROWS_AS(make_chain(std::vector<Node>{0, 1, 2}), std::invalid_argument);
}
