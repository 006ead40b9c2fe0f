#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "mdst/chains.hpp"

namespace mdst {

// Exhaustive minimum-degree result: the optimal spanning-tree max degree and
// one witness tree achieving it.
struct OracleResult {
    int delta_star = 0;
    std::vector<EdgeId> witness_tree;  // ascending edge ids
    long long trees_examined = 0;
};

// Exact minimum over all spanning trees of the maximum degree, by recursive
// edge include/exclude with connectivity and degree pruning. Guarded to
// n <= max_nodes (default 12); raising the guard is the caller's informed
// choice for structured instances.
OracleResult brute_force_mdst(const Graph& graph, Node max_nodes = 12);

struct BdstOracleResult {
    bool feasible = false;
    std::vector<EdgeId> witness_tree;  // ascending edge ids when feasible
};

// Exact decision: does a spanning tree with deg(u) <= bounds[u] for all u
// exist? Same search as brute_force_mdst with per-node caps.
BdstOracleResult brute_force_bdst(const Graph& graph, std::span<const int> bounds,
                                  Node max_nodes = 12);

// Every augmenting chain of length at most max_len, as flat sequences
// (w_0, z_1, ..., w_{l-1}, z_l), in deterministic search order. Exhaustive:
// prefixes are grown only while they stay valid alternating chains and each
// candidate is confirmed by the full validator. Guarded to n <= 30 and
// max_len <= 8.
std::vector<std::vector<Node>> enumerate_chains(const Configuration& config, int max_len);

enum class GenFamily { gnm, path, cycle, star, grid, lot };

// Family name for CLI plumbing; throws on unknown names.
GenFamily parse_family(std::string_view name);
std::string_view family_name(GenFamily family);

// Generator parameters: n is the node count (for grid, the side length; for
// lot, ignored), m and seed apply to gnm, q to lot.
struct GenSpec {
    GenFamily family = GenFamily::path;
    Node n = 1;
    long long m = 0;
    std::uint64_t seed = 0;
    int q = 0;
};

// Deterministic instance generator. gnm draws a uniform random labeled tree
// (decoded from a random Prufer sequence) plus m-(n-1) distinct random extra
// edges, so the result is always connected.
Graph generate(const GenSpec& spec);

// Layered-overlap-tree family: graph_q is built recursively from q copies of
// graph_{q-1} joined through a fresh apex, carrying two distinguished
// spanning trees: bad_tree with max degree exactly q and good_tree with max
// degree at most 3.
struct LotInstance {
    Graph graph;
    std::vector<Edge> bad_tree;
    std::vector<Edge> good_tree;
};

LotInstance generate_lot(int q);

// Uniform value in [0, k); unbiased rejection sampling on top of the engine.
std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t k);

}  // namespace mdst
