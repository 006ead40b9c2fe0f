#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mdst/chain_search.hpp"

namespace mdst {

enum class SolveStatus { tree_found, infeasible_certified };

// Per-round record of the blocking stage: component count entering the
// round, the round's horizon and molecule size cap, and the number of chains
// applied at each length 1..H.
struct RoundStats {
    int f = 0;
    int H = 0;
    int theta = 0;
    std::vector<int> chains_per_ell;

    int total_chains() const;
};

struct SolveOptions {
    // Horizon and molecule cap per blocking round: H = theta = ceil(growth * n / f).
    int growth = 20;
    // Feasible-instance progress floor per completed round with f >= 20:
    // chains applied >= f^3 / (progress_denominator * n^2).
    long long progress_denominator = 100000;
    // When set, a completed blocking round that misses the progress floor
    // throws: on a feasible instance that is a bug, not a data condition.
    bool assume_feasible = false;
    // When nonzero, the blocking stage aborts once the total work counter
    // exceeds this and the run falls through to plain local search, which
    // always terminates. Reported via SolveResult::work_budget_hit.
    unsigned long long work_budget = 0;
    std::ostream* trace = nullptr;
};

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible_certified;
    std::vector<EdgeId> tree;  // ascending edge ids; n-1 entries when found
    int max_degree = 0;
    std::string algo;
    std::vector<RoundStats> rounds;
    long long fr_iterations = 0;
    bool work_budget_hit = false;
    int auto_bound = -1;  // smallest uniform bound that produced a tree (auto driver)
    WorkCounters counters;
    double wall_ms = 0.0;
};

// One local-search step: build the trivial decomposition, find a graph edge
// whose endpoints lie in atoms of two different components, reduce both
// endpoint degrees, and insert the edge. Returns false (forest untouched)
// when no such edge exists, which certifies that no spanning tree satisfies
// the bounds everywhere.
bool fr_iteration(RootedForest& forest, std::span<const int> bounds, WorkCounters* wc = nullptr);

// Plain local search from the empty forest until spanning or stuck.
SolveResult solve_fr(const Graph& graph, std::vector<int> bounds, const SolveOptions& options = {});

// Two-stage solver: while the component count is at least
// max(ceil(n^(3/4)), 20), run blocking rounds (theta-decomposition, then one
// raise_configuration pass per length 1..H); afterwards, or after a round
// that applies no chains, finish with local search.
SolveResult solve_fast(const Graph& graph, std::vector<int> bounds, const SolveOptions& options = {});

// Per-node bounded-degree driver; same code path as solve_fast.
SolveResult solve_bdst(const Graph& graph, std::vector<int> bounds, const SolveOptions& options = {});

// Unknown-optimum driver: binary search over uniform bounds k in [1, n-1],
// probing solve_bdst with b = k; returns the tree of the smallest k that
// succeeded, with max degree at most k+1. Counters accumulate over all
// probes; rounds and iteration counts are the winning probe's.
SolveResult solve_auto(const Graph& graph, const SolveOptions& options = {});

// Smallest integer at least n^(3/4); the blocking-stage component gate.
long long stage_gate(long long n);

}  // namespace mdst
