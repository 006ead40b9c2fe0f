#pragma once

#include <cstdint>

namespace mdst {

// Instrumentation counters shared by every algorithm layer. Each counter is a
// count of abstract work units, independent of wall-clock time, so runs are
// comparable across machines and build types.
struct WorkCounters {
    // Number of graph or forest edges examined (adjacency entries touched
    // during scans, candidate tests, and augmenting-edge searches).
    std::uint64_t edge_scans = 0;
    // Number of merge events replayed while reducing node degrees.
    std::uint64_t witness_replays = 0;
    // Number of pointer hops along ancestor structures (jump tables and
    // layered-ancestor chains).
    std::uint64_t ancestor_hops = 0;

    std::uint64_t total() const { return edge_scans + witness_replays + ancestor_hops; }

    WorkCounters operator-(const WorkCounters& other) const {
        WorkCounters out;
        out.edge_scans = edge_scans - other.edge_scans;
        out.witness_replays = witness_replays - other.witness_replays;
        out.ancestor_hops = ancestor_hops - other.ancestor_hops;
        return out;
    }
    WorkCounters& operator+=(const WorkCounters& other) {
        edge_scans += other.edge_scans;
        witness_replays += other.witness_replays;
        ancestor_hops += other.ancestor_hops;
        return *this;
    }
};

}  // namespace mdst
