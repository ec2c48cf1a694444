#pragma once

#include "crux/netmap.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace crux {

// Per-node landmark level drawn by geometric thinning: a node reaches level
// >= i with probability n^(-i/k), capped at k-1. Higher levels are
// exponentially rarer and serve wider areas.
struct LevelAssignment {
    int k = 1;
    std::uint64_t seed = 0;
    std::vector<int> levels;

    int n() const { return static_cast<int>(levels.size()); }
    int level(int u) const { return levels[static_cast<std::size_t>(u)]; }
    int top_level() const;  // highest occupied level
};

LevelAssignment assign_levels(const NetworkMap& map, int k, std::uint64_t seed);

// Expected bunch size k * n^(1/k) under the thinning above.
double expected_bunch_size(int n, int k);

struct BunchEntry {
    int landmark;
    double dist_ms;
    int level;
};

// The landmarks a node is aware of. v qualifies when no node strictly closer
// to the owner carries a higher level; equal-distance nodes never block each
// other. Entries ascend by distance, ties by node id.
struct Bunch {
    int owner = -1;
    std::vector<BunchEntry> entries;

    std::size_t size() const { return entries.size(); }
    bool contains(int v) const;
};

std::vector<Bunch> compute_bunches(const NetworkMap& map, const LevelAssignment& la);

// Inverse of the bunch relation: u is in v's cluster iff v is in u's bunch.
// Every node owns a cluster and is a member of it.
struct Cluster {
    int landmark = -1;
    std::vector<int> members;  // sorted by node id
};

std::vector<Cluster> compute_clusters(const NetworkMap& map, const std::vector<Bunch>& bunches);

// For each level i in [0, k-1], the nearest node with level >= i (always a
// member of the bunch); ties go to the smaller node id. Levels above the top
// occupied one fall back to the top occupied level's answer.
std::vector<int> closest_landmark_per_level(const Bunch& bunch, const LevelAssignment& la);

struct BunchStats {
    double mean = 0.0;
    std::size_t max = 0;
    std::map<std::size_t, int> histogram;  // size -> node count
};

BunchStats bunch_stats(const std::vector<Bunch>& bunches);

}  // namespace crux
