#pragma once

#include "crux/hierarchy.hpp"
#include "crux/netmap.hpp"
#include "crux/ringplan.hpp"

#include <string>
#include <vector>

namespace crux {

// read/write hybrid requests route as writes (superset semantics).
enum class RequestClass { read, write };

enum class ReplicationPolicy { symmetric, asymmetric };

ReplicationPolicy parse_policy(const std::string& name);
const char* to_string(ReplicationPolicy policy);

// The exact set of instances one request from `origin` is replicated to.
// Under inclusive rings every target contains the origin, so instances only
// ever serve requests originating from their own members.
struct TargetSet {
    int origin = -1;
    RequestClass request = RequestClass::read;
    std::vector<InstanceId> targets;  // sorted by (landmark, ring)
};

// Own ring and all larger materialized rings, around every landmark in the
// origin's bunch.
TargetSet read_targets(const NetworkMap& map, const InstancePlan& plan, const Bunch& bunch,
                       int u);

// symmetric: identical to read_targets. asymmetric: the same own-ring-and-
// larger rule but only around the closest landmark per level, cutting write
// fan-out to at most k * (log2(R) + 1) instances.
TargetSet write_targets(const NetworkMap& map, const InstancePlan& plan, const Bunch& bunch,
                        const LevelAssignment& la, int u, ReplicationPolicy policy);

// Shared instances of a write/read target pair, smallest ring radius first
// (ties by landmark id). Guaranteed nonempty by construction; an empty
// intersection throws internal_error.
std::vector<InstanceId> meet_instances(const NetworkMap& map, const InstancePlan& plan,
                                       const TargetSet& writes, const TargetSet& reads);

struct Detour {
    int landmark = -1;
    double detour_ms = 0.0;
};

// argmin over shared bunch landmarks of dist(u,L) + dist(v,L); at most
// (2k-1) * dist(u,v) for symmetric bunches.
Detour best_detour(const NetworkMap& map, const std::vector<Bunch>& bunches, int u, int v);

}  // namespace crux
