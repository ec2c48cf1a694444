#pragma once

#include "crux/hierarchy.hpp"
#include "crux/netmap.hpp"

#include <compare>
#include <vector>

namespace crux {

enum class RingMode { inclusive, exclusive };

RingMode parse_ring_mode(const std::string& name);
const char* to_string(RingMode mode);

// Ring i around a landmark has radius r_min * 2^i. A node at distance d
// falls in ring 0 when d <= r_min, else in ring ceil(log2(d / r_min));
// the boundary d == r_min * 2^i belongs to ring i.
int ring_index(double d_ms, double r_min_ms);

double ring_radius(double r_min_ms, int ring);

// One underlying-service instance: a landmark plus a ring index, unique
// network-wide.
struct InstanceId {
    int landmark = -1;
    int ring = -1;
    auto operator<=>(const InstanceId&) const = default;
};

struct Instance {
    InstanceId id;
    double radius_ms = 0.0;
    std::vector<int> members;  // sorted by node id; consistent-hash order

    bool contains(int u) const;
};

// The global instance plan: one instance per non-empty ring of every
// landmark's cluster. Inclusive rings accumulate inner members; exclusive
// rings partition the cluster by exact ring index.
struct InstancePlan {
    RingMode mode = RingMode::inclusive;
    double r_min_ms = 1.0;
    std::vector<Instance> instances;                  // sorted by (landmark, ring)
    std::vector<std::vector<int>> memberships_by_node;  // node -> instance indices

    const Instance* find(InstanceId id) const;
    const Instance& at(InstanceId id) const;  // throws on unknown instance

    // [first, last) range of instances belonging to one landmark.
    std::pair<int, int> landmark_range(int landmark) const;
};

InstancePlan build_instances(const NetworkMap& map, const std::vector<Cluster>& clusters,
                             double r_min_ms, RingMode mode);

// All instances containing u; at most |bunch(u)| * (log2(R) + 1) of them.
std::vector<InstanceId> memberships(const InstancePlan& plan, int u);

// Actual max pairwise member distance; at most 2 * radius by the triangle
// inequality through the landmark.
double instance_diameter(const InstancePlan& plan, InstanceId id, const NetworkMap& map);

}  // namespace crux
