#include "crux/ringplan.hpp"

#include "crux/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crux {

RingMode parse_ring_mode(const std::string& name) {
    if (name == "inclusive") return RingMode::inclusive;
    if (name == "exclusive") return RingMode::exclusive;
    throw parse_error("unknown ring mode '" + name + "'");
}

const char* to_string(RingMode mode) {
    return mode == RingMode::inclusive ? "inclusive" : "exclusive";
}

int ring_index(double d_ms, double r_min_ms) {
    if (!(r_min_ms > 0.0)) throw std::invalid_argument("r_min must be positive");
    if (!(d_ms >= 0.0)) throw std::invalid_argument("distance must be nonnegative");
    // Doubling keeps the power-of-two boundaries exact; no log2 rounding.
    int ring = 0;
    double radius = r_min_ms;
    while (d_ms > radius) {
        radius *= 2.0;
        ++ring;
    }
    return ring;
}

double ring_radius(double r_min_ms, int ring) {
    return std::ldexp(r_min_ms, ring);
}

bool Instance::contains(int u) const {
    return std::find(members.begin(), members.end(), u) != members.end();
}

const Instance* InstancePlan::find(InstanceId id) const {
    auto it = std::lower_bound(instances.begin(), instances.end(), id,
                               [](const Instance& inst, InstanceId key) { return inst.id < key; });
    if (it == instances.end() || it->id != id) return nullptr;
    return &*it;
}

const Instance& InstancePlan::at(InstanceId id) const {
    const Instance* inst = find(id);
    if (!inst)
        throw std::invalid_argument("unknown instance (landmark " + std::to_string(id.landmark) +
                                    ", ring " + std::to_string(id.ring) + ")");
    return *inst;
}

std::pair<int, int> InstancePlan::landmark_range(int landmark) const {
    auto lo = std::lower_bound(instances.begin(), instances.end(), InstanceId{landmark, -1},
                               [](const Instance& inst, InstanceId key) { return inst.id < key; });
    auto hi = std::lower_bound(lo, instances.end(), InstanceId{landmark + 1, -1},
                               [](const Instance& inst, InstanceId key) { return inst.id < key; });
    return {static_cast<int>(lo - instances.begin()), static_cast<int>(hi - instances.begin())};
}

InstancePlan build_instances(const NetworkMap& map, const std::vector<Cluster>& clusters,
                             double r_min_ms, RingMode mode) {
    if (!(r_min_ms > 0.0)) throw std::invalid_argument("r_min must be positive");

    InstancePlan plan;
    plan.mode = mode;
    plan.r_min_ms = r_min_ms;
    plan.memberships_by_node.resize(static_cast<std::size_t>(map.size()));

    // Clusters arrive in landmark index order, rings ascend per landmark, so
    // the instance list comes out sorted by (landmark, ring).
    std::vector<int> own_ring;
    for (const auto& cluster : clusters) {
        own_ring.clear();
        int max_ring = 0;
        for (int u : cluster.members) {
            const int r = ring_index(map(cluster.landmark, u), r_min_ms);
            own_ring.push_back(r);
            max_ring = std::max(max_ring, r);
        }

        std::vector<int> present(static_cast<std::size_t>(max_ring) + 1, 0);
        for (int r : own_ring) present[static_cast<std::size_t>(r)] = 1;

        for (int ring = 0; ring <= max_ring; ++ring) {
            if (!present[static_cast<std::size_t>(ring)]) continue;  // only non-empty rings materialize
            Instance inst;
            inst.id = {cluster.landmark, ring};
            inst.radius_ms = ring_radius(r_min_ms, ring);
            for (std::size_t i = 0; i < cluster.members.size(); ++i) {
                const bool in = mode == RingMode::inclusive ? own_ring[i] <= ring
                                                            : own_ring[i] == ring;
                if (in) inst.members.push_back(cluster.members[i]);  // stays id-sorted
            }
            plan.instances.push_back(std::move(inst));
        }
    }

    for (std::size_t idx = 0; idx < plan.instances.size(); ++idx)
        for (int u : plan.instances[idx].members)
            plan.memberships_by_node[static_cast<std::size_t>(u)].push_back(static_cast<int>(idx));

    return plan;
}

std::vector<InstanceId> memberships(const InstancePlan& plan, int u) {
    if (u < 0 || static_cast<std::size_t>(u) >= plan.memberships_by_node.size())
        throw std::invalid_argument("unknown node index " + std::to_string(u));
    std::vector<InstanceId> out;
    for (int idx : plan.memberships_by_node[static_cast<std::size_t>(u)])
        out.push_back(plan.instances[static_cast<std::size_t>(idx)].id);
    return out;
}

double instance_diameter(const InstancePlan& plan, InstanceId id, const NetworkMap& map) {
    const Instance& inst = plan.at(id);
    double d = 0.0;
    for (std::size_t i = 0; i < inst.members.size(); ++i)
        for (std::size_t j = i + 1; j < inst.members.size(); ++j)
            d = std::max(d, map(inst.members[i], inst.members[j]));
    return d;
}

}  // namespace crux
