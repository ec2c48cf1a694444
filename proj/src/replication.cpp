#include "crux/replication.hpp"

#include "crux/errors.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace crux {

ReplicationPolicy parse_policy(const std::string& name) {
    if (name == "symmetric") return ReplicationPolicy::symmetric;
    if (name == "asymmetric") return ReplicationPolicy::asymmetric;
    throw parse_error("unknown replication policy '" + name + "'");
}

const char* to_string(ReplicationPolicy policy) {
    return policy == ReplicationPolicy::symmetric ? "symmetric" : "asymmetric";
}

namespace {

void check_origin(const NetworkMap& map, const Bunch& bunch, int u) {
    if (u < 0 || u >= map.size()) throw std::invalid_argument("unknown node index " + std::to_string(u));
    if (bunch.owner != u) throw std::invalid_argument("bunch does not belong to the origin node");
}

// Own ring and all larger materialized rings around one landmark.
void append_targets_around(const NetworkMap& map, const InstancePlan& plan, int u, int landmark,
                           std::vector<InstanceId>& out) {
    const int own = ring_index(map(u, landmark), plan.r_min_ms);
    auto [lo, hi] = plan.landmark_range(landmark);
    for (int i = lo; i < hi; ++i) {
        const Instance& inst = plan.instances[static_cast<std::size_t>(i)];
        if (inst.id.ring >= own) out.push_back(inst.id);
    }
}

}  // namespace

TargetSet read_targets(const NetworkMap& map, const InstancePlan& plan, const Bunch& bunch,
                       int u) {
    check_origin(map, bunch, u);
    TargetSet ts;
    ts.origin = u;
    ts.request = RequestClass::read;
    for (const auto& e : bunch.entries) append_targets_around(map, plan, u, e.landmark, ts.targets);
    std::sort(ts.targets.begin(), ts.targets.end());
    return ts;
}

TargetSet write_targets(const NetworkMap& map, const InstancePlan& plan, const Bunch& bunch,
                        const LevelAssignment& la, int u, ReplicationPolicy policy) {
    if (policy == ReplicationPolicy::symmetric) {
        TargetSet ts = read_targets(map, plan, bunch, u);
        ts.request = RequestClass::write;
        return ts;
    }
    check_origin(map, bunch, u);

    std::vector<int> landmarks = closest_landmark_per_level(bunch, la);
    std::sort(landmarks.begin(), landmarks.end());
    landmarks.erase(std::unique(landmarks.begin(), landmarks.end()), landmarks.end());

    TargetSet ts;
    ts.origin = u;
    ts.request = RequestClass::write;
    for (int landmark : landmarks) append_targets_around(map, plan, u, landmark, ts.targets);
    std::sort(ts.targets.begin(), ts.targets.end());
    return ts;
}

std::vector<InstanceId> meet_instances(const NetworkMap& map, const InstancePlan& plan,
                                       const TargetSet& writes, const TargetSet& reads) {
    (void)plan;
    std::vector<InstanceId> shared;
    std::set_intersection(writes.targets.begin(), writes.targets.end(), reads.targets.begin(),
                          reads.targets.end(), std::back_inserter(shared));
    if (shared.empty())
        throw internal_error("no common instance between write targets of node " +
                             std::to_string(writes.origin) + " and read targets of node " +
                             std::to_string(reads.origin));
    // Smallest radius first; radius is monotone in ring index.
    std::sort(shared.begin(), shared.end(), [&](InstanceId a, InstanceId b) {
        if (a.ring != b.ring) return a.ring < b.ring;
        return map.id_less(a.landmark, b.landmark);
    });
    return shared;
}

Detour best_detour(const NetworkMap& map, const std::vector<Bunch>& bunches, int u, int v) {
    const auto& bu = bunches[static_cast<std::size_t>(u)];
    const auto& bv = bunches[static_cast<std::size_t>(v)];

    std::vector<char> in_bv(static_cast<std::size_t>(map.size()), 0);
    for (const auto& e : bv.entries) in_bv[static_cast<std::size_t>(e.landmark)] = 1;

    Detour best;
    best.detour_ms = std::numeric_limits<double>::infinity();
    for (const auto& e : bu.entries) {
        if (!in_bv[static_cast<std::size_t>(e.landmark)]) continue;
        const double detour = map(u, e.landmark) + map(v, e.landmark);
        if (detour < best.detour_ms ||
            (detour == best.detour_ms && best.landmark >= 0 && map.id_less(e.landmark, best.landmark))) {
            best.landmark = e.landmark;
            best.detour_ms = detour;
        }
    }
    if (best.landmark < 0)
        throw internal_error("no shared landmark between bunches of nodes " + std::to_string(u) +
                             " and " + std::to_string(v));
    return best;
}

}  // namespace crux
