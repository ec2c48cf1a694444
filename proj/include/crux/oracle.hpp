#pragma once

#include "crux/hierarchy.hpp"
#include "crux/netmap.hpp"
#include "crux/replication.hpp"
#include "crux/ringplan.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace crux::oracle {

// Brute-force reference checks. These deliberately re-derive everything by
// direct scans and share nothing with the planner beyond NetworkMap reads;
// they may be asymptotically naive.

struct Violation {
    std::string witness;
    double expected = 0.0;
    double actual = 0.0;
};

struct OracleReport {
    long checked = 0;
    std::vector<Violation> violations;
    double max_observed_ratio = 0.0;

    bool pass() const { return violations.empty(); }
    nlohmann::json to_json() const;
};

inline constexpr int kMaxOracleNodes = 512;  // cost guard for the O(n^2)..O(n^3) scans

// { v : every node strictly closer to u has level <= level(v) }, by direct
// predicate scan. Returns node indices in ascending index order.
std::vector<int> oracle_bunch(const NetworkMap& map, const LevelAssignment& la, int u);

// For every pair, the cheapest common-landmark detour must stay within
// (2k-1) * dist(u,v).
OracleReport oracle_stretch(const NetworkMap& map, const std::vector<Bunch>& bunches, int k);

// Exhaustive nonempty write/read target intersection over all ordered pairs
// for one plan/policy combination.
OracleReport oracle_meet(const NetworkMap& map, const InstancePlan& plan,
                         const std::vector<Bunch>& bunches, const LevelAssignment& la,
                         ReplicationPolicy policy);

}  // namespace crux::oracle
