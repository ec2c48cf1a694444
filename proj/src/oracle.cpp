#include "crux/oracle.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace crux::oracle {

nlohmann::json OracleReport::to_json() const {
    nlohmann::json j;
    j["checked"] = checked;
    j["pass"] = pass();
    j["max_observed_ratio"] = max_observed_ratio;
    auto arr = nlohmann::json::array();
    for (const auto& v : violations)
        arr.push_back({{"witness", v.witness}, {"expected", v.expected}, {"actual", v.actual}});
    j["violations"] = std::move(arr);
    return j;
}

namespace {

void size_guard(const NetworkMap& map) {
    if (map.size() > kMaxOracleNodes)
        throw std::invalid_argument("oracle size guard exceeded (n > " +
                                    std::to_string(kMaxOracleNodes) + ")");
}

}  // namespace

std::vector<int> oracle_bunch(const NetworkMap& map, const LevelAssignment& la, int u) {
    size_guard(map);
    const int n = map.size();
    std::vector<int> result;
    for (int v = 0; v < n; ++v) {
        bool blocked = false;
        for (int w = 0; w < n && !blocked; ++w)
            if (map(u, w) < map(u, v) && la.level(w) > la.level(v)) blocked = true;
        if (!blocked) result.push_back(v);
    }
    return result;
}

OracleReport oracle_stretch(const NetworkMap& map, const std::vector<Bunch>& bunches, int k) {
    size_guard(map);
    const int n = map.size();
    const double bound_factor = 2.0 * k - 1.0;

    OracleReport rep;
    std::vector<char> shared(static_cast<std::size_t>(n), 0);
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            for (const auto& e : bunches[static_cast<std::size_t>(v)].entries)
                shared[static_cast<std::size_t>(e.landmark)] = 1;

            double best = std::numeric_limits<double>::infinity();
            for (const auto& e : bunches[static_cast<std::size_t>(u)].entries)
                if (shared[static_cast<std::size_t>(e.landmark)])
                    best = std::min(best, map(u, e.landmark) + map(v, e.landmark));

            for (const auto& e : bunches[static_cast<std::size_t>(v)].entries)
                shared[static_cast<std::size_t>(e.landmark)] = 0;

            ++rep.checked;
            const double bound = bound_factor * map(u, v);
            rep.max_observed_ratio = std::max(rep.max_observed_ratio, best / map(u, v));
            if (best > bound * (1.0 + 1e-12))
                rep.violations.push_back({map.id(u) + "," + map.id(v), bound, best});
        }
    }
    return rep;
}

OracleReport oracle_meet(const NetworkMap& map, const InstancePlan& plan,
                         const std::vector<Bunch>& bunches, const LevelAssignment& la,
                         ReplicationPolicy policy) {
    size_guard(map);
    const int n = map.size();

    OracleReport rep;
    std::vector<TargetSet> writes(static_cast<std::size_t>(n));
    std::vector<TargetSet> reads(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        writes[static_cast<std::size_t>(u)] =
            write_targets(map, plan, bunches[static_cast<std::size_t>(u)], la, u, policy);
        reads[static_cast<std::size_t>(u)] =
            read_targets(map, plan, bunches[static_cast<std::size_t>(u)], u);
    }

    for (int u = 0; u < n; ++u) {
        const auto& wt = writes[static_cast<std::size_t>(u)].targets;
        for (int v = 0; v < n; ++v) {
            const auto& rt = reads[static_cast<std::size_t>(v)].targets;
            // direct sorted-list intersection test
            bool meets = false;
            std::size_t i = 0, j = 0;
            while (i < wt.size() && j < rt.size()) {
                if (wt[i] == rt[j]) {
                    meets = true;
                    break;
                }
                if (wt[i] < rt[j])
                    ++i;
                else
                    ++j;
            }
            ++rep.checked;
            if (!meets)
                rep.violations.push_back({map.id(u) + "->" + map.id(v), 1.0, 0.0});
        }
    }
    return rep;
}

}  // namespace crux::oracle
