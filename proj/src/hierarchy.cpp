#include "crux/hierarchy.hpp"

#include "crux/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crux {

int LevelAssignment::top_level() const {
    int top = 0;
    for (int l : levels) top = std::max(top, l);
    return top;
}

LevelAssignment assign_levels(const NetworkMap& map, int k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("level constant k must be >= 1");
    const int n = map.size();
    const double survive = std::pow(static_cast<double>(n), -1.0 / k);

    LevelAssignment la;
    la.k = k;
    la.seed = seed;
    la.levels.resize(static_cast<std::size_t>(n), 0);

    std::mt19937_64 rng(seed);
    for (int u = 0; u < n; ++u) {
        int level = 0;
        while (level < k - 1 && uniform01(rng) < survive) ++level;
        la.levels[static_cast<std::size_t>(u)] = level;
    }
    return la;
}

double expected_bunch_size(int n, int k) {
    return k * std::pow(static_cast<double>(n), 1.0 / k);
}

bool Bunch::contains(int v) const {
    for (const auto& e : entries)
        if (e.landmark == v) return true;
    return false;
}

std::vector<Bunch> compute_bunches(const NetworkMap& map, const LevelAssignment& la) {
    const int n = map.size();
    if (la.n() != n) throw std::invalid_argument("level assignment does not cover the map");

    std::vector<Bunch> bunches(static_cast<std::size_t>(n));
    std::vector<int> order(static_cast<std::size_t>(n));

    for (int u = 0; u < n; ++u) {
        Bunch& b = bunches[static_cast<std::size_t>(u)];
        b.owner = u;

        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int c) {
            const double da = map(u, a), dc = map(u, c);
            if (da != dc) return da < dc;
            return map.id_less(a, c);
        });

        // Walk outward one distance group at a time; a node enters the bunch
        // when its level is no smaller than every strictly closer node's.
        int blocker = -1;
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            const double d = map(u, order[i]);
            int group_max = blocker;
            while (j < order.size() && map(u, order[j]) == d) {
                const int v = order[j];
                const int lv = la.level(v);
                if (lv >= blocker) b.entries.push_back({v, d, lv});
                group_max = std::max(group_max, lv);
                ++j;
            }
            blocker = group_max;
            i = j;
        }
    }
    return bunches;
}

std::vector<Cluster> compute_clusters(const NetworkMap& map, const std::vector<Bunch>& bunches) {
    const int n = map.size();
    if (static_cast<int>(bunches.size()) != n)
        throw std::invalid_argument("bunch set does not cover the map");

    std::vector<Cluster> clusters(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) clusters[static_cast<std::size_t>(v)].landmark = v;
    for (const auto& b : bunches)
        for (const auto& e : b.entries)
            clusters[static_cast<std::size_t>(e.landmark)].members.push_back(b.owner);
    for (auto& c : clusters)
        std::sort(c.members.begin(), c.members.end(),
                  [&](int a, int b) { return map.id_less(a, b); });
    return clusters;
}

std::vector<int> closest_landmark_per_level(const Bunch& bunch, const LevelAssignment& la) {
    std::vector<int> result(static_cast<std::size_t>(la.k), -1);
    // Entries ascend by (distance, id), so the first entry with level >= i is
    // the nearest such node with the smallest id on ties.
    for (const auto& e : bunch.entries) {
        const int cap = std::min(e.level, la.k - 1);
        for (int i = 0; i <= cap; ++i)
            if (result[static_cast<std::size_t>(i)] == -1) result[static_cast<std::size_t>(i)] = e.landmark;
    }
    // Levels above the top occupied one inherit the top occupied answer.
    for (int i = 1; i < la.k; ++i)
        if (result[static_cast<std::size_t>(i)] == -1)
            result[static_cast<std::size_t>(i)] = result[static_cast<std::size_t>(i - 1)];
    return result;
}

BunchStats bunch_stats(const std::vector<Bunch>& bunches) {
    BunchStats st;
    if (bunches.empty()) return st;
    double total = 0.0;
    for (const auto& b : bunches) {
        total += static_cast<double>(b.size());
        st.max = std::max(st.max, b.size());
        ++st.histogram[b.size()];
    }
    st.mean = total / static_cast<double>(bunches.size());
    return st;
}

}  // namespace crux
