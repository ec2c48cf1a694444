#include "crux/hierarchy.hpp"
#include "crux/netmap.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

using namespace crux;

TEST_SUITE_BEGIN("hierarchy");

namespace {

// u at distances 1 and 2 from a and b; levels u=0, a=1, b=0.
// Scanning outward from u, the level-1 node a blocks the farther b.
NetworkMap hand_map() {
    return NetworkMap({"u", "a", "b"}, {0, 1, 2, 1, 0, 1.5, 2, 1.5, 0});
}

LevelAssignment hand_levels() {
    LevelAssignment la;
    la.k = 2;
    la.seed = 0;
    la.levels = {0, 1, 0};
    return la;
}

}  // namespace

TEST_CASE("k=1 pins every node at level 0 and gives full awareness") {
    NetworkMap m = synth_map(3, 30, SynthModel::euclidean);
    LevelAssignment la = assign_levels(m, 1, 9);
    for (int u = 0; u < m.size(); ++u) CHECK(la.level(u) == 0);
    // nothing ever blocks, so every bunch is the whole network (no stretch)
    for (const Bunch& b : compute_bunches(m, la))
        CHECK(b.size() == static_cast<std::size_t>(m.size()));
    CHECK_THROWS_AS(assign_levels(m, 0, 9), std::invalid_argument);
}

TEST_CASE("expected bunch size is non-monotonic in k") {
    CHECK(expected_bunch_size(96, 2) > expected_bunch_size(96, 4));
    CHECK(expected_bunch_size(96, 6) > expected_bunch_size(96, 5));  // rises past the minimum
}

TEST_CASE("mean bunch size stays in the expectation band for k in 2..5") {
    for (int k : {2, 3, 4, 5}) {
        double total = 0.0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            NetworkMap m = synth_map(seed, 96, SynthModel::clustered_euclidean);
            total += bunch_stats(compute_bunches(m, assign_levels(m, k, seed))).mean;
        }
        const double mean = total / 20.0;
        const double expect = expected_bunch_size(96, k);
        CHECK(mean >= 0.3 * expect);
        CHECK(mean <= 1.5 * expect);
    }
}

TEST_CASE("levels stay in range and are deterministic per seed") {
    NetworkMap m = synth_map(5, 96, SynthModel::euclidean);
    LevelAssignment a = assign_levels(m, 5, 123);
    LevelAssignment b = assign_levels(m, 5, 123);
    CHECK(a.levels == b.levels);
    for (int u = 0; u < m.size(); ++u) {
        CHECK(a.level(u) >= 0);
        CHECK(a.level(u) <= 4);
    }
    bool differs = false;
    for (std::uint64_t s = 124; s < 134 && !differs; ++s)
        differs = assign_levels(m, 5, s).levels != a.levels;
    CHECK(differs);
}

TEST_CASE("level-1 frequency matches the thinning probability at n=96, k=2") {
    NetworkMap m = synth_map(8, 96, SynthModel::euclidean);
    const double p = std::pow(96.0, -0.5);
    CHECK(96.0 * p == doctest::Approx(9.798).epsilon(0.001));

    long promoted = 0;
    const long draws = 100 * 96;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        LevelAssignment la = assign_levels(m, 2, seed);
        for (int u = 0; u < 96; ++u) promoted += la.level(u) >= 1;
    }
    // 99% two-sided binomial band around p over all 9600 draws
    const double mean = draws * p;
    const double sd = std::sqrt(draws * p * (1 - p));
    CHECK(promoted > mean - 2.576 * sd);
    CHECK(promoted < mean + 2.576 * sd);
}

TEST_CASE("top-level frequency at n=96, k=5 matches n^(-4/5)") {
    const double p4 = std::pow(96.0, -4.0 / 5.0);
    CHECK(p4 == doctest::Approx(0.0259).epsilon(0.01));
    CHECK(96.0 * p4 == doctest::Approx(2.486).epsilon(0.01));

    NetworkMap m = synth_map(8, 96, SynthModel::euclidean);
    long at4 = 0;
    const long draws = 200 * 96;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        LevelAssignment la = assign_levels(m, 5, seed);
        for (int u = 0; u < 96; ++u) at4 += la.level(u) >= 4;
    }
    const double mean = draws * p4;
    const double sd = std::sqrt(draws * p4 * (1 - p4));
    CHECK(at4 > mean - 3.29 * sd);
    CHECK(at4 < mean + 3.29 * sd);
}

TEST_CASE("singleton network bunch is the node itself") {
    NetworkMap m = synth_map(1, 1, SynthModel::euclidean);
    auto bunches = compute_bunches(m, assign_levels(m, 3, 1));
    REQUIRE(bunches.size() == 1);
    CHECK(bunches[0].entries.size() == 1);
    CHECK(bunches[0].entries[0].landmark == 0);
    CHECK(bunches[0].entries[0].dist_ms == 0.0);
}

TEST_CASE("hand example: closer level-1 node blocks the farther level-0 node") {
    NetworkMap m = hand_map();
    auto bunches = compute_bunches(m, hand_levels());

    const Bunch& bu = bunches[0];
    CHECK(bu.entries.size() == 2);
    CHECK(bu.contains(0));
    CHECK(bu.contains(1));
    CHECK_FALSE(bu.contains(2));  // b blocked by closer level-1 a
    CHECK(bu.entries[0].landmark == 0);
    CHECK(bu.entries[0].dist_ms == 0.0);

    // a is a top-level node, so it appears in every bunch
    for (const auto& b : bunches) CHECK(b.contains(1));
}

TEST_CASE("clusters invert bunches exactly") {
    NetworkMap m = hand_map();
    auto bunches = compute_bunches(m, hand_levels());
    auto clusters = compute_clusters(m, bunches);

    // members are id-sorted: "a" < "b" < "u"
    CHECK(clusters[1].members == std::vector<int>{1, 2, 0});  // everyone sees a
    CHECK(clusters[2].members == std::vector<int>{2});        // b only sees itself

    for (int v = 0; v < m.size(); ++v) {
        std::set<int> members(clusters[v].members.begin(), clusters[v].members.end());
        for (int u = 0; u < m.size(); ++u)
            CHECK(members.count(u) == static_cast<std::size_t>(bunches[u].contains(v) ? 1 : 0));
    }
}

TEST_CASE("cluster properties on random maps") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        NetworkMap m = synth_map(seed, 40, SynthModel::euclidean);
        LevelAssignment la = assign_levels(m, 3, seed);
        auto bunches = compute_bunches(m, la);
        auto clusters = compute_clusters(m, bunches);
        const int top = la.top_level();

        for (int v = 0; v < m.size(); ++v) {
            // every node belongs to its own cluster
            CHECK(std::find(clusters[v].members.begin(), clusters[v].members.end(), v) !=
                  clusters[v].members.end());
            // top-occupied-level landmarks cover the whole network
            if (la.level(v) == top)
                CHECK(clusters[v].members.size() == static_cast<std::size_t>(m.size()));
            // exact inversion
            for (int u : clusters[v].members) CHECK(bunches[u].contains(v));
        }
    }
}

TEST_CASE("monotone-level property holds for every bunch entry") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        NetworkMap m = synth_map(seed, 32, SynthModel::uniform);
        LevelAssignment la = assign_levels(m, 4, seed + 100);
        auto bunches = compute_bunches(m, la);
        for (const auto& b : bunches) {
            for (const auto& e : b.entries) {
                for (int w = 0; w < m.size(); ++w)
                    if (m(b.owner, w) < e.dist_ms) CHECK(la.level(w) <= e.level);
            }
            // entries ascend by distance
            for (std::size_t i = 1; i < b.entries.size(); ++i)
                CHECK(b.entries[i - 1].dist_ms <= b.entries[i].dist_ms);
        }
    }
}

TEST_CASE("equal-distance nodes do not block each other") {
    // b and c both at distance 1 from u with levels 1 and 0; both qualify.
    NetworkMap m({"u", "b", "c"}, {0, 1, 1, 1, 0, 1, 1, 1, 0});
    LevelAssignment la;
    la.k = 2;
    la.seed = 0;
    la.levels = {0, 1, 0};
    auto bunches = compute_bunches(m, la);
    CHECK(bunches[0].entries.size() == 3);
    CHECK(bunches[0].contains(1));
    CHECK(bunches[0].contains(2));
}

TEST_CASE("closest landmark per level") {
    NetworkMap m = hand_map();
    LevelAssignment la = hand_levels();
    auto bunches = compute_bunches(m, la);

    auto lms = closest_landmark_per_level(bunches[0], la);
    REQUIRE(lms.size() == 2);
    CHECK(lms[0] == 0);  // u itself at distance 0
    CHECK(lms[1] == 1);  // the only level-1 node

    SUBCASE("the per-level answer is the true nearest and lives in the bunch") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            NetworkMap rm = synth_map(seed, 32, SynthModel::euclidean);
            LevelAssignment rla = assign_levels(rm, 4, seed);
            auto rb = compute_bunches(rm, rla);
            const int top = rla.top_level();
            for (int u = 0; u < rm.size(); ++u) {
                auto got = closest_landmark_per_level(rb[u], rla);
                for (int i = 0; i < rla.k; ++i) {
                    CHECK(rb[u].contains(got[i]));
                    const int want_level = std::min(i, top);
                    // brute-force nearest node of level >= want_level
                    int best = -1;
                    for (int w = 0; w < rm.size(); ++w) {
                        if (rla.level(w) < want_level) continue;
                        if (best == -1 || rm(u, w) < rm(u, best) ||
                            (rm(u, w) == rm(u, best) && rm.id_less(w, best)))
                            best = w;
                    }
                    CHECK(got[i] == best);
                }
            }
        }
    }
}

TEST_CASE("bunch statistics") {
    SUBCASE("all-singleton input") {
        std::vector<Bunch> bunches(4);
        for (int u = 0; u < 4; ++u) {
            bunches[static_cast<std::size_t>(u)].owner = u;
            bunches[static_cast<std::size_t>(u)].entries = {{u, 0.0, 0}};
        }
        BunchStats st = bunch_stats(bunches);
        CHECK(st.mean == 1.0);
        CHECK(st.max == 1);
        CHECK(st.histogram.at(1) == 4);
    }
    SUBCASE("wide-spread 96-node mean lands near the expectation") {
        NetworkMap m = synth_map(1, 96, SynthModel::clustered_euclidean);
        auto bunches = compute_bunches(m, assign_levels(m, 2, 1));
        BunchStats st = bunch_stats(bunches);
        CHECK(st.mean > 8.0);
        CHECK(st.mean < 30.0);  // expectation kn^(1/k) = 19.6
    }
}

TEST_CASE("identical inputs give identical bunches") {
    NetworkMap m = synth_map(21, 48, SynthModel::clustered_euclidean);
    LevelAssignment la = assign_levels(m, 3, 77);
    auto b1 = compute_bunches(m, la);
    auto b2 = compute_bunches(m, la);
    REQUIRE(b1.size() == b2.size());
    for (std::size_t i = 0; i < b1.size(); ++i) {
        REQUIRE(b1[i].entries.size() == b2[i].entries.size());
        for (std::size_t j = 0; j < b1[i].entries.size(); ++j) {
            CHECK(b1[i].entries[j].landmark == b2[i].entries[j].landmark);
            CHECK(b1[i].entries[j].dist_ms == b2[i].entries[j].dist_ms);
        }
    }
}

TEST_SUITE_END();
