#include "crux/hash.hpp"
#include "crux/plan_io.hpp"
#include "crux/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace crux;

TEST_SUITE_BEGIN("sim");

namespace {

struct Stack {
    NetworkMap map;
    LevelAssignment la;
    std::vector<Bunch> bunches;
    std::vector<Cluster> clusters;
    InstancePlan plan;
};

Stack make_stack(std::uint64_t seed, int n, int k, SynthModel model,
                 RingMode mode = RingMode::inclusive) {
    Stack s{synth_map(seed, n, model), {}, {}, {}, {}};
    s.la = assign_levels(s.map, k, seed);
    s.bunches = compute_bunches(s.map, s.la);
    s.clusters = compute_clusters(s.map, s.bunches);
    s.plan = build_instances(s.map, s.clusters, 1.0, mode);
    return s;
}

// key whose hash lands on a chosen index within a given member count
std::string key_for_index(std::size_t count, int want) {
    for (int i = 0; i < 1000; ++i) {
        std::string key = "probe" + std::to_string(i);
        if (hash_server(key, count) == want) return key;
    }
    FAIL("no key found");
    return {};
}

}  // namespace

TEST_CASE("fnv1a64 matches the reference vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
    CHECK(hash_server("n000:n001:0", 5) == 2);  // 0x383cd794c29900b0 mod 5
    CHECK_THROWS_AS(hash_server("x", 0), std::invalid_argument);
}

TEST_CASE("kv latency is one round trip to the hash server") {
    NetworkMap m({"a", "b"}, {0, 5, 5, 0});
    const std::vector<int> members{0, 1};

    const std::string to_b = key_for_index(2, 1);
    CHECK(kv_serve(KvOp::put, to_b, 0, members, m, 0.0) == 10.0);
    CHECK(kv_serve(KvOp::get, to_b, 1, members, m, 0.0) == 0.0);

    const std::string to_a = key_for_index(2, 0);
    CHECK(kv_serve(KvOp::put, to_a, 0, members, m, 2.5) == 2.5);  // origin is the server

    CHECK_THROWS_AS(kv_serve(KvOp::put, "k", 0, std::vector<int>{}, m, 0.0),
                    std::invalid_argument);
}

TEST_CASE("pubsub latency sums the two delivery legs") {
    NetworkMap m({"a", "b", "c"}, {0, 3, 6, 3, 0, 4, 6, 4, 0});
    const std::vector<int> members{0, 1, 2};
    const std::string to_b = key_for_index(3, 1);
    CHECK(pubsub_serve(to_b, 0, 2, members, m, 0.0) == doctest::Approx(7.0));  // 3 + 4
    const std::string to_a = key_for_index(3, 0);
    CHECK(pubsub_serve(to_a, 0, 0, members, m, 1.5) == doctest::Approx(1.5));
}

TEST_CASE("multihop floor is two overhead charges on a singleton instance") {
    NetworkMap m({"a", "b"}, {0, 5, 5, 0});
    const std::vector<int> just_a{0};
    CHECK(multihop_serve(KvOp::put, "k", 0, just_a, m, 5.0) == 10.0);   // 2 * o_A
    CHECK(multihop_serve(KvOp::get, "k", 1, just_a, m, 5.0) == 20.0);   // 2 legs + 2 * o_A
}

TEST_CASE("multihop latency bound: (2h+2) diameters plus per-hop overhead") {
    Stack s = make_stack(2, 40, 3, SynthModel::euclidean);
    for (const Instance& inst : s.plan.instances) {
        const double diam = instance_diameter(s.plan, inst.id, s.map);
        const int h = std::max(1, static_cast<int>(std::ceil(std::log2(
                              static_cast<double>(inst.members.size())))));
        for (int origin : {inst.members.front(), inst.members.back()}) {
            const double cost = multihop_serve(KvOp::put, "key0", origin, inst.members, s.map, 2.0);
            CHECK(cost <= (2.0 * h + 2.0) * diam + (h + 1) * 2.0 + 1e-9);
        }
    }
}

TEST_CASE("self-interaction with a self-hashing key costs nothing") {
    Stack s = make_stack(1, 1, 2, SynthModel::euclidean);
    auto plugin = make_plugin(PluginKind::kv, 0.0);
    SimContext ctx(s.map, s.plan, s.bunches, s.la, ReplicationPolicy::symmetric, *plugin);
    InteractionRecord rec = run_interaction(ctx, 0, 0, "anything");
    CHECK(rec.crux_ms == 0.0);
    CHECK(rec.baseline_ms == 0.0);
    CHECK(rec.direct_ms == 0.0);
}

TEST_CASE("kv interaction latency obeys the analytic locality bound") {
    for (int k : {2, 5}) {
        for (double o_a : {0.0, 5.0}) {
            Stack s = make_stack(3, 32, k, SynthModel::euclidean);
            auto plugin = make_plugin(PluginKind::kv, o_a);
            SimContext ctx(s.map, s.plan, s.bunches, s.la, ReplicationPolicy::symmetric, *plugin);
            for (int u = 0; u < s.map.size(); ++u)
                for (int v = 0; v < s.map.size(); ++v) {
                    InteractionRecord rec =
                        run_interaction(ctx, u, v, s.map.id(u) + ":" + s.map.id(v) + ":0");
                    const double bound =
                        16.0 * (2.0 * k - 1.0) * std::max(rec.direct_ms, 1.0) + 4.0 * o_a;
                    CHECK(rec.crux_ms <= bound + 1e-9);
                }
        }
    }
}

TEST_CASE("meet instance contains the hash server of both legs") {
    Stack s = make_stack(5, 24, 3, SynthModel::clustered_euclidean);
    auto plugin = make_plugin(PluginKind::kv, 0.0);
    SimContext ctx(s.map, s.plan, s.bunches, s.la, ReplicationPolicy::symmetric, *plugin);
    for (int u = 0; u < s.map.size(); ++u) {
        const int v = (u + 7) % s.map.size();
        const std::string key = s.map.id(u) + ":" + s.map.id(v) + ":3";
        InteractionRecord rec = run_interaction(ctx, u, v, key);
        const Instance& inst = s.plan.at(rec.meet);
        CHECK(inst.contains(u));
        CHECK(inst.contains(v));
        const int server =
            inst.members[static_cast<std::size_t>(hash_server(key, inst.members.size()))];
        CHECK(inst.contains(server));
        CHECK(rec.crux_ms ==
              doctest::Approx(2.0 * s.map(u, server) + 2.0 * s.map(v, server)));
    }
}

TEST_CASE("paced latency dominates eager latency but stays within 4x") {
    for (int k : {2, 5}) {
        Stack s = make_stack(4, 32, k, SynthModel::euclidean);
        auto plugin = make_plugin(PluginKind::kv, 0.0);
        SimContext ctx(s.map, s.plan, s.bunches, s.la, ReplicationPolicy::symmetric, *plugin);
        for (int u = 0; u < s.map.size(); ++u)
            for (int v = 0; v < s.map.size(); ++v) {
                if (u == v) continue;
                const std::string key = s.map.id(u) + ":" + s.map.id(v) + ":1";
                InteractionRecord eager = run_interaction(ctx, u, v, key, false);
                InteractionRecord paced = run_interaction(ctx, u, v, key, true);
                CHECK(paced.crux_ms >= eager.crux_ms - 1e-9);
                CHECK(paced.crux_ms <= 4.0 * eager.crux_ms + 1e-9);
            }
    }
}

TEST_CASE("workload keys pair each writer with a real reader") {
    NetworkMap m = synth_map(9, 12, SynthModel::euclidean);
    Workload wl = make_workload(m, 42, 5);
    CHECK(wl.interactions.size() == 12u * 5u);
    for (const auto& i : wl.interactions) {
        CHECK(i.writer != i.reader);
        CHECK(i.key == m.id(i.writer) + ":" + m.id(i.reader) + ":" + i.key.substr(i.key.size() - 1));
        const int digit = i.key.back() - '0';
        CHECK(digit >= 0);
        CHECK(digit <= 9);
    }
    SUBCASE("empty workload") {
        Workload none = make_workload(m, 42, 0);
        CHECK(none.interactions.empty());
    }
    SUBCASE("single-node workload pairs the node with itself") {
        NetworkMap one = synth_map(1, 1, SynthModel::euclidean);
        Workload wl1 = make_workload(one, 7, 3);
        CHECK(wl1.interactions.size() == 3);
        for (const auto& i : wl1.interactions) CHECK(i.writer == i.reader);
    }
}

TEST_CASE("workload runs are deterministic") {
    Stack s = make_stack(6, 24, 3, SynthModel::clustered_euclidean);
    auto plugin = make_plugin(PluginKind::kv, 1.0);
    SimContext ctx(s.map, s.plan, s.bunches, s.la, ReplicationPolicy::symmetric, *plugin);
    Workload wl = make_workload(s.map, 5, 10);
    WorkloadResult a = run_workload(ctx, wl, false);
    WorkloadResult b = run_workload(ctx, wl, false);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].crux_ms == b.records[i].crux_ms);
        CHECK(a.records[i].baseline_ms == b.records[i].baseline_ms);
        CHECK(a.records[i].meet == b.records[i].meet);
        CHECK(a.records[i].stretch == b.records[i].stretch);
    }
    CHECK(a.crux_ops_by_node == b.crux_ops_by_node);
    CHECK(a.baseline_ops_by_node == b.baseline_ops_by_node);
    // records agree with one-off interaction runs
    for (std::size_t i = 0; i < wl.interactions.size(); ++i) {
        const auto& inter = wl.interactions[i];
        InteractionRecord one = run_interaction(ctx, inter.writer, inter.reader, inter.key);
        CHECK(a.records[i].crux_ms == one.crux_ms);
        CHECK(a.records[i].meet == one.meet);
    }
}

TEST_CASE("replication multiplies served operations by an order of magnitude") {
    Stack s = make_stack(2, 96, 5, SynthModel::clustered_euclidean);
    auto plugin = make_plugin(PluginKind::kv, 0.0);
    SimContext ctx(s.map, s.plan, s.bunches, s.la, ReplicationPolicy::symmetric, *plugin);
    WorkloadResult res = run_workload(ctx, make_workload(s.map, 2, 30), false);
    long crux_total = 0, base_total = 0, base_max = 0;
    for (int u = 0; u < s.map.size(); ++u) {
        crux_total += res.crux_ops_by_node[static_cast<std::size_t>(u)];
        base_total += res.baseline_ops_by_node[static_cast<std::size_t>(u)];
        base_max = std::max(base_max, res.baseline_ops_by_node[static_cast<std::size_t>(u)]);
    }
    CHECK(base_total == 2 * 96 * 30);
    CHECK(crux_total >= 5 * base_total);
    // consistent hashing balances the single global instance
    CHECK(base_max <= 3 * base_total / 96);
}

TEST_CASE("stretch is the crux latency over twice the direct distance") {
    Stack s = make_stack(8, 16, 2, SynthModel::euclidean);
    auto plugin = make_plugin(PluginKind::kv, 0.0);
    SimContext ctx(s.map, s.plan, s.bunches, s.la, ReplicationPolicy::symmetric, *plugin);
    InteractionRecord rec = run_interaction(ctx, 0, 5, "k:0:5");
    REQUIRE(rec.direct_ms > 0.0);
    CHECK(rec.stretch == rec.crux_ms / (2.0 * rec.direct_ms));
}

TEST_CASE("bucket stats split log-spaced distance buckets") {
    SUBCASE("single record collapses to one bucket") {
        std::vector<InteractionRecord> recs(1);
        recs[0].direct_ms = 3.0;
        recs[0].crux_ms = 6.0;
        recs[0].baseline_ms = 12.0;
        auto rows = bucket_stats(recs, 13);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].count == 1);
        CHECK(rows[0].crux_median == 6.0);
        CHECK(rows[0].crux_p90 == 6.0);
        CHECK(rows[0].baseline_median == 12.0);
    }
    SUBCASE("empty input is an error") {
        CHECK_THROWS_AS(bucket_stats({}, 13), std::invalid_argument);
    }
    SUBCASE("two-scale map: crux tracks distance while the baseline stays flat") {
        Stack s = make_stack(3, 96, 5, SynthModel::clustered_euclidean);
        auto plugin = make_plugin(PluginKind::kv, 0.0);
        SimContext ctx(s.map, s.plan, s.bunches, s.la, ReplicationPolicy::symmetric, *plugin);
        WorkloadResult res = run_workload(ctx, make_workload(s.map, 3, 100), false);
        auto rows = bucket_stats(res.records, 13);
        REQUIRE(rows.size() >= 3);
        CHECK(rows.front().crux_median * 50.0 < rows.back().crux_median);
        CHECK(rows.front().baseline_median * 3.0 > rows.back().baseline_median);
        int total = 0;
        for (const auto& r : rows) total += r.count;
        CHECK(total == static_cast<int>(res.records.size()));
    }
}

TEST_CASE("pubsub delivery between nearby nodes beats the global channel server") {
    Stack s = make_stack(4, 96, 5, SynthModel::clustered_euclidean);
    auto plugin = make_plugin(PluginKind::pubsub, 0.0);
    SimContext ctx(s.map, s.plan, s.bunches, s.la, ReplicationPolicy::symmetric, *plugin);
    WorkloadResult res = run_workload(ctx, make_workload(s.map, 4, 100), false);
    auto rows = bucket_stats(res.records, 13);
    // nearby channels resolve locally instead of hair-pinning across the map
    CHECK(rows.front().crux_median * 50.0 < rows.front().baseline_median);
}

TEST_CASE("correlation: crux follows direct distance, the baseline does not") {
    Stack s = make_stack(3, 96, 5, SynthModel::clustered_euclidean);
    auto plugin = make_plugin(PluginKind::kv, 0.0);
    SimContext ctx(s.map, s.plan, s.bunches, s.la, ReplicationPolicy::symmetric, *plugin);
    WorkloadResult res = run_workload(ctx, make_workload(s.map, 3, 100), false);

    // premise: node-local scale is far below the global one
    double max_nn = 0.0;
    for (int u = 0; u < s.map.size(); ++u) {
        double nn = std::numeric_limits<double>::infinity();
        for (int v = 0; v < s.map.size(); ++v)
            if (v != u) nn = std::min(nn, s.map(u, v));
        max_nn = std::max(max_nn, nn);
    }
    REQUIRE(diameter(s.map) >= 100.0 * max_nn);

    auto pearson = [&](bool use_crux) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        const double n = static_cast<double>(res.records.size());
        for (const auto& r : res.records) {
            const double x = r.direct_ms;
            const double y = use_crux ? r.crux_ms : r.baseline_ms;
            sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
        }
        return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    };
    CHECK(std::abs(pearson(false)) < 0.2);
    CHECK(pearson(true) > 0.5);
}

TEST_SUITE_END();
