#include "crux/sim.hpp"

#include "crux/errors.hpp"
#include "crux/hash.hpp"
#include "crux/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crux {

int hash_server(std::string_view key, std::size_t member_count) {
    if (member_count == 0) throw std::invalid_argument("empty member list");
    return static_cast<int>(fnv1a64(key) % member_count);
}

double kv_serve(KvOp, std::string_view key, int origin, std::span<const int> members,
                const NetworkMap& map, double o_a_ms) {
    if (members.empty()) throw std::invalid_argument("empty member list");
    const int server = members[static_cast<std::size_t>(hash_server(key, members.size()))];
    return 2.0 * map(origin, server) + o_a_ms;
}

double pubsub_serve(std::string_view channel, int publisher, int subscriber,
                    std::span<const int> members, const NetworkMap& map, double o_a_ms) {
    if (members.empty()) throw std::invalid_argument("empty member list");
    const int server = members[static_cast<std::size_t>(hash_server(channel, members.size()))];
    return map(publisher, server) + map(server, subscriber) + o_a_ms;
}

namespace {

int multihop_hops(std::size_t member_count) {
    if (member_count <= 1) return 1;
    return std::max(1, static_cast<int>(std::bit_width(member_count - 1)));
}

}  // namespace

double multihop_serve(KvOp, std::string_view key, int origin, std::span<const int> members,
                      const NetworkMap& map, double o_a_ms) {
    if (members.empty()) throw std::invalid_argument("empty member list");
    const std::size_t m = members.size();
    const int hops = multihop_hops(m);

    double total = 0.0;
    int prev = origin;
    std::string hop_key;
    for (int h = 1; h <= hops; ++h) {
        hop_key.assign(key);
        hop_key += '#';
        hop_key += std::to_string(h);
        const int next = members[fnv1a64(hop_key) % m];
        total += map(prev, next);
        prev = next;
    }
    const int home = members[static_cast<std::size_t>(hash_server(key, m))];
    total += map(prev, home);
    total += map(home, origin);
    total += (hops + 1) * o_a_ms;
    return total;
}

PluginKind parse_plugin(const std::string& name) {
    if (name == "kv") return PluginKind::kv;
    if (name == "pubsub") return PluginKind::pubsub;
    if (name == "multihop-kv") return PluginKind::multihop_kv;
    throw parse_error("unknown plugin '" + name + "'");
}

const char* to_string(PluginKind kind) {
    switch (kind) {
        case PluginKind::kv: return "kv";
        case PluginKind::pubsub: return "pubsub";
        case PluginKind::multihop_kv: return "multihop-kv";
    }
    return "?";
}

namespace {

class KvPlugin final : public AlgorithmPlugin {
public:
    explicit KvPlugin(double o_a) : AlgorithmPlugin(PluginKind::kv, o_a) {}
    double write_cost(std::string_view key, int origin, std::span<const int> members,
                      const NetworkMap& map) const override {
        return kv_serve(KvOp::put, key, origin, members, map, o_a_);
    }
    double read_cost(std::string_view key, int origin, std::span<const int> members,
                     const NetworkMap& map) const override {
        return kv_serve(KvOp::get, key, origin, members, map, o_a_);
    }
    double stage_timeout(double radius_ms, std::size_t) const override {
        return 0.5 * radius_ms + 2.0 * o_a_;
    }
};

class PubSubPlugin final : public AlgorithmPlugin {
public:
    explicit PubSubPlugin(double o_a) : AlgorithmPlugin(PluginKind::pubsub, o_a) {}
    double write_cost(std::string_view key, int origin, std::span<const int> members,
                      const NetworkMap& map) const override {
        // publish leg to the channel server
        const int server = members[static_cast<std::size_t>(hash_server(key, members.size()))];
        return map(origin, server) + o_a_;
    }
    double read_cost(std::string_view key, int origin, std::span<const int> members,
                     const NetworkMap& map) const override {
        // delivery leg from the channel server to the subscriber
        const int server = members[static_cast<std::size_t>(hash_server(key, members.size()))];
        return map(server, origin);
    }
    double stage_timeout(double radius_ms, std::size_t) const override {
        return 0.5 * radius_ms + o_a_;
    }
};

class MultihopKvPlugin final : public AlgorithmPlugin {
public:
    explicit MultihopKvPlugin(double o_a) : AlgorithmPlugin(PluginKind::multihop_kv, o_a) {}
    double write_cost(std::string_view key, int origin, std::span<const int> members,
                      const NetworkMap& map) const override {
        return multihop_serve(KvOp::put, key, origin, members, map, o_a_);
    }
    double read_cost(std::string_view key, int origin, std::span<const int> members,
                     const NetworkMap& map) const override {
        return multihop_serve(KvOp::get, key, origin, members, map, o_a_);
    }
    double stage_timeout(double radius_ms, std::size_t member_count) const override {
        const int hops = multihop_hops(member_count);
        return 0.5 * (hops + 2) * radius_ms + 2.0 * (hops + 1) * o_a_;
    }
};

}  // namespace

std::unique_ptr<AlgorithmPlugin> make_plugin(PluginKind kind, double o_a_ms) {
    if (o_a_ms < 0.0) throw std::invalid_argument("operation overhead must be nonnegative");
    switch (kind) {
        case PluginKind::kv: return std::make_unique<KvPlugin>(o_a_ms);
        case PluginKind::pubsub: return std::make_unique<PubSubPlugin>(o_a_ms);
        case PluginKind::multihop_kv: return std::make_unique<MultihopKvPlugin>(o_a_ms);
    }
    throw std::invalid_argument("unknown plugin kind");
}

SimContext::SimContext(const NetworkMap& map_, const InstancePlan& plan_,
                       const std::vector<Bunch>& bunches_, const LevelAssignment& la_,
                       ReplicationPolicy policy_, const AlgorithmPlugin& plugin_)
    : map(map_), plan(plan_), bunches(bunches_), la(la_), policy(policy_), plugin(plugin_) {
    global_members = map.canonical_order();
}

namespace {

struct CruxOutcome {
    double cost = std::numeric_limits<double>::infinity();
    InstanceId meet;
    std::size_t attempted_end = 0;  // one past the last shared instance attempted
};

double pair_cost(const SimContext& ctx, const Instance& inst, const std::string& key, int writer,
                 int reader) {
    return ctx.plugin.write_cost(key, writer, inst.members, ctx.map) +
           ctx.plugin.read_cost(key, reader, inst.members, ctx.map);
}

CruxOutcome eager_crux(const SimContext& ctx, const std::vector<InstanceId>& meets,
                       const std::string& key, int writer, int reader) {
    CruxOutcome best;
    for (const InstanceId& id : meets) {
        const double cost = pair_cost(ctx, ctx.plan.at(id), key, writer, reader);
        if (cost < best.cost) {
            best.cost = cost;
            best.meet = id;
        }
    }
    best.attempted_end = meets.size();
    return best;
}

// Expanding-ring walk over the shared instances, grouped by ring radius,
// smallest first. A stage escalates once its timeout passes without any
// response; outstanding attempts stay live, so the completion time is
// min over attempted stages of (sum of earlier timeouts + stage cost).
CruxOutcome paced_crux(const SimContext& ctx, const std::vector<InstanceId>& meets,
                       const std::string& key, int writer, int reader) {
    CruxOutcome best;
    double start = 0.0;
    std::size_t i = 0;
    while (i < meets.size()) {
        const int ring = meets[i].ring;
        double stage_cost = std::numeric_limits<double>::infinity();
        double stage_timeout = 0.0;
        InstanceId stage_meet;
        for (; i < meets.size() && meets[i].ring == ring; ++i) {
            const Instance& inst = ctx.plan.at(meets[i]);
            const double cost = pair_cost(ctx, inst, key, writer, reader);
            if (cost < stage_cost) {
                stage_cost = cost;
                stage_meet = meets[i];
            }
            stage_timeout = std::max(
                stage_timeout, ctx.plugin.stage_timeout(inst.radius_ms, inst.members.size()));
        }
        if (start + stage_cost < best.cost) {
            best.cost = start + stage_cost;
            best.meet = stage_meet;
        }
        best.attempted_end = i;
        // a response in hand before this stage's deadline stops escalation
        if (best.cost <= start + stage_timeout) break;
        start += stage_timeout;
    }
    return best;
}

CruxOutcome evaluate_crux(const SimContext& ctx, const std::vector<InstanceId>& meets,
                          const std::string& key, int writer, int reader, bool paced) {
    return paced ? paced_crux(ctx, meets, key, writer, reader)
                 : eager_crux(ctx, meets, key, writer, reader);
}

struct PairTargets {
    TargetSet writes;
    TargetSet reads;
    std::vector<InstanceId> meets;
};

PairTargets pair_targets(const SimContext& ctx, int writer, int reader) {
    PairTargets pt;
    pt.writes = write_targets(ctx.map, ctx.plan, ctx.bunches[static_cast<std::size_t>(writer)],
                              ctx.la, writer, ctx.policy);
    pt.reads = read_targets(ctx.map, ctx.plan, ctx.bunches[static_cast<std::size_t>(reader)],
                            reader);
    pt.meets = meet_instances(ctx.map, ctx.plan, pt.writes, pt.reads);
    return pt;
}

InteractionRecord make_record(const SimContext& ctx, int writer, int reader,
                              const std::string& key, const CruxOutcome& crux) {
    InteractionRecord rec;
    rec.writer = writer;
    rec.reader = reader;
    rec.key = key;
    rec.direct_ms = ctx.map(writer, reader);
    rec.crux_ms = crux.cost;
    rec.meet = crux.meet;
    rec.baseline_ms = ctx.plugin.write_cost(key, writer, ctx.global_members, ctx.map) +
                      ctx.plugin.read_cost(key, reader, ctx.global_members, ctx.map);
    rec.stretch = rec.crux_ms / std::max(2.0 * rec.direct_ms, 1e-9);
    return rec;
}

}  // namespace

InteractionRecord run_interaction(const SimContext& ctx, int writer, int reader,
                                  const std::string& key, bool paced) {
    const PairTargets pt = pair_targets(ctx, writer, reader);
    const CruxOutcome crux = evaluate_crux(ctx, pt.meets, key, writer, reader, paced);
    return make_record(ctx, writer, reader, key, crux);
}

Workload make_workload(const NetworkMap& map, std::uint64_t seed, int ops_per_node) {
    if (ops_per_node < 0) throw std::invalid_argument("ops_per_node must be nonnegative");
    Workload wl;
    wl.seed = seed;
    wl.ops_per_node = ops_per_node;

    const int n = map.size();
    std::mt19937_64 rng(splitmix64(seed ^ 0x776f726b6c6f6164ull));  // "workload"
    for (int u = 0; u < n; ++u) {
        for (int op = 0; op < ops_per_node; ++op) {
            int v = u;
            if (n > 1) {
                const int pick =
                    static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n - 1)));
                v = pick >= u ? pick + 1 : pick;
            }
            const int w = static_cast<int>(uniform_index(rng, 10));
            wl.interactions.push_back(
                {u, v, map.id(u) + ":" + map.id(v) + ":" + std::to_string(w)});
        }
    }
    return wl;
}

WorkloadResult run_workload(const SimContext& ctx, const Workload& workload, bool paced) {
    WorkloadResult res;
    const auto n = static_cast<std::size_t>(ctx.map.size());
    res.crux_ops_by_node.assign(n, 0);
    res.baseline_ops_by_node.assign(n, 0);
    res.records.reserve(workload.interactions.size());

    const auto charge = [&](const std::string& key, const Instance& inst, int ops) {
        const int server =
            inst.members[static_cast<std::size_t>(hash_server(key, inst.members.size()))];
        res.crux_ops_by_node[static_cast<std::size_t>(server)] += ops;
    };

    for (const auto& inter : workload.interactions) {
        const PairTargets pt = pair_targets(ctx, inter.writer, inter.reader);
        const CruxOutcome crux =
            evaluate_crux(ctx, pt.meets, inter.key, inter.writer, inter.reader, paced);

        if (paced) {
            // only the attempted stages generated traffic
            for (std::size_t i = 0; i < crux.attempted_end; ++i)
                charge(inter.key, ctx.plan.at(pt.meets[i]), 2);
        } else {
            for (const InstanceId& id : pt.writes.targets) charge(inter.key, ctx.plan.at(id), 1);
            for (const InstanceId& id : pt.reads.targets) charge(inter.key, ctx.plan.at(id), 1);
        }
        const int gserver = ctx.global_members[static_cast<std::size_t>(
            hash_server(inter.key, ctx.global_members.size()))];
        res.baseline_ops_by_node[static_cast<std::size_t>(gserver)] += 2;

        res.records.push_back(make_record(ctx, inter.writer, inter.reader, inter.key, crux));
    }
    return res;
}

namespace {

double percentile(std::vector<double>& values, double p) {
    // nearest-rank on the sorted sample
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    if (rank > n) rank = n;
    return values[rank - 1];
}

}  // namespace

std::vector<BucketRow> bucket_stats(const std::vector<InteractionRecord>& records,
                                    int bucket_count) {
    if (records.empty()) throw std::invalid_argument("no records to bucket");
    if (bucket_count < 1) throw std::invalid_argument("bucket count must be >= 1");

    double dmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (const auto& r : records) {
        if (r.direct_ms > 0.0) dmin = std::min(dmin, r.direct_ms);
        dmax = std::max(dmax, r.direct_ms);
    }
    const bool degenerate = !std::isfinite(dmin) || !(dmax > dmin);

    const double log_lo = degenerate ? 0.0 : std::log(dmin);
    const double log_span = degenerate ? 1.0 : std::log(dmax) - std::log(dmin);

    std::vector<std::vector<double>> crux(static_cast<std::size_t>(bucket_count));
    std::vector<std::vector<double>> base(static_cast<std::size_t>(bucket_count));
    for (const auto& r : records) {
        int b = 0;
        if (!degenerate && r.direct_ms > 0.0) {
            b = static_cast<int>(
                std::floor((std::log(r.direct_ms) - log_lo) / log_span * bucket_count));
            b = std::clamp(b, 0, bucket_count - 1);
        }
        crux[static_cast<std::size_t>(b)].push_back(r.crux_ms);
        base[static_cast<std::size_t>(b)].push_back(r.baseline_ms);
    }

    std::vector<BucketRow> rows;
    for (int b = 0; b < bucket_count; ++b) {
        auto& c = crux[static_cast<std::size_t>(b)];
        if (c.empty()) continue;
        auto& g = base[static_cast<std::size_t>(b)];
        BucketRow row;
        row.lo_ms = degenerate ? 0.0 : std::exp(log_lo + log_span * b / bucket_count);
        row.hi_ms = degenerate ? dmax : std::exp(log_lo + log_span * (b + 1) / bucket_count);
        row.count = static_cast<int>(c.size());
        row.crux_median = percentile(c, 0.50);
        row.crux_p90 = percentile(c, 0.90);
        row.baseline_median = percentile(g, 0.50);
        row.baseline_p90 = percentile(g, 0.90);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace crux
