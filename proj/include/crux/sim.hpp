#pragma once

#include "crux/hierarchy.hpp"
#include "crux/netmap.hpp"
#include "crux/replication.hpp"
#include "crux/ringplan.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crux {

// Consistent-hash server pick: FNV-1a(key) mod member count over the
// canonically sorted list. Bit-exact across implementations.
int hash_server(std::string_view key, std::size_t member_count);

enum class KvOp { put, get };

// Single-round-trip key/value cache: latency = 2 * dist(origin, server) + o_A.
double kv_serve(KvOp op, std::string_view key, int origin, std::span<const int> members,
                const NetworkMap& map, double o_a_ms);

// One-way channel delivery: dist(publisher, server) + dist(server, subscriber)
// + o_A. Half-RTT per leg, matching ping-style measurement halving.
double pubsub_serve(std::string_view channel, int publisher, int subscriber,
                    std::span<const int> members, const NetworkMap& map, double o_a_ms);

// DHT-style multi-hop lookup: ceil(log2(m)) intermediate hops (min 1) chosen
// from h(key, hop) mod m, ending at the consistent-hash home server, plus the
// return leg; o_A charged per hop plus once.
double multihop_serve(KvOp op, std::string_view key, int origin, std::span<const int> members,
                      const NetworkMap& map, double o_a_ms);

enum class PluginKind { kv, pubsub, multihop_kv };

PluginKind parse_plugin(const std::string& name);
const char* to_string(PluginKind kind);

// Behavioral contract for the underlying algorithm: deterministic replica
// latencies that grow at most proportionally to the instance diameter.
class AlgorithmPlugin {
public:
    virtual ~AlgorithmPlugin() = default;

    PluginKind kind() const { return kind_; }
    double op_overhead_ms() const { return o_a_; }

    virtual double write_cost(std::string_view key, int origin, std::span<const int> members,
                              const NetworkMap& map) const = 0;
    virtual double read_cost(std::string_view key, int origin, std::span<const int> members,
                             const NetworkMap& map) const = 0;

    // Escalation deadline for one paced stage: half the ring-radius delay
    // plus the plugin's zero-distance response floor. Earlier attempts stay
    // outstanding when the walk escalates past them.
    virtual double stage_timeout(double radius_ms, std::size_t member_count) const = 0;

protected:
    AlgorithmPlugin(PluginKind kind, double o_a_ms) : kind_(kind), o_a_(o_a_ms) {}
    PluginKind kind_;
    double o_a_;
};

std::unique_ptr<AlgorithmPlugin> make_plugin(PluginKind kind, double o_a_ms);

// One simulated pairwise interaction, measured retrospectively as the
// fastest write/read replica pair meeting at a common instance.
struct InteractionRecord {
    int writer = -1;
    int reader = -1;
    std::string key;
    double direct_ms = 0.0;
    double crux_ms = 0.0;
    double baseline_ms = 0.0;
    InstanceId meet;
    double stretch = 0.0;  // crux_ms / max(2 * direct_ms, epsilon)
};

// Immutable bundle the simulator evaluates against.
struct SimContext {
    const NetworkMap& map;
    const InstancePlan& plan;
    const std::vector<Bunch>& bunches;
    const LevelAssignment& la;
    ReplicationPolicy policy;
    const AlgorithmPlugin& plugin;
    std::vector<int> global_members;  // the single all-nodes instance

    SimContext(const NetworkMap& map, const InstancePlan& plan, const std::vector<Bunch>& bunches,
               const LevelAssignment& la, ReplicationPolicy policy, const AlgorithmPlugin& plugin);
};

// Eager mode replicates everywhere at once and takes the cheapest meeting
// pair. Paced mode escalates through ring-radius stages, abandoning a stage
// after its timeout, so its latency is the stage-walk completion time.
InteractionRecord run_interaction(const SimContext& ctx, int writer, int reader,
                                  const std::string& key, bool paced = false);

struct Interaction {
    int writer;
    int reader;
    std::string key;
};

struct Workload {
    std::uint64_t seed = 0;
    int ops_per_node = 0;
    std::vector<Interaction> interactions;
};

// Keys are <writer, other-node, digit 0..9> tuples, so every read targets a
// key that was written.
Workload make_workload(const NetworkMap& map, std::uint64_t seed, int ops_per_node);

struct WorkloadResult {
    std::vector<InteractionRecord> records;
    std::vector<long> crux_ops_by_node;      // replicas served, hash-selected servers only
    std::vector<long> baseline_ops_by_node;
};

WorkloadResult run_workload(const SimContext& ctx, const Workload& workload, bool paced = false);

struct BucketRow {
    double lo_ms = 0.0;
    double hi_ms = 0.0;
    int count = 0;
    double crux_median = 0.0;
    double crux_p90 = 0.0;
    double baseline_median = 0.0;
    double baseline_p90 = 0.0;
};

// Log-spaced direct-distance buckets (13 by default); per-bucket median and
// 90th percentile for both systems. Empty buckets are dropped.
std::vector<BucketRow> bucket_stats(const std::vector<InteractionRecord>& records,
                                    int bucket_count = 13);

}  // namespace crux
