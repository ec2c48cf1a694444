#pragma once

#include "crux/hierarchy.hpp"
#include "crux/netmap.hpp"
#include "crux/replication.hpp"
#include "crux/ringplan.hpp"
#include "crux/sim.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace crux {

// Every parameter a run depends on; serialized alongside every output so any
// artifact can be reproduced byte for byte.
struct RunConfig {
    int k = 2;
    std::uint64_t seed = 1;
    double r_min_ms = 1.0;
    RingMode mode = RingMode::inclusive;
    ReplicationPolicy policy = ReplicationPolicy::symmetric;
    PluginKind plugin = PluginKind::kv;
    double o_a_ms = 0.0;
    bool paced = false;
    int ops_per_node = 100;
    int bucket_count = 13;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

// Levels, bunches, clusters and ring instances for one map + config.
struct Plan {
    LevelAssignment la;
    std::vector<Bunch> bunches;
    std::vector<Cluster> clusters;
    InstancePlan instances;
};

Plan build_plan(const NetworkMap& map, const RunConfig& config);

struct PlanSummary {
    double mean_bunch_size = 0.0;
    std::size_t max_bunch_size = 0;
    double mean_memberships = 0.0;
    std::size_t max_memberships = 0;
    std::size_t instance_count = 0;
    double radius_spread = 1.0;
};

PlanSummary summarize_plan(const NetworkMap& map, const Plan& plan, const RunConfig& config);

// FNV-1a digest of a file's bytes, rendered "0x%016x"; cheap fingerprint tying
// outputs to their inputs.
std::string file_digest(const std::string& path);

nlohmann::json plan_to_json(const NetworkMap& map, const Plan& plan, const RunConfig& config,
                            const std::string& map_digest);

// Rebuilds a Plan from plan JSON, resolving ids against the given map.
// Throws parse_error when the plan does not match the map.
Plan plan_from_json(const NetworkMap& map, const nlohmann::json& j, RunConfig* config_out = nullptr);

// Results CSV: header-commented config, then the record rows
// writer,reader,key,direct_ms,crux_ms,baseline_ms,meet_landmark,meet_ring,stretch.
void write_records_csv(std::ostream& out, const NetworkMap& map,
                       const std::vector<InteractionRecord>& records, const RunConfig& config,
                       const std::string& input_digests);

void write_ops_csv(std::ostream& out, const NetworkMap& map, const WorkloadResult& result,
                   const RunConfig& config, const std::string& input_digests);

void write_buckets_csv(std::ostream& out, const std::vector<BucketRow>& rows,
                       const RunConfig& config, const std::string& input_digests);

struct SweepRow {
    int k = 0;
    std::uint64_t seed = 0;
    double expected_bunch_size = 0.0;
    double mean_bunch_size = 0.0;
    std::size_t max_bunch_size = 0;
    double mean_memberships = 0.0;
    std::size_t max_memberships = 0;
};

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const RunConfig& config, const std::string& input_digests);

nlohmann::json validation_to_json(const ValidationReport& report);

}  // namespace crux
