#include "crux/plan_io.hpp"

#include "crux/errors.hpp"
#include "crux/hash.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace crux {

namespace {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["k"] = k;
    j["seed"] = seed;
    j["r_min_ms"] = r_min_ms;
    j["mode"] = to_string(mode);
    j["policy"] = to_string(policy);
    j["plugin"] = to_string(plugin);
    j["o_a_ms"] = o_a_ms;
    j["paced"] = paced;
    j["ops_per_node"] = ops_per_node;
    j["bucket_count"] = bucket_count;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    c.k = j.at("k").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.r_min_ms = j.at("r_min_ms").get<double>();
    c.mode = parse_ring_mode(j.at("mode").get<std::string>());
    c.policy = parse_policy(j.at("policy").get<std::string>());
    c.plugin = parse_plugin(j.at("plugin").get<std::string>());
    c.o_a_ms = j.at("o_a_ms").get<double>();
    c.paced = j.at("paced").get<bool>();
    c.ops_per_node = j.at("ops_per_node").get<int>();
    c.bucket_count = j.at("bucket_count").get<int>();
    return c;
}

Plan build_plan(const NetworkMap& map, const RunConfig& config) {
    Plan plan;
    plan.la = assign_levels(map, config.k, config.seed);
    plan.bunches = compute_bunches(map, plan.la);
    plan.clusters = compute_clusters(map, plan.bunches);
    plan.instances = build_instances(map, plan.clusters, config.r_min_ms, config.mode);
    return plan;
}

PlanSummary summarize_plan(const NetworkMap& map, const Plan& plan, const RunConfig& config) {
    PlanSummary s;
    const BunchStats bs = bunch_stats(plan.bunches);
    s.mean_bunch_size = bs.mean;
    s.max_bunch_size = bs.max;

    double total = 0.0;
    for (const auto& m : plan.instances.memberships_by_node) {
        total += static_cast<double>(m.size());
        s.max_memberships = std::max(s.max_memberships, m.size());
    }
    s.mean_memberships = total / static_cast<double>(map.size());
    s.instance_count = plan.instances.instances.size();
    s.radius_spread = radius_spread(map, config.r_min_ms);
    return s;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open file '" + path + "' for digest");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    char out[19];
    std::snprintf(out, sizeof out, "0x%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return out;
}

nlohmann::json plan_to_json(const NetworkMap& map, const Plan& plan, const RunConfig& config,
                            const std::string& map_digest) {
    nlohmann::json j;
    j["config"] = config.to_json();
    j["map_digest"] = map_digest;
    j["k"] = plan.la.k;
    j["seed"] = plan.la.seed;

    nlohmann::json levels = nlohmann::json::object();
    for (int u : map.canonical_order()) levels[map.id(u)] = plan.la.level(u);
    j["levels"] = std::move(levels);

    nlohmann::json bunches = nlohmann::json::object();
    for (int u : map.canonical_order()) {
        auto arr = nlohmann::json::array();
        for (const auto& e : plan.bunches[static_cast<std::size_t>(u)].entries)
            arr.push_back({map.id(e.landmark), e.dist_ms, e.level});
        bunches[map.id(u)] = std::move(arr);
    }
    j["bunches"] = std::move(bunches);

    nlohmann::json clusters = nlohmann::json::object();
    for (int v : map.canonical_order()) {
        auto arr = nlohmann::json::array();
        for (int u : plan.clusters[static_cast<std::size_t>(v)].members) arr.push_back(map.id(u));
        clusters[map.id(v)] = std::move(arr);
    }
    j["clusters"] = std::move(clusters);

    j["mode"] = to_string(plan.instances.mode);
    j["r_min_ms"] = plan.instances.r_min_ms;

    // serialize instances in canonical (landmark id, ring) order
    std::vector<const Instance*> ordered;
    ordered.reserve(plan.instances.instances.size());
    for (const auto& inst : plan.instances.instances) ordered.push_back(&inst);
    std::sort(ordered.begin(), ordered.end(), [&](const Instance* a, const Instance* b) {
        if (a->id.landmark != b->id.landmark) return map.id_less(a->id.landmark, b->id.landmark);
        return a->id.ring < b->id.ring;
    });
    auto instances = nlohmann::json::array();
    for (const Instance* inst : ordered) {
        nlohmann::json ji;
        ji["landmark"] = map.id(inst->id.landmark);
        ji["ring"] = inst->id.ring;
        ji["radius_ms"] = inst->radius_ms;
        auto members = nlohmann::json::array();
        for (int u : inst->members) members.push_back(map.id(u));
        ji["members"] = std::move(members);
        instances.push_back(std::move(ji));
    }
    j["instances"] = std::move(instances);

    const PlanSummary s = summarize_plan(map, plan, config);
    j["summary"] = {{"mean_bunch_size", s.mean_bunch_size},
                    {"max_bunch_size", s.max_bunch_size},
                    {"mean_memberships", s.mean_memberships},
                    {"max_memberships", s.max_memberships},
                    {"instance_count", s.instance_count},
                    {"radius_spread", s.radius_spread}};
    return j;
}

namespace {

int require_index(const NetworkMap& map, const std::string& id) {
    const int u = map.index_of(id);
    if (u < 0) throw parse_error("plan references unknown node '" + id + "'");
    return u;
}

}  // namespace

Plan plan_from_json(const NetworkMap& map, const nlohmann::json& j, RunConfig* config_out) {
    try {
        Plan plan;
        if (config_out) *config_out = RunConfig::from_json(j.at("config"));

        const auto& levels = j.at("levels");
        if (levels.size() != static_cast<std::size_t>(map.size()))
            throw parse_error("plan does not match map: node count differs");
        plan.la.k = j.at("k").get<int>();
        plan.la.seed = j.at("seed").get<std::uint64_t>();
        plan.la.levels.assign(static_cast<std::size_t>(map.size()), 0);
        for (auto it = levels.begin(); it != levels.end(); ++it)
            plan.la.levels[static_cast<std::size_t>(require_index(map, it.key()))] =
                it.value().get<int>();

        plan.bunches.assign(static_cast<std::size_t>(map.size()), {});
        const auto& bunches = j.at("bunches");
        for (auto it = bunches.begin(); it != bunches.end(); ++it) {
            const int owner = require_index(map, it.key());
            Bunch& b = plan.bunches[static_cast<std::size_t>(owner)];
            b.owner = owner;
            for (const auto& e : it.value()) {
                BunchEntry entry{require_index(map, e.at(0).get<std::string>()),
                                 e.at(1).get<double>(), e.at(2).get<int>()};
                // the stored distances tie the plan to one specific matrix
                if (entry.dist_ms != map(owner, entry.landmark))
                    throw parse_error("plan does not match map: distance of " + it.key() + " to " +
                                      e.at(0).get<std::string>() + " differs");
                b.entries.push_back(entry);
            }
        }

        plan.clusters.assign(static_cast<std::size_t>(map.size()), {});
        for (int v = 0; v < map.size(); ++v)
            plan.clusters[static_cast<std::size_t>(v)].landmark = v;
        const auto& clusters = j.at("clusters");
        for (auto it = clusters.begin(); it != clusters.end(); ++it) {
            Cluster& c = plan.clusters[static_cast<std::size_t>(require_index(map, it.key()))];
            for (const auto& m : it.value()) c.members.push_back(require_index(map, m.get<std::string>()));
            std::sort(c.members.begin(), c.members.end(),
                      [&](int a, int b) { return map.id_less(a, b); });
        }

        plan.instances.mode = parse_ring_mode(j.at("mode").get<std::string>());
        plan.instances.r_min_ms = j.at("r_min_ms").get<double>();
        plan.instances.memberships_by_node.assign(static_cast<std::size_t>(map.size()), {});
        for (const auto& ji : j.at("instances")) {
            Instance inst;
            inst.id.landmark = require_index(map, ji.at("landmark").get<std::string>());
            inst.id.ring = ji.at("ring").get<int>();
            inst.radius_ms = ji.at("radius_ms").get<double>();
            for (const auto& m : ji.at("members"))
                inst.members.push_back(require_index(map, m.get<std::string>()));
            std::sort(inst.members.begin(), inst.members.end(),
                      [&](int a, int b) { return map.id_less(a, b); });
            plan.instances.instances.push_back(std::move(inst));
        }
        std::sort(plan.instances.instances.begin(), plan.instances.instances.end(),
                  [](const Instance& a, const Instance& b) { return a.id < b.id; });
        for (std::size_t idx = 0; idx < plan.instances.instances.size(); ++idx)
            for (int u : plan.instances.instances[idx].members)
                plan.instances.memberships_by_node[static_cast<std::size_t>(u)].push_back(
                    static_cast<int>(idx));
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("bad plan JSON: ") + e.what());
    }
}

namespace {

void write_preamble(std::ostream& out, const RunConfig& config, const std::string& digests) {
    out << "# config: " << config.to_json().dump() << "\n";
    if (!digests.empty()) out << "# inputs: " << digests << "\n";
}

}  // namespace

void write_records_csv(std::ostream& out, const NetworkMap& map,
                       const std::vector<InteractionRecord>& records, const RunConfig& config,
                       const std::string& input_digests) {
    write_preamble(out, config, input_digests);
    out << "writer,reader,key,direct_ms,crux_ms,baseline_ms,meet_landmark,meet_ring,stretch\n";
    for (const auto& r : records) {
        out << map.id(r.writer) << ',' << map.id(r.reader) << ',' << r.key << ','
            << format_double(r.direct_ms) << ',' << format_double(r.crux_ms) << ','
            << format_double(r.baseline_ms) << ',' << map.id(r.meet.landmark) << ','
            << r.meet.ring << ',' << format_double(r.stretch) << '\n';
    }
}

void write_ops_csv(std::ostream& out, const NetworkMap& map, const WorkloadResult& result,
                   const RunConfig& config, const std::string& input_digests) {
    write_preamble(out, config, input_digests);
    out << "node,crux_ops,baseline_ops\n";
    for (int u : map.canonical_order())
        out << map.id(u) << ',' << result.crux_ops_by_node[static_cast<std::size_t>(u)] << ','
            << result.baseline_ops_by_node[static_cast<std::size_t>(u)] << '\n';
}

void write_buckets_csv(std::ostream& out, const std::vector<BucketRow>& rows,
                       const RunConfig& config, const std::string& input_digests) {
    write_preamble(out, config, input_digests);
    out << "bucket_lo_ms,bucket_hi_ms,count,crux_median_ms,crux_p90_ms,baseline_median_ms,"
           "baseline_p90_ms\n";
    for (const auto& r : rows) {
        out << format_double(r.lo_ms) << ',' << format_double(r.hi_ms) << ',' << r.count << ','
            << format_double(r.crux_median) << ',' << format_double(r.crux_p90) << ','
            << format_double(r.baseline_median) << ',' << format_double(r.baseline_p90) << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const RunConfig& config, const std::string& input_digests) {
    write_preamble(out, config, input_digests);
    out << "k,seed,expected_bunch_size,mean_bunch_size,max_bunch_size,mean_memberships,"
           "max_memberships\n";
    for (const auto& r : rows) {
        out << r.k << ',' << r.seed << ',' << format_double(r.expected_bunch_size) << ','
            << format_double(r.mean_bunch_size) << ',' << r.max_bunch_size << ','
            << format_double(r.mean_memberships) << ',' << r.max_memberships << '\n';
    }
}

nlohmann::json validation_to_json(const ValidationReport& report) {
    nlohmann::json j;
    j["symmetric"] = report.symmetric;
    j["zero_diagonal"] = report.zero_diagonal;
    j["triangle_violations"] = report.triangle_violations;
    if (report.worst_violation_ratio)
        j["worst_violation_ratio"] = *report.worst_violation_ratio;
    j["diameter_ms"] = report.diameter_ms;
    j["radius_spread"] = report.radius_spread;
    return j;
}

}  // namespace crux
