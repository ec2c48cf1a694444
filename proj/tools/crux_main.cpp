#include "crux/errors.hpp"
#include "crux/oracle.hpp"
#include "crux/plan_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace crux;

MapFormat resolve_format(const std::string& flag, const std::string& path) {
    if (flag != "auto") return parse_map_format(flag);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return MapFormat::json;
    return MapFormat::csv;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot open output file '" + path + "'");
    return out;
}

int cmd_validate(const std::string& map_path, const std::string& format, double r_min,
                 bool as_json) {
    const NetworkMap map = load_map_file(map_path, resolve_format(format, map_path));
    const ValidationReport rep = validate(map, r_min);
    if (as_json) {
        std::cout << validation_to_json(rep).dump(1) << "\n";
    } else {
        std::cout << "nodes:               " << map.size() << "\n"
                  << "symmetric:           " << (rep.symmetric ? "yes" : "no") << "\n"
                  << "zero diagonal:       " << (rep.zero_diagonal ? "yes" : "no") << "\n"
                  << "triangle violations: " << rep.triangle_violations << "\n";
        if (rep.worst_violation_ratio)
            std::cout << "worst violation:     " << *rep.worst_violation_ratio << "\n";
        std::cout << "diameter:            " << rep.diameter_ms << " ms\n"
                  << "radius spread R:     " << rep.radius_spread << "\n";
    }
    return 0;
}

int cmd_synth(const std::string& out_path, int n, std::uint64_t seed, const std::string& model,
              const std::string& format) {
    const NetworkMap map = synth_map(seed, n, parse_synth_model(model));
    auto out = open_out(out_path);
    save_map(map, out, resolve_format(format, out_path));
    std::cout << "wrote " << map.size() << "-node map to " << out_path << "\n";
    return 0;
}

int cmd_plan(const std::string& map_path, const std::string& out_path, const RunConfig& config,
             const std::string& format) {
    const NetworkMap map = load_map_file(map_path, resolve_format(format, map_path));
    const Plan plan = build_plan(map, config);
    const nlohmann::json j = plan_to_json(map, plan, config, file_digest(map_path));
    auto out = open_out(out_path);
    out << j.dump(1) << "\n";

    const PlanSummary s = summarize_plan(map, plan, config);
    std::cout << "nodes:             " << map.size() << "\n"
              << "instances:         " << s.instance_count << "\n"
              << "mean bunch size:   " << s.mean_bunch_size << " (expected "
              << expected_bunch_size(map.size(), config.k) << ")\n"
              << "mean memberships:  " << s.mean_memberships << "\n"
              << "max memberships:   " << s.max_memberships << "\n"
              << "radius spread R:   " << s.radius_spread << "\n";
    return 0;
}

int cmd_simulate(const std::string& map_path, const std::string& plan_path,
                 const std::string& out_prefix, RunConfig config, const std::string& format,
                 bool seed_given) {
    const NetworkMap map = load_map_file(map_path, resolve_format(format, map_path));

    std::ifstream plan_in(plan_path);
    if (!plan_in) throw parse_error("cannot open plan file '" + plan_path + "'");
    nlohmann::json plan_json;
    try {
        plan_in >> plan_json;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("bad plan JSON: ") + e.what());
    }
    RunConfig plan_config;
    const Plan plan = plan_from_json(map, plan_json, &plan_config);
    config.k = plan_config.k;
    config.r_min_ms = plan_config.r_min_ms;
    config.mode = plan_config.mode;
    if (!seed_given) config.seed = plan_config.seed;

    const auto plugin = make_plugin(config.plugin, config.o_a_ms);
    const SimContext ctx(map, plan.instances, plan.bunches, plan.la, config.policy, *plugin);
    const Workload wl = make_workload(map, config.seed, config.ops_per_node);
    const WorkloadResult result = run_workload(ctx, wl, config.paced);

    const std::string digests =
        "map=" + file_digest(map_path) + " plan=" + file_digest(plan_path);
    {
        auto out = open_out(out_prefix + ".csv");
        write_records_csv(out, map, result.records, config, digests);
    }
    {
        auto out = open_out(out_prefix + "_ops.csv");
        write_ops_csv(out, map, result, config, digests);
    }
    {
        auto out = open_out(out_prefix + "_buckets.csv");
        std::vector<BucketRow> rows;
        if (!result.records.empty()) rows = bucket_stats(result.records, config.bucket_count);
        write_buckets_csv(out, rows, config, digests);
    }
    std::cout << "simulated " << result.records.size() << " interactions -> " << out_prefix
              << ".csv\n";
    return 0;
}

int cmd_sweep(const std::string& map_path, const std::string& out_path,
              const std::vector<int>& k_values, int seeds, const RunConfig& base,
              const std::string& format) {
    const NetworkMap map = load_map_file(map_path, resolve_format(format, map_path));
    std::vector<SweepRow> rows;
    for (int k : k_values) {
        for (int s = 1; s <= seeds; ++s) {
            RunConfig config = base;
            config.k = k;
            config.seed = static_cast<std::uint64_t>(s);
            const Plan plan = build_plan(map, config);
            const PlanSummary sum = summarize_plan(map, plan, config);
            rows.push_back({k, config.seed, expected_bunch_size(map.size(), k),
                            sum.mean_bunch_size, sum.max_bunch_size, sum.mean_memberships,
                            sum.max_memberships});
        }
    }
    auto out = open_out(out_path);
    write_sweep_csv(out, rows, base, "map=" + file_digest(map_path));
    std::cout << "wrote " << rows.size() << " sweep rows to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Locality-preserving deployment planner and latency simulator"};
    app.require_subcommand(1);

    std::string map_path, plan_path, out_path, format = "auto";
    std::string model = "euclidean", mode = "inclusive", policy = "symmetric", plugin = "kv";
    double r_min = 1.0, o_a = 0.0;
    int n = 16, k = 2, ops_per_node = 100, buckets = 13, seeds = 20;
    std::uint64_t seed = 1;
    bool as_json = false, paced = false;
    std::vector<int> k_values{2, 3, 5};

    auto* validate_cmd = app.add_subcommand("validate", "Check a latency matrix and report metrics");
    validate_cmd->add_option("map", map_path, "latency matrix file")->required();
    validate_cmd->add_option("--format", format, "csv|json (default: by extension)");
    validate_cmd->add_option("--rmin-ms", r_min, "smallest ring radius in ms");
    validate_cmd->add_flag("--json", as_json, "print the report as JSON");

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic latency matrix");
    synth_cmd->add_option("out", out_path, "output map file")->required();
    synth_cmd->add_option("--n", n, "node count")->required();
    synth_cmd->add_option("--seed", seed, "RNG seed");
    synth_cmd->add_option("--model", model, "euclidean|clustered-euclidean|uniform");
    synth_cmd->add_option("--format", format, "csv|json (default: by extension)");

    auto* plan_cmd = app.add_subcommand("plan", "Compute levels, bunches, clusters and instances");
    plan_cmd->add_option("map", map_path, "latency matrix file")->required();
    plan_cmd->add_option("out", out_path, "output plan JSON")->required();
    plan_cmd->add_option("--k", k, "maximum level constant");
    plan_cmd->add_option("--seed", seed, "level assignment seed");
    plan_cmd->add_option("--rmin-ms", r_min, "smallest ring radius in ms");
    plan_cmd->add_option("--mode", mode, "inclusive|exclusive rings");
    plan_cmd->add_option("--format", format, "csv|json (default: by extension)");

    auto* sim_cmd = app.add_subcommand("simulate", "Run a workload against a plan");
    sim_cmd->add_option("map", map_path, "latency matrix file")->required();
    sim_cmd->add_option("plan", plan_path, "plan JSON from 'plan'")->required();
    sim_cmd->add_option("out", out_path, "output prefix for .csv/_ops.csv/_buckets.csv")->required();
    sim_cmd->add_option("--plugin", plugin, "kv|pubsub|multihop-kv");
    sim_cmd->add_option("--policy", policy, "symmetric|asymmetric write replication");
    sim_cmd->add_option("--oa-ms", o_a, "per-operation overhead o_A in ms");
    auto* seed_opt = sim_cmd->add_option("--seed", seed, "workload seed (default: plan seed)");
    sim_cmd->add_option("--ops-per-node", ops_per_node, "write interactions per node");
    sim_cmd->add_option("--buckets", buckets, "distance bucket count");
    sim_cmd->add_flag("--paced", paced, "expanding-ring request pacing");
    sim_cmd->add_option("--format", format, "csv|json (default: by extension)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Bunch/membership statistics across k and seeds");
    sweep_cmd->add_option("map", map_path, "latency matrix file")->required();
    sweep_cmd->add_option("out", out_path, "output CSV")->required();
    sweep_cmd->add_option("--k", k_values, "level constants to sweep");
    sweep_cmd->add_option("--seeds", seeds, "seeds 1..N per k");
    sweep_cmd->add_option("--rmin-ms", r_min, "smallest ring radius in ms");
    sweep_cmd->add_option("--mode", mode, "inclusive|exclusive rings");
    sweep_cmd->add_option("--format", format, "csv|json (default: by extension)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig config;
        config.k = k;
        config.seed = seed;
        config.r_min_ms = r_min;
        config.mode = parse_ring_mode(mode);
        config.policy = parse_policy(policy);
        config.plugin = parse_plugin(plugin);
        config.o_a_ms = o_a;
        config.paced = paced;
        config.ops_per_node = ops_per_node;
        config.bucket_count = buckets;

        if (validate_cmd->parsed()) return cmd_validate(map_path, format, r_min, as_json);
        if (synth_cmd->parsed()) return cmd_synth(out_path, n, seed, model, format);
        if (plan_cmd->parsed()) return cmd_plan(map_path, out_path, config, format);
        if (sim_cmd->parsed())
            return cmd_simulate(map_path, plan_path, out_path, config, format,
                                seed_opt->count() > 0);
        if (sweep_cmd->parsed()) return cmd_sweep(map_path, out_path, k_values, seeds, config, format);
    } catch (const crux::internal_error& e) {
        std::cerr << "internal invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
