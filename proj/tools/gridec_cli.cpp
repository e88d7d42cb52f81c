#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridec/cascade.hpp"
#include "gridec/emergency.hpp"
#include "gridec/scenario.hpp"

namespace {

using nlohmann::ordered_json;
using namespace gridec;

NodeSet to_node_set(const std::vector<int>& ids) {
    return NodeSet(ids.begin(), ids.end());
}

template <typename Key>
ordered_json id_values(const std::map<Key, double>& values) {
    ordered_json out = ordered_json::array();
    for (const auto& [id, value] : values) out.push_back({{"id", id}, {"value", value}});
    return out;
}

ordered_json yield_json(const Yield& yield) {
    return {{"served", yield.served}, {"initial", yield.initial}, {"ratio", yield.ratio}};
}

ordered_json outcome_json(const ControlOutcome& outcome) {
    ordered_json out;
    out["objective"] = outcome.objective;
    out["pg"] = id_values(outcome.pg);
    out["pg_effective"] = id_values(outcome.pg_effective);
    out["pl"] = id_values(outcome.pl);
    out["omega"] = id_values(outcome.omega);
    out["omega_pending"] = outcome.omega_pending;
    out["flow"] = id_values(outcome.flow);
    out["line_up"] = ordered_json::array();
    for (const auto& [id, up] : outcome.line_up) {
        out["line_up"].push_back({{"id", id}, {"up", up}});
    }
    out["island_stable"] = ordered_json::array();
    for (const auto& [area, flag] : outcome.island_stable) {
        out["island_stable"].push_back({{"area", area}, {"stable", flag}});
    }
    return out;
}

ordered_json cascade_json(const CascadeResult& result) {
    ordered_json out;
    out["served"] = result.served;
    out["log"] = ordered_json::array();
    for (const auto& action : result.log) {
        out["log"].push_back({{"kind", to_string(action.kind)},
                              {"target", action.target},
                              {"observed", action.observed}});
    }
    out["final_islands"] = ordered_json::array();
    for (const auto& island : result.final_islands) {
        out["final_islands"].push_back({{"nodes", island.nodes}, {"omega", island.omega}});
    }
    return out;
}

int cmd_validate(const std::string& case_path) {
    std::ifstream in(case_path);
    if (!in) throw InputError("cannot open case file: " + case_path);
    std::ostringstream text;
    text << in.rdbuf();
    const GridCase grid = parse_case(text.str());
    const auto report = validate_case(grid);
    if (!report.ok()) {
        std::cerr << report.to_string();
        return 2;
    }
    std::cout << "ok: " << grid.nodes.size() << " nodes, " << grid.lines.size()
              << " lines, " << grid.total_initial_load() << " pu initial load\n";
    return 0;
}

int solve_and_print(const GridCase& grid, const Partition& partition) {
    const auto model = build_partial_model(grid, partition);
    const auto solution = solve_milp(model, solver_hints(model, grid, partition));
    if (solution.status != MilpStatus::Optimal) {
        std::cerr << "solver returned " << to_string(solution.status) << "\n";
        return 3;
    }
    const auto outcome = extract_outcome(model, solution, partition, grid);

    ordered_json out = outcome_json(outcome);
    std::map<AreaId, double> cascade_served;
    ordered_json cascades = ordered_json::array();
    for (const auto& area : partition.areas) {
        if (outcome.island_stable.at(area.area_id) == 1) continue;
        const auto result =
            run_cascade(area_island(grid, area), grid.omega_min, grid.omega_max);
        cascade_served[area.area_id] = result.served;
        ordered_json entry = cascade_json(result);
        entry["area"] = area.area_id;
        cascades.push_back(std::move(entry));
    }
    if (!partition.areas.empty()) out["cascades"] = std::move(cascades);
    out["yield"] = yield_json(compute_yield(outcome, cascade_served, grid));
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_solve_full(const std::string& case_path, const std::vector<int>& fail) {
    const GridCase grid = load_case(case_path);
    return solve_and_print(grid, partition_areas(grid, to_node_set(fail), {}));
}

int cmd_solve_partial(const std::string& case_path, const std::vector<int>& fail,
                      const std::vector<int>& uncontrollable, OperatingMode mode) {
    const GridCase grid = load_case(case_path);
    auto partition = partition_areas(grid, to_node_set(fail), to_node_set(uncontrollable));
    partition = apply_mode(partition, grid, mode);
    return solve_and_print(grid, partition);
}

int cmd_cascade(const std::string& case_path, const std::vector<int>& island,
                OperatingMode mode, RelayPolicy policy) {
    const GridCase grid = load_case(case_path);
    auto partition = partition_areas(grid, {}, to_node_set(island));
    partition = apply_mode(partition, grid, mode);

    ordered_json out = ordered_json::array();
    for (const auto& area : partition.areas) {
        const auto state = area_island(grid, area);
        const auto stability = stability_check(state, grid.omega_min, grid.omega_max);
        ordered_json entry;
        entry["area"] = area.area_id;
        entry["nodes"] = area.nodes;
        entry["stable"] = stability.stable;
        if (!stability.stable) entry["diagnostic"] = stability.diagnostic;
        entry.update(cascade_json(run_cascade(state, grid.omega_min, grid.omega_max, policy)));
        out.push_back(std::move(entry));
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& case_path, const std::string& config_path,
              const std::string& out_dir, int jobs, bool verify) {
    const GridCase grid = load_case(case_path);
    std::ifstream in(config_path);
    if (!in) throw InputError("cannot open sweep config: " + config_path);
    std::ostringstream text;
    text << in.rdbuf();
    const SweepSpec spec = parse_sweep_spec(text.str());

    const auto result = sweep(grid, spec.configs, jobs, verify);

    std::filesystem::create_directories(out_dir);
    const auto csv_path = std::filesystem::path(out_dir) / "sweep.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw InputError("cannot write " + csv_path.string());
    write_csv(result, csv);

    if (spec.emit_records) {
        const auto jsonl_path = std::filesystem::path(out_dir) / "records.jsonl";
        std::ofstream jsonl(jsonl_path);
        if (!jsonl) throw InputError("cannot write " + jsonl_path.string());
        for (std::size_t c = 0; c < result.records.size(); ++c) {
            for (const auto& record : result.records[c]) {
                jsonl << record_to_json(record, static_cast<int>(c)) << "\n";
            }
        }
    }
    std::cout << "wrote " << csv_path.string() << " (" << result.rows.size()
              << " rows)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridec: grid emergency control under partial communication"};
    app.require_subcommand(1);

    const std::map<std::string, OperatingMode> mode_names{
        {"init", OperatingMode::P_init}, {"zero", OperatingMode::P_zero}};
    const std::map<std::string, RelayPolicy> policy_names{
        {"minimal", RelayPolicy::MinimalDisturbance},
        {"largest", RelayPolicy::LargestFirst}};

    std::string case_path;
    std::vector<int> fail_ids;
    std::vector<int> unc_ids;
    std::vector<int> island_ids;
    OperatingMode mode = OperatingMode::P_init;
    RelayPolicy policy = RelayPolicy::MinimalDisturbance;
    std::string config_path;
    std::string out_dir;
    int jobs = default_jobs();
    bool verify = false;

    auto* validate = app.add_subcommand("validate", "Check a case file");
    validate->add_option("case", case_path, "case JSON file")->required();

    auto* solve_full = app.add_subcommand(
        "solve-full", "Optimal emergency control with every node reachable");
    solve_full->add_option("case", case_path, "case JSON file")->required();
    solve_full->add_option("--fail", fail_ids, "node ids taken out of service")
        ->delimiter(',');

    auto* solve_partial = app.add_subcommand(
        "solve-partial", "Emergency control with uncontrollable areas");
    solve_partial->add_option("case", case_path, "case JSON file")->required();
    solve_partial->add_option("--fail", fail_ids, "node ids taken out of service")
        ->delimiter(',');
    solve_partial
        ->add_option("--uncontrollable", unc_ids, "node ids that cannot be reached")
        ->delimiter(',')
        ->required();
    solve_partial->add_option("--mode", mode, "held operating point")
        ->transform(CLI::CheckedTransformer(mode_names))
        ->required();

    auto* cascade = app.add_subcommand(
        "cascade", "Relay cascade for the islands formed by the given nodes");
    cascade->add_option("case", case_path, "case JSON file")->required();
    cascade->add_option("--island", island_ids, "node ids forming the cut-off islands")
        ->delimiter(',')
        ->required();
    cascade->add_option("--mode", mode, "held operating point")
        ->transform(CLI::CheckedTransformer(mode_names))
        ->required();
    cascade->add_option("--policy", policy, "generator trip order")
        ->transform(CLI::CheckedTransformer(policy_names));

    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over scenario configs");
    sweep_cmd->add_option("case", case_path, "case JSON file")->required();
    sweep_cmd->add_option("--config", config_path, "sweep spec JSON")->required();
    sweep_cmd->add_option("--out", out_dir, "output directory")->required();
    sweep_cmd->add_option("--jobs", jobs, "worker threads");
    sweep_cmd->add_flag("--verify", verify,
                        "cross-check small solves against brute force");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*validate) return cmd_validate(case_path);
        if (*solve_full) return cmd_solve_full(case_path, fail_ids);
        if (*solve_partial) return cmd_solve_partial(case_path, fail_ids, unc_ids, mode);
        if (*cascade) return cmd_cascade(case_path, island_ids, mode, policy);
        if (*sweep_cmd) return cmd_sweep(case_path, config_path, out_dir, jobs, verify);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SamplingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
