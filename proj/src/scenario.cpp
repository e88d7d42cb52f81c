#include "gridec/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace gridec {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void expect_keys(const json& object, std::initializer_list<const char*> allowed,
                 const std::string& where) {
    for (const auto& [key, value] : object.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(), [&key](const char* name) {
                return key == name;
            }) == allowed.end()) {
            throw InputError(where + ": unknown field '" + key + "'");
        }
    }
}

double number_field(const json& object, const char* key, const std::string& where) {
    if (!object.contains(key)) throw InputError(where + ": missing field '" + key + "'");
    const auto& value = object.at(key);
    if (!value.is_number()) throw InputError(where + ": field '" + key + "' must be a number");
    return value.get<double>();
}

double number_field_or(const json& object, const char* key, double fallback,
                       const std::string& where) {
    if (!object.contains(key)) return fallback;
    const auto& value = object.at(key);
    if (!value.is_number()) throw InputError(where + ": field '" + key + "' must be a number");
    return value.get<double>();
}

std::int64_t integer_field(const json& object, const char* key, const std::string& where) {
    if (!object.contains(key)) throw InputError(where + ": missing field '" + key + "'");
    const auto& value = object.at(key);
    if (!value.is_number_integer()) {
        throw InputError(where + ": field '" + key + "' must be an integer");
    }
    return value.get<std::int64_t>();
}

std::string string_field(const json& object, const char* key, const std::string& where) {
    if (!object.contains(key)) throw InputError(where + ": missing field '" + key + "'");
    const auto& value = object.at(key);
    if (!value.is_string()) throw InputError(where + ": field '" + key + "' must be a string");
    return value.get<std::string>();
}

std::string fixed6(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                      std::chars_format::fixed, 6);
    return std::string(buffer, result.ptr);
}

OperatingMode parse_mode(const std::string& text, const std::string& where) {
    if (text == "init") return OperatingMode::P_init;
    if (text == "zero") return OperatingMode::P_zero;
    throw InputError(where + ": mode must be 'init' or 'zero', got '" + text + "'");
}

} // namespace

GridCase parse_case(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& error) {
        throw InputError(std::string("case JSON: ") + error.what());
    }
    if (!root.is_object()) throw InputError("case JSON: top level must be an object");
    expect_keys(root, {"omega_s", "omega_min", "omega_max", "nodes", "lines"}, "case");

    GridCase grid;
    grid.omega_s = number_field_or(root, "omega_s", 60.0, "case");
    grid.omega_min = number_field_or(root, "omega_min", 59.5, "case");
    grid.omega_max = number_field_or(root, "omega_max", 60.5, "case");

    if (!root.contains("nodes") || !root.at("nodes").is_array()) {
        throw InputError("case: 'nodes' must be an array");
    }
    if (!root.contains("lines") || !root.at("lines").is_array()) {
        throw InputError("case: 'lines' must be an array");
    }

    for (const auto& entry : root.at("nodes")) {
        if (!entry.is_object()) throw InputError("case: every node must be an object");
        const std::string where =
            "node " + (entry.contains("id") ? entry.at("id").dump() : std::string("?"));
        const auto id = static_cast<NodeId>(integer_field(entry, "id", where));
        const std::string kind = string_field(entry, "kind", where);
        if (kind == "generator") {
            expect_keys(entry, {"id", "kind", "pg_init", "pg_min", "pg_max", "damping_d"},
                        where);
            grid.nodes.push_back(Node::generator(
                id, number_field(entry, "pg_init", where),
                number_field(entry, "pg_min", where), number_field(entry, "pg_max", where),
                number_field_or(entry, "damping_d", 0.02, where)));
        } else if (kind == "load") {
            expect_keys(entry, {"id", "kind", "pl_init", "pl_max"}, where);
            grid.nodes.push_back(Node::load(id, number_field(entry, "pl_init", where),
                                            number_field(entry, "pl_max", where)));
        } else if (kind == "bus") {
            expect_keys(entry, {"id", "kind"}, where);
            grid.nodes.push_back(Node::bus(id));
        } else {
            throw InputError(where + ": unknown kind '" + kind + "'");
        }
    }

    for (const auto& entry : root.at("lines")) {
        if (!entry.is_object()) throw InputError("case: every line must be an object");
        const std::string where =
            "line " + (entry.contains("id") ? entry.at("id").dump() : std::string("?"));
        expect_keys(entry, {"id", "from", "to", "x", "f_max"}, where);
        grid.lines.push_back(Line{static_cast<LineId>(integer_field(entry, "id", where)),
                                  static_cast<NodeId>(integer_field(entry, "from", where)),
                                  static_cast<NodeId>(integer_field(entry, "to", where)),
                                  number_field(entry, "x", where),
                                  number_field(entry, "f_max", where)});
    }
    return grid;
}

std::string case_to_json(const GridCase& grid) {
    ordered_json root;
    root["omega_s"] = grid.omega_s;
    root["omega_min"] = grid.omega_min;
    root["omega_max"] = grid.omega_max;

    auto nodes = grid.nodes;
    std::sort(nodes.begin(), nodes.end(),
              [](const Node& a, const Node& b) { return a.id < b.id; });
    root["nodes"] = ordered_json::array();
    for (const auto& node : nodes) {
        ordered_json entry;
        entry["id"] = node.id;
        switch (node.kind) {
            case NodeKind::Generator:
                entry["kind"] = "generator";
                entry["pg_init"] = node.pg_init;
                entry["pg_min"] = node.pg_min;
                entry["pg_max"] = node.pg_max;
                entry["damping_d"] = node.damping_d;
                break;
            case NodeKind::Load:
                entry["kind"] = "load";
                entry["pl_init"] = node.pl_init;
                entry["pl_max"] = node.pl_max;
                break;
            case NodeKind::Bus:
                entry["kind"] = "bus";
                break;
        }
        root["nodes"].push_back(std::move(entry));
    }

    auto lines = grid.lines;
    std::sort(lines.begin(), lines.end(),
              [](const Line& a, const Line& b) { return a.id < b.id; });
    root["lines"] = ordered_json::array();
    for (const auto& line : lines) {
        ordered_json entry;
        entry["id"] = line.id;
        entry["from"] = line.from;
        entry["to"] = line.to;
        entry["x"] = line.reactance_x;
        entry["f_max"] = line.f_max;
        root["lines"].push_back(std::move(entry));
    }
    return root.dump(2) + "\n";
}

GridCase load_case(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open case file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    GridCase grid = parse_case(text.str());
    const auto report = validate_case(grid);
    if (!report.ok()) {
        throw InputError("case file " + path + " is invalid:\n" + report.to_string());
    }
    return grid;
}

void save_case(const GridCase& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write case file: " + path);
    out << case_to_json(grid);
}

NodeSet sample_failed_generators(const GridCase& grid, int count, std::uint64_t seed) {
    auto pool = grid.generator_ids();
    std::sort(pool.begin(), pool.end());
    if (count < 0 || count > static_cast<int>(pool.size())) {
        throw SamplingError("cannot fail " + std::to_string(count) + " of " +
                            std::to_string(pool.size()) + " generators");
    }
    SplitMix64 rng(seed);
    NodeSet out;
    for (int i = 0; i < count; ++i) {
        const auto j = static_cast<std::size_t>(i) + rng.bounded(pool.size() - i);
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        out.insert(pool[static_cast<std::size_t>(i)]);
    }
    return out;
}

NodeSet sample_uncontrollable_clusters(const GridCase& grid, int n_clusters,
                                       int cluster_size, std::uint64_t seed,
                                       const NodeSet& exclude) {
    if (n_clusters < 0 || cluster_size < 1) {
        throw SamplingError("cluster request must have n_clusters >= 0 and cluster_size >= 1");
    }
    std::map<NodeId, NodeSet> adjacency;
    for (const auto& node : grid.nodes) adjacency[node.id];
    for (const auto& line : grid.lines) {
        adjacency[line.from].insert(line.to);
        adjacency[line.to].insert(line.from);
    }

    SplitMix64 rng(seed);
    // An early cluster can wall off the room a later one needs, so a failed
    // placement restarts the whole draw rather than just the stuck cluster.
    for (int attempt = 0; attempt < 200; ++attempt) {
        NodeSet placed;
        bool complete = true;
        for (int c = 0; c < n_clusters && complete; ++c) {
            // Nodes adjacent to an existing cluster would merge with it, so
            // they are blocked along with the chosen and excluded nodes.
            NodeSet blocked = exclude;
            for (NodeId id : placed) {
                blocked.insert(id);
                blocked.insert(adjacency.at(id).begin(), adjacency.at(id).end());
            }
            std::vector<NodeId> roots;
            for (const auto& node : grid.nodes) {
                if (!blocked.count(node.id)) roots.push_back(node.id);
            }
            std::sort(roots.begin(), roots.end());

            NodeSet cluster;
            for (int t = 0; t < 32; ++t) {
                cluster.clear();
                if (roots.empty()) break;
                cluster.insert(roots[rng.bounded(roots.size())]);
                while (static_cast<int>(cluster.size()) < cluster_size) {
                    std::vector<NodeId> frontier;
                    for (NodeId id : cluster) {
                        for (NodeId next : adjacency.at(id)) {
                            if (!cluster.count(next) && !blocked.count(next)) {
                                frontier.push_back(next);
                            }
                        }
                    }
                    std::sort(frontier.begin(), frontier.end());
                    frontier.erase(std::unique(frontier.begin(), frontier.end()),
                                   frontier.end());
                    if (frontier.empty()) break;
                    cluster.insert(frontier[rng.bounded(frontier.size())]);
                }
                if (static_cast<int>(cluster.size()) == cluster_size) break;
            }
            if (static_cast<int>(cluster.size()) == cluster_size) {
                placed.insert(cluster.begin(), cluster.end());
            } else {
                complete = false;
            }
        }
        if (complete) return placed;
    }
    throw SamplingError("could not place " + std::to_string(n_clusters) +
                        " clusters of size " + std::to_string(cluster_size) +
                        " within the sampling budget");
}

namespace {

void check_config(const ScenarioConfig& config) {
    if (config.cluster_size < 1) {
        throw InputError("scenario config: cluster_size must be >= 1");
    }
    if (config.n_uncontrollable < 0 || config.n_failed < 0 || config.replications < 1) {
        throw InputError("scenario config: counts must be non-negative, replications >= 1");
    }
    if (config.n_uncontrollable % config.cluster_size != 0) {
        throw InputError("scenario config: cluster_size must divide n_uncontrollable");
    }
}

/// Exact objective of one full binary assignment, or nothing when the
/// pinned LP is infeasible.
std::optional<double> assignment_objective(const MilpModel& model,
                                           const std::vector<int>& binaries,
                                           const std::vector<int>& assignment) {
    MilpModel pinned = model;
    for (std::size_t i = 0; i < binaries.size(); ++i) {
        pinned.fix_variable(binaries[i], static_cast<double>(assignment[i]));
    }
    const auto lp = solve_lp(pinned, false);
    if (lp.status != MilpStatus::Optimal) return std::nullopt;
    return lp.objective;
}

} // namespace

std::vector<std::vector<int>> solver_hints(const MilpModel& model, const GridCase& grid,
                                           const Partition& partition) {
    const auto binaries = model.binary_indices();
    std::vector<int> ones(binaries.size(), 1);
    if (partition.areas.empty()) return {ones};

    // Per-area keep/cut flags, aligned with partition.areas, projected onto
    // the model's binary layout. Variables no flag governs stay in service.
    const auto project = [&](const std::vector<int>& flags) {
        std::map<std::string, int> byname;
        for (std::size_t k = 0; k < partition.areas.size(); ++k) {
            byname[island_var(partition.areas[k].area_id)] = flags[k];
            for (LineId id : partition.border_lines[k]) byname[z_var(id)] = flags[k];
        }
        std::vector<int> assignment;
        assignment.reserve(binaries.size());
        for (int var : binaries) {
            const auto it = byname.find(model.variable_name(var));
            assignment.push_back(it != byname.end() ? it->second : 1);
        }
        return assignment;
    };

    std::vector<int> informed(partition.areas.size(), 1);
    for (std::size_t k = 0; k < partition.areas.size(); ++k) {
        informed[k] = stability_check(area_island(grid, partition.areas[k]), grid.omega_min,
                                      grid.omega_max)
                              .stable
                          ? 1
                          : 0;
    }

    std::vector<std::vector<int>> hints{ones};
    if (const auto guided = project(informed); guided != ones) hints.push_back(guided);

    // Riding every area through is the usual optimum, but when congestion
    // rules it out the tree search needs a strong incumbent to prune
    // against. Repair greedily: cut the area whose removal gives the best
    // pinned objective until the assignment turns feasible.
    if (!assignment_objective(model, binaries, ones)) {
        std::vector<int> flags(partition.areas.size(), 1);
        bool feasible = false;
        while (!feasible) {
            int best_k = -1;
            double best_obj = kInfinity;
            for (std::size_t k = 0; k < flags.size(); ++k) {
                if (flags[k] == 0) continue;
                flags[k] = 0;
                const auto obj = assignment_objective(model, binaries, project(flags));
                flags[k] = 1;
                if (obj && *obj < best_obj) {
                    best_obj = *obj;
                    best_k = static_cast<int>(k);
                }
            }
            if (best_k >= 0) {
                flags[static_cast<std::size_t>(best_k)] = 0;
                feasible = true;
                continue;
            }
            // No single cut restores feasibility; drop the area holding the
            // most power and search again.
            double worst = -1.0;
            for (std::size_t k = 0; k < flags.size(); ++k) {
                if (flags[k] == 0) continue;
                double held = 0.0;
                for (const auto& [id, point] : partition.areas[k].init_state) {
                    (void)id;
                    held += std::abs(point.pg) + std::abs(point.pl);
                }
                if (held > worst) {
                    worst = held;
                    best_k = static_cast<int>(k);
                }
            }
            if (best_k < 0) break;
            flags[static_cast<std::size_t>(best_k)] = 0;
        }
        if (feasible) {
            auto repaired = project(flags);
            if (std::find(hints.begin(), hints.end(), repaired) == hints.end()) {
                hints.push_back(std::move(repaired));
            }
        }
    }
    return hints;
}

namespace {

struct SolveOutput {
    bool ok = false;
    std::string note;
    MilpSolution solution;
};

SolveOutput checked_solve(const MilpModel& model, const GridCase& grid,
                          const Partition& partition, bool verify, const char* label) {
    SolveOutput out;
    out.solution = solve_milp(model, solver_hints(model, grid, partition));
    if (out.solution.status != MilpStatus::Optimal) {
        out.note = std::string(label) + " solve: " + to_string(out.solution.status);
        return out;
    }
    if (verify && model.binary_count() <= 20) {
        const auto reference = brute_force_milp(model);
        if (reference.status != MilpStatus::Optimal ||
            std::abs(reference.objective - out.solution.objective) > kObjectiveTol) {
            throw std::logic_error(std::string("verification failed: ") + label +
                                   " solve disagrees with brute force (" +
                                   std::to_string(out.solution.objective) + " vs " +
                                   std::to_string(reference.objective) + ")");
        }
    }
    out.ok = true;
    return out;
}

} // namespace

ScenarioRecord run_scenario(const GridCase& grid, const ScenarioConfig& config,
                            std::int64_t index, bool verify) {
    check_config(config);
    ScenarioRecord record;
    record.index = index;

    const std::uint64_t scenario_seed =
        derive_scenario_seed(config.master_seed, static_cast<std::uint64_t>(index));
    record.failed =
        sample_failed_generators(grid, config.n_failed, derive_scenario_seed(scenario_seed, 1));
    record.uncontrollable = sample_uncontrollable_clusters(
        grid, config.n_uncontrollable / config.cluster_size, config.cluster_size,
        derive_scenario_seed(scenario_seed, 2));

    const auto full_partition = partition_areas(grid, record.failed, {});
    const auto full_model = build_partial_model(grid, full_partition);
    const auto full = checked_solve(full_model, grid, full_partition, verify, "full");
    if (!full.ok) {
        record.anomaly = true;
        record.note = full.note;
        return record;
    }
    const auto full_outcome = extract_outcome(full_model, full.solution, full_partition, grid);
    record.yield_full = compute_yield(full_outcome, {}, grid).ratio;

    const auto partition = apply_mode(
        partition_areas(grid, record.failed, record.uncontrollable), grid, config.mode);
    const auto partial_model = build_partial_model(grid, partition);
    const auto partial = checked_solve(partial_model, grid, partition, verify, "partial");
    if (!partial.ok) {
        record.anomaly = true;
        record.note = partial.note;
        return record;
    }
    const auto outcome = extract_outcome(partial_model, partial.solution, partition, grid);

    std::map<AreaId, double> cascade_served;
    for (const auto& area : partition.areas) {
        const int flag = outcome.island_stable.at(area.area_id);
        record.island_flags[area.area_id] = flag;
        if (flag == 1) continue;
        ++record.unstable_areas;
        const auto cascade =
            run_cascade(area_island(grid, area), grid.omega_min, grid.omega_max);
        cascade_served[area.area_id] = cascade.served;
        record.cascades.push_back({area.area_id, cascade.served, cascade.log});
    }
    record.yield_partial = compute_yield(outcome, cascade_served, grid).ratio;
    return record;
}

SweepResult sweep(const GridCase& grid, const std::vector<ScenarioConfig>& configs,
                  int jobs, bool verify) {
    for (const auto& config : configs) check_config(config);
    SweepResult result;
    result.rows.resize(configs.size());
    result.records.resize(configs.size());
    std::vector<std::pair<std::size_t, std::int64_t>> tasks;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        result.rows[c].config = configs[c];
        result.records[c].resize(static_cast<std::size_t>(configs[c].replications));
        for (std::int64_t r = 0; r < configs[c].replications; ++r) tasks.push_back({c, r});
    }

    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&]() {
        for (;;) {
            const std::size_t at = cursor.fetch_add(1);
            if (at >= tasks.size()) return;
            const auto [c, r] = tasks[at];
            try {
                result.records[c][static_cast<std::size_t>(r)] =
                    run_scenario(grid, configs[c], r, verify);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                cursor.store(tasks.size());
                return;
            }
        }
    };

    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t c = 0; c < configs.size(); ++c) {
        double sum_partial = 0.0;
        double sum_full = 0.0;
        int unstable = 0;
        int counted = 0;
        for (const auto& record : result.records[c]) {
            if (record.anomaly) continue;
            ++counted;
            sum_partial += record.yield_partial;
            sum_full += record.yield_full;
            if (record.unstable_areas > 0) ++unstable;
        }
        auto& row = result.rows[c];
        const double denom = counted > 0 ? counted : 1;
        row.mean_yield_partial = sum_partial / denom;
        row.mean_yield_full = sum_full / denom;
        row.frac_unstable = static_cast<double>(unstable) / denom;
        row.frac_pzero_gt_pinit = std::numeric_limits<double>::quiet_NaN();
    }

    // Pair opposite-mode rows (equal in everything else) replication by
    // replication; both get the fraction of replications where holding the
    // last dispatch loses to tripping.
    std::vector<bool> claimed(configs.size(), false);
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (claimed[i] || configs[i].mode != OperatingMode::P_init) continue;
        for (std::size_t j = 0; j < configs.size(); ++j) {
            if (claimed[j] || configs[j].mode != OperatingMode::P_zero) continue;
            const auto& a = configs[i];
            const auto& b = configs[j];
            if (a.n_failed != b.n_failed || a.n_uncontrollable != b.n_uncontrollable ||
                a.cluster_size != b.cluster_size || a.replications != b.replications ||
                a.master_seed != b.master_seed) {
                continue;
            }
            int wins = 0;
            int pairs = 0;
            for (int r = 0; r < a.replications; ++r) {
                const auto& init = result.records[i][static_cast<std::size_t>(r)];
                const auto& zero = result.records[j][static_cast<std::size_t>(r)];
                if (init.anomaly || zero.anomaly) continue;
                ++pairs;
                if (zero.yield_partial > init.yield_partial) ++wins;
            }
            const double frac = pairs > 0 ? static_cast<double>(wins) / pairs
                                          : std::numeric_limits<double>::quiet_NaN();
            result.rows[i].frac_pzero_gt_pinit = frac;
            result.rows[j].frac_pzero_gt_pinit = frac;
            claimed[i] = claimed[j] = true;
            break;
        }
    }
    return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
    out << "n_failed,n_uncontrollable,cluster_size,mode,mean_yield_partial,mean_yield_full,"
           "frac_unstable,frac_pzero_gt_pinit,replications,master_seed\n";
    for (const auto& row : result.rows) {
        out << row.config.n_failed << ',' << row.config.n_uncontrollable << ','
            << row.config.cluster_size << ',' << to_string(row.config.mode) << ','
            << fixed6(row.mean_yield_partial) << ',' << fixed6(row.mean_yield_full) << ','
            << fixed6(row.frac_unstable) << ',' << fixed6(row.frac_pzero_gt_pinit) << ','
            << row.config.replications << ',' << row.config.master_seed << '\n';
    }
}

std::string record_to_json(const ScenarioRecord& record, int config_index) {
    ordered_json root;
    root["config"] = config_index;
    root["index"] = record.index;
    root["failed"] = record.failed;
    root["uncontrollable"] = record.uncontrollable;
    root["anomaly"] = record.anomaly;
    if (record.anomaly) {
        root["note"] = record.note;
        return root.dump();
    }
    root["yield_full"] = record.yield_full;
    root["yield_partial"] = record.yield_partial;
    root["island_flags"] = ordered_json::array();
    for (const auto& [area, flag] : record.island_flags) {
        root["island_flags"].push_back({{"area", area}, {"stable", flag}});
    }
    root["unstable_areas"] = record.unstable_areas;
    root["cascades"] = ordered_json::array();
    for (const auto& cascade : record.cascades) {
        ordered_json entry;
        entry["area"] = cascade.area;
        entry["served"] = cascade.served;
        entry["log"] = ordered_json::array();
        for (const auto& action : cascade.log) {
            entry["log"].push_back({{"kind", to_string(action.kind)},
                                    {"target", action.target},
                                    {"observed", action.observed}});
        }
        root["cascades"].push_back(std::move(entry));
    }
    return root.dump();
}

SweepSpec parse_sweep_spec(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& error) {
        throw InputError(std::string("sweep JSON: ") + error.what());
    }
    if (!root.is_object()) throw InputError("sweep JSON: top level must be an object");
    expect_keys(root, {"master_seed", "replications", "records", "configs"}, "sweep");

    SweepSpec spec;
    std::uint64_t default_seed = 0;
    if (root.contains("master_seed")) {
        default_seed = static_cast<std::uint64_t>(integer_field(root, "master_seed", "sweep"));
    }
    int default_replications = 100;
    if (root.contains("replications")) {
        default_replications =
            static_cast<int>(integer_field(root, "replications", "sweep"));
    }
    if (root.contains("records")) {
        if (!root.at("records").is_boolean()) {
            throw InputError("sweep: field 'records' must be a boolean");
        }
        spec.emit_records = root.at("records").get<bool>();
    }
    if (!root.contains("configs") || !root.at("configs").is_array()) {
        throw InputError("sweep: 'configs' must be an array");
    }
    int position = 0;
    for (const auto& entry : root.at("configs")) {
        const std::string where = "config " + std::to_string(position++);
        if (!entry.is_object()) throw InputError(where + ": must be an object");
        expect_keys(entry,
                    {"n_failed", "n_uncontrollable", "cluster_size", "mode", "replications",
                     "master_seed"},
                    where);
        ScenarioConfig config;
        config.n_failed = static_cast<int>(integer_field(entry, "n_failed", where));
        config.n_uncontrollable =
            static_cast<int>(integer_field(entry, "n_uncontrollable", where));
        config.cluster_size = static_cast<int>(integer_field(entry, "cluster_size", where));
        config.mode = parse_mode(string_field(entry, "mode", where), where);
        config.replications = entry.contains("replications")
                                  ? static_cast<int>(integer_field(entry, "replications", where))
                                  : default_replications;
        config.master_seed = entry.contains("master_seed")
                                 ? static_cast<std::uint64_t>(
                                       integer_field(entry, "master_seed", where))
                                 : default_seed;
        check_config(config);
        spec.configs.push_back(config);
    }
    return spec;
}

int default_jobs() {
    const char* env = std::getenv("GRIDEC_JOBS");
    if (env == nullptr || *env == '\0') return 1;
    int value = 0;
    const auto result = std::from_chars(env, env + std::strlen(env), value);
    if (result.ec != std::errc() || result.ptr != env + std::strlen(env) || value < 1) {
        return 1;
    }
    return value;
}

} // namespace gridec
