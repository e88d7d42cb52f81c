#include "gridec/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace gridec {

namespace {

struct LiveState {
    std::map<NodeId, IslandNode> nodes;
    std::vector<Line> lines; // original lines; filtered against `nodes` on use
    double omega_s = 60.0;

    NodeSet node_ids() const {
        NodeSet ids;
        for (const auto& [id, node] : nodes) {
            (void)node;
            ids.insert(id);
        }
        return ids;
    }

    std::vector<Line> live_lines() const {
        std::vector<Line> out;
        for (const auto& line : lines) {
            if (nodes.count(line.from) && nodes.count(line.to)) out.push_back(line);
        }
        return out;
    }

    void drop_node(NodeId id) { nodes.erase(id); }
    void drop_line(LineId id) {
        lines.erase(std::remove_if(lines.begin(), lines.end(),
                                   [id](const Line& line) { return line.id == id; }),
                    lines.end());
    }
};

struct Equilibrium {
    double sum_alpha = 0.0;
    double sum_power = 0.0;
    double omega = 0.0; // meaningful only when sum_alpha > 0
};

Equilibrium equilibrate(const LiveState& state, const NodeSet& members) {
    Equilibrium eq;
    for (NodeId id : members) {
        const IslandNode& node = state.nodes.at(id);
        eq.sum_alpha += node.alpha;
        eq.sum_power += node.power;
    }
    if (eq.sum_alpha > 0.0) eq.omega = state.omega_s + eq.sum_power / eq.sum_alpha;
    return eq;
}

IslandState sub_island(const LiveState& state, const NodeSet& members) {
    IslandState island;
    island.omega_s = state.omega_s;
    for (NodeId id : members) island.nodes.push_back(state.nodes.at(id));
    for (const auto& line : state.live_lines()) {
        if (members.count(line.from) && members.count(line.to)) island.lines.push_back(line);
    }
    return island;
}

// Effective injections at the droop equilibrium; sums to ~0 by construction.
std::vector<double> effective_injections(const IslandState& island, double omega,
                                         double omega_s) {
    std::vector<double> inj;
    inj.reserve(island.nodes.size());
    for (const auto& node : island.nodes) {
        inj.push_back(node.power - node.alpha * (omega - omega_s));
    }
    return inj;
}

} // namespace

std::string to_string(RelayKind kind) {
    switch (kind) {
        case RelayKind::TripGenerator: return "trip-generator";
        case RelayKind::ShedLoad: return "shed-load";
        case RelayKind::TripLine: return "trip-line";
        case RelayKind::SplitIsland: return "split-island";
        case RelayKind::Done: return "done";
    }
    return "?";
}

CascadeResult run_cascade(const IslandState& island, double omega_min, double omega_max,
                          RelayPolicy policy) {
    LiveState state{{}, island.lines, island.omega_s};
    for (const auto& node : island.nodes) state.nodes.emplace(node.id, node);
    std::sort(state.lines.begin(), state.lines.end(),
              [](const Line& a, const Line& b) { return a.id < b.id; });

    CascadeResult result;
    const std::size_t iteration_cap = island.nodes.size() + island.lines.size() + 2;

    for (std::size_t iteration = 0;; ++iteration) {
        if (iteration > iteration_cap) {
            throw std::logic_error("run_cascade: relay loop failed to terminate");
        }
        const auto components = connected_components(state.node_ids(), state.live_lines());

        bool acted = false;
        // Frequency relays take priority over line relays everywhere.
        for (const auto& members : components) {
            const Equilibrium eq = equilibrate(state, members);
            if (eq.sum_alpha <= 0.0) {
                NodeId first_load = -1;
                NodeId first_source = -1;
                for (NodeId id : members) {
                    const IslandNode& node = state.nodes.at(id);
                    if (node.power < 0.0 && first_load < 0) first_load = id;
                    if (node.kind == NodeKind::Generator && node.power > 0.0 &&
                        first_source < 0) {
                        first_source = id;
                    }
                }
                if (first_load >= 0) {
                    // No droop at all: frequency collapses, relays black the
                    // sub-island's load out as one event.
                    for (NodeId id : members) {
                        if (state.nodes.at(id).power < 0.0) state.drop_node(id);
                    }
                    result.log.push_back({RelayKind::ShedLoad, first_load, 0.0});
                    acted = true;
                    break;
                }
                if (eq.sum_power > kRelayTol && first_source >= 0) {
                    for (NodeId id : members) {
                        const IslandNode& node = state.nodes.at(id);
                        if (node.kind == NodeKind::Generator && node.power > 0.0) {
                            state.drop_node(id);
                        }
                    }
                    result.log.push_back({RelayKind::TripGenerator, first_source, 0.0});
                    acted = true;
                    break;
                }
                continue; // balanced with no droop: holds at omega_s
            }

            if (eq.omega > omega_max + kRelayTol) {
                NodeId pick = -1;
                double pick_output = 0.0;
                for (NodeId id : members) {
                    const IslandNode& node = state.nodes.at(id);
                    if (node.kind != NodeKind::Generator) continue;
                    const double output =
                        node.power - node.alpha * (eq.omega - state.omega_s);
                    const bool better = policy == RelayPolicy::MinimalDisturbance
                                            ? output < pick_output - 1e-12
                                            : output > pick_output + 1e-12;
                    if (pick < 0 || better) {
                        pick = id;
                        pick_output = output;
                    }
                }
                state.drop_node(pick);
                result.log.push_back({RelayKind::TripGenerator, pick, eq.omega});
                acted = true;
                break;
            }
            if (eq.omega < omega_min - kRelayTol) {
                NodeId pick = -1;
                double pick_size = 0.0;
                for (NodeId id : members) {
                    const IslandNode& node = state.nodes.at(id);
                    if (node.power >= 0.0) continue;
                    const double size = -node.power;
                    const bool better = policy == RelayPolicy::MinimalDisturbance
                                            ? size < pick_size - 1e-12
                                            : size > pick_size + 1e-12;
                    if (pick < 0 || better) {
                        pick = id;
                        pick_size = size;
                    }
                }
                if (pick < 0) {
                    throw std::logic_error(
                        "run_cascade: under-frequency with nothing left to shed");
                }
                state.drop_node(pick);
                result.log.push_back({RelayKind::ShedLoad, pick, eq.omega});
                acted = true;
                break;
            }
        }
        if (acted) continue;

        // Line relays: worst overload ratio across all sub-islands.
        for (const auto& members : components) {
            if (members.size() < 2) continue;
            const Equilibrium eq = equilibrate(state, members);
            const double omega = eq.sum_alpha > 0.0 ? eq.omega : state.omega_s;
            const IslandState sub = sub_island(state, members);
            const auto flows =
                dc_flow_solve(sub, effective_injections(sub, omega, state.omega_s),
                              *members.begin());
            LineId pick = -1;
            double pick_ratio = 0.0;
            for (std::size_t l = 0; l < sub.lines.size(); ++l) {
                if (std::abs(flows.flow[l]) <= sub.lines[l].f_max + kRelayTol) continue;
                const double ratio = std::abs(flows.flow[l]) / sub.lines[l].f_max;
                if (pick < 0 || ratio > pick_ratio + 1e-12) {
                    pick = sub.lines[l].id;
                    pick_ratio = ratio;
                }
            }
            if (pick >= 0) {
                state.drop_line(pick);
                result.log.push_back({RelayKind::TripLine, pick, pick_ratio});
                acted = true;
                break;
            }
        }
        if (acted) continue;

        // Every sub-island is stable: record the end state.
        for (const auto& members : components) {
            const Equilibrium eq = equilibrate(state, members);
            result.final_islands.push_back(
                {members, eq.sum_alpha > 0.0 ? eq.omega : state.omega_s});
            for (NodeId id : members) {
                const IslandNode& node = state.nodes.at(id);
                if (node.power < 0.0) result.served += -node.power;
            }
        }
        if (!state.nodes.empty()) result.log.push_back({RelayKind::Done, -1, 0.0});
        return result;
    }
}

StabilityReport stability_check(const IslandState& island, double omega_min,
                                double omega_max) {
    LiveState state{{}, island.lines, island.omega_s};
    for (const auto& node : island.nodes) state.nodes.emplace(node.id, node);
    std::sort(state.lines.begin(), state.lines.end(),
              [](const Line& a, const Line& b) { return a.id < b.id; });
    const auto components = connected_components(state.node_ids(), state.live_lines());

    for (const auto& members : components) {
        const Equilibrium eq = equilibrate(state, members);
        const std::string tag = "sub-island at node " + std::to_string(*members.begin());
        double omega = state.omega_s;
        if (eq.sum_alpha <= 0.0) {
            if (std::abs(eq.sum_power) > kRelayTol) {
                return {false, tag + ": imbalance " + std::to_string(eq.sum_power) +
                                   " with no droop capacity"};
            }
        } else {
            omega = eq.omega;
            if (omega < omega_min - kRelayTol || omega > omega_max + kRelayTol) {
                return {false, tag + ": frequency " + std::to_string(omega) +
                                   " outside band"};
            }
        }
        if (members.size() < 2) continue;
        const IslandState sub = sub_island(state, members);
        const auto flows = dc_flow_solve(
            sub, effective_injections(sub, omega, state.omega_s), *members.begin());
        for (std::size_t l = 0; l < sub.lines.size(); ++l) {
            if (std::abs(flows.flow[l]) > sub.lines[l].f_max + kRelayTol) {
                return {false, tag + ": line " + std::to_string(sub.lines[l].id) +
                                   " overloaded at " +
                                   std::to_string(std::abs(flows.flow[l]) /
                                                  sub.lines[l].f_max)};
            }
        }
    }
    return {true, ""};
}

} // namespace gridec
