#include "gridec/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridec {

namespace {

void require_known(const GridCase& grid, const NodeSet& ids, const char* label) {
    for (NodeId id : ids) {
        if (grid.find_node(id) == nullptr) {
            throw InputError(std::string(label) + " references unknown node " +
                             std::to_string(id));
        }
    }
}

ModePoint case_point(const Node& node) {
    ModePoint point;
    if (node.kind == NodeKind::Generator) point.pg = node.pg_init;
    if (node.kind == NodeKind::Load) point.pl = node.pl_init;
    return point;
}

} // namespace

std::string to_string(OperatingMode mode) {
    return mode == OperatingMode::P_init ? "init" : "zero";
}

NodeSet Partition::surviving_nodes() const {
    NodeSet all = controllable_nodes;
    for (const auto& area : areas) all.insert(area.nodes.begin(), area.nodes.end());
    return all;
}

Partition partition_areas(const GridCase& grid, const NodeSet& failed,
                          const NodeSet& uncontrollable) {
    require_known(grid, failed, "failed set");
    require_known(grid, uncontrollable, "uncontrollable set");

    NodeSet survivors;
    for (const auto& node : grid.nodes) {
        if (!failed.count(node.id)) survivors.insert(node.id);
    }

    std::vector<Line> surviving_lines;
    for (const auto& line : grid.lines) {
        if (survivors.count(line.from) && survivors.count(line.to)) {
            surviving_lines.push_back(line);
        }
    }

    NodeSet unc;
    for (NodeId id : uncontrollable) {
        if (survivors.count(id)) unc.insert(id);
    }

    std::vector<Line> unc_lines;
    for (const auto& line : surviving_lines) {
        if (unc.count(line.from) && unc.count(line.to)) unc_lines.push_back(line);
    }

    Partition partition;
    for (NodeId id : survivors) {
        if (!unc.count(id)) partition.controllable_nodes.insert(id);
    }

    const auto components = connected_components(unc, unc_lines);
    partition.areas.reserve(components.size());
    partition.border_lines.assign(components.size(), {});
    for (std::size_t k = 0; k < components.size(); ++k) {
        UncontrollableArea area;
        area.area_id = static_cast<AreaId>(k);
        area.nodes = components[k];
        for (NodeId id : area.nodes) {
            const Node* node = grid.find_node(id);
            if (node->kind != NodeKind::Bus) area.init_state[id] = case_point(*node);
        }
        partition.areas.push_back(std::move(area));
    }

    for (const auto& line : surviving_lines) {
        const bool from_unc = unc.count(line.from) != 0;
        const bool to_unc = unc.count(line.to) != 0;
        if (!from_unc && !to_unc) {
            partition.controllable_lines.insert(line.id);
            continue;
        }
        if (from_unc && to_unc) {
            for (auto& area : partition.areas) {
                if (area.nodes.count(line.from)) {
                    area.internal_lines.insert(line.id);
                    break;
                }
            }
            continue;
        }
        const NodeId inside = from_unc ? line.from : line.to;
        for (std::size_t k = 0; k < partition.areas.size(); ++k) {
            if (partition.areas[k].nodes.count(inside)) {
                partition.border_lines[k].insert(line.id);
                break;
            }
        }
    }
    return partition;
}

Partition apply_mode(const Partition& partition, const GridCase& grid, OperatingMode mode,
                     const std::map<NodeId, double>& last_dispatch) {
    Partition out = partition;
    for (auto& area : out.areas) {
        for (auto& [id, point] : area.init_state) {
            if (mode == OperatingMode::P_zero) {
                point = ModePoint{};
                continue;
            }
            const Node* node = grid.find_node(id);
            const auto held = last_dispatch.find(id);
            const double value = held != last_dispatch.end()
                                     ? held->second
                                     : (node->kind == NodeKind::Generator ? node->pg_init
                                                                          : node->pl_init);
            point = node->kind == NodeKind::Generator ? ModePoint{value, 0.0}
                                                      : ModePoint{0.0, value};
        }
    }
    return out;
}

IslandState area_island(const GridCase& grid, const UncontrollableArea& area) {
    IslandState island;
    island.omega_s = grid.omega_s;
    for (NodeId id : area.nodes) {
        const Node* node = grid.find_node(id);
        IslandNode entry;
        entry.id = id;
        entry.kind = node->kind;
        if (node->kind != NodeKind::Bus) {
            const ModePoint& point = area.init_state.at(id);
            entry.power = node->kind == NodeKind::Generator ? point.pg : point.pl;
        }
        if (node->kind == NodeKind::Generator) {
            entry.alpha = regulation_alpha(*node, grid.omega_s);
        }
        island.nodes.push_back(entry);
    }
    for (LineId id : area.internal_lines) {
        island.lines.push_back(*grid.find_line(id));
    }
    return island;
}

} // namespace gridec
