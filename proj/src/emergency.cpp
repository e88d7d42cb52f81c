#include "gridec/emergency.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gridec {

namespace {

constexpr double kOutcomeTol = 1e-6;

// Where a surviving line or node sits in the partition.
struct LinePlace {
    AreaId area = -1;    // -1: both endpoints controllable
    bool internal = false; // true: both endpoints inside `area`
};

struct Layout {
    std::vector<const Node*> nodes;          // surviving, ascending id
    std::vector<const Line*> lines;          // surviving, ascending id
    std::map<NodeId, AreaId> node_area;      // absent: controllable
    std::map<LineId, LinePlace> line_place;
    std::map<NodeId, std::vector<std::pair<const Line*, double>>> incident; // line, sign at node
};

Layout make_layout(const GridCase& grid, const Partition& partition) {
    Layout layout;
    const NodeSet survivors = partition.surviving_nodes();
    for (const auto& node : grid.nodes) {
        if (survivors.count(node.id)) layout.nodes.push_back(&node);
    }
    std::sort(layout.nodes.begin(), layout.nodes.end(),
              [](const Node* a, const Node* b) { return a->id < b->id; });

    for (const auto& area : partition.areas) {
        for (NodeId id : area.nodes) layout.node_area[id] = area.area_id;
    }
    for (LineId id : partition.controllable_lines) layout.line_place[id] = LinePlace{};
    for (std::size_t k = 0; k < partition.areas.size(); ++k) {
        const AreaId area = partition.areas[k].area_id;
        for (LineId id : partition.areas[k].internal_lines) {
            layout.line_place[id] = LinePlace{area, true};
        }
        for (LineId id : partition.border_lines[k]) {
            layout.line_place[id] = LinePlace{area, false};
        }
    }
    for (const auto& line : grid.lines) {
        if (layout.line_place.count(line.id)) layout.lines.push_back(&line);
    }
    std::sort(layout.lines.begin(), layout.lines.end(),
              [](const Line* a, const Line* b) { return a->id < b->id; });

    for (const Line* line : layout.lines) {
        layout.incident[line->from].push_back({line, 1.0});
        layout.incident[line->to].push_back({line, -1.0});
    }
    return layout;
}

const ModePoint& mode_point(const Partition& partition, AreaId area, NodeId id) {
    return partition.areas[static_cast<std::size_t>(area)].init_state.at(id);
}

} // namespace

MilpModel build_partial_model(const GridCase& grid, const Partition& partition) {
    const Layout layout = make_layout(grid, partition);
    MilpModel model;

    // A phase spread larger than sum X*f_max is unreachable, so this
    // relaxes the switched flow law without ever cutting an integer point.
    double m_theta = 0.0;
    for (const Line* line : layout.lines) m_theta += line->reactance_x * line->f_max;
    // Frequencies of a cut-off area are pinned to zero, so a switched-off
    // border line may bridge a full omega_max of spread. With every node
    // controllable the band itself bounds the spread.
    const double m_omega =
        partition.areas.empty() ? grid.omega_max - grid.omega_min : grid.omega_max;

    // Any solution can be translated per connected component so phases sit
    // in [-m_theta/2, m_theta/2]: within a component the spread is at most
    // m_theta, and across components the flow law is switched off anyway.
    // Bounding the variables keeps relaxations tight without losing
    // feasible flow patterns.
    for (const Node* node : layout.nodes) {
        model.add_variable(theta_var(node->id), -0.5 * m_theta, 0.5 * m_theta);
    }
    for (const Node* node : layout.nodes) {
        const bool banded =
            node->kind == NodeKind::Generator && !layout.node_area.count(node->id);
        model.add_variable(omega_var(node->id), banded ? grid.omega_min : -kInfinity,
                           banded ? grid.omega_max : kInfinity);
    }
    for (const Node* node : layout.nodes) {
        if (node->kind == NodeKind::Generator && !layout.node_area.count(node->id)) {
            model.add_variable(pg_var(node->id), -kInfinity, kInfinity);
        }
    }
    for (const Node* node : layout.nodes) {
        if (node->kind == NodeKind::Load && !layout.node_area.count(node->id)) {
            const int var = model.add_variable(pl_var(node->id), node->pl_max, 0.0);
            model.set_objective_term(var, 1.0);
        }
    }
    for (const Line* line : layout.lines) {
        model.add_variable(flow_var(line->id), -line->f_max, line->f_max);
    }
    for (const Line* line : layout.lines) {
        if (!layout.line_place.at(line->id).internal) model.add_binary(z_var(line->id));
    }
    for (const auto& area : partition.areas) {
        const int var = model.add_binary(island_var(area.area_id));
        double held = 0.0;
        for (const auto& [id, point] : area.init_state) held += point.pl;
        model.set_objective_term(var, held);
    }

    const auto idx = [&model](const std::string& name) { return model.variable_index(name); };

    for (const Node* node : layout.nodes) {
        const NodeId i = node->id;
        std::vector<LinearTerm> netout;
        if (const auto inc = layout.incident.find(i); inc != layout.incident.end()) {
            for (const auto& [line, sign] : inc->second) {
                netout.push_back({idx(flow_var(line->id)), sign});
            }
        }
        const std::string tag = std::to_string(i);
        const auto it = layout.node_area.find(i);
        if (it == layout.node_area.end()) {
            if (node->kind == NodeKind::Generator) {
                const double alpha = regulation_alpha(*node, grid.omega_s);
                auto terms = netout;
                terms.push_back({idx(pg_var(i)), -1.0});
                terms.push_back({idx(omega_var(i)), alpha});
                model.add_constraint("gbal_" + tag, std::move(terms), Relation::Equal,
                                     alpha * grid.omega_s);
                model.add_constraint(
                    "eff_lo_" + tag,
                    {{idx(pg_var(i)), 1.0}, {idx(omega_var(i)), -alpha}},
                    Relation::GreaterEqual, node->pg_min - alpha * grid.omega_s);
                model.add_constraint(
                    "eff_up_" + tag,
                    {{idx(pg_var(i)), 1.0}, {idx(omega_var(i)), -alpha}},
                    Relation::LessEqual, node->pg_max - alpha * grid.omega_s);
            } else if (node->kind == NodeKind::Load) {
                auto terms = netout;
                terms.push_back({idx(pl_var(i)), -1.0});
                model.add_constraint("lbal_" + tag, std::move(terms), Relation::Equal, 0.0);
            } else {
                model.add_constraint("bbal_" + tag, netout, Relation::Equal, 0.0);
            }
            continue;
        }

        // Held-dispatch balances are exact in the flag: the area either
        // rides through at its operating point (flag 1) or every incident
        // line is dead and the node exchanges nothing (flag 0). Writing the
        // balance as an equality scaled by the flag matches both integer
        // cases and leaves no slack in between.
        const AreaId k = it->second;
        const int flag = idx(island_var(k));
        if (node->kind == NodeKind::Generator) {
            const double alpha = regulation_alpha(*node, grid.omega_s);
            const double held = mode_point(partition, k, i).pg;
            auto terms = netout;
            terms.push_back({idx(omega_var(i)), alpha});
            terms.push_back({flag, -(held + alpha * grid.omega_s)});
            model.add_constraint("abal_" + tag, std::move(terms), Relation::Equal, 0.0);
            model.add_constraint("afreq_lo_" + tag,
                                 {{idx(omega_var(i)), 1.0}, {flag, -grid.omega_min}},
                                 Relation::GreaterEqual, 0.0);
            model.add_constraint("afreq_up_" + tag,
                                 {{idx(omega_var(i)), 1.0}, {flag, -grid.omega_max}},
                                 Relation::LessEqual, 0.0);
        } else {
            const double held =
                node->kind == NodeKind::Load ? mode_point(partition, k, i).pl : 0.0;
            auto terms = netout;
            if (held != 0.0) terms.push_back({flag, -held});
            model.add_constraint("abal_" + tag, std::move(terms), Relation::Equal, 0.0);
        }
    }

    for (const Line* line : layout.lines) {
        const LinePlace place = layout.line_place.at(line->id);
        const std::string tag = std::to_string(line->id);
        const int sw = place.internal ? idx(island_var(place.area)) : idx(z_var(line->id));
        const int f = idx(flow_var(line->id));
        const int th_from = idx(theta_var(line->from));
        const int th_to = idx(theta_var(line->to));
        const int om_from = idx(omega_var(line->from));
        const int om_to = idx(omega_var(line->to));

        model.add_constraint(
            "flow_up_" + tag,
            {{f, line->reactance_x}, {th_from, -1.0}, {th_to, 1.0}, {sw, m_theta}},
            Relation::LessEqual, m_theta);
        model.add_constraint(
            "flow_lo_" + tag,
            {{f, line->reactance_x}, {th_from, -1.0}, {th_to, 1.0}, {sw, -m_theta}},
            Relation::GreaterEqual, -m_theta);
        model.add_constraint("cap_up_" + tag, {{f, 1.0}, {sw, -line->f_max}},
                             Relation::LessEqual, 0.0);
        model.add_constraint("cap_lo_" + tag, {{f, 1.0}, {sw, line->f_max}},
                             Relation::GreaterEqual, 0.0);
        model.add_constraint("coh_up_" + tag,
                             {{om_from, 1.0}, {om_to, -1.0}, {sw, m_omega}},
                             Relation::LessEqual, m_omega);
        model.add_constraint("coh_lo_" + tag,
                             {{om_from, 1.0}, {om_to, -1.0}, {sw, -m_omega}},
                             Relation::GreaterEqual, -m_omega);
    }

    // A border line can only be in service while its area rides through;
    // one row per line keeps the coupling tight.
    for (std::size_t k = 0; k < partition.areas.size(); ++k) {
        const int flag = idx(island_var(partition.areas[k].area_id));
        for (LineId id : partition.border_lines[k]) {
            model.add_constraint("border_" + std::to_string(id),
                                 {{idx(z_var(id)), 1.0}, {flag, -1.0}},
                                 Relation::LessEqual, 0.0);
        }
    }

    model.validate();
    return model;
}

MilpModel build_full_model(const GridCase& grid, const NodeSet& failed) {
    return build_partial_model(grid, partition_areas(grid, failed, {}));
}

ControlOutcome extract_outcome(const MilpModel& model, const MilpSolution& solution,
                               const Partition& partition, const GridCase& grid) {
    if (solution.status != MilpStatus::Optimal) {
        throw std::logic_error("extract_outcome: solution status is " +
                               to_string(solution.status));
    }
    const Layout layout = make_layout(grid, partition);
    ControlOutcome outcome;
    outcome.objective = solution.objective;

    const auto value = [&](const std::string& name) {
        const int var = model.variable_index(name);
        if (var < 0) throw std::logic_error("extract_outcome: missing variable " + name);
        return solution.values[static_cast<std::size_t>(var)];
    };
    const auto rounded = [&](const std::string& name) {
        const double raw = value(name);
        const double snap = std::round(raw);
        if (std::abs(raw - snap) > kIntegralityTol || (snap != 0.0 && snap != 1.0)) {
            throw std::logic_error("extract_outcome: " + name + " is not binary: " +
                                   std::to_string(raw));
        }
        return static_cast<int>(snap);
    };

    for (const auto& area : partition.areas) {
        outcome.island_stable[area.area_id] = rounded(island_var(area.area_id));
    }

    for (const Node* node : layout.nodes) {
        const NodeId i = node->id;
        outcome.theta[i] = value(theta_var(i));
        outcome.omega[i] = value(omega_var(i));
        const auto it = layout.node_area.find(i);
        if (it == layout.node_area.end()) {
            if (node->kind == NodeKind::Generator) {
                const double alpha = regulation_alpha(*node, grid.omega_s);
                outcome.pg[i] = value(pg_var(i));
                outcome.pg_effective[i] =
                    outcome.pg[i] - alpha * (outcome.omega[i] - grid.omega_s);
            } else if (node->kind == NodeKind::Load) {
                outcome.pl[i] = value(pl_var(i));
            }
            continue;
        }
        const AreaId k = it->second;
        const bool alive = outcome.island_stable.at(k) == 1;
        if (!alive) outcome.omega_pending.insert(i);
        if (node->kind == NodeKind::Generator) {
            const double held = alive ? mode_point(partition, k, i).pg : 0.0;
            const double alpha = regulation_alpha(*node, grid.omega_s);
            outcome.pg[i] = held;
            outcome.pg_effective[i] =
                alive ? held - alpha * (outcome.omega[i] - grid.omega_s) : 0.0;
        } else if (node->kind == NodeKind::Load) {
            outcome.pl[i] = alive ? mode_point(partition, k, i).pl : 0.0;
        }
    }

    for (const Line* line : layout.lines) {
        const LinePlace place = layout.line_place.at(line->id);
        const int up = place.internal ? outcome.island_stable.at(place.area)
                                      : rounded(z_var(line->id));
        outcome.line_up[line->id] = up;
        double flow = value(flow_var(line->id));
        if (up == 0) {
            if (std::abs(flow) > kOutcomeTol) {
                throw std::logic_error("extract_outcome: open line " +
                                       std::to_string(line->id) + " carries flow " +
                                       std::to_string(flow));
            }
            flow = 0.0;
        }
        outcome.flow[line->id] = flow;
    }

    const auto issues = outcome_issues(outcome, partition, grid);
    if (!issues.empty()) {
        std::ostringstream message;
        message << "extract_outcome: solved point violates outcome invariants:";
        for (const auto& issue : issues) message << "\n  " << issue;
        throw std::logic_error(message.str());
    }
    return outcome;
}

std::vector<std::string> outcome_issues(const ControlOutcome& outcome,
                                        const Partition& partition, const GridCase& grid) {
    const Layout layout = make_layout(grid, partition);
    std::vector<std::string> issues;
    const auto complain = [&issues](std::string text) { issues.push_back(std::move(text)); };

    for (const Line* line : layout.lines) {
        const std::string tag = "line " + std::to_string(line->id);
        const double flow = outcome.flow.at(line->id);
        if (outcome.line_up.at(line->id) == 0) {
            if (flow != 0.0) complain(tag + ": open but flow " + std::to_string(flow));
            continue;
        }
        if (std::abs(flow) > line->f_max + kOutcomeTol) {
            complain(tag + ": flow " + std::to_string(flow) + " exceeds capacity " +
                     std::to_string(line->f_max));
        }
        const double dtheta = outcome.theta.at(line->from) - outcome.theta.at(line->to);
        if (std::abs(line->reactance_x * flow - dtheta) > kOutcomeTol) {
            complain(tag + ": flow law residual " +
                     std::to_string(line->reactance_x * flow - dtheta));
        }
        const double domega = outcome.omega.at(line->from) - outcome.omega.at(line->to);
        if (std::abs(domega) > kOutcomeTol) {
            complain(tag + ": in-service endpoints differ in frequency by " +
                     std::to_string(domega));
        }
    }

    for (const Node* node : layout.nodes) {
        const NodeId i = node->id;
        const std::string tag = "node " + std::to_string(i);
        double netout = 0.0;
        if (layout.incident.count(i)) {
            for (const auto& [line, sign] : layout.incident.at(i)) {
                netout += sign * outcome.flow.at(line->id);
            }
        }
        const bool pending = outcome.omega_pending.count(i) != 0;
        if (pending) {
            if (std::abs(netout) > kOutcomeTol) {
                complain(tag + ": cut off but net outflow " + std::to_string(netout));
            }
            continue;
        }
        const double omega = outcome.omega.at(i);
        if (node->kind == NodeKind::Generator) {
            const double effective = outcome.pg_effective.at(i);
            if (std::abs(netout - effective) > kOutcomeTol) {
                complain(tag + ": generator balance residual " +
                         std::to_string(netout - effective));
            }
            if (omega < grid.omega_min - kOutcomeTol || omega > grid.omega_max + kOutcomeTol) {
                complain(tag + ": frequency " + std::to_string(omega) + " outside band");
            }
            if (!layout.node_area.count(i) &&
                (effective < node->pg_min - kOutcomeTol ||
                 effective > node->pg_max + kOutcomeTol)) {
                complain(tag + ": effective output " + std::to_string(effective) +
                         " outside [" + std::to_string(node->pg_min) + ", " +
                         std::to_string(node->pg_max) + "]");
            }
        } else if (node->kind == NodeKind::Load) {
            const double pl = outcome.pl.at(i);
            if (std::abs(netout - pl) > kOutcomeTol) {
                complain(tag + ": load balance residual " + std::to_string(netout - pl));
            }
            if (pl < node->pl_max - kOutcomeTol || pl > kOutcomeTol) {
                complain(tag + ": served load " + std::to_string(pl) + " outside [" +
                         std::to_string(node->pl_max) + ", 0]");
            }
        } else if (std::abs(netout) > kOutcomeTol) {
            complain(tag + ": bus imbalance " + std::to_string(netout));
        }
    }
    return issues;
}

Yield compute_yield(const ControlOutcome& outcome,
                    const std::map<AreaId, double>& cascade_served, const GridCase& grid) {
    for (const auto& [area, stable] : outcome.island_stable) {
        const bool supplied = cascade_served.count(area) != 0;
        if (stable == 0 && !supplied) {
            throw std::invalid_argument("compute_yield: cut-off area " +
                                        std::to_string(area) + " has no cascade result");
        }
        if (stable == 1 && supplied) {
            throw std::invalid_argument("compute_yield: riding-through area " +
                                        std::to_string(area) +
                                        " must not carry a cascade result");
        }
    }
    for (const auto& [area, served] : cascade_served) {
        if (!outcome.island_stable.count(area)) {
            throw std::invalid_argument("compute_yield: cascade result for unknown area " +
                                        std::to_string(area));
        }
        if (served < 0.0) {
            throw std::invalid_argument("compute_yield: negative cascade load for area " +
                                        std::to_string(area));
        }
    }

    Yield yield;
    yield.initial = grid.total_initial_load();
    // outcome.pl covers controllable and riding-through loads alike, so
    // only the cascade credits are still missing.
    for (const auto& [id, pl] : outcome.pl) {
        (void)id;
        yield.served += std::abs(pl);
    }
    for (const auto& [area, served] : cascade_served) {
        (void)area;
        yield.served += served;
    }

    if (yield.initial <= 0.0) {
        yield.ratio = 1.0;
        return yield;
    }
    yield.ratio = yield.served / yield.initial;
    if (yield.ratio > 1.0 + 1e-9) {
        throw std::logic_error("compute_yield: served " + std::to_string(yield.served) +
                               " exceeds pre-event demand " + std::to_string(yield.initial));
    }
    return yield;
}

} // namespace gridec
