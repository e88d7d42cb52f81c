#include "gridec/grid_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace gridec {

std::string to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::Generator: return "generator";
    case NodeKind::Load: return "load";
    case NodeKind::Bus: return "bus";
    }
    return "?";
}

Node Node::generator(NodeId id, double pg_init, double pg_min, double pg_max, double damping_d) {
    Node n;
    n.id = id;
    n.kind = NodeKind::Generator;
    n.pg_init = pg_init;
    n.pg_min = pg_min;
    n.pg_max = pg_max;
    n.damping_d = damping_d;
    return n;
}

Node Node::load(NodeId id, double pl_init, double pl_max) {
    Node n;
    n.id = id;
    n.kind = NodeKind::Load;
    n.pl_init = pl_init;
    n.pl_max = pl_max;
    n.damping_d = 0.0;
    return n;
}

Node Node::bus(NodeId id) {
    Node n;
    n.id = id;
    n.kind = NodeKind::Bus;
    n.damping_d = 0.0;
    return n;
}

const Node* GridCase::find_node(NodeId id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const Line* GridCase::find_line(LineId id) const {
    for (const auto& l : lines)
        if (l.id == id) return &l;
    return nullptr;
}

std::vector<NodeId> GridCase::generator_ids() const {
    std::vector<NodeId> ids;
    for (const auto& n : nodes)
        if (n.kind == NodeKind::Generator) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<NodeId> GridCase::load_ids() const {
    std::vector<NodeId> ids;
    for (const auto& n : nodes)
        if (n.kind == NodeKind::Load) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

double GridCase::total_initial_load() const {
    double total = 0.0;
    for (const auto& n : nodes)
        if (n.kind == NodeKind::Load) total += std::abs(n.pl_init);
    return total;
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const auto& issue : issues) out << issue.where << ": " << issue.message << "\n";
    return out.str();
}

ValidationReport validate_case(const GridCase& grid) {
    ValidationReport report;
    auto add = [&](const std::string& where, const std::string& message) {
        report.issues.push_back({where, message});
    };

    std::map<NodeId, const Node*> by_id;
    for (const auto& n : grid.nodes) {
        if (!by_id.emplace(n.id, &n).second)
            add("node " + std::to_string(n.id), "duplicate node id");
    }

    if (!(grid.omega_min < grid.omega_s && grid.omega_s < grid.omega_max))
        add("case", "frequency band must satisfy omega_min < omega_s < omega_max");

    std::map<NodeId, int> degree;
    std::set<LineId> line_ids;
    for (const auto& l : grid.lines) {
        const std::string where = "line " + std::to_string(l.id);
        if (!line_ids.insert(l.id).second) add(where, "duplicate line id");
        if (l.from == l.to) add(where, "self-loop");
        const bool from_ok = by_id.count(l.from) > 0;
        const bool to_ok = by_id.count(l.to) > 0;
        if (!from_ok) add(where, "endpoint " + std::to_string(l.from) + " is not a node");
        if (!to_ok) add(where, "endpoint " + std::to_string(l.to) + " is not a node");
        if (!(l.reactance_x > 0.0)) add(where, "reactance must be strictly positive");
        if (!(l.f_max > 0.0)) add(where, "capacity must be strictly positive");
        if (from_ok && to_ok && l.from != l.to) {
            ++degree[l.from];
            ++degree[l.to];
        }
    }

    for (const auto& n : grid.nodes) {
        const std::string where = "node " + std::to_string(n.id);
        if (n.kind == NodeKind::Generator) {
            if (n.pg_init < 0.0) add(where, "pg_init must be >= 0");
            if (!(n.pg_min <= n.pg_init && n.pg_init <= n.pg_max))
                add(where, "requires pg_min <= pg_init <= pg_max");
            if (n.damping_d < 0.0) add(where, "damping must be >= 0");
        } else if (n.kind == NodeKind::Load) {
            if (n.pl_init > 0.0) add(where, "pl_init must be <= 0 (loads consume)");
            if (!(n.pl_max <= n.pl_init && n.pl_init <= 0.0))
                add(where, "requires pl_max <= pl_init <= 0");
        }
        if (n.kind != NodeKind::Bus) {
            // single-bus rule: one line, and its far end is a bus
            const int deg = degree.count(n.id) ? degree.at(n.id) : 0;
            if (deg != 1) {
                add(where, to_string(n.kind) + " must connect to the grid via exactly one bus (degree " +
                               std::to_string(deg) + ")");
            } else {
                for (const auto& l : grid.lines) {
                    if (l.from != n.id && l.to != n.id) continue;
                    const NodeId other = (l.from == n.id) ? l.to : l.from;
                    auto it = by_id.find(other);
                    if (it != by_id.end() && it->second->kind != NodeKind::Bus)
                        add(where, "must attach to a bus, not a " + to_string(it->second->kind));
                }
            }
        }
    }

    return report;
}

double regulation_alpha(const Node& gen, double omega_s) {
    return gen.pg_init / (omega_s * 0.05) + gen.damping_d / omega_s;
}

const IslandNode* IslandState::find_node(NodeId id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

std::optional<double> island_droop_frequency(const IslandState& island) {
    if (island.nodes.empty()) throw std::invalid_argument("island_droop_frequency: empty island");
    double total_power = 0.0;
    double total_alpha = 0.0;
    for (const auto& n : island.nodes) {
        total_power += n.power;
        total_alpha += n.alpha;
    }
    if (total_alpha <= 0.0) {
        if (std::abs(total_power) <= 1e-12) return island.omega_s;
        return std::nullopt;
    }
    return island.omega_s + total_power / total_alpha;
}

FlowAssignment dc_flow_solve(const IslandState& island, const std::vector<double>& injections,
                             NodeId reference) {
    const std::size_t n = island.nodes.size();
    if (injections.size() != n)
        throw std::invalid_argument("dc_flow_solve: injection vector size mismatch");

    double sum = 0.0;
    for (double p : injections) sum += p;
    if (std::abs(sum) > 1e-9)
        throw std::invalid_argument("dc_flow_solve: injections do not balance (sum " +
                                    std::to_string(sum) + ")");

    std::map<NodeId, int> index;
    NodeSet node_ids;
    for (std::size_t i = 0; i < n; ++i) {
        index[island.nodes[i].id] = static_cast<int>(i);
        node_ids.insert(island.nodes[i].id);
    }
    if (!index.count(reference))
        throw std::invalid_argument("dc_flow_solve: reference node not in island");
    if (connected_components(node_ids, island.lines).size() != 1)
        throw InputError("dc_flow_solve: island is not connected");

    Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(n, n);
    for (const auto& l : island.lines) {
        const int a = index.at(l.from);
        const int b = index.at(l.to);
        const double w = 1.0 / l.reactance_x;
        laplacian(a, a) += w;
        laplacian(b, b) += w;
        laplacian(a, b) -= w;
        laplacian(b, a) -= w;
    }

    // Reduced system: delete the reference row/column, solve, re-insert 0.
    const int ref = index.at(reference);
    const int m = static_cast<int>(n) - 1;
    FlowAssignment result;
    result.theta.assign(n, 0.0);
    if (m > 0) {
        Eigen::MatrixXd reduced(m, m);
        Eigen::VectorXd rhs(m);
        for (int i = 0, ri = 0; i < static_cast<int>(n); ++i) {
            if (i == ref) continue;
            rhs(ri) = injections[static_cast<std::size_t>(i)];
            for (int j = 0, rj = 0; j < static_cast<int>(n); ++j) {
                if (j == ref) continue;
                reduced(ri, rj) = laplacian(i, j);
                ++rj;
            }
            ++ri;
        }
        Eigen::VectorXd theta_reduced = reduced.ldlt().solve(rhs);
        for (int i = 0, ri = 0; i < static_cast<int>(n); ++i) {
            if (i == ref) continue;
            result.theta[static_cast<std::size_t>(i)] = theta_reduced(ri++);
        }
    }

    result.flow.resize(island.lines.size());
    std::vector<double> residual(injections);
    for (std::size_t li = 0; li < island.lines.size(); ++li) {
        const auto& l = island.lines[li];
        const double dtheta = result.theta[static_cast<std::size_t>(index.at(l.from))] -
                              result.theta[static_cast<std::size_t>(index.at(l.to))];
        const double f = dtheta / l.reactance_x;
        result.flow[li] = f;
        residual[static_cast<std::size_t>(index.at(l.from))] -= f;
        residual[static_cast<std::size_t>(index.at(l.to))] += f;
    }
    for (double r : residual)
        if (std::abs(r) > 1e-9)
            throw std::logic_error("dc_flow_solve: balance residual above tolerance");

    return result;
}

std::vector<NodeSet> connected_components(const NodeSet& nodes,
                                          const std::vector<Line>& active_lines) {
    std::map<NodeId, std::vector<NodeId>> adjacency;
    for (const auto& l : active_lines) {
        if (!nodes.count(l.from) || !nodes.count(l.to)) continue;
        adjacency[l.from].push_back(l.to);
        adjacency[l.to].push_back(l.from);
    }

    std::vector<NodeSet> components;
    NodeSet visited;
    for (NodeId start : nodes) { // std::set iterates ascending
        if (visited.count(start)) continue;
        NodeSet component;
        std::vector<NodeId> stack{start};
        visited.insert(start);
        while (!stack.empty()) {
            NodeId current = stack.back();
            stack.pop_back();
            component.insert(current);
            auto it = adjacency.find(current);
            if (it == adjacency.end()) continue;
            for (NodeId next : it->second) {
                if (visited.insert(next).second) stack.push_back(next);
            }
        }
        components.push_back(std::move(component));
    }
    return components; // ordered by smallest member since roots ascend
}

} // namespace gridec
