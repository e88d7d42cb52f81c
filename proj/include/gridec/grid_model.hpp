#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridec/common.hpp"

namespace gridec {

enum class NodeKind { Generator, Load, Bus };

std::string to_string(NodeKind kind);

/// A power node. Generators carry the pg_* fields, loads the pl_* fields;
/// the unused side is ignored. Powers are per-unit on the system base.
/// Load powers are negative (consumption), pl_max is the largest-magnitude
/// servable load, i.e. pl_max <= pl <= 0.
struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::Bus;
    double pg_init = 0.0;
    double pg_min = 0.0;
    double pg_max = 0.0;
    double damping_d = 0.02; // per-unit power per per-unit frequency
    double pl_init = 0.0;
    double pl_max = 0.0;

    static Node generator(NodeId id, double pg_init, double pg_min, double pg_max,
                          double damping_d = 0.02);
    static Node load(NodeId id, double pl_init, double pl_max);
    static Node bus(NodeId id);
};

/// A loss-less transmission line characterised by its reactance and
/// thermal capacity. Flow is signed, positive in from->to orientation.
struct Line {
    LineId id = 0;
    NodeId from = 0;
    NodeId to = 0;
    double reactance_x = 0.0; // pu, > 0
    double f_max = 0.0;       // pu, > 0
};

/// Immutable description of a grid: nodes, lines and the frequency band.
/// All operations treat a GridCase as read-only shared data.
struct GridCase {
    std::vector<Node> nodes;
    std::vector<Line> lines;
    double omega_s = 60.0;   // Hz
    double omega_min = 59.5; // Hz
    double omega_max = 60.5; // Hz

    const Node* find_node(NodeId id) const;
    const Line* find_line(LineId id) const;
    std::vector<NodeId> generator_ids() const;
    std::vector<NodeId> load_ids() const;
    /// Sum of |pl_init| over all loads (the pre-failure demand).
    double total_initial_load() const;
};

struct ValidationIssue {
    std::string where;   // "node 7", "line 3", "case"
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

/// Checks every structural invariant of a GridCase: unique ids, endpoint
/// existence, no self-loops, positive reactance/capacity, frequency band
/// ordering, generator/load sign conventions, and the single-bus rule
/// (every generator and load hangs off exactly one bus).
ValidationReport validate_case(const GridCase& grid);

/// Combined droop-plus-damping sensitivity of a generator, in pu per Hz:
///   alpha = pg_init / (omega_s * 0.05) + damping_d / omega_s
/// The first term is 1/R with the standard 5% regulation constant
/// R = omega_s * 0.05 / pg_init; the second converts the per-unit damping
/// coefficient to per-Hz. A generator with pg_init = 0 and no damping has
/// alpha = 0 and provides no frequency regulation.
double regulation_alpha(const Node& gen, double omega_s);

/// One node of an IslandState: its fixed injection (pg >= 0 for
/// generators, pl <= 0 for loads, 0 for buses) and droop sensitivity.
struct IslandNode {
    NodeId id = 0;
    NodeKind kind = NodeKind::Bus;
    double power = 0.0; // pu; sign convention as above
    double alpha = 0.0; // pu per Hz; nonzero only for generators
};

/// Snapshot of an electrical island: a set of nodes with fixed injections
/// and the active lines among them. Used by the cascade simulator and by
/// stability checks.
struct IslandState {
    std::vector<IslandNode> nodes;
    std::vector<Line> lines;
    double omega_s = 60.0;

    const IslandNode* find_node(NodeId id) const;
};

/// Steady-state frequency of an island under droop control:
///   omega* = omega_s + (sum power) / (sum alpha)
/// Returns nullopt when the island has no droop capacity (sum alpha = 0)
/// but a nonzero imbalance -- there is no equilibrium and the frequency
/// diverges. A balanced island with zero droop returns omega_s.
std::optional<double> island_droop_frequency(const IslandState& island);

/// DC solution on an island: per-line flows, per-node phases (and
/// optionally a uniform frequency attached by the caller).
struct FlowAssignment {
    std::vector<double> flow;  // aligned with island.lines
    std::vector<double> theta; // rad, aligned with island.nodes
    std::vector<double> omega; // Hz, optional (empty unless caller fills it)
};

/// Solves B*theta = p on the island (weighted Laplacian, weights 1/X) with
/// theta fixed to 0 at `reference`, and recovers line flows f = dtheta / X.
/// Preconditions: injections aligned with island.nodes and summing to ~0;
/// the island connected. Throws std::invalid_argument on an unbalanced
/// injection vector and InputError on a disconnected island.
FlowAssignment dc_flow_solve(const IslandState& island, const std::vector<double>& injections,
                             NodeId reference);

/// Maximal connected components of (nodes, lines restricted to nodes).
/// Output is deterministic: components ordered by their smallest member,
/// members ascending.
std::vector<NodeSet> connected_components(const NodeSet& nodes,
                                          const std::vector<Line>& active_lines);

} // namespace gridec
