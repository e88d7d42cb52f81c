#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridec/common.hpp"
#include "gridec/grid_model.hpp"
#include "gridec/milp.hpp"
#include "gridec/partition.hpp"

namespace gridec {

// Canonical variable names used by the model builders. Anything that wants
// to poke at a built model (tests, the CLI, incumbent seeding) goes through
// these instead of hand-rolling strings.
inline std::string theta_var(NodeId id) { return "th_" + std::to_string(id); }
inline std::string omega_var(NodeId id) { return "om_" + std::to_string(id); }
inline std::string pg_var(NodeId id) { return "pg_" + std::to_string(id); }
inline std::string pl_var(NodeId id) { return "pl_" + std::to_string(id); }
inline std::string flow_var(LineId id) { return "f_" + std::to_string(id); }
inline std::string z_var(LineId id) { return "z_" + std::to_string(id); }
inline std::string island_var(AreaId k) { return "I_" + std::to_string(k); }

/// Emergency-control MILP over the surviving grid with every node
/// controllable: minimises shed load by redispatching generators, shedding
/// load and opening lines, subject to DC flow physics, droop response,
/// line capacities and the frequency band. Load variables are negative
/// (power drawn), so the objective value is -(total served load).
MilpModel build_full_model(const GridCase& grid, const NodeSet& failed);

/// Emergency-control MILP when only part of the grid listens: nodes inside
/// an uncontrollable area hold their mode operating point, each area gets a
/// binary flag I_k (1 = the area rides through as part of the grid, 0 = it
/// is cut off: its border lines open and all its flows die), and only the
/// controllable side plus the border lines carry switching binaries.
/// A partition with zero areas builds exactly the full model.
MilpModel build_partial_model(const GridCase& grid, const Partition& partition);

/// Solved operating point in physical terms.
struct ControlOutcome {
    std::map<NodeId, double> pg;           // mechanical setpoint, generators
    std::map<NodeId, double> pg_effective; // setpoint minus droop response
    std::map<NodeId, double> pl;           // served load, <= 0
    std::map<NodeId, double> omega;        // Hz
    std::map<NodeId, double> theta;        // rad
    NodeSet omega_pending;   // cut-off area nodes: omega is a model artifact
    std::map<LineId, double> flow;
    std::map<LineId, int> line_up;         // 1 = in service (internal lines: the area flag)
    std::map<AreaId, int> island_stable;   // I_k
    double objective = 0.0;
};

/// Checks a ControlOutcome against the physics it claims to satisfy:
/// nodal balance, the flow law and frequency coherence on in-service
/// lines, zero flow on open lines, capacity and band limits. Returns
/// human-readable violations (empty = consistent). Tolerance 1e-6.
std::vector<std::string> outcome_issues(const ControlOutcome& outcome,
                                        const Partition& partition, const GridCase& grid);

/// Maps a solved model back to physical quantities: rounds binaries,
/// clamps open-line flows to exact zero, fills held values for
/// uncontrollable nodes, and re-validates every outcome invariant
/// (throwing std::logic_error on any violation -- a solver anomaly).
ControlOutcome extract_outcome(const MilpModel& model, const MilpSolution& solution,
                               const Partition& partition, const GridCase& grid);

struct Yield {
    double served = 0.0;  // pu
    double initial = 0.0; // pu, pre-event demand
    double ratio = 0.0;   // served / initial, in [0, 1]; 1 when initial = 0
};

/// Total served load: controllable loads at their solved values, held
/// loads of every riding-through area, and the cascade's surviving load
/// for each cut-off area. `cascade_served` must supply exactly the areas
/// with island flag 0 (pu magnitudes). Throws std::logic_error if the
/// accounting exceeds the pre-event demand beyond 1e-9.
Yield compute_yield(const ControlOutcome& outcome,
                    const std::map<AreaId, double>& cascade_served, const GridCase& grid);

} // namespace gridec
