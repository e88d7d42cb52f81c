#pragma once

#include <map>
#include <vector>

#include "gridec/common.hpp"
#include "gridec/grid_model.hpp"

namespace gridec {

/// Local fallback mode of nodes that lose their communication link:
/// hold the last dispatch, or trip generators and loads (buses keep
/// carrying flow either way).
enum class OperatingMode { P_init, P_zero };

std::string to_string(OperatingMode mode);

/// Held operating point of one uncontrollable node under the active mode.
struct ModePoint {
    double pg = 0.0; // pu, generators
    double pl = 0.0; // pu, loads (<= 0)
};

/// One maximal connected set of communication-disconnected nodes, with the
/// operating point its generators and loads are frozen at.
struct UncontrollableArea {
    AreaId area_id = 0;
    NodeSet nodes;
    LineSet internal_lines;
    std::map<NodeId, ModePoint> init_state; // exactly the area's generators and loads
};

/// Decomposition of the surviving grid after a communication-loss event:
/// the controllable remainder, the uncontrollable areas, and the border
/// lines joining each area to the controllable side. Every surviving line
/// lies in exactly one of controllable_lines, an area's internal_lines, or
/// an area's border set.
struct Partition {
    NodeSet controllable_nodes;          // V2
    LineSet controllable_lines;          // E2
    std::vector<UncontrollableArea> areas;
    std::vector<LineSet> border_lines;   // aligned with areas

    NodeSet surviving_nodes() const;
};

/// Splits the grid after removing `failed` nodes (and their incident
/// lines): the areas are the connected components of the surviving
/// uncontrollable nodes, numbered by ascending smallest member. A node in
/// both sets is treated as failed. Throws InputError when either set
/// references an unknown node. Fresh areas hold the case's initial
/// dispatch (equivalent to P_init with no prior redispatch).
Partition partition_areas(const GridCase& grid, const NodeSet& failed,
                          const NodeSet& uncontrollable);

/// Rewrites every area's held operating point for `mode`. P_zero zeroes
/// all generator and load entries. P_init takes the value from
/// `last_dispatch` when present and the case's initial dispatch otherwise;
/// pass an empty map for the plain no-redispatch reading.
Partition apply_mode(const Partition& partition, const GridCase& grid, OperatingMode mode,
                     const std::map<NodeId, double>& last_dispatch = {});

/// Snapshot of an area at its held operating point, disconnected from the
/// grid: the state handed to stability checks and the cascade simulator.
/// Droop sensitivities always come from the case's physical pg_init, not
/// from the mode value (the droop servo is a property of the machine).
IslandState area_island(const GridCase& grid, const UncontrollableArea& area);

} // namespace gridec
