#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridec/common.hpp"
#include "gridec/grid_model.hpp"

namespace gridec {

/// Violation tolerance of the local relays. Matches the MILP feasibility
/// tolerance so the simulator and the optimizer agree on what counts as a
/// limit violation.
constexpr double kRelayTol = 1e-7;

enum class RelayKind { TripGenerator, ShedLoad, TripLine, SplitIsland, Done };

std::string to_string(RelayKind kind);

/// One relay operation. `observed` is the quantity that triggered it: the
/// island frequency in Hz for generator trips and load shedding, the
/// overload ratio |f|/f_max for line trips, and 0 for a collapse with no
/// droop equilibrium. Done carries no target (-1).
struct RelayAction {
    RelayKind kind = RelayKind::Done;
    std::int32_t target = -1; // node id or line id
    double observed = 0.0;
};

struct SubIsland {
    NodeSet nodes;
    double omega = 0.0; // steady-state frequency, Hz
};

struct CascadeResult {
    double served = 0.0; // pu of load still supplied when the cascade settles
    std::vector<RelayAction> log;
    std::vector<SubIsland> final_islands;
};

/// Which element a relay picks among candidates. MinimalDisturbance is the
/// normative choice: trip the generator with the smallest effective output,
/// shed the smallest load. LargestFirst removes the biggest contributor
/// instead. Line trips always take the worst overload. All ties break
/// toward the lowest id.
enum class RelayPolicy { MinimalDisturbance, LargestFirst };

/// Deterministic local-relay cascade on an island that has been cut off.
/// Each iteration: split into connected sub-islands, re-equilibrate each
/// under droop, then fire exactly one relay: frequency violations first
/// (no-droop collapses shed every load of the sub-island as one action),
/// line overloads second, scanning sub-islands by ascending smallest
/// member. Stops when every sub-island is stable; a final Done entry is
/// logged when any node is left. The log never exceeds |V| + |E| entries.
CascadeResult run_cascade(const IslandState& island, double omega_min, double omega_max,
                          RelayPolicy policy = RelayPolicy::MinimalDisturbance);

struct StabilityReport {
    bool stable = false;
    std::string diagnostic; // empty when stable
};

/// Static acceptability of an island exactly as the cascade's relays see
/// it: every connected component must reach a droop equilibrium inside
/// [omega_min, omega_max] with all line flows within capacity. Equivalent
/// to the partial-control model accepting the island with its borders
/// open.
StabilityReport stability_check(const IslandState& island, double omega_min,
                                double omega_max);

} // namespace gridec
