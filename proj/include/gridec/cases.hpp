#pragma once

#include "gridec/grid_model.hpp"

namespace gridec::cases {

/// Five-node teaching case: one generator feeding one load over a chain of
/// buses, capacities comfortable. The whole demand is servable.
GridCase case5();

/// Thirty-node study case: eight generators and ten loads on spurs around
/// a twelve-bus ring with five chords. Generation and demand balance at
/// 5.55 pu and every spur can carry its node's full output or demand, so
/// the undisturbed optimum serves everything. Ring and chord capacities
/// are tight enough that failures and held dispatch bite.
GridCase case30();

} // namespace gridec::cases
