#pragma once

// Shared test grids. Generated cases follow the conventions the solver
// test-beds rely on: pg_min = 0, pg_max = 1.3 * pg_init (room for the full
// droop swing down to omega_min), pl_max = pl_init, and total generation
// balancing total load exactly.

#include <cmath>
#include <vector>

#include "gridec/grid_model.hpp"

namespace gridec_test {

// G1(1) -- B(2) -- B(3) -- B(4) -- L1(5), uniform lines. Comfortable
// capacities: the whole load is servable.
inline gridec::GridCase case5() {
    gridec::GridCase grid;
    grid.nodes.push_back(gridec::Node::generator(1, 1.0, 0.0, 1.25));
    grid.nodes.push_back(gridec::Node::bus(2));
    grid.nodes.push_back(gridec::Node::bus(3));
    grid.nodes.push_back(gridec::Node::bus(4));
    grid.nodes.push_back(gridec::Node::load(5, -1.0, -1.0));
    for (int i = 1; i <= 4; ++i) {
        grid.lines.push_back(gridec::Line{i, i, i + 1, 0.1, 2.0});
    }
    return grid;
}

// Corridor G1(1)-B(2)-B(3)-B(4)-L1(5) with a second, bigger generator
// G2(6) hanging off the middle bus. The corridor cannot absorb G2's held
// output, so with {3, 6} uncontrollable the area must be cut off when the
// nodes hold their dispatch, while zeroed nodes let power transit. The
// load-side line is the bottleneck (1.1 pu of a 3.0 pu demand).
inline gridec::GridCase corridor_case() {
    gridec::GridCase grid;
    grid.nodes.push_back(gridec::Node::generator(1, 1.0, 0.0, 1.3));
    grid.nodes.push_back(gridec::Node::bus(2));
    grid.nodes.push_back(gridec::Node::bus(3));
    grid.nodes.push_back(gridec::Node::bus(4));
    grid.nodes.push_back(gridec::Node::load(5, -3.0, -3.0));
    grid.nodes.push_back(gridec::Node::generator(6, 2.0, 0.0, 2.6));
    grid.lines.push_back(gridec::Line{1, 1, 2, 0.1, 1.4});
    grid.lines.push_back(gridec::Line{2, 2, 3, 0.1, 1.4});
    grid.lines.push_back(gridec::Line{3, 3, 4, 0.1, 1.4});
    grid.lines.push_back(gridec::Line{4, 4, 5, 0.1, 1.1});
    grid.lines.push_back(gridec::Line{5, 6, 3, 0.1, 2.6});
    return grid;
}

// Random connected case. Bus core (spanning tree plus a few chords) with
// generators and loads on spurs. Loads are rescaled so the case balances.
// cap_scale sizes the core line capacities relative to total generation;
// 1.0 is generous, small values create congestion.
inline gridec::GridCase random_case(gridec::SplitMix64& rng, int n_bus, int n_gen, int n_load,
                                    double cap_scale = 1.0) {
    gridec::GridCase grid;
    gridec::LineId next_line = 1;
    for (int i = 1; i <= n_bus; ++i) grid.nodes.push_back(gridec::Node::bus(i));
    for (int i = 2; i <= n_bus; ++i) {
        const auto parent = 1 + static_cast<gridec::NodeId>(rng.bounded(i - 1));
        grid.lines.push_back(gridec::Line{next_line++, parent, i,
                                          0.05 + 0.15 * rng.uniform01(), 0.0});
    }
    for (int c = 0; c < n_bus / 3; ++c) {
        const auto a = 1 + static_cast<gridec::NodeId>(rng.bounded(n_bus));
        const auto b = 1 + static_cast<gridec::NodeId>(rng.bounded(n_bus));
        if (a == b) continue;
        grid.lines.push_back(gridec::Line{next_line++, a, b,
                                          0.05 + 0.15 * rng.uniform01(), 0.0});
    }

    gridec::NodeId next_node = n_bus + 1;
    double total_gen = 0.0;
    std::vector<std::size_t> load_slots;
    for (int g = 0; g < n_gen; ++g) {
        const double pg = 0.3 + 0.9 * rng.uniform01();
        total_gen += pg;
        grid.nodes.push_back(gridec::Node::generator(next_node, pg, 0.0, 1.3 * pg));
        const auto bus = 1 + static_cast<gridec::NodeId>(rng.bounded(n_bus));
        grid.lines.push_back(gridec::Line{next_line++, next_node, bus,
                                          0.05 + 0.1 * rng.uniform01(), 1.35 * pg});
        ++next_node;
    }
    double total_load = 0.0;
    for (int l = 0; l < n_load; ++l) {
        const double pl = -(0.2 + 0.8 * rng.uniform01());
        total_load += pl;
        load_slots.push_back(grid.nodes.size());
        grid.nodes.push_back(gridec::Node::load(next_node, pl, pl));
        const auto bus = 1 + static_cast<gridec::NodeId>(rng.bounded(n_bus));
        grid.lines.push_back(gridec::Line{next_line++, next_node, bus, 0.05 + 0.1 * rng.uniform01(),
                                          0.0});
        ++next_node;
    }
    const double scale = total_load != 0.0 ? -total_gen / total_load : 0.0;
    for (std::size_t slot : load_slots) {
        grid.nodes[slot].pl_init *= scale;
        grid.nodes[slot].pl_max = grid.nodes[slot].pl_init;
    }
    for (auto& line : grid.lines) {
        if (line.f_max != 0.0) continue; // generator spurs sized above
        const gridec::Node* from = grid.find_node(line.from);
        if (from->kind == gridec::NodeKind::Load) {
            line.f_max = 1.25 * std::abs(from->pl_init);
        } else {
            line.f_max = cap_scale * total_gen; // bus core
        }
    }
    return grid;
}

} // namespace gridec_test
