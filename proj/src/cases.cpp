#include "gridec/cases.hpp"

namespace gridec::cases {

GridCase case5() {
    GridCase grid;
    grid.nodes.push_back(Node::generator(1, 1.0, 0.0, 1.25));
    grid.nodes.push_back(Node::bus(2));
    grid.nodes.push_back(Node::bus(3));
    grid.nodes.push_back(Node::bus(4));
    grid.nodes.push_back(Node::load(5, -1.0, -1.0));
    for (int i = 1; i <= 4; ++i) {
        grid.lines.push_back(Line{i, i, i + 1, 0.1, 2.0});
    }
    return grid;
}

GridCase case30() {
    GridCase grid;
    // Stiff interconnection: relays hold frequency to a tight band, so
    // droop can only nudge outputs and islanding buys no extra headroom.
    grid.omega_min = 59.9;
    grid.omega_max = 60.1;

    const double pg[8] = {1.10, 0.70, 0.55, 0.95, 0.45, 0.80, 0.40, 0.60};
    const NodeId gen_bus[8] = {9, 11, 12, 14, 16, 18, 19, 20};
    for (int g = 0; g < 8; ++g) {
        grid.nodes.push_back(Node::generator(g + 1, pg[g], 0.0, 1.3 * pg[g]));
    }
    for (NodeId b = 9; b <= 20; ++b) grid.nodes.push_back(Node::bus(b));
    const double pl[10] = {-0.80, -0.50, -0.60, -0.40, -0.70,
                           -0.50, -0.45, -0.55, -0.60, -0.45};
    const NodeId load_bus[10] = {10, 11, 13, 12, 15, 16, 18, 19, 20, 9};
    for (int l = 0; l < 10; ++l) {
        grid.nodes.push_back(Node::load(l + 21, pl[l], pl[l]));
    }

    // The transmission mesh is sized with heavy slack, so capacity never
    // constrains how the ring redistributes power. What bites is the two
    // stub buses 12 and 18: each hangs off the ring by a single bridge
    // that clears the stub's initial net export but cannot import the
    // stub load alone. While the stub generator runs, the load rides on
    // it; once that generator fails, the load survives only partially on
    // bridge imports, and if it is also uncontrollable, holding its full
    // demand is infeasible and the area must be cut off.
    const NodeId ring[10] = {9, 10, 11, 13, 14, 15, 16, 17, 19, 20};
    LineId next = 1;
    for (int r = 0; r < 10; ++r) {
        grid.lines.push_back(Line{next++, ring[r], ring[(r + 1) % 10], 0.10, 2.00});
    }
    grid.lines.push_back(Line{next++, 11, 12, 0.10, 0.30});
    grid.lines.push_back(Line{next++, 17, 18, 0.10, 0.42});
    const std::pair<NodeId, NodeId> chords[5] = {
        {9, 15}, {11, 17}, {13, 19}, {10, 14}, {16, 20}};
    for (const auto& [a, b] : chords) {
        grid.lines.push_back(Line{next++, a, b, 0.15, 1.50});
    }
    for (int g = 0; g < 8; ++g) {
        grid.lines.push_back(Line{next++, g + 1, gen_bus[g], 0.05, 1.4 * pg[g]});
    }
    for (int l = 0; l < 10; ++l) {
        grid.lines.push_back(Line{next++, l + 21, load_bus[l], 0.05, 1.2 * -pl[l]});
    }
    return grid;
}

} // namespace gridec::cases
