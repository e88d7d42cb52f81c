#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gridec/common.hpp"
#include "gridec/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

using namespace gridec;

namespace {

GridCase three_node_case() {
    GridCase grid;
    grid.nodes = {Node::generator(1, 1.0, 0.0, 1.5), Node::bus(2), Node::load(3, -1.0, -1.0)};
    grid.lines = {{1, 1, 2, 0.1, 2.0}, {2, 2, 3, 0.1, 2.0}};
    return grid;
}

/// Union-find, used as an independent reference for connected_components.
struct UnionFind {
    std::map<NodeId, NodeId> parent;
    NodeId find(NodeId v) {
        if (parent.find(v) == parent.end()) parent[v] = v;
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }
    void unite(NodeId a, NodeId b) { parent[find(a)] = find(b); }
};

std::vector<NodeSet> components_by_union_find(const NodeSet& nodes,
                                              const std::vector<Line>& lines) {
    UnionFind uf;
    for (NodeId v : nodes) uf.find(v);
    for (const auto& l : lines)
        if (nodes.count(l.from) && nodes.count(l.to)) uf.unite(l.from, l.to);
    std::map<NodeId, NodeSet> grouped;
    for (NodeId v : nodes) grouped[uf.find(v)].insert(v);
    std::vector<NodeSet> out;
    for (auto& [root, members] : grouped) out.push_back(members);
    std::sort(out.begin(), out.end(),
              [](const NodeSet& a, const NodeSet& b) { return *a.begin() < *b.begin(); });
    return out;
}

IslandState random_connected_island(SplitMix64& rng, int n_nodes) {
    IslandState island;
    for (int i = 0; i < n_nodes; ++i) {
        IslandNode n;
        n.id = i + 1;
        n.kind = NodeKind::Bus;
        island.nodes.push_back(n);
    }
    LineId next_line = 1;
    for (int i = 1; i < n_nodes; ++i) {
        // random spanning tree: attach node i+1 to an earlier node
        const NodeId to = static_cast<NodeId>(1 + rng.bounded(static_cast<std::uint64_t>(i)));
        island.lines.push_back({next_line++, static_cast<NodeId>(i + 1), to,
                                0.05 + 0.2 * rng.uniform01(), 10.0});
    }
    const int extra = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n_nodes)));
    for (int e = 0; e < extra; ++e) {
        const NodeId a = static_cast<NodeId>(1 + rng.bounded(static_cast<std::uint64_t>(n_nodes)));
        const NodeId b = static_cast<NodeId>(1 + rng.bounded(static_cast<std::uint64_t>(n_nodes)));
        if (a == b) continue;
        island.lines.push_back({next_line++, a, b, 0.05 + 0.2 * rng.uniform01(), 10.0});
    }
    return island;
}

std::vector<double> random_balanced_injections(SplitMix64& rng, std::size_t n) {
    std::vector<double> p(n);
    for (auto& v : p) v = -1.0 + 2.0 * rng.uniform01();
    const double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(n);
    for (auto& v : p) v -= mean;
    return p;
}

} // namespace

TEST_CASE("well-formed case validates clean") {
    const ValidationReport report = validate_case(three_node_case());
    CHECK(report.ok());
}

TEST_CASE("zero reactance is reported against the offending line") {
    GridCase grid = three_node_case();
    grid.lines[0].reactance_x = 0.0;
    const ValidationReport report = validate_case(grid);
    REQUIRE_FALSE(report.ok());
    CHECK(report.issues[0].where == "line 1");
    CHECK(report.issues[0].message.find("reactance") != std::string::npos);
}

TEST_CASE("generator attached to two buses breaks the degree rule") {
    GridCase grid = three_node_case();
    grid.nodes.push_back(Node::bus(4));
    grid.lines.push_back({3, 1, 4, 0.1, 2.0});
    const ValidationReport report = validate_case(grid);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const auto& issue : report.issues)
        found = found || (issue.where == "node 1" &&
                          issue.message.find("exactly one bus") != std::string::npos);
    CHECK(found);
}

TEST_CASE("generator attached directly to a load is rejected") {
    GridCase grid;
    grid.nodes = {Node::generator(1, 1.0, 0.0, 1.5), Node::load(2, -1.0, -1.0)};
    grid.lines = {{1, 1, 2, 0.1, 2.0}};
    const ValidationReport report = validate_case(grid);
    CHECK_FALSE(report.ok());
}

TEST_CASE("sign violations are reported") {
    GridCase grid = three_node_case();
    grid.nodes[2].pl_init = 0.5;
    CHECK_FALSE(validate_case(grid).ok());

    grid = three_node_case();
    grid.nodes[0].pg_init = 2.0; // above pg_max
    CHECK_FALSE(validate_case(grid).ok());

    grid = three_node_case();
    grid.omega_min = 61.0;
    CHECK_FALSE(validate_case(grid).ok());
}

TEST_CASE("regulation alpha matches the closed form") {
    const Node g1 = Node::generator(1, 1.0, 0.0, 2.0, 0.02);
    CHECK(regulation_alpha(g1, 60.0) == doctest::Approx(0.33366666666666667).epsilon(1e-12));

    const Node g2 = Node::generator(2, 3.0, 0.0, 4.0, 0.0);
    CHECK(regulation_alpha(g2, 60.0) == doctest::Approx(1.0).epsilon(1e-12));

    const Node g3 = Node::generator(3, 0.0, 0.0, 1.0, 0.0);
    CHECK(regulation_alpha(g3, 60.0) == 0.0);
}

TEST_CASE("regulation alpha is homogeneous in pg_init when damping is zero") {
    SplitMix64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const double pg = 0.1 + 3.0 * rng.uniform01();
        const double lambda = 0.1 + 5.0 * rng.uniform01();
        const Node a = Node::generator(1, pg, 0.0, 10.0, 0.0);
        const Node b = Node::generator(2, lambda * pg, 0.0, 100.0, 0.0);
        CHECK(regulation_alpha(b, 60.0) ==
              doctest::Approx(lambda * regulation_alpha(a, 60.0)).epsilon(1e-12));
    }
}

TEST_CASE("island droop frequency: balanced island sits at omega_s") {
    IslandState island;
    island.nodes = {{1, NodeKind::Generator, 1.0, 0.33366666666666667},
                    {2, NodeKind::Load, -1.0, 0.0}};
    const auto omega = island_droop_frequency(island);
    REQUIRE(omega.has_value());
    CHECK(*omega == doctest::Approx(60.0).epsilon(1e-12));
}

TEST_CASE("island droop frequency: overload droops below nominal") {
    IslandState island;
    island.nodes = {{1, NodeKind::Generator, 1.0, 0.33366666666666667},
                    {2, NodeKind::Load, -1.2, 0.0}};
    const auto omega = island_droop_frequency(island);
    REQUIRE(omega.has_value());
    CHECK(*omega == doctest::Approx(59.4005994005994).epsilon(1e-10));

    // residual of the droop balance at omega*
    const double residual = (1.0 - 0.33366666666666667 * (*omega - 60.0)) + (-1.2);
    CHECK(std::abs(residual) <= 1e-9);
}

TEST_CASE("island droop frequency: no droop capacity has no equilibrium") {
    IslandState island;
    island.nodes = {{1, NodeKind::Load, -0.5, 0.0}};
    CHECK_FALSE(island_droop_frequency(island).has_value());

    island.nodes = {{1, NodeKind::Load, -0.5, 0.0}, {2, NodeKind::Generator, 0.5, 0.0}};
    const auto omega = island_droop_frequency(island);
    REQUIRE(omega.has_value()); // balanced with zero droop
    CHECK(*omega == doctest::Approx(60.0));
}

TEST_CASE("droop equilibrium satisfies the balance residual on random islands") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        IslandState island;
        const int gens = 1 + static_cast<int>(rng.bounded(4));
        const int loads = static_cast<int>(rng.bounded(4));
        NodeId id = 1;
        for (int g = 0; g < gens; ++g) {
            const double pg = 0.2 + 2.0 * rng.uniform01();
            const Node node = Node::generator(id, pg, 0.0, 5.0, 0.02);
            island.nodes.push_back({id, NodeKind::Generator, pg, regulation_alpha(node, 60.0)});
            ++id;
        }
        for (int l = 0; l < loads; ++l) {
            island.nodes.push_back({id, NodeKind::Load, -2.0 * rng.uniform01(), 0.0});
            ++id;
        }
        const auto omega = island_droop_frequency(island);
        REQUIRE(omega.has_value());
        double residual = 0.0;
        for (const auto& n : island.nodes) residual += n.power - n.alpha * (*omega - 60.0);
        CHECK(std::abs(residual) <= 1e-9);
    }
}

TEST_CASE("dc flow on a single line") {
    IslandState island;
    island.nodes = {{1, NodeKind::Bus, 0.0, 0.0}, {2, NodeKind::Bus, 0.0, 0.0}};
    island.lines = {{1, 1, 2, 0.1, 2.0}};
    const FlowAssignment fa = dc_flow_solve(island, {0.5, -0.5}, 1);
    CHECK(fa.flow[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fa.theta[0] - fa.theta[1] == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("dc flow splits 2:1 on the triangle") {
    IslandState island;
    island.nodes = {{1, NodeKind::Bus, 0.0, 0.0},
                    {2, NodeKind::Bus, 0.0, 0.0},
                    {3, NodeKind::Bus, 0.0, 0.0}};
    island.lines = {{1, 1, 2, 0.1, 2.0}, {2, 1, 3, 0.1, 2.0}, {3, 3, 2, 0.1, 2.0}};
    const FlowAssignment fa = dc_flow_solve(island, {0.9, -0.9, 0.0}, 1);
    CHECK(fa.flow[0] == doctest::Approx(0.6).epsilon(1e-10)); // direct path
    CHECK(fa.flow[1] == doctest::Approx(0.3).epsilon(1e-10)); // two-hop path
    CHECK(fa.flow[2] == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("dc flow with zero injections is identically zero") {
    IslandState island;
    island.nodes = {{1, NodeKind::Bus, 0.0, 0.0},
                    {2, NodeKind::Bus, 0.0, 0.0},
                    {3, NodeKind::Bus, 0.0, 0.0}};
    island.lines = {{1, 1, 2, 0.1, 2.0}, {2, 2, 3, 0.1, 2.0}};
    const FlowAssignment fa = dc_flow_solve(island, {0.0, 0.0, 0.0}, 2);
    for (double f : fa.flow) CHECK(f == 0.0);
    for (double t : fa.theta) CHECK(t == 0.0);
}

TEST_CASE("dc flow rejects unbalanced or disconnected input") {
    IslandState island;
    island.nodes = {{1, NodeKind::Bus, 0.0, 0.0}, {2, NodeKind::Bus, 0.0, 0.0}};
    island.lines = {{1, 1, 2, 0.1, 2.0}};
    CHECK_THROWS_AS(dc_flow_solve(island, {0.5, -0.4}, 1), std::invalid_argument);

    island.nodes.push_back({3, NodeKind::Bus, 0.0, 0.0});
    CHECK_THROWS_AS(dc_flow_solve(island, {0.5, -0.5, 0.0}, 1), InputError);
}

TEST_CASE("dc flow is reference-invariant") {
    SplitMix64 rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + static_cast<int>(rng.bounded(8));
        IslandState island = random_connected_island(rng, n);
        const std::vector<double> p = random_balanced_injections(rng, island.nodes.size());
        const FlowAssignment a = dc_flow_solve(island, p, island.nodes.front().id);
        const FlowAssignment b = dc_flow_solve(island, p, island.nodes.back().id);
        for (std::size_t i = 0; i < a.flow.size(); ++i)
            CHECK(std::abs(a.flow[i] - b.flow[i]) <= 1e-9);
        const double shift = a.theta[0] - b.theta[0];
        for (std::size_t i = 0; i < a.theta.size(); ++i)
            CHECK(std::abs(a.theta[i] - b.theta[i] - shift) <= 1e-9);
    }
}

TEST_CASE("dc flow satisfies the flow law and nodal balance") {
    SplitMix64 rng(72);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng.bounded(10));
        IslandState island = random_connected_island(rng, n);
        const std::vector<double> p = random_balanced_injections(rng, island.nodes.size());
        const FlowAssignment fa = dc_flow_solve(island, p, island.nodes.front().id);

        std::map<NodeId, std::size_t> index;
        for (std::size_t i = 0; i < island.nodes.size(); ++i) index[island.nodes[i].id] = i;
        std::vector<double> residual = p;
        for (std::size_t li = 0; li < island.lines.size(); ++li) {
            const auto& l = island.lines[li];
            const double dtheta = fa.theta[index[l.from]] - fa.theta[index[l.to]];
            CHECK(std::abs(l.reactance_x * fa.flow[li] - dtheta) <= 1e-9);
            residual[index[l.from]] -= fa.flow[li];
            residual[index[l.to]] += fa.flow[li];
        }
        for (double r : residual) CHECK(std::abs(r) <= 1e-9);
    }
}

TEST_CASE("connected components on hand cases") {
    NodeSet nodes{1, 2, 3};
    CHECK(connected_components(nodes, {}).size() == 3);

    std::vector<Line> triangle{{1, 1, 2, 0.1, 1.0}, {2, 2, 3, 0.1, 1.0}, {3, 3, 1, 0.1, 1.0}};
    CHECK(connected_components(nodes, triangle).size() == 1);

    NodeSet path_nodes{1, 2, 3, 4, 5, 6};
    std::vector<Line> broken_path{{1, 1, 2, 0.1, 1.0},
                                  {2, 2, 3, 0.1, 1.0},
                                  {4, 4, 5, 0.1, 1.0},
                                  {5, 5, 6, 0.1, 1.0}};
    const auto comps = connected_components(path_nodes, broken_path);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == NodeSet{1, 2, 3});
    CHECK(comps[1] == NodeSet{4, 5, 6});
}

TEST_CASE("connected components agree with union-find on random graphs") {
    SplitMix64 rng(1001);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.bounded(20));
        NodeSet nodes;
        for (int i = 0; i < n; ++i) nodes.insert(static_cast<NodeId>(rng.bounded(40)));
        std::vector<Line> lines;
        const int m = static_cast<int>(rng.bounded(25));
        for (int e = 0; e < m; ++e) {
            const NodeId a = static_cast<NodeId>(rng.bounded(40));
            const NodeId b = static_cast<NodeId>(rng.bounded(40));
            if (a == b) continue;
            lines.push_back({static_cast<LineId>(e), a, b, 0.1, 1.0});
        }
        const auto mine = connected_components(nodes, lines);
        const auto ref = components_by_union_find(nodes, lines);
        REQUIRE(mine.size() == ref.size());
        for (std::size_t i = 0; i < mine.size(); ++i) CHECK(mine[i] == ref[i]);
    }
}
