#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "gridec/emergency.hpp"
#include "fixtures.hpp"

using namespace gridec;
using gridec_test::case5;
using gridec_test::corridor_case;
using gridec_test::random_case;

namespace {

std::string model_text(const MilpModel& model) {
    std::ostringstream out;
    write_lp(model, out);
    return out.str();
}

} // namespace

TEST_CASE("full model census on the five-node chain") {
    const auto grid = case5();
    const auto model = build_full_model(grid, {});

    CHECK(model.variable_count() == 20);
    CHECK(model.binary_count() == 4);

    // Deterministic layout: phases, frequencies, dispatch, load, flows, switches.
    const std::vector<std::string> expected = {
        "th_1", "th_2", "th_3", "th_4", "th_5", "om_1", "om_2", "om_3", "om_4",
        "om_5", "pg_1", "pl_5", "f_1",  "f_2",  "f_3",  "f_4",  "z_1",  "z_2",
        "z_3",  "z_4"};
    for (int j = 0; j < model.variable_count(); ++j) {
        CHECK(model.variable_name(j) == expected[static_cast<std::size_t>(j)]);
    }

    const int om_gen = model.variable_index("om_1");
    CHECK(model.lower_bound(om_gen) == doctest::Approx(59.5));
    CHECK(model.upper_bound(om_gen) == doctest::Approx(60.5));
    const int om_bus = model.variable_index("om_2");
    CHECK(model.lower_bound(om_bus) == -kInfinity);
    const int pl = model.variable_index("pl_5");
    CHECK(model.lower_bound(pl) == doctest::Approx(-1.0));
    CHECK(model.upper_bound(pl) == 0.0);
    CHECK(model.objective()[static_cast<std::size_t>(pl)] == doctest::Approx(1.0));
    const int f = model.variable_index("f_3");
    CHECK(model.lower_bound(f) == doctest::Approx(-2.0));
    CHECK(model.upper_bound(f) == doctest::Approx(2.0));
}

TEST_CASE("comfortable chain serves the whole load") {
    const auto grid = case5();
    const auto partition = partition_areas(grid, {}, {});
    const auto model = build_partial_model(grid, partition);
    const auto solution = solve_milp(model);
    REQUIRE(solution.status == MilpStatus::Optimal);
    CHECK(solution.objective == doctest::Approx(-1.0).epsilon(1e-6));

    const auto outcome = extract_outcome(model, solution, partition, grid);
    CHECK(outcome.pl.at(5) == doctest::Approx(-1.0));
    CHECK(outcome.pg_effective.at(1) == doctest::Approx(1.0));
    for (int l = 1; l <= 4; ++l) {
        CHECK(outcome.line_up.at(l) == 1);
        CHECK(outcome.flow.at(l) == doctest::Approx(1.0));
    }
    const auto yield = compute_yield(outcome, {}, grid);
    CHECK(yield.initial == doctest::Approx(1.0));
    CHECK(yield.ratio == doctest::Approx(1.0));

    const auto reference = brute_force_milp(model);
    CHECK(std::abs(reference.objective - solution.objective) <= 1e-6);
}

TEST_CASE("zero line capacity sheds everything") {
    auto grid = case5();
    for (auto& line : grid.lines) line.f_max = 0.0;
    const auto partition = partition_areas(grid, {}, {});
    const auto model = build_partial_model(grid, partition);
    const auto solution = solve_milp(model);
    REQUIRE(solution.status == MilpStatus::Optimal);
    CHECK(solution.objective == doctest::Approx(0.0));
    const auto outcome = extract_outcome(model, solution, partition, grid);
    CHECK(outcome.pl.at(5) == doctest::Approx(0.0));
    CHECK(compute_yield(outcome, {}, grid).ratio == doctest::Approx(0.0));
}

TEST_CASE("zero-area partition builds exactly the full model") {
    const auto grid = corridor_case();
    const NodeSet failed{6};
    const auto full = build_full_model(grid, failed);
    const auto partial = build_partial_model(grid, partition_areas(grid, failed, {}));
    CHECK(model_text(full) == model_text(partial));
    CHECK(full.variable_count() == partial.variable_count());
    CHECK(full.constraint_count() == partial.constraint_count());
}

TEST_CASE("uncontrollable transit bus keeps the corridor alive") {
    const auto grid = case5();
    for (const auto mode : {OperatingMode::P_init, OperatingMode::P_zero}) {
        const auto partition =
            apply_mode(partition_areas(grid, {}, {3}), grid, mode);
        const auto model = build_partial_model(grid, partition);
        CHECK(model.binary_count() == 5); // four switched lines plus the area flag
        const auto solution = solve_milp(model);
        REQUIRE(solution.status == MilpStatus::Optimal);
        const auto outcome = extract_outcome(model, solution, partition, grid);
        CHECK(outcome.island_stable.at(0) == 1);
        CHECK(outcome.pl.at(5) == doctest::Approx(-1.0));
        CHECK(compute_yield(outcome, {}, grid).ratio == doctest::Approx(1.0));
    }
}

TEST_CASE("area that cannot hold its dispatch is cut off") {
    const auto grid = corridor_case();
    const auto base = partition_areas(grid, {}, {3, 6});
    REQUIRE(base.areas.size() == 1);
    REQUIRE(base.areas[0].internal_lines == LineSet{5});
    REQUIRE(base.border_lines[0] == LineSet{2, 3});

    const auto held = apply_mode(base, grid, OperatingMode::P_init);
    const auto model_init = build_partial_model(grid, held);
    const auto sol_init = solve_milp(model_init);
    REQUIRE(sol_init.status == MilpStatus::Optimal);
    const auto reference = brute_force_milp(model_init);
    CHECK(std::abs(reference.objective - sol_init.objective) <= 1e-6);

    const auto out_init = extract_outcome(model_init, sol_init, held, grid);
    CHECK(out_init.island_stable.at(0) == 0);
    CHECK(out_init.pl.at(5) == doctest::Approx(0.0));
    CHECK(out_init.line_up.at(2) == 0);
    CHECK(out_init.line_up.at(3) == 0);
    CHECK(out_init.line_up.at(5) == 0);
    CHECK(out_init.omega_pending == NodeSet{3, 6});
    const auto yield_init = compute_yield(out_init, {{0, 0.0}}, grid);
    CHECK(yield_init.ratio == doctest::Approx(0.0));

    const auto zeroed = apply_mode(base, grid, OperatingMode::P_zero);
    const auto model_zero = build_partial_model(grid, zeroed);
    const auto sol_zero = solve_milp(model_zero);
    REQUIRE(sol_zero.status == MilpStatus::Optimal);
    const auto out_zero = extract_outcome(model_zero, sol_zero, zeroed, grid);
    CHECK(out_zero.island_stable.at(0) == 1);
    CHECK(out_zero.pl.at(5) == doctest::Approx(-1.1)); // load-side line is the bottleneck
    const auto yield_zero = compute_yield(out_zero, {}, grid);
    CHECK(yield_zero.ratio == doctest::Approx(1.1 / 3.0));
    CHECK(yield_zero.ratio > yield_init.ratio);
}

TEST_CASE("outcome extraction rejects doctored solutions") {
    const auto grid = case5();
    const auto partition = partition_areas(grid, {}, {});
    const auto model = build_partial_model(grid, partition);
    auto solution = solve_milp(model);
    REQUIRE(solution.status == MilpStatus::Optimal);

    auto fractional = solution;
    fractional.values[static_cast<std::size_t>(model.variable_index("z_2"))] = 0.5;
    CHECK_THROWS_AS(extract_outcome(model, fractional, partition, grid), std::logic_error);

    auto leaky = solution;
    leaky.values[static_cast<std::size_t>(model.variable_index("f_2"))] += 0.1;
    CHECK_THROWS_AS(extract_outcome(model, leaky, partition, grid), std::logic_error);

    auto failed = solution;
    failed.status = MilpStatus::Infeasible;
    CHECK_THROWS_AS(extract_outcome(model, failed, partition, grid), std::logic_error);
}

TEST_CASE("yield accounting cross-checks the cascade inputs") {
    const auto grid = corridor_case();
    const auto partition =
        apply_mode(partition_areas(grid, {}, {3, 6}), grid, OperatingMode::P_init);
    const auto model = build_partial_model(grid, partition);
    const auto solution = solve_milp(model);
    REQUIRE(solution.status == MilpStatus::Optimal);
    const auto outcome = extract_outcome(model, solution, partition, grid);
    REQUIRE(outcome.island_stable.at(0) == 0);

    CHECK_THROWS_AS(compute_yield(outcome, {}, grid), std::invalid_argument);
    CHECK_THROWS_AS(compute_yield(outcome, {{0, 0.0}, {1, 0.0}}, grid),
                    std::invalid_argument);
    CHECK_THROWS_AS(compute_yield(outcome, {{0, -0.5}}, grid), std::invalid_argument);
    // Overclaiming the cascade credit trips the served > initial guard.
    CHECK_THROWS_AS(compute_yield(outcome, {{0, 99.0}}, grid), std::logic_error);
}

TEST_CASE("losing every node leaves an empty but solvable model") {
    const auto grid = case5();
    const auto partition = partition_areas(grid, {1, 2, 3, 4, 5}, {});
    const auto model = build_partial_model(grid, partition);
    CHECK(model.variable_count() == 0);
    const auto solution = solve_milp(model);
    REQUIRE(solution.status == MilpStatus::Optimal);
    CHECK(solution.objective == doctest::Approx(0.0));
    const auto outcome = extract_outcome(model, solution, partition, grid);
    const auto yield = compute_yield(outcome, {}, grid);
    CHECK(yield.served == doctest::Approx(0.0));
    CHECK(yield.ratio == doctest::Approx(0.0));
}

TEST_CASE("random partial models agree with the enumeration oracle") {
    SplitMix64 rng(20240816);
    int verified = 0;
    for (int trial = 0; trial < 30; ++trial) {
        auto grid = random_case(rng, 3, 2, 2);
        const auto gens = grid.generator_ids();
        NodeSet failed;
        if (rng.bounded(3) == 0) {
            failed.insert(gens[rng.bounded(gens.size())]);
        }
        NodeSet unc;
        for (const auto& node : grid.nodes) {
            if (rng.bounded(4) == 0) unc.insert(node.id);
            if (unc.size() == 2) break;
        }
        const auto mode = rng.bounded(2) == 0 ? OperatingMode::P_init : OperatingMode::P_zero;
        const auto partition = apply_mode(partition_areas(grid, failed, unc), grid, mode);
        const auto model = build_partial_model(grid, partition);
        const auto solution = solve_milp(model);
        REQUIRE(solution.status == MilpStatus::Optimal);
        const auto outcome = extract_outcome(model, solution, partition, grid);
        CHECK(outcome_issues(outcome, partition, grid).empty());

        if (model.binary_count() <= 9) {
            const auto reference = brute_force_milp(model);
            CHECK(std::abs(reference.objective - solution.objective) <= 1e-6);
            ++verified;
        }
    }
    CHECK(verified >= 10);
}

TEST_CASE("extra capacity never hurts") {
    SplitMix64 rng(424244);
    for (int trial = 0; trial < 12; ++trial) {
        auto grid = random_case(rng, 4, 2, 2, 0.4);
        const auto model = build_full_model(grid, {});
        const auto tight = solve_milp(model);
        REQUIRE(tight.status == MilpStatus::Optimal);

        auto roomy_grid = grid;
        for (auto& line : roomy_grid.lines) line.f_max *= 1.5;
        const auto roomy = solve_milp(build_full_model(roomy_grid, {}));
        REQUIRE(roomy.status == MilpStatus::Optimal);
        CHECK(roomy.objective <= tight.objective + 1e-6);
    }
}

TEST_CASE("base case with no event serves everything") {
    SplitMix64 rng(99177);
    for (int trial = 0; trial < 8; ++trial) {
        const auto grid = random_case(rng, 4, 2, 3);
        const auto partition = partition_areas(grid, {}, {});
        const auto model = build_partial_model(grid, partition);
        const auto solution = solve_milp(model);
        REQUIRE(solution.status == MilpStatus::Optimal);
        const auto outcome = extract_outcome(model, solution, partition, grid);
        const auto yield = compute_yield(outcome, {}, grid);
        CHECK(yield.ratio == doctest::Approx(1.0).epsilon(1e-7));
    }
}
