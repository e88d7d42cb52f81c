#pragma once

// Internal LP layer shared by solve_lp, branch and bound, and brute force.
// Not part of the public API.

#include <utility>
#include <vector>

#include "gridec/milp.hpp"

namespace gridec::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x; // aligned with the model's variables
    double objective = 0.0;
    int iterations = 0;
    // Reduced costs aligned with the model's variables (zero for basic and
    // presolve-fixed variables). Signs follow minimisation: nonbasic at
    // lower bound >= 0, nonbasic at upper bound <= 0.
    std::vector<double> reduced_cost;
};

/// Bound override for one variable: (variable index, lower, upper).
struct BoundOverride {
    int var = -1;
    double lower = 0.0;
    double upper = 0.0;
};

/// Solves the model's continuous relaxation with optional per-variable
/// bound overrides (used by branch and bound to fix binaries). Binary
/// flags are ignored; bounds are what count. Performs the two presolve
/// reductions (fixed-variable substitution, empty-row elimination) and a
/// two-phase bounded-variable primal simplex with a Bland anti-cycling
/// fallback.
LpResult solve_relaxation(const MilpModel& model, const std::vector<BoundOverride>& overrides);

} // namespace gridec::detail
