#include "gridec/milp.hpp"
#include "lp_internal.hpp"

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gridec {
namespace {

// Past this many stored nodes the search keeps new children on a LIFO lane
// instead, trading best-first order for bounded memory.
constexpr std::size_t kOpenCap = 20000;

// Candidates within this of the incumbent count as no improvement, for
// pruning, reduced-cost fixing and probing alike. Keeps the search off
// objective plateaus; the returned objective stays within this of the true
// optimum, an order of magnitude inside kObjectiveTol.
constexpr double kPruneTol = 1e-7;

MilpStatus to_public(detail::LpStatus s) {
    switch (s) {
    case detail::LpStatus::Optimal: return MilpStatus::Optimal;
    case detail::LpStatus::Infeasible: return MilpStatus::Infeasible;
    case detail::LpStatus::Unbounded: return MilpStatus::Unbounded;
    }
    return MilpStatus::Infeasible;
}

struct Node {
    std::int64_t id = 0;
    double bound = -kInfinity; // parent LP objective, lower bound on subtree
    std::vector<detail::BoundOverride> fixes;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound < b.bound;
        return a.id < b.id;
    }
};

bool fixed_in(const std::vector<detail::BoundOverride>& fixes, int var) {
    for (const auto& f : fixes)
        if (f.var == var) return true;
    return false;
}

double fractionality(double v) { return std::min(v - std::floor(v), std::ceil(v) - v); }

/// Most fractional unfixed binary; ties go to the lowest variable index
/// (binaries iterate in ascending index order). -1 when integral.
int pick_branch_variable(const std::vector<double>& x, const std::vector<int>& binaries,
                         const std::vector<detail::BoundOverride>& fixes) {
    int best = -1;
    double best_frac = kIntegralityTol;
    for (int var : binaries) {
        if (fixed_in(fixes, var)) continue;
        const double frac = fractionality(x[static_cast<std::size_t>(var)]);
        if (frac > best_frac + 1e-12) {
            best_frac = frac;
            best = var;
        }
    }
    return best;
}

bool integral(const std::vector<double>& x, const std::vector<int>& binaries) {
    for (int var : binaries)
        if (fractionality(x[static_cast<std::size_t>(var)]) > kIntegralityTol) return false;
    return true;
}

/// Re-solve with every binary pinned to its rounded value so incumbents are
/// exactly integral. Returns false when the pinned LP is not optimal.
bool try_incumbent(const MilpModel& model, const std::vector<int>& binaries,
                   const std::vector<double>& x, MilpSolution& incumbent,
                   std::int64_t& lp_solves) {
    std::vector<detail::BoundOverride> fixes;
    fixes.reserve(binaries.size());
    for (int var : binaries) {
        const double r = std::round(x[static_cast<std::size_t>(var)]);
        fixes.push_back({var, r, r});
    }
    const detail::LpResult res = detail::solve_relaxation(model, fixes);
    ++lp_solves;
    if (res.status != detail::LpStatus::Optimal) return false;
    if (incumbent.status != MilpStatus::Optimal || res.objective < incumbent.objective) {
        incumbent.status = MilpStatus::Optimal;
        incumbent.values = res.x;
        incumbent.objective = res.objective;
        for (int var : binaries)
            incumbent.values[static_cast<std::size_t>(var)] =
                std::round(incumbent.values[static_cast<std::size_t>(var)]);
    }
    return true;
}

} // namespace

MilpSolution solve_lp(const MilpModel& model, bool relaxed) {
    model.validate();
    if (!relaxed) {
        for (int var : model.binary_indices())
            if (model.lower_bound(var) != model.upper_bound(var))
                throw std::invalid_argument("solve_lp: binary '" + model.variable_name(var) +
                                            "' is not fixed and relaxed mode is off");
    }
    const detail::LpResult res = detail::solve_relaxation(model, {});
    MilpSolution out;
    out.status = to_public(res.status);
    if (res.status == detail::LpStatus::Optimal) {
        out.values = res.x;
        out.objective = res.objective;
    }
    return out;
}

MilpSolution solve_milp(const MilpModel& model, const std::vector<std::vector<int>>& hints) {
    model.validate();
    const std::vector<int> binaries = model.binary_indices();

    MilpSolution incumbent;
    incumbent.status = MilpStatus::Infeasible;
    incumbent.objective = kInfinity;
    std::int64_t lp_solves = 0;

    for (const auto& hint : hints) {
        if (hint.size() != binaries.size())
            throw std::invalid_argument("solve_milp: hint length does not match binary count");
        std::vector<detail::BoundOverride> fixes;
        fixes.reserve(binaries.size());
        bool in_bounds = true;
        for (std::size_t k = 0; k < binaries.size(); ++k) {
            const int var = binaries[k];
            const double v = hint[k] != 0 ? 1.0 : 0.0;
            if (v < model.lower_bound(var) || v > model.upper_bound(var)) {
                in_bounds = false;
                break;
            }
            fixes.push_back({var, v, v});
        }
        if (!in_bounds) continue;
        const detail::LpResult res = detail::solve_relaxation(model, fixes);
        ++lp_solves;
        if (res.status == detail::LpStatus::Optimal && res.objective < incumbent.objective) {
            incumbent.status = MilpStatus::Optimal;
            incumbent.values = res.x;
            incumbent.objective = res.objective;
        }
    }

    // Root relaxation plus incumbent-driven fixing. `trunk` collects fixes
    // that hold in every solution meaningfully better than the incumbent;
    // the tree search below inherits them wholesale.
    std::vector<detail::BoundOverride> trunk;
    bool proven = false;
    bool unbounded = false;
    double root_bound = -kInfinity;

    const auto accept_integral = [&](const detail::LpResult& res) {
        if (!try_incumbent(model, binaries, res.x, incumbent, lp_solves) &&
            res.objective < incumbent.objective) {
            incumbent.status = MilpStatus::Optimal;
            incumbent.values = res.x;
            incumbent.objective = res.objective;
            for (int var : binaries)
                incumbent.values[static_cast<std::size_t>(var)] =
                    std::round(incumbent.values[static_cast<std::size_t>(var)]);
        }
    };
    const auto free_binary = [&](int var) {
        return model.lower_bound(var) != model.upper_bound(var) && !fixed_in(trunk, var);
    };
    // Flipping a nonbasic binary costs at least its reduced cost, so any
    // flip pricing past the incumbent pins the variable for good.
    const auto reduced_cost_fixing = [&](const detail::LpResult& res) {
        if (incumbent.status != MilpStatus::Optimal) return;
        for (int var : binaries) {
            if (!free_binary(var)) continue;
            const double x = res.x[static_cast<std::size_t>(var)];
            const double d = res.reduced_cost[static_cast<std::size_t>(var)];
            if (x <= kIntegralityTol &&
                res.objective + d >= incumbent.objective - kPruneTol)
                trunk.push_back({var, 0.0, 0.0});
            else if (x >= 1.0 - kIntegralityTol &&
                     res.objective - d >= incumbent.objective - kPruneTol)
                trunk.push_back({var, 1.0, 1.0});
        }
    };

    detail::LpResult root = detail::solve_relaxation(model, trunk);
    ++lp_solves;
    if (root.status == detail::LpStatus::Unbounded) unbounded = true;
    if (root.status == detail::LpStatus::Infeasible) proven = true;
    if (!unbounded && !proven) {
        root_bound = root.objective;
        if (root.objective >= incumbent.objective - kPruneTol) {
            proven = true;
        } else if (integral(root.x, binaries)) {
            accept_integral(root);
            proven = true;
        } else {
            // rounding dive, then fixing with the fresh incumbent
            try_incumbent(model, binaries, root.x, incumbent, lp_solves);
            if (root.objective >= incumbent.objective - kPruneTol)
                proven = true;
            else
                reduced_cost_fixing(root);
        }
    }

    // Probing: force each still-free binary the way the root point does not
    // lean; a probe that is infeasible or prices past the incumbent pins
    // the variable. Integral probe optima double as incumbents.
    if (!unbounded && !proven) {
        for (int var : binaries) {
            if (!free_binary(var)) continue;
            const double x = root.x[static_cast<std::size_t>(var)];
            bool dead[2] = {false, false};
            for (const int w : {0, 1}) {
                if (std::abs(x - w) <= kIntegralityTol) continue; // side alive at root
                auto fixes = trunk;
                fixes.push_back({var, static_cast<double>(w), static_cast<double>(w)});
                const detail::LpResult probe = detail::solve_relaxation(model, fixes);
                ++lp_solves;
                if (probe.status == detail::LpStatus::Unbounded) {
                    unbounded = true;
                    break;
                }
                if (probe.status == detail::LpStatus::Optimal) {
                    if (integral(probe.x, binaries))
                        try_incumbent(model, binaries, probe.x, incumbent, lp_solves);
                    if (probe.objective < incumbent.objective - kPruneTol) continue;
                }
                dead[w] = true;
            }
            if (unbounded) break;
            if (dead[0] && dead[1]) {
                proven = true; // nothing better than the incumbent anywhere
                break;
            }
            if (dead[0]) trunk.push_back({var, 1.0, 1.0});
            if (dead[1]) trunk.push_back({var, 0.0, 0.0});
        }
    }

    // The fixes may have moved the root bound; take a second pass before
    // opening the tree.
    if (!unbounded && !proven && !trunk.empty()) {
        root = detail::solve_relaxation(model, trunk);
        ++lp_solves;
        if (root.status == detail::LpStatus::Unbounded) unbounded = true;
        if (root.status == detail::LpStatus::Infeasible) proven = true;
        if (!unbounded && !proven) {
            root_bound = root.objective;
            if (root.objective >= incumbent.objective - kPruneTol) {
                proven = true;
            } else if (integral(root.x, binaries)) {
                accept_integral(root);
                proven = true;
            } else {
                reduced_cost_fixing(root);
            }
        }
    }

    std::set<Node, NodeOrder> open;
    std::vector<Node> dive;
    std::int64_t next_id = 0;
    if (!unbounded && !proven) open.insert(Node{next_id++, root_bound, trunk});

    while (!open.empty() || !dive.empty()) {
        Node node;
        if (!dive.empty()) {
            node = std::move(dive.back());
            dive.pop_back();
            if (node.bound >= incumbent.objective - kPruneTol) continue;
        } else {
            auto it = open.begin();
            if (it->bound >= incumbent.objective - kPruneTol) break; // all prunable
            node = std::move(open.extract(it).value());
        }

        const detail::LpResult res = detail::solve_relaxation(model, node.fixes);
        ++lp_solves;
        if (res.status == detail::LpStatus::Infeasible) continue;
        if (res.status == detail::LpStatus::Unbounded) {
            unbounded = true;
            break;
        }
        if (res.objective >= incumbent.objective - kPruneTol) continue;

        if (integral(res.x, binaries)) {
            if (!try_incumbent(model, binaries, res.x, incumbent, lp_solves) &&
                res.objective < incumbent.objective) {
                // pinned re-solve hit a tolerance knife edge; keep the
                // relaxation point rather than losing the subtree
                incumbent.status = MilpStatus::Optimal;
                incumbent.values = res.x;
                incumbent.objective = res.objective;
                for (int var : binaries)
                    incumbent.values[static_cast<std::size_t>(var)] =
                        std::round(incumbent.values[static_cast<std::size_t>(var)]);
            }
            continue;
        }

        const int branch_var = pick_branch_variable(res.x, binaries, node.fixes);
        if (branch_var < 0) {
            try_incumbent(model, binaries, res.x, incumbent, lp_solves);
            continue;
        }
        // the side the relaxation leans to goes first: equal bounds tie-break
        // by id, so the preferred child is explored before its sibling
        const double lean =
            res.x[static_cast<std::size_t>(branch_var)] >= 0.5 ? 1.0 : 0.0;
        for (const double v : {lean, 1.0 - lean}) {
            if (v < model.lower_bound(branch_var) || v > model.upper_bound(branch_var)) continue;
            Node child;
            child.id = next_id++;
            child.bound = res.objective;
            child.fixes = node.fixes;
            child.fixes.push_back({branch_var, v, v});
            if (open.size() >= kOpenCap)
                dive.push_back(std::move(child));
            else
                open.insert(std::move(child));
        }
    }

    MilpSolution out;
    out.node_count = lp_solves;
    if (unbounded) {
        out.status = MilpStatus::Unbounded;
        return out;
    }
    out.status = incumbent.status;
    if (incumbent.status == MilpStatus::Optimal) {
        out.values = incumbent.values;
        out.objective = incumbent.objective;
    }
    return out;
}

MilpSolution brute_force_milp(const MilpModel& model) {
    model.validate();
    const std::vector<int> binaries = model.binary_indices();
    if (binaries.size() > 20)
        throw std::invalid_argument("brute_force_milp: more than 20 binary variables");

    MilpSolution best;
    best.status = MilpStatus::Infeasible;
    best.objective = kInfinity;

    const std::uint32_t count = 1u << binaries.size();
    for (std::uint32_t v = 0; v < count; ++v) {
        std::vector<detail::BoundOverride> fixes;
        fixes.reserve(binaries.size());
        bool in_bounds = true;
        for (std::size_t k = 0; k < binaries.size(); ++k) {
            const double val = (v >> k) & 1u ? 1.0 : 0.0;
            const int var = binaries[k];
            if (val < model.lower_bound(var) || val > model.upper_bound(var)) {
                in_bounds = false;
                break;
            }
            fixes.push_back({var, val, val});
        }
        if (!in_bounds) continue;
        const detail::LpResult res = detail::solve_relaxation(model, fixes);
        ++best.node_count;
        if (res.status == detail::LpStatus::Unbounded) {
            best.status = MilpStatus::Unbounded;
            best.values.clear();
            best.objective = 0.0;
            return best;
        }
        if (res.status != detail::LpStatus::Optimal) continue;
        // strict improvement keeps the first assignment found on ties
        if (res.objective < best.objective) {
            best.status = MilpStatus::Optimal;
            best.values = res.x;
            best.objective = res.objective;
        }
    }
    return best;
}

} // namespace gridec
