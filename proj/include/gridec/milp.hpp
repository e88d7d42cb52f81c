#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace gridec {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Solver tolerances. Per-unit data is O(1) so absolute tolerances are
/// appropriate at this scale.
constexpr double kFeasibilityTol = 1e-7;
constexpr double kIntegralityTol = 1e-6;
constexpr double kObjectiveTol = 1e-6;

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LinearTerm {
    int var = -1;
    double coeff = 0.0;
};

struct MilpConstraint {
    std::string name;
    std::vector<LinearTerm> terms;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
};

/// A mixed-binary linear model, sense fixed to minimize. Models are built
/// once, validated, and then treated as immutable by the solver.
class MilpModel {
public:
    int add_variable(std::string name, double lower, double upper, bool is_binary = false);
    int add_binary(std::string name) { return add_variable(std::move(name), 0.0, 1.0, true); }
    void add_constraint(std::string name, std::vector<LinearTerm> terms, Relation relation,
                        double rhs);
    void set_objective_term(int var, double coeff);

    /// Throws std::invalid_argument on structural problems: binary bounds
    /// outside [0,1], references to undeclared variables, non-finite
    /// coefficients. Builders call this before handing a model out, so a
    /// malformed model never reaches the solver.
    void validate() const;

    int variable_count() const { return static_cast<int>(names_.size()); }
    int constraint_count() const { return static_cast<int>(constraints_.size()); }
    int binary_count() const;
    std::vector<int> binary_indices() const;

    const std::string& variable_name(int var) const { return names_[static_cast<std::size_t>(var)]; }
    double lower_bound(int var) const { return lower_[static_cast<std::size_t>(var)]; }
    double upper_bound(int var) const { return upper_[static_cast<std::size_t>(var)]; }
    bool is_binary(int var) const { return binary_[static_cast<std::size_t>(var)]; }
    int variable_index(const std::string& name) const; // -1 when absent
    const std::vector<MilpConstraint>& constraints() const { return constraints_; }
    const std::vector<double>& objective() const { return objective_; }

    /// Fix a variable to a single value (used by brute force and tests).
    void fix_variable(int var, double value);

    double objective_value(const std::vector<double>& x) const;
    /// Largest constraint violation of x over all rows and bounds.
    double max_violation(const std::vector<double>& x) const;

private:
    std::vector<std::string> names_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<bool> binary_;
    std::vector<double> objective_; // dense, aligned with variables
    std::vector<MilpConstraint> constraints_;
};

enum class MilpStatus { Optimal, Infeasible, Unbounded };

std::string to_string(MilpStatus status);

struct MilpSolution {
    MilpStatus status = MilpStatus::Infeasible;
    std::vector<double> values;
    double objective = 0.0;
    std::int64_t node_count = 0; // branch-and-bound nodes (0 for pure LP)
};

/// Solves the continuous problem. With relaxed = true, binary variables
/// are treated as continuous on [lower, upper]. With relaxed = false every
/// binary must already be fixed (lower == upper), otherwise
/// std::invalid_argument is thrown; this is the mode brute_force_milp uses
/// after enumerating an assignment.
MilpSolution solve_lp(const MilpModel& model, bool relaxed);

/// Exact mixed-binary solve: best-first branch and bound on the LP
/// relaxation, branching on the most fractional binary (ties broken by
/// lowest variable index). Optional `hints` are full binary assignments
/// (aligned with binary_indices()) tried up-front as incumbent candidates;
/// they affect node counts but never the returned objective.
MilpSolution solve_milp(const MilpModel& model,
                        const std::vector<std::vector<int>>& hints = {});

/// Verification oracle: enumerates every binary assignment (at most 20
/// binaries, otherwise std::invalid_argument), solves the LP for each and
/// returns the best. Deliberately brute force; used by tests and --verify.
MilpSolution brute_force_milp(const MilpModel& model);

/// Writes the model as LP-style plain text for debugging. Grammar:
///   min: <coeff> <var> [+-] ... ;
///   subject to
///   <name>: <coeff> <var> ... <= | = | >= <rhs> ;
///   bounds
///   <lo> <= <var> <= <hi> ;      (one per variable; "free" when unbounded)
///   binary
///   <var> <var> ... ;
///   end
/// Numbers are shortest-round-trip decimal.
void write_lp(const MilpModel& model, std::ostream& out);

} // namespace gridec
