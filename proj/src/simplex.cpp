#include "lp_internal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace gridec::detail {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;
constexpr double kZeroTol = 1e-12;
constexpr int kRefreshInterval = 512;
constexpr int kStallLimit = 64;
constexpr int kIterationLimit = 200000;

enum class ColStatus : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

/// Presolved LP in row form. Column j of the simplex corresponds to model
/// variable keep[j]; variables fixed by bounds were substituted into rhs.
struct Presolved {
    bool infeasible = false;
    std::vector<int> keep;           // simplex column -> model variable
    std::vector<double> lower, upper, cost;
    struct Row {
        std::vector<LinearTerm> terms; // var = simplex column index
        Relation relation = Relation::LessEqual;
        double rhs = 0.0;
    };
    std::vector<Row> rows;
    std::vector<double> fixed_value; // per model variable; NaN when free
};

Presolved presolve(const MilpModel& model, const std::vector<BoundOverride>& overrides) {
    const int n = model.variable_count();
    std::vector<double> lo(n), up(n);
    for (int j = 0; j < n; ++j) {
        lo[j] = model.lower_bound(j);
        up[j] = model.upper_bound(j);
    }
    for (const auto& ov : overrides) {
        lo[ov.var] = ov.lower;
        up[ov.var] = ov.upper;
    }

    Presolved out;
    out.fixed_value.assign(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<int> col_of(n, -1);
    for (int j = 0; j < n; ++j) {
        if (lo[j] > up[j]) {
            out.infeasible = true;
            return out;
        }
        if (lo[j] == up[j]) {
            out.fixed_value[j] = lo[j];
        } else {
            col_of[j] = static_cast<int>(out.keep.size());
            out.keep.push_back(j);
            out.lower.push_back(lo[j]);
            out.upper.push_back(up[j]);
            out.cost.push_back(model.objective()[static_cast<std::size_t>(j)]);
        }
    }

    for (const auto& c : model.constraints()) {
        Presolved::Row row;
        row.relation = c.relation;
        row.rhs = c.rhs;
        for (const auto& t : c.terms) {
            if (t.coeff == 0.0) continue;
            if (col_of[t.var] >= 0)
                row.terms.push_back({col_of[t.var], t.coeff});
            else
                row.rhs -= t.coeff * out.fixed_value[t.var];
        }
        if (row.terms.empty()) {
            const double r = row.rhs;
            const bool ok = (c.relation == Relation::LessEqual && r >= -kFeasibilityTol) ||
                            (c.relation == Relation::GreaterEqual && r <= kFeasibilityTol) ||
                            (c.relation == Relation::Equal && std::abs(r) <= kFeasibilityTol);
            if (!ok) {
                out.infeasible = true;
                return out;
            }
            continue; // empty row carries no information
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

/// Two-phase bounded-variable primal simplex on a full tableau.
/// Columns: [structural | slack (one per row) | artificial (one per row)].
/// The artificial block doubles as an explicit B^-1, which makes the final
/// iterative-refinement step cheap.
class Simplex {
public:
    explicit Simplex(const Presolved& lp) : lp_(lp) { build(); }

    LpResult run() {
        LpResult result;
        if (m_ > 0 && !phase1()) {
            result.status = LpStatus::Infeasible;
            result.iterations = iterations_;
            return result;
        }
        const bool bounded = phase2();
        refine();
        if (!bounded) {
            result.status = LpStatus::Unbounded;
            result.iterations = iterations_;
            return result;
        }
        result.status = LpStatus::Optimal;
        result.x.assign(lp_.keep.size(), 0.0);
        double obj = 0.0;
        for (int j = 0; j < ncols_; ++j) {
            const double v = value_of(j);
            if (j < nstruct_) {
                result.x[static_cast<std::size_t>(j)] = v;
                obj += lp_.cost[static_cast<std::size_t>(j)] * v;
            }
        }
        result.objective = obj;
        result.iterations = iterations_;
        if (m_ > 0) refresh_reduced_costs();
        result.reduced_cost.assign(lp_.keep.size(), 0.0);
        for (int j = 0; j < nstruct_; ++j) {
            if (status_[static_cast<std::size_t>(j)] != ColStatus::Basic)
                result.reduced_cost[static_cast<std::size_t>(j)] = dj_[static_cast<std::size_t>(j)];
        }
        return result;
    }

private:
    const Presolved& lp_;
    int m_ = 0;       // rows
    int nstruct_ = 0; // structural columns
    int nslack_ = 0;
    int ncols_ = 0;   // structural + slack + artificial
    int art0_ = 0;    // first artificial column

    std::vector<double> tab_;   // m x ncols row-major: B^-1 * A
    std::vector<double> beta_;  // basic variable values
    std::vector<int> basis_;    // row -> column
    std::vector<ColStatus> status_;
    std::vector<double> lower_, upper_;
    std::vector<double> dj_;    // reduced costs for the active cost vector
    std::vector<double> cost_;  // active cost vector (phase 1 or 2)

    int iterations_ = 0;
    int stall_ = 0;
    bool bland_ = false;

    double& tab(int i, int j) { return tab_[static_cast<std::size_t>(i) * ncols_ + j]; }
    const double& tab(int i, int j) const {
        return tab_[static_cast<std::size_t>(i) * ncols_ + j];
    }

    double value_of(int j) const {
        switch (status_[static_cast<std::size_t>(j)]) {
        case ColStatus::AtLower: return lower_[static_cast<std::size_t>(j)];
        case ColStatus::AtUpper: return upper_[static_cast<std::size_t>(j)];
        case ColStatus::FreeZero: return 0.0;
        case ColStatus::Basic:
            for (int i = 0; i < m_; ++i)
                if (basis_[static_cast<std::size_t>(i)] == j) return beta_[static_cast<std::size_t>(i)];
            break;
        }
        return 0.0;
    }

    void build() {
        m_ = static_cast<int>(lp_.rows.size());
        nstruct_ = static_cast<int>(lp_.keep.size());
        nslack_ = m_;
        art0_ = nstruct_ + nslack_;
        ncols_ = art0_ + m_;

        lower_.assign(static_cast<std::size_t>(ncols_), 0.0);
        upper_.assign(static_cast<std::size_t>(ncols_), 0.0);
        status_.assign(static_cast<std::size_t>(ncols_), ColStatus::AtLower);
        for (int j = 0; j < nstruct_; ++j) {
            lower_[static_cast<std::size_t>(j)] = lp_.lower[static_cast<std::size_t>(j)];
            upper_[static_cast<std::size_t>(j)] = lp_.upper[static_cast<std::size_t>(j)];
            if (std::isfinite(lower_[static_cast<std::size_t>(j)]))
                status_[static_cast<std::size_t>(j)] = ColStatus::AtLower;
            else if (std::isfinite(upper_[static_cast<std::size_t>(j)]))
                status_[static_cast<std::size_t>(j)] = ColStatus::AtUpper;
            else
                status_[static_cast<std::size_t>(j)] = ColStatus::FreeZero;
        }

        tab_.assign(static_cast<std::size_t>(m_) * ncols_, 0.0);
        beta_.assign(static_cast<std::size_t>(m_), 0.0);
        basis_.assign(static_cast<std::size_t>(m_), -1);

        for (int i = 0; i < m_; ++i) {
            const auto& row = lp_.rows[static_cast<std::size_t>(i)];
            double residual = row.rhs;
            for (const auto& t : row.terms) {
                tab(i, t.var) = t.coeff;
                residual -= t.coeff * value_of(t.var); // nonbasic initial values
            }
            const int slack = nstruct_ + i;
            tab(i, slack) = 1.0;
            switch (row.relation) {
            case Relation::LessEqual:
                lower_[static_cast<std::size_t>(slack)] = 0.0;
                upper_[static_cast<std::size_t>(slack)] = kInfinity;
                break;
            case Relation::GreaterEqual:
                lower_[static_cast<std::size_t>(slack)] = -kInfinity;
                upper_[static_cast<std::size_t>(slack)] = 0.0;
                break;
            case Relation::Equal:
                lower_[static_cast<std::size_t>(slack)] = 0.0;
                upper_[static_cast<std::size_t>(slack)] = 0.0;
                break;
            }

            const int art = art0_ + i;
            tab(i, art) = 1.0;
            const bool slack_absorbs = residual >= lower_[static_cast<std::size_t>(slack)] - kZeroTol &&
                                       residual <= upper_[static_cast<std::size_t>(slack)] + kZeroTol;
            if (slack_absorbs) {
                basis_[static_cast<std::size_t>(i)] = slack;
                beta_[static_cast<std::size_t>(i)] = residual;
                status_[static_cast<std::size_t>(slack)] = ColStatus::Basic;
                // artificial unused: pinned at zero
                lower_[static_cast<std::size_t>(art)] = 0.0;
                upper_[static_cast<std::size_t>(art)] = 0.0;
                status_[static_cast<std::size_t>(art)] = ColStatus::AtLower;
            } else {
                basis_[static_cast<std::size_t>(i)] = art;
                beta_[static_cast<std::size_t>(i)] = residual;
                status_[static_cast<std::size_t>(art)] = ColStatus::Basic;
                if (residual >= 0.0) {
                    lower_[static_cast<std::size_t>(art)] = 0.0;
                    upper_[static_cast<std::size_t>(art)] = kInfinity;
                } else {
                    lower_[static_cast<std::size_t>(art)] = -kInfinity;
                    upper_[static_cast<std::size_t>(art)] = 0.0;
                }
                status_[static_cast<std::size_t>(slack)] =
                    std::isfinite(lower_[static_cast<std::size_t>(slack)]) ? ColStatus::AtLower
                                                                           : ColStatus::AtUpper;
            }
        }
    }

    void set_phase1_costs() {
        cost_.assign(static_cast<std::size_t>(ncols_), 0.0);
        for (int i = 0; i < m_; ++i) {
            const int art = art0_ + i;
            if (basis_[static_cast<std::size_t>(i)] == art)
                cost_[static_cast<std::size_t>(art)] = beta_[static_cast<std::size_t>(i)] >= 0.0 ? 1.0 : -1.0;
        }
        refresh_reduced_costs();
    }

    void set_phase2_costs() {
        cost_.assign(static_cast<std::size_t>(ncols_), 0.0);
        for (int j = 0; j < nstruct_; ++j) cost_[static_cast<std::size_t>(j)] = lp_.cost[static_cast<std::size_t>(j)];
        for (int i = 0; i < m_; ++i) {
            // artificials may never re-enter
            const int art = art0_ + i;
            lower_[static_cast<std::size_t>(art)] = 0.0;
            upper_[static_cast<std::size_t>(art)] = 0.0;
        }
        refresh_reduced_costs();
    }

    void refresh_reduced_costs() {
        dj_ = cost_;
        for (int i = 0; i < m_; ++i) {
            const double cb = cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
            if (cb == 0.0) continue;
            const double* row = &tab_[static_cast<std::size_t>(i) * ncols_];
            for (int j = 0; j < ncols_; ++j) dj_[static_cast<std::size_t>(j)] -= cb * row[j];
        }
    }

    /// Entering column and its direction (+1 increase, -1 decrease), or
    /// (-1, 0) when no candidate passes the reduced-cost test.
    std::pair<int, int> price() const {
        int best = -1;
        int best_dir = 0;
        double best_score = kReducedCostTol;
        for (int j = 0; j < ncols_; ++j) {
            const auto st = status_[static_cast<std::size_t>(j)];
            if (st == ColStatus::Basic) continue;
            if (lower_[static_cast<std::size_t>(j)] == upper_[static_cast<std::size_t>(j)]) continue;
            const double d = dj_[static_cast<std::size_t>(j)];
            double score = 0.0;
            int dir = 0;
            if (st == ColStatus::AtLower && d < -kReducedCostTol) {
                score = -d;
                dir = 1;
            } else if (st == ColStatus::AtUpper && d > kReducedCostTol) {
                score = d;
                dir = -1;
            } else if (st == ColStatus::FreeZero && std::abs(d) > kReducedCostTol) {
                score = std::abs(d);
                dir = d < 0.0 ? 1 : -1;
            } else {
                continue;
            }
            if (bland_) return {j, dir}; // lowest index wins outright
            if (score > best_score) {
                best_score = score;
                best = j;
                best_dir = dir;
            }
        }
        return {best, best_dir};
    }

    /// One simplex iteration. Returns: 0 progressed, 1 optimal, 2 unbounded.
    int step() {
        auto [enter, dir] = price();
        if (enter < 0) {
            // guard against drift: re-derive reduced costs once and retry
            refresh_reduced_costs();
            std::tie(enter, dir) = price();
            if (enter < 0) return 1;
        }

        const double range = upper_[static_cast<std::size_t>(enter)] - lower_[static_cast<std::size_t>(enter)];
        double t_best = std::isfinite(range) ? range : kInfinity;
        int leave_row = -1;
        bool leave_at_upper = false;

        for (int i = 0; i < m_; ++i) {
            const double a = tab(i, enter);
            if (std::abs(a) <= kPivotTol) continue;
            const double rate = -dir * a;
            const int b = basis_[static_cast<std::size_t>(i)];
            double t;
            bool to_upper;
            if (rate > 0.0) {
                const double ub = upper_[static_cast<std::size_t>(b)];
                if (!std::isfinite(ub)) continue;
                t = (ub - beta_[static_cast<std::size_t>(i)]) / rate;
                to_upper = true;
            } else {
                const double lb = lower_[static_cast<std::size_t>(b)];
                if (!std::isfinite(lb)) continue;
                t = (lb - beta_[static_cast<std::size_t>(i)]) / rate;
                to_upper = false;
            }
            if (t < 0.0) t = 0.0; // basic value drifted marginally past its bound
            bool take;
            if (leave_row < 0) {
                take = t < t_best;
            } else if (bland_) {
                take = t < t_best - kZeroTol ||
                       (t <= t_best + kZeroTol && b < basis_[static_cast<std::size_t>(leave_row)]);
            } else {
                take = t < t_best - kZeroTol ||
                       (t <= t_best + kZeroTol &&
                        std::abs(a) > std::abs(tab(leave_row, enter)));
            }
            if (take) {
                t_best = std::min(t, t_best);
                leave_row = i;
                leave_at_upper = to_upper;
            }
        }

        if (leave_row < 0 && !std::isfinite(t_best)) return 2; // unbounded ray

        ++iterations_;
        const double improvement = std::abs(dj_[static_cast<std::size_t>(enter)] * t_best);
        if (improvement <= kZeroTol) {
            if (++stall_ >= kStallLimit) bland_ = true;
        } else {
            stall_ = 0;
            bland_ = false;
        }

        if (leave_row < 0) {
            // bound flip: entering traverses its whole range
            for (int i = 0; i < m_; ++i) {
                const double a = tab(i, enter);
                if (a == 0.0) continue;
                beta_[static_cast<std::size_t>(i)] -= dir * t_best * a;
            }
            status_[static_cast<std::size_t>(enter)] =
                dir > 0 ? ColStatus::AtUpper : ColStatus::AtLower;
            return 0;
        }

        const double enter_value = value_of(enter) + dir * t_best;
        for (int i = 0; i < m_; ++i) {
            if (i == leave_row) continue;
            const double a = tab(i, enter);
            if (a == 0.0) continue;
            beta_[static_cast<std::size_t>(i)] -= dir * t_best * a;
        }

        const int leaving = basis_[static_cast<std::size_t>(leave_row)];
        status_[static_cast<std::size_t>(leaving)] =
            leave_at_upper ? ColStatus::AtUpper : ColStatus::AtLower;
        if (leaving >= art0_) {
            // artificials never re-enter the basis
            lower_[static_cast<std::size_t>(leaving)] = 0.0;
            upper_[static_cast<std::size_t>(leaving)] = 0.0;
        }
        basis_[static_cast<std::size_t>(leave_row)] = enter;
        status_[static_cast<std::size_t>(enter)] = ColStatus::Basic;
        beta_[static_cast<std::size_t>(leave_row)] = enter_value;

        pivot(leave_row, enter);
        return 0;
    }

    void pivot(int r, int e) {
        double* prow = &tab_[static_cast<std::size_t>(r) * ncols_];
        const double piv = prow[e];
        const double inv = 1.0 / piv;
        for (int j = 0; j < ncols_; ++j) prow[j] *= inv;
        prow[e] = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* row = &tab_[static_cast<std::size_t>(i) * ncols_];
            const double f = row[e];
            if (std::abs(f) <= kZeroTol) {
                row[e] = 0.0;
                continue;
            }
            for (int j = 0; j < ncols_; ++j) row[j] -= f * prow[j];
            row[e] = 0.0;
        }
        const double de = dj_[static_cast<std::size_t>(e)];
        if (std::abs(de) > kZeroTol) {
            for (int j = 0; j < ncols_; ++j) dj_[static_cast<std::size_t>(j)] -= de * prow[j];
        }
        dj_[static_cast<std::size_t>(e)] = 0.0;
    }

    double phase1_infeasibility() const {
        double z = 0.0;
        for (int i = 0; i < m_; ++i) {
            const int b = basis_[static_cast<std::size_t>(i)];
            if (b >= art0_) z += std::abs(beta_[static_cast<std::size_t>(i)]);
        }
        return z;
    }

    bool phase1() {
        if (phase1_infeasibility() <= kFeasibilityTol) {
            drive_out_artificials();
            return true;
        }
        set_phase1_costs();
        for (;;) {
            if (iterations_ > kIterationLimit)
                throw std::runtime_error("simplex: iteration limit exceeded (phase 1)");
            const int state = step();
            if (state == 2) throw std::logic_error("simplex: phase 1 reported unbounded");
            if (state == 1) break;
            if ((iterations_ % kRefreshInterval) == 0) refresh_reduced_costs();
        }
        refine();
        if (phase1_infeasibility() > kFeasibilityTol) return false;
        drive_out_artificials();
        return true;
    }

    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            const int b = basis_[static_cast<std::size_t>(i)];
            if (b < art0_) continue;
            int pivot_col = -1;
            double best = kPivotTol;
            for (int j = 0; j < art0_; ++j) {
                if (status_[static_cast<std::size_t>(j)] == ColStatus::Basic) continue;
                if (lower_[static_cast<std::size_t>(j)] == upper_[static_cast<std::size_t>(j)]) continue;
                const double a = std::abs(tab(i, j));
                if (a > best) {
                    best = a;
                    pivot_col = j;
                }
            }
            if (pivot_col < 0) {
                // redundant row: keep the artificial basic but pinned to zero
                lower_[static_cast<std::size_t>(b)] = 0.0;
                upper_[static_cast<std::size_t>(b)] = 0.0;
                continue;
            }
            const int entering = pivot_col;
            const double entering_value = value_of(entering);
            status_[static_cast<std::size_t>(b)] = ColStatus::AtLower;
            lower_[static_cast<std::size_t>(b)] = 0.0;
            upper_[static_cast<std::size_t>(b)] = 0.0;
            basis_[static_cast<std::size_t>(i)] = entering;
            status_[static_cast<std::size_t>(entering)] = ColStatus::Basic;
            beta_[static_cast<std::size_t>(i)] = entering_value; // degenerate swap
            pivot(i, entering);
        }
        refine();
    }

    bool phase2() {
        set_phase2_costs();
        stall_ = 0;
        bland_ = false;
        for (;;) {
            if (iterations_ > kIterationLimit)
                throw std::runtime_error("simplex: iteration limit exceeded (phase 2)");
            const int state = step();
            if (state == 2) return false;
            if (state == 1) return true;
            if ((iterations_ % kRefreshInterval) == 0) {
                refresh_reduced_costs();
                refine();
            }
        }
    }

    /// Iterative refinement of the basic values: beta += B^-1 (b - A x).
    /// The artificial block of the tableau is exactly B^-1.
    void refine() {
        if (m_ == 0) return;
        std::vector<double> x(static_cast<std::size_t>(art0_), 0.0);
        for (int j = 0; j < art0_; ++j)
            if (status_[static_cast<std::size_t>(j)] != ColStatus::Basic) x[static_cast<std::size_t>(j)] = value_of(j);
        for (int i = 0; i < m_; ++i) {
            const int b = basis_[static_cast<std::size_t>(i)];
            if (b < art0_) x[static_cast<std::size_t>(b)] = beta_[static_cast<std::size_t>(i)];
        }
        std::vector<double> residual(static_cast<std::size_t>(m_), 0.0);
        for (int i = 0; i < m_; ++i) {
            const auto& row = lp_.rows[static_cast<std::size_t>(i)];
            double lhs = 0.0;
            for (const auto& t : row.terms) lhs += t.coeff * x[static_cast<std::size_t>(t.var)];
            lhs += x[static_cast<std::size_t>(nstruct_ + i)]; // slack
            const int art = art0_ + i;
            if (basis_find(art) >= 0) lhs += beta_[static_cast<std::size_t>(basis_find(art))];
            residual[static_cast<std::size_t>(i)] = row.rhs - lhs;
        }
        for (int i = 0; i < m_; ++i) {
            double corr = 0.0;
            const double* row = &tab_[static_cast<std::size_t>(i) * ncols_];
            for (int k = 0; k < m_; ++k) corr += row[art0_ + k] * residual[static_cast<std::size_t>(k)];
            beta_[static_cast<std::size_t>(i)] += corr;
        }
    }

    int basis_find(int col) const {
        for (int i = 0; i < m_; ++i)
            if (basis_[static_cast<std::size_t>(i)] == col) return i;
        return -1;
    }
};

} // namespace

LpResult solve_relaxation(const MilpModel& model, const std::vector<BoundOverride>& overrides) {
    const Presolved lp = presolve(model, overrides);
    LpResult result;
    if (lp.infeasible) {
        result.status = LpStatus::Infeasible;
        return result;
    }

    Simplex simplex(lp);
    LpResult inner = simplex.run();
    result.status = inner.status;
    result.iterations = inner.iterations;
    if (inner.status != LpStatus::Optimal) return result;

    result.x.assign(static_cast<std::size_t>(model.variable_count()), 0.0);
    result.reduced_cost.assign(static_cast<std::size_t>(model.variable_count()), 0.0);
    for (int j = 0; j < model.variable_count(); ++j) {
        const double fixed = lp.fixed_value[static_cast<std::size_t>(j)];
        if (!std::isnan(fixed)) result.x[static_cast<std::size_t>(j)] = fixed;
    }
    for (std::size_t col = 0; col < lp.keep.size(); ++col) {
        result.x[static_cast<std::size_t>(lp.keep[col])] = inner.x[col];
        result.reduced_cost[static_cast<std::size_t>(lp.keep[col])] = inner.reduced_cost[col];
    }
    result.objective = model.objective_value(result.x);
    return result;
}

} // namespace gridec::detail
