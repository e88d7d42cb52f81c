#include "gridec/milp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gridec {

int MilpModel::add_variable(std::string name, double lower, double upper, bool is_binary) {
    const int idx = static_cast<int>(names_.size());
    names_.push_back(std::move(name));
    lower_.push_back(lower);
    upper_.push_back(upper);
    binary_.push_back(is_binary);
    objective_.push_back(0.0);
    return idx;
}

void MilpModel::add_constraint(std::string name, std::vector<LinearTerm> terms,
                               Relation relation, double rhs) {
    constraints_.push_back({std::move(name), std::move(terms), relation, rhs});
}

void MilpModel::set_objective_term(int var, double coeff) {
    objective_.at(static_cast<std::size_t>(var)) = coeff;
}

void MilpModel::fix_variable(int var, double value) {
    lower_.at(static_cast<std::size_t>(var)) = value;
    upper_.at(static_cast<std::size_t>(var)) = value;
}

int MilpModel::binary_count() const {
    int n = 0;
    for (bool b : binary_)
        if (b) ++n;
    return n;
}

std::vector<int> MilpModel::binary_indices() const {
    std::vector<int> out;
    for (int j = 0; j < variable_count(); ++j)
        if (binary_[static_cast<std::size_t>(j)]) out.push_back(j);
    return out;
}

int MilpModel::variable_index(const std::string& name) const {
    for (int j = 0; j < variable_count(); ++j)
        if (names_[static_cast<std::size_t>(j)] == name) return j;
    return -1;
}

void MilpModel::validate() const {
    const int n = variable_count();
    for (int j = 0; j < n; ++j) {
        const double lo = lower_[static_cast<std::size_t>(j)];
        const double up = upper_[static_cast<std::size_t>(j)];
        if (std::isnan(lo) || std::isnan(up))
            throw std::invalid_argument("variable '" + names_[static_cast<std::size_t>(j)] +
                                        "' has NaN bounds");
        if (lo > up)
            throw std::invalid_argument("variable '" + names_[static_cast<std::size_t>(j)] +
                                        "' has lower bound above upper bound");
        if (binary_[static_cast<std::size_t>(j)] && (lo < 0.0 || up > 1.0))
            throw std::invalid_argument("binary variable '" + names_[static_cast<std::size_t>(j)] +
                                        "' has bounds outside [0, 1]");
        if (!std::isfinite(objective_[static_cast<std::size_t>(j)]))
            throw std::invalid_argument("objective coefficient of '" +
                                        names_[static_cast<std::size_t>(j)] + "' is not finite");
    }
    for (const auto& c : constraints_) {
        if (!std::isfinite(c.rhs))
            throw std::invalid_argument("constraint '" + c.name + "' has non-finite rhs");
        for (const auto& t : c.terms) {
            if (t.var < 0 || t.var >= n)
                throw std::invalid_argument("constraint '" + c.name +
                                            "' references undeclared variable");
            if (!std::isfinite(t.coeff))
                throw std::invalid_argument("constraint '" + c.name +
                                            "' has non-finite coefficient");
        }
    }
}

double MilpModel::objective_value(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != variable_count())
        throw std::invalid_argument("objective_value: point has wrong dimension");
    double obj = 0.0;
    for (int j = 0; j < variable_count(); ++j)
        obj += objective_[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    return obj;
}

double MilpModel::max_violation(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != variable_count())
        throw std::invalid_argument("max_violation: point has wrong dimension");
    double worst = 0.0;
    for (int j = 0; j < variable_count(); ++j) {
        const double v = x[static_cast<std::size_t>(j)];
        worst = std::max(worst, lower_[static_cast<std::size_t>(j)] - v);
        worst = std::max(worst, v - upper_[static_cast<std::size_t>(j)]);
    }
    for (const auto& c : constraints_) {
        double lhs = 0.0;
        for (const auto& t : c.terms) lhs += t.coeff * x[static_cast<std::size_t>(t.var)];
        switch (c.relation) {
        case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
        case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
        case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
        }
    }
    return worst;
}

std::string to_string(MilpStatus status) {
    switch (status) {
    case MilpStatus::Optimal: return "optimal";
    case MilpStatus::Infeasible: return "infeasible";
    case MilpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

} // namespace gridec
