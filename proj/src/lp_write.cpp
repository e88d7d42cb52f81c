#include "gridec/milp.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

namespace gridec {
namespace {

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_terms(std::ostream& out, const MilpModel& model, const std::vector<LinearTerm>& terms) {
    bool first = true;
    for (const auto& t : terms) {
        if (t.coeff == 0.0) continue;
        if (first) {
            if (t.coeff < 0.0) out << "- ";
        } else {
            out << (t.coeff < 0.0 ? " - " : " + ");
        }
        out << fmt(std::abs(t.coeff)) << ' ' << model.variable_name(t.var);
        first = false;
    }
    if (first) out << "0";
}

} // namespace

void write_lp(const MilpModel& model, std::ostream& out) {
    std::vector<LinearTerm> objective;
    for (int j = 0; j < model.variable_count(); ++j) {
        const double c = model.objective()[static_cast<std::size_t>(j)];
        if (c != 0.0) objective.push_back({j, c});
    }
    out << "min: ";
    write_terms(out, model, objective);
    out << " ;\n";

    out << "subject to\n";
    for (const auto& c : model.constraints()) {
        out << c.name << ": ";
        write_terms(out, model, c.terms);
        switch (c.relation) {
        case Relation::LessEqual: out << " <= "; break;
        case Relation::Equal: out << " = "; break;
        case Relation::GreaterEqual: out << " >= "; break;
        }
        out << fmt(c.rhs) << " ;\n";
    }

    out << "bounds\n";
    for (int j = 0; j < model.variable_count(); ++j) {
        const double lo = model.lower_bound(j);
        const double hi = model.upper_bound(j);
        if (!std::isfinite(lo) && !std::isfinite(hi)) {
            out << model.variable_name(j) << " free ;\n";
            continue;
        }
        if (std::isfinite(lo)) out << fmt(lo) << " <= ";
        out << model.variable_name(j);
        if (std::isfinite(hi)) out << " <= " << fmt(hi);
        out << " ;\n";
    }

    const auto binaries = model.binary_indices();
    if (!binaries.empty()) {
        out << "binary\n";
        bool first = true;
        for (int var : binaries) {
            if (!first) out << ' ';
            out << model.variable_name(var);
            first = false;
        }
        out << " ;\n";
    }
    out << "end\n";
}

} // namespace gridec
