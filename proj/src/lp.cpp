#include "scnd/lp.hpp"

#include <algorithm>
#include <cmath>

namespace scnd {

int LinearProgram::add_var(double cost, double lo, double hi) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    return n_vars++;
}

void LinearProgram::add_row(std::vector<Term> terms, Relation rel, double rhs, std::string name) {
    rows.push_back(Row{std::move(terms), rel, rhs, std::move(name)});
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (int j = 0; j < lp.n_vars; ++j) {
        worst = std::max(worst, lp.lower[j] - x[j]);
        worst = std::max(worst, x[j] - lp.upper[j]);
    }
    for (const auto& row : lp.rows) {
        double lhs = 0.0;
        for (const auto& t : row.terms) lhs += t.coef * x[t.col];
        const double diff = lhs - row.rhs;
        switch (row.relation) {
            case Relation::LessEqual: worst = std::max(worst, diff); break;
            case Relation::GreaterEqual: worst = std::max(worst, -diff); break;
            case Relation::Equal: worst = std::max(worst, std::abs(diff)); break;
        }
    }
    return worst;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace scnd
