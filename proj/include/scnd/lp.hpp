#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace scnd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
    int col = 0;
    double coef = 0.0;
};

struct Row {
    std::vector<Term> terms;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
    std::string name;
};

/// min objective . x  subject to rows and lower <= x <= upper.
struct LinearProgram {
    int n_vars = 0;
    std::vector<double> objective;
    std::vector<Row> rows;
    std::vector<double> lower;
    std::vector<double> upper;

    /// Appends a column and returns its index.
    int add_var(double cost, double lo, double hi);
    void add_row(std::vector<Term> terms, Relation rel, double rhs, std::string name = {});
};

/// Largest violation of any row or bound by `x`.
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace scnd
