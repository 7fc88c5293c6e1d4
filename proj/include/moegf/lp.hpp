#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace moegf {

enum class RowSense { LessEqual, Equal };

// One sparse linear constraint: sum_j coeff * x[j]  (<= or =)  rhs.
struct LpRow {
    std::vector<std::pair<int, double>> terms;
    double rhs = 0.0;
    RowSense sense = RowSense::LessEqual;
    int tag = -1;  // caller-defined provenance
};

struct LpProblem {
    std::vector<double> objective;
    std::vector<double> lower, upper;
    std::vector<LpRow> rows;
    double objective_constant = 0.0;

    int num_vars() const { return (int)objective.size(); }
    int add_var(double lb, double ub, double cost = 0.0) {
        objective.push_back(cost);
        lower.push_back(lb);
        upper.push_back(ub);
        return num_vars() - 1;
    }
    void add_row(LpRow row) { rows.push_back(std::move(row)); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::vector<double> duals;          // one per row
    std::vector<double> reduced_costs;  // one per variable
    std::int64_t pivots = 0;
    std::int64_t lp_solves = 1;  // >1 for branch-and-bound
};

struct LpOptions {
    double tol = 1e-9;
    std::int64_t max_pivots = -1;  // default 50*(rows+cols)
    double integrality_tol = 1e-6;
};

const char* to_string(LpStatus s);

// Bounded-variable two-phase revised simplex, dense basis inverse.
// Deterministic: Dantzig pricing with lowest-index tie-break, Bland's rule
// after a stall threshold.
LpSolution lp_solve(const LpProblem& problem, const LpOptions& options = {});

// Best-first branch-and-bound over the given binary variables (bounds must be
// within [0,1]); branches on the most fractional variable.
LpSolution bnb_solve(const LpProblem& problem, const std::vector<int>& binaries,
                     const LpOptions& options = {});

// Adds |x[var] - center| * weight to the objective via split variables
// s+ - s- = x[var] - center, s+, s- >= 0. Returns the split var indices.
std::pair<int, int> add_abs_penalty(LpProblem& problem, int var, double center,
                                    double weight);

// Plain-text dump of an LpProblem (documented grammar, for the external
// solver adapter and debugging).
std::string dump_lp_text(const LpProblem& problem);

} // namespace moegf
