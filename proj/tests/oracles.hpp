#pragma once

// Brute-force reference solvers used to validate the embedded LP machinery.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "moegf/lp.hpp"

namespace moegf::testing {

// Minimizes over all vertices of {x : rows, lo <= x <= up} by enumerating
// every choice of n active constraints. Returns nullopt when no feasible
// vertex exists (for a bounded nonempty polytope a vertex always exists).
inline std::optional<double> vertex_enumeration_min(const LpProblem& p,
                                                    double tol = 1e-7) {
    const int n = p.num_vars();
    const int m = (int)p.rows.size();
    // Constraint list: 0..m-1 rows, m..m+n-1 lower bounds, then upper bounds.
    const int total = m + 2 * n;
    std::vector<int> pick(n);
    std::optional<double> best;

    auto feasible = [&](const Eigen::VectorXd& x) {
        for (int j = 0; j < n; ++j)
            if (x[j] < p.lower[j] - tol || x[j] > p.upper[j] + tol)
                return false;
        for (const LpRow& row : p.rows) {
            double lhs = 0.0;
            for (auto [j, c] : row.terms) lhs += c * x[j];
            if (row.sense == RowSense::Equal) {
                if (std::abs(lhs - row.rhs) > tol) return false;
            } else if (lhs > row.rhs + tol) {
                return false;
            }
        }
        return true;
    };

    auto visit = [&](const std::vector<int>& sel) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        for (int r = 0; r < n; ++r) {
            const int c = sel[r];
            if (c < m) {
                for (auto [j, v] : p.rows[c].terms) A(r, j) = v;
                b[r] = p.rows[c].rhs;
            } else if (c < m + n) {
                A(r, c - m) = 1.0;
                b[r] = p.lower[c - m];
            } else {
                A(r, c - m - n) = 1.0;
                b[r] = p.upper[c - m - n];
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (lu.rank() < n) return;
        const Eigen::VectorXd x = lu.solve(b);
        if (!feasible(x)) return;
        double obj = p.objective_constant;
        for (int j = 0; j < n; ++j) obj += p.objective[j] * x[j];
        if (!best || obj < *best) best = obj;
    };

    // Enumerate all n-subsets of the constraint list.
    std::vector<int> sel(n);
    auto rec = [&](auto&& self, int depth, int start) -> void {
        if (depth == n) {
            visit(sel);
            return;
        }
        for (int c = start; c <= total - (n - depth); ++c) {
            sel[depth] = c;
            self(self, depth + 1, c + 1);
        }
    };
    rec(rec, 0, 0);
    return best;
}

// Exhaustive binary enumeration: fixes every assignment of the binaries and
// solves the remaining LP. Returns nullopt when all assignments infeasible.
inline std::optional<double> binary_enumeration_min(
    const LpProblem& p, const std::vector<int>& binaries) {
    const int k = (int)binaries.size();
    std::optional<double> best;
    for (int mask = 0; mask < (1 << k); ++mask) {
        LpProblem q = p;
        for (int i = 0; i < k; ++i) {
            const double v = (mask >> i) & 1 ? 1.0 : 0.0;
            q.lower[binaries[i]] = v;
            q.upper[binaries[i]] = v;
        }
        const LpSolution sol = lp_solve(q);
        if (sol.status != LpStatus::Optimal) continue;
        if (!best || sol.objective < *best) best = sol.objective;
    }
    return best;
}

} // namespace moegf::testing
