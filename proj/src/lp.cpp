#include "moegf/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace moegf {

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration-limit";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ColStatus : std::uint8_t { AtLower, AtUpper, InBasis };

class Simplex {
public:
    Simplex(const LpProblem& p, const LpOptions& opt) : opt_(opt) {
        m_ = (int)p.rows.size();
        n_ = p.num_vars();
        ncols_ = n_ + 2 * m_;  // structural + slacks + artificials
        A_.setZero(m_, ncols_);
        b_.setZero(m_);
        lb_.assign(ncols_, 0.0);
        ub_.assign(ncols_, 0.0);
        for (int j = 0; j < n_; ++j) {
            lb_[j] = p.lower[j];
            ub_[j] = p.upper[j];
        }
        row_scale_.assign(m_, 1.0);
        for (int i = 0; i < m_; ++i) {
            const LpRow& row = p.rows[i];
            double amax = std::abs(row.rhs);
            for (auto& [j, v] : row.terms) amax = std::max(amax, std::abs(v));
            const double s = amax > 0.0 ? 1.0 / amax : 1.0;
            row_scale_[i] = s;
            for (auto& [j, v] : row.terms) A_(i, j) += v * s;
            b_(i) = row.rhs * s;
            // Slack column.
            const int sj = n_ + i;
            A_(i, sj) = 1.0;
            lb_[sj] = 0.0;
            ub_[sj] = row.sense == RowSense::LessEqual ? kInf : 0.0;
        }
        max_pivots_ = opt.max_pivots > 0
                          ? opt.max_pivots
                          : (std::int64_t)50 * (m_ + ncols_);
    }

    LpSolution run(const LpProblem& p) {
        LpSolution sol;
        init_start_point();
        // Phase 1: minimize sum of artificials.
        Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(ncols_);
        for (int i = 0; i < m_; ++i) phase1_cost(n_ + m_ + i) = 1.0;
        cost_ = phase1_cost;
        Iterate res = iterate();
        if (res == Iterate::PivotLimit) {
            sol.status = LpStatus::IterationLimit;
            finish(p, sol);
            return sol;
        }
        double infeas = 0.0;
        for (int i = 0; i < m_; ++i) infeas += x_[n_ + m_ + i];
        if (infeas > 1e-7) {
            sol.status = LpStatus::Infeasible;
            sol.pivots = pivots_;
            return sol;
        }
        drive_out_artificials();
        for (int i = 0; i < m_; ++i) {
            lb_[n_ + m_ + i] = 0.0;
            ub_[n_ + m_ + i] = 0.0;
        }
        // Phase 2: real objective.
        cost_.setZero(ncols_);
        for (int j = 0; j < n_; ++j) cost_(j) = p.objective[j];
        bland_ = false;
        stall_ = 0;
        res = iterate();
        switch (res) {
            case Iterate::Optimal: sol.status = LpStatus::Optimal; break;
            case Iterate::Unbounded: sol.status = LpStatus::Unbounded; break;
            case Iterate::PivotLimit: sol.status = LpStatus::IterationLimit; break;
        }
        finish(p, sol);
        return sol;
    }

private:
    enum class Iterate { Optimal, Unbounded, PivotLimit };

    void init_start_point() {
        x_.assign(ncols_, 0.0);
        status_.assign(ncols_, ColStatus::AtLower);
        for (int j = 0; j < n_ + m_; ++j) {
            double v;
            if (lb_[j] > 0.0 || !std::isfinite(ub_[j]))
                v = lb_[j];
            else if (ub_[j] < 0.0)
                v = ub_[j];
            else if (std::abs(lb_[j]) <= std::abs(ub_[j]))
                v = lb_[j];
            else
                v = ub_[j];
            status_[j] = v == lb_[j] ? ColStatus::AtLower : ColStatus::AtUpper;
            x_[j] = v;
        }
        Eigen::VectorXd r = b_;
        for (int j = 0; j < n_ + m_; ++j)
            if (x_[j] != 0.0) r -= A_.col(j) * x_[j];
        basic_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            const int aj = n_ + m_ + i;
            A_(i, aj) = r(i) >= 0.0 ? 1.0 : -1.0;
            lb_[aj] = 0.0;
            ub_[aj] = kInf;
            x_[aj] = std::abs(r(i));
            basic_[i] = aj;
            status_[aj] = ColStatus::InBasis;
        }
        Binv_.setIdentity(m_, m_);
        for (int i = 0; i < m_; ++i)
            if (A_(i, n_ + m_ + i) < 0.0) Binv_(i, i) = -1.0;
        pivots_since_refactor_ = 0;
        bland_ = false;
        stall_ = 0;
    }

    void refactorize() {
        Eigen::MatrixXd B(m_, m_);
        for (int i = 0; i < m_; ++i) B.col(i) = A_.col(basic_[i]);
        Binv_ = B.partialPivLu().inverse();
        recompute_basics();
        pivots_since_refactor_ = 0;
    }

    void recompute_basics() {
        Eigen::VectorXd r = b_;
        for (int j = 0; j < ncols_; ++j)
            if (status_[j] != ColStatus::InBasis && x_[j] != 0.0)
                r -= A_.col(j) * x_[j];
        Eigen::VectorXd xb = Binv_ * r;
        for (int i = 0; i < m_; ++i) x_[basic_[i]] = xb(i);
    }

    double current_objective() const {
        double obj = 0.0;
        for (int j = 0; j < ncols_; ++j)
            if (cost_(j) != 0.0) obj += cost_(j) * x_[j];
        return obj;
    }

    Iterate iterate() {
        double last_obj = current_objective();
        while (true) {
            if (pivots_ >= max_pivots_) return Iterate::PivotLimit;
            // Pricing.
            Eigen::VectorXd cb(m_);
            for (int i = 0; i < m_; ++i) cb(i) = cost_(basic_[i]);
            Eigen::VectorXd y = Binv_.transpose() * cb;
            int enter = -1;
            double best = opt_.tol;
            for (int j = 0; j < ncols_; ++j) {
                if (status_[j] == ColStatus::InBasis) continue;
                if (lb_[j] == ub_[j]) continue;  // fixed
                const double rj = cost_(j) - y.dot(A_.col(j));
                double score = 0.0;
                if (status_[j] == ColStatus::AtLower && rj < -opt_.tol)
                    score = -rj;
                else if (status_[j] == ColStatus::AtUpper && rj > opt_.tol)
                    score = rj;
                else
                    continue;
                if (bland_) { enter = j; break; }
                if (score > best) { best = score; enter = j; }
            }
            if (enter < 0) return Iterate::Optimal;

            const int dir = status_[enter] == ColStatus::AtLower ? 1 : -1;
            Eigen::VectorXd d = Binv_ * A_.col(enter);
            // Ratio test: entering moves by t*dir, basics by -t*dir*d.
            double tmax = ub_[enter] - lb_[enter];  // bound flip cap
            int leave = -1;
            double leave_bound = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double delta = -dir * d(i);
                const int bj = basic_[i];
                double t, bound;
                if (delta > 1e-11) {
                    if (!std::isfinite(ub_[bj])) continue;
                    t = (ub_[bj] - x_[bj]) / delta;
                    bound = ub_[bj];
                } else if (delta < -1e-11) {
                    if (!std::isfinite(lb_[bj])) continue;
                    t = (lb_[bj] - x_[bj]) / delta;
                    bound = lb_[bj];
                } else {
                    continue;
                }
                t = std::max(t, 0.0);
                if (t < tmax - 1e-12 ||
                    (leave >= 0 && t < tmax + 1e-12 && bj < basic_[leave])) {
                    tmax = t;
                    leave = i;
                    leave_bound = bound;
                }
            }
            if (!std::isfinite(tmax)) return Iterate::Unbounded;

            ++pivots_;
            // Apply the step.
            x_[enter] += dir * tmax;
            for (int i = 0; i < m_; ++i) x_[basic_[i]] -= dir * tmax * d(i);
            if (leave < 0) {
                // Bound flip, basis unchanged.
                status_[enter] =
                    dir > 0 ? ColStatus::AtUpper : ColStatus::AtLower;
                x_[enter] = dir > 0 ? ub_[enter] : lb_[enter];
            } else {
                const int old = basic_[leave];
                x_[old] = leave_bound;
                status_[old] = leave_bound == lb_[old] ? ColStatus::AtLower
                                                       : ColStatus::AtUpper;
                basic_[leave] = enter;
                status_[enter] = ColStatus::InBasis;
                update_inverse(d, leave);
                if (++pivots_since_refactor_ >= 120) refactorize();
            }
            const double obj = current_objective();
            if (obj < last_obj - 1e-12) {
                stall_ = 0;
                last_obj = obj;
            } else if (++stall_ > 500) {
                bland_ = true;  // anti-cycling fallback
            }
        }
    }

    void update_inverse(const Eigen::VectorXd& d, int leave) {
        const double piv = d(leave);
        Eigen::RowVectorXd row = Binv_.row(leave) / piv;
        for (int i = 0; i < m_; ++i) {
            if (i == leave) continue;
            if (d(i) != 0.0) Binv_.row(i) -= d(i) * row;
        }
        Binv_.row(leave) = row;
    }

    // Pivot zero-valued basic artificials out of the basis where possible.
    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basic_[i] < n_ + m_) continue;
            Eigen::RowVectorXd brow = Binv_.row(i);
            int enter = -1;
            for (int j = 0; j < n_ + m_; ++j) {
                if (status_[j] == ColStatus::InBasis) continue;
                if (std::abs(brow.dot(A_.col(j))) > 1e-7) { enter = j; break; }
            }
            if (enter < 0) continue;  // redundant row, artificial stays at 0
            Eigen::VectorXd d = Binv_ * A_.col(enter);
            const int old = basic_[i];
            x_[old] = 0.0;
            status_[old] = ColStatus::AtLower;
            basic_[i] = enter;
            status_[enter] = ColStatus::InBasis;
            update_inverse(d, i);
        }
        refactorize();
    }

    void finish(const LpProblem& p, LpSolution& sol) {
        sol.pivots = pivots_;
        sol.x.assign(x_.begin(), x_.begin() + n_);
        sol.objective = p.objective_constant;
        for (int j = 0; j < n_; ++j) sol.objective += p.objective[j] * sol.x[j];
        // Duals for the scaled system, mapped back to original row scaling.
        Eigen::VectorXd cb(m_);
        for (int i = 0; i < m_; ++i) cb(i) = cost_(basic_[i]);
        Eigen::VectorXd y = Binv_.transpose() * cb;
        sol.duals.resize(m_);
        for (int i = 0; i < m_; ++i) sol.duals[i] = y(i) * row_scale_[i];
        sol.reduced_costs.resize(n_);
        for (int j = 0; j < n_; ++j)
            sol.reduced_costs[j] = cost_(j) - y.dot(A_.col(j));
    }

    LpOptions opt_;
    int m_ = 0, n_ = 0, ncols_ = 0;
    Eigen::MatrixXd A_, Binv_;
    Eigen::VectorXd b_, cost_;
    std::vector<double> lb_, ub_, x_, row_scale_;
    std::vector<int> basic_;
    std::vector<ColStatus> status_;
    std::int64_t pivots_ = 0, max_pivots_ = 0;
    int pivots_since_refactor_ = 0;
    int stall_ = 0;
    bool bland_ = false;
};

} // namespace

LpSolution lp_solve(const LpProblem& problem, const LpOptions& options) {
    Simplex s(problem, options);
    return s.run(problem);
}

LpSolution bnb_solve(const LpProblem& problem, const std::vector<int>& binaries,
                     const LpOptions& options) {
    for (int j : binaries) {
        if (problem.lower[j] < -options.integrality_tol ||
            problem.upper[j] > 1.0 + options.integrality_tol)
            throw std::invalid_argument("bnb_solve: binary bounds must lie in [0,1]");
    }

    struct Node {
        double bound;
        std::uint64_t id;
        std::vector<std::pair<int, double>> fixes;
        LpSolution relax;
        bool operator>(const Node& other) const {
            if (bound != other.bound) return bound > other.bound;
            return id > other.id;  // deterministic tie-break
        }
    };

    std::int64_t lp_solves = 0;
    std::int64_t pivots = 0;
    auto solve_with = [&](const std::vector<std::pair<int, double>>& fixes) {
        LpProblem sub = problem;
        for (auto& [j, v] : fixes) {
            sub.lower[j] = v;
            sub.upper[j] = v;
        }
        LpSolution s = lp_solve(sub, options);
        ++lp_solves;
        pivots += s.pivots;
        return s;
    };

    auto most_fractional = [&](const LpSolution& s) {
        int pick = -1;
        double best = options.integrality_tol;
        for (int j : binaries) {
            const double f = std::abs(s.x[j] - std::round(s.x[j]));
            if (f > best) { best = f; pick = j; }
        }
        return pick;
    };

    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
    std::uint64_t next_id = 0;

    LpSolution root = solve_with({});
    LpSolution incumbent;
    incumbent.status = LpStatus::Infeasible;
    double incumbent_obj = kInf;

    if (root.status == LpStatus::Unbounded || root.status == LpStatus::IterationLimit) {
        root.lp_solves = lp_solves;
        root.pivots = pivots;
        return root;
    }
    if (root.status == LpStatus::Optimal)
        open.push({root.objective, next_id++, {}, std::move(root)});

    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (node.bound >= incumbent_obj - 1e-9) continue;
        const int frac = most_fractional(node.relax);
        if (frac < 0) {
            if (node.relax.objective < incumbent_obj) {
                incumbent = node.relax;
                incumbent_obj = incumbent.objective;
            }
            continue;
        }
        for (double v : {0.0, 1.0}) {
            auto fixes = node.fixes;
            fixes.emplace_back(frac, v);
            LpSolution child = solve_with(fixes);
            if (child.status != LpStatus::Optimal) continue;
            if (child.objective >= incumbent_obj - 1e-9) continue;
            open.push({child.objective, next_id++, std::move(fixes), std::move(child)});
        }
    }

    incumbent.lp_solves = lp_solves;
    incumbent.pivots = pivots;
    return incumbent;
}

std::pair<int, int> add_abs_penalty(LpProblem& problem, int var, double center,
                                    double weight) {
    if (weight < 0.0)
        throw std::invalid_argument("add_abs_penalty: weight must be non-negative");
    const double up = std::max(problem.upper[var] - center, 0.0);
    const double dn = std::max(center - problem.lower[var], 0.0);
    const int sp = problem.add_var(0.0, up, weight);
    const int sm = problem.add_var(0.0, dn, weight);
    LpRow row;
    row.terms = {{var, 1.0}, {sp, -1.0}, {sm, 1.0}};
    row.rhs = center;
    row.sense = RowSense::Equal;
    problem.add_row(std::move(row));
    return {sp, sm};
}

std::string dump_lp_text(const LpProblem& p) {
    std::ostringstream os;
    os.precision(17);
    os << "lp " << p.num_vars() << " " << p.rows.size() << "\n";
    os << "min";
    for (double c : p.objective) os << " " << c;
    os << "\nconst " << p.objective_constant << "\nbounds\n";
    for (int j = 0; j < p.num_vars(); ++j)
        os << p.lower[j] << " " << p.upper[j] << "\n";
    os << "rows\n";
    for (const LpRow& r : p.rows) {
        os << (r.sense == RowSense::Equal ? "E" : "L") << " " << r.rhs << " "
           << r.terms.size();
        for (auto& [j, v] : r.terms) os << " " << j << ":" << v;
        os << "\n";
    }
    return os.str();
}

} // namespace moegf
