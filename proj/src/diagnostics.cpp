#include "moegf/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "moegf/units.hpp"

namespace moegf {

FeasibilityReport evaluate_feasibility(const ProblemModel& model,
                                       std::span<const double> x) {
    FeasibilityReport rep;
    rep.abs_residuals.reserve(model.residuals.size());
    for (size_t i = 0; i < model.residuals.size(); ++i) {
        double v;
        try {
            v = std::abs(eval_residual(model.residuals[i], x).value);
        } catch (const ResidualDomainError&) {
            v = std::numeric_limits<double>::infinity();
            rep.domain_error = true;
        }
        rep.abs_residuals.push_back(v);
        if (v > rep.c_max) {
            rep.c_max = v;
            rep.worst_residual = (int)i;
        }
        rep.c_mean += v;
    }
    if (!rep.abs_residuals.empty()) rep.c_mean /= rep.abs_residuals.size();

    for (const LpRow& row : model.rows) {
        double lhs = 0.0;
        for (auto [j, c] : row.terms) lhs += c * x[j];
        const double viol = row.sense == RowSense::Equal
                                ? std::abs(lhs - row.rhs)
                                : std::max(0.0, lhs - row.rhs);
        rep.max_linear_violation = std::max(rep.max_linear_violation, viol);
    }
    return rep;
}

GapReport compute_gaps(double f_star, std::optional<double> f_convex,
                       std::optional<double> f_ref) {
    GapReport g;
    if (f_convex && std::abs(f_star) > 1e-12)
        g.optimality_gap_pct = (f_star - *f_convex) / f_star * 100.0;
    if (f_ref && std::abs(*f_ref) > 1e-12)
        g.reference_gap_pct = (*f_ref - f_star) / *f_ref * 100.0;
    return g;
}

LinepackReport linepack_trajectory(const ProblemModel& model,
                                   std::span<const double> x) {
    const Instance& inst = model.instance;
    const VariableSpace& vs = model.vars;
    const int H = inst.horizon.periods;
    const double dtau = inst.horizon.dtau_seconds();
    const double m3_per_pu = inst.base.linepack_m3;
    const double tj_per_m3 = inst.gas.HHV * 1e-6;  // MJ/m3 to TJ/m3

    LinepackReport rep;
    rep.per_pipe_m3.assign(inst.pipelines.size(), std::vector<double>(H, 0.0));
    rep.total_m3.assign(H, 0.0);
    rep.total_tj.assign(H, 0.0);
    rep.tj_per_m3 = tj_per_m3;
    for (int p = 0; p < (int)inst.pipelines.size(); ++p) {
        for (int t = 0; t < H; ++t) {
            const double ell = x[vs.index(VarKind::PipeLinepack, p, t)];
            rep.per_pipe_m3[p][t] = ell * m3_per_pu;
            rep.total_m3[t] += ell * m3_per_pu;

            const double prev =
                t == 0 ? inst.pipelines[p].initial_linepack
                       : x[vs.index(VarKind::PipeLinepack, p, t - 1)];
            const double in = x[vs.index(VarKind::PipeFlowIn, p, t)];
            const double out = x[vs.index(VarKind::PipeFlowOut, p, t)];
            const double err = std::abs(ell - prev - dtau * (in - out));
            rep.max_continuity_error_m3 =
                std::max(rep.max_continuity_error_m3, err * m3_per_pu);
        }
    }
    for (int t = 0; t < H; ++t) rep.total_tj[t] = rep.total_m3[t] * tj_per_m3;
    return rep;
}

std::string report_to_json(const SolveReport& report) {
    nlohmann::json j;
    j["method"] = report.method;
    j["status"] = report.status;
    j["objective"] = report.objective;
    j["c_max"] = report.c_max;
    j["c_mean"] = report.c_mean;
    j["iterations"] = report.iterations;
    j["lp_solves"] = report.lp_solves;
    j["wall_time_ms"] = report.wall_time_ms;
    if (report.gaps.optimality_gap_pct)
        j["optimality_gap_pct"] = *report.gaps.optimality_gap_pct;
    if (report.gaps.reference_gap_pct)
        j["reference_gap_pct"] = *report.gaps.reference_gap_pct;
    j["trace"] = nlohmann::json::array();
    for (const IterationRecord& r : report.trace)
        j["trace"].push_back({{"k", r.k},
                              {"phase", r.phase},
                              {"objective", r.objective},
                              {"c_max", r.c_max},
                              {"c_mean", r.c_mean},
                              {"halfspaces", r.halfspaces},
                              {"alpha_peak", r.alpha_peak},
                              {"lp_solves", r.lp_solves}});
    j["linepack"] = {{"total_m3", report.linepack.total_m3},
                     {"total_tj", report.linepack.total_tj},
                     {"max_continuity_error_m3",
                      report.linepack.max_continuity_error_m3}};
    return j.dump(2);
}

std::string trace_to_csv(const std::vector<IterationRecord>& trace) {
    std::ostringstream os;
    os << "k,phase,objective,c_max,c_mean,halfspaces,alpha_peak,lp_solves\n";
    for (const IterationRecord& r : trace)
        os << r.k << ',' << r.phase << ',' << r.objective << ',' << r.c_max
           << ',' << r.c_mean << ',' << r.halfspaces << ',' << r.alpha_peak
           << ',' << r.lp_solves << '\n';
    return os.str();
}

std::string linepack_to_csv(const LinepackReport& report) {
    const double tj_per_m3 = report.tj_per_m3;
    std::ostringstream os;
    os << "t,pipe,m3,tj\n";
    for (size_t t = 0; t < report.total_m3.size(); ++t) {
        for (size_t p = 0; p < report.per_pipe_m3.size(); ++p)
            os << t << ',' << p << ',' << report.per_pipe_m3[p][t] << ','
               << report.per_pipe_m3[p][t] * tj_per_m3 << '\n';
        os << t << ",total," << report.total_m3[t] << ',' << report.total_tj[t]
           << '\n';
    }
    return os.str();
}

} // namespace moegf
