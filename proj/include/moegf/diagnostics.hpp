#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moegf/formulation.hpp"
#include "moegf/slp.hpp"

namespace moegf {

struct FeasibilityReport {
    double c_max = 0.0;   // max |h_i| over the nonlinear residuals
    double c_mean = 0.0;  // mean |h_i|
    std::vector<double> abs_residuals;  // per model residual, model order
    int worst_residual = -1;
    double max_linear_violation = 0.0;  // over the model's linear rows
    bool domain_error = false;  // a residual was undefined at x
};

FeasibilityReport evaluate_feasibility(const ProblemModel& model,
                                       std::span<const double> x);

struct GapReport {
    // (f_star - f_convex) / f_star * 100; unset when undefined.
    std::optional<double> optimality_gap_pct;
    // (f_ref - f_star) / f_ref * 100 against a reference objective.
    std::optional<double> reference_gap_pct;
};

GapReport compute_gaps(double f_star, std::optional<double> f_convex,
                       std::optional<double> f_ref);

struct LinepackReport {
    std::vector<std::vector<double>> per_pipe_m3;  // [pipeline][period]
    std::vector<double> total_m3;  // [period]
    std::vector<double> total_tj;  // HHV energy content
    double tj_per_m3 = 0.0;
    double max_continuity_error_m3 = 0.0;
};

LinepackReport linepack_trajectory(const ProblemModel& model,
                                   std::span<const double> x);

struct SolveReport {
    std::string method;
    std::string status;
    double objective = 0.0;
    double c_max = 0.0, c_mean = 0.0;
    int iterations = 0;
    std::int64_t lp_solves = 0;
    double wall_time_ms = 0.0;
    GapReport gaps;
    std::vector<IterationRecord> trace;
    LinepackReport linepack;
};

std::string report_to_json(const SolveReport& report);
std::string trace_to_csv(const std::vector<IterationRecord>& trace);
std::string linepack_to_csv(const LinepackReport& report);

} // namespace moegf
