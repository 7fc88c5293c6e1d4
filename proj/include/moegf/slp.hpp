#pragma once

#include <string>
#include <vector>

#include "moegf/formulation.hpp"
#include "moegf/lp.hpp"

namespace moegf {

struct SolverParams {
    double epsilon = 1e-4;       // feasibility target on max |h_i|
    int max_iterations = 40;     // global iteration cap, both phases
    double sigma = -1.0;         // electric slack weight; < 0 derives it
    double beta = -1.0;          // binary steering weight; < 0 derives it
    double alpha_init = 0.1;     // gas trust penalty, per (pipeline, period)
    double alpha_growth = 10.0;
    double alpha_max = 1000.0;
    int flip_gate = 2;           // steering flips every flip_gate iterations
    int cost_segments = 32;
    int square_points = 10;      // envelope refinement of the warm-start LP
};

// sigma = 0.1 max_g max(c2, c1); beta = 0.1 max_s cost.
double derive_sigma(const Instance& inst);
double derive_beta(const Instance& inst);

struct IterationRecord {
    int k = 0;
    std::string phase;  // "phase1", "phase2-milp", "phase2-steer"
    double objective = 0.0;  // exact objective at the iterate, $
    double c_max = 0.0;
    double c_mean = 0.0;
    int halfspaces = 0;      // registered electric cuts so far
    double alpha_peak = 0.0;
    std::int64_t lp_solves = 0;
};

enum class SolveStatus { Converged, IterationLimit, SubproblemFailed };
const char* to_string(SolveStatus s);

struct SolverState {
    int k = 1;
    int k2 = 1;  // steering counter
    std::vector<double> x;
    // Registered supporting halfspaces per electric residual, with the
    // iteration stamps they were taken at.
    std::vector<std::vector<LpRow>> registry;
    std::vector<std::vector<int>> registry_stamps;
    std::vector<double> alpha;      // per (pipeline * periods + t)
    std::vector<int> steering;      // per binary; -1 until phase 2 sets it
    std::vector<IterationRecord> trace;
    std::int64_t lp_solves = 0;

    int registered_halfspaces() const {
        int n = 0;
        for (const auto& r : registry) n += (int)r.size();
        return n;
    }
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::SubproblemFailed;
    std::vector<double> x;
    double objective = 0.0;  // $, exact
    double c_max = 0.0, c_mean = 0.0;
    int iterations = 0;
    SolverState state;
};

// Mid-bounds start with a small uniform angle displacement, one tenth of the
// pipeline capacity as flow, and residual-consistent dependent variables.
std::vector<double> make_cold_start(const ProblemModel& model);

SolverState init_state(const ProblemModel& model, std::vector<double> x0,
                       const SolverParams& params);

// One steering update for phase 2 of the LP-only method. Flips are gated to
// iterations where k2 is a multiple of flip_gate: a 0-target whose binary
// drifted above eps flips to 1, a 1-target that fell below 1 - eps flips to
// 0. Returns true when any target changed.
bool apply_steering_flips(std::vector<int>& steering,
                          const std::vector<double>& z, double eps, int k2,
                          int flip_gate);

// Sequential linearization with relaxed binaries.
SolveStatus phase1_slp(const ProblemModel& model, SolverState& state,
                       const SolverParams& params);

// Phase 2 via branch-and-bound on the binaries (first algorithm).
SolveStatus phase2_milp(const ProblemModel& model, SolverState& state,
                        const SolverParams& params);

// Phase 2 via binary steering penalties (second algorithm).
SolveStatus phase2_steering(const ProblemModel& model, SolverState& state,
                            const SolverParams& params);

SolveOutcome run_algorithm1(const ProblemModel& model, std::vector<double> x0,
                            const SolverParams& params = {});
SolveOutcome run_algorithm2(const ProblemModel& model, std::vector<double> x0,
                            const SolverParams& params = {});

} // namespace moegf
