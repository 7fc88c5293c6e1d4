#pragma once

#include "moegf/envelopes.hpp"
#include "moegf/formulation.hpp"
#include "moegf/lp.hpp"

namespace moegf {

struct RelaxOptions {
    int square_points = 10;  // l, outer PWL points for quadratic envelopes
    int cost_segments = 32;  // tangent segments of the cost epigraph
    int max_cut_rounds = 20; // lower-bound mode
    double cut_tol = 1e-7;
};

// LP relaxation assembled from the model's linear rows, envelope
// substitutions of the four nonlinear constraint families, relaxed binaries
// and the PWL cost epigraph. The first model.vars.size() LP variables
// coincide with the model's VariableSpace.
struct RelaxedModel {
    LpProblem lp;
    int num_model_vars = 0;
    double pwl_accuracy = 0.0;  // worst-case epigraph under-approximation
    // Auxiliary variable indices, laid out (element * periods + t).
    std::vector<int> branch_sq;  // conv(theta^2) per branch
    std::vector<int> node_sq;    // conv(pressure^2) per node
    std::vector<int> pipe_u;     // conv(phi|phi|) per pipeline
    std::vector<int> pipe_w;     // conv(-pm pn/(pm+pn)) per pipeline
};

// Appends the PWL cost epigraph (paired generator blocks) and the linear cost
// terms to lp's objective. Returns the worst-case under-approximation of the
// quadratic terms.
double append_pwl_objective(const ProblemModel& model, LpProblem& lp,
                            int cost_segments);

RelaxedModel build_polyhedral_relaxation(const ProblemModel& model,
                                         const RelaxOptions& opt = {});

struct RelaxResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;   // model-space point (auxiliaries dropped)
    double objective = 0.0;  // relaxed objective, $ (a loose lower bound)
    std::int64_t lp_solves = 0;
};

// Problem (14): one LP solve, used as a warm start.
RelaxResult solve_polyhedral_relaxation(const ProblemModel& model,
                                        const RelaxOptions& opt = {});

struct LowerBoundResult {
    LpStatus status = LpStatus::Infeasible;
    double bound = 0.0;      // $, valid up to residual_violation
    std::vector<double> x;   // model-space point of the final relaxation
    int rounds = 0;
    int cuts_added = 0;
    double residual_violation = 0.0;  // max remaining conic/convex violation
    std::vector<double> bound_history;  // per cut round
    std::int64_t lp_solves = 0;
};

// Mixed-binary LP lower bound: pipeline direction binaries, the
// flow/pressure linking auxiliaries, and iterated tangent cuts for the
// second-order-cone rows and the convexified average-pressure inequality.
LowerBoundResult micp_lower_bound(const ProblemModel& model,
                                  const RelaxOptions& opt = {});

} // namespace moegf
