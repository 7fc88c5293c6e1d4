#include "moegf/slp.hpp"

#include <algorithm>
#include <cmath>

#include "moegf/diagnostics.hpp"
#include "moegf/relaxation.hpp"

namespace moegf {

namespace {

constexpr double kSlackCap = 1e4;

double sigma_of(const ProblemModel& model, const SolverParams& p) {
    return p.sigma >= 0.0 ? p.sigma : derive_sigma(model.instance);
}
double beta_of(const ProblemModel& model, const SolverParams& p) {
    return p.beta >= 0.0 ? p.beta : derive_beta(model.instance);
}

// One trust-region subproblem around state.x: the model's linear rows, the
// PWL objective, electric tangents with one-sided slacks, registered electric
// halfspaces, hard gas tangents and the |phi - phi_k| step penalties.
LpProblem build_subproblem(const ProblemModel& model, const SolverState& state,
                           const SolverParams& params, double sigma,
                           const std::vector<int>* steering, double beta) {
    const VariableSpace& vs = model.vars;
    const Instance& inst = model.instance;
    const int H = inst.horizon.periods;

    LpProblem lp;
    lp.objective.assign(vs.size(), 0.0);
    lp.lower = vs.lower;
    lp.upper = vs.upper;
    lp.rows = model.rows;
    append_pwl_objective(model, lp, params.cost_segments);

    for (int i = 0; i < model.num_electric; ++i) {
        LpRow row = linearize_residual(model.residuals[i], state.x,
                                       RowSense::Equal);
        const int slack = lp.add_var(0.0, kSlackCap, sigma);
        row.terms.emplace_back(slack, 1.0);
        lp.add_row(std::move(row));
    }
    for (const auto& rows : state.registry)
        for (const LpRow& r : rows) lp.add_row(r);
    for (int i = model.num_electric; i < (int)model.residuals.size(); ++i)
        lp.add_row(
            linearize_residual(model.residuals[i], state.x, RowSense::Equal));

    for (int p = 0; p < (int)inst.pipelines.size(); ++p)
        for (int t = 0; t < H; ++t) {
            const int vphi = vs.index(VarKind::PipeFlow, p, t);
            add_abs_penalty(lp, vphi, state.x[vphi],
                            state.alpha[(size_t)p * H + t]);
        }

    if (steering)
        for (size_t b = 0; b < model.binaries.size(); ++b)
            add_abs_penalty(lp, model.binaries[b], (double)(*steering)[b],
                            beta);
    return lp;
}

// Solves one subproblem and advances the state: registers supporting
// halfspaces for overshot electric residuals, escalates the gas penalties
// that failed to contract, appends the trace record. `rep` holds the
// feasibility report at state.x on entry and at the new iterate on exit.
bool advance(const ProblemModel& model, SolverState& state,
             const SolverParams& params, double sigma, bool integral_z,
             const std::vector<int>* steering, double beta, const char* phase,
             FeasibilityReport& rep) {
    const Instance& inst = model.instance;
    const int H = inst.horizon.periods;

    const LpProblem lp =
        build_subproblem(model, state, params, sigma, steering, beta);
    const LpSolution sol =
        integral_z ? bnb_solve(lp, model.binaries) : lp_solve(lp);
    state.lp_solves += sol.lp_solves;
    if (sol.status != LpStatus::Optimal) return false;

    std::vector<double> xnew(sol.x.begin(),
                             sol.x.begin() + model.vars.size());

    for (int i = 0; i < model.num_electric; ++i) {
        double h;
        try {
            h = eval_residual(model.residuals[i], xnew).value;
        } catch (const ResidualDomainError&) {
            continue;
        }
        if (h > 1e-10) {
            state.registry[i].push_back(linearize_residual(
                model.residuals[i], state.x, RowSense::LessEqual));
            state.registry_stamps[i].push_back(state.k);
        }
    }

    FeasibilityReport rep_new = evaluate_feasibility(model, xnew);
    for (int p = 0; p < (int)inst.pipelines.size(); ++p)
        for (int t = 0; t < H; ++t) {
            const int base = model.num_electric + ((size_t)p * H + t) * 2;
            bool stalled = false;
            for (int j = 0; j < 2; ++j) {
                const double before = rep.abs_residuals[base + j];
                const double after = rep_new.abs_residuals[base + j];
                if (after > params.epsilon && after >= before - 1e-12)
                    stalled = true;
            }
            if (stalled) {
                double& a = state.alpha[(size_t)p * H + t];
                a = std::min(params.alpha_max, params.alpha_growth * a);
            }
        }

    IterationRecord rec;
    rec.k = state.k;
    rec.phase = phase;
    rec.objective = objective_value(model, xnew);
    rec.c_max = rep_new.c_max;
    rec.c_mean = rep_new.c_mean;
    rec.halfspaces = state.registered_halfspaces();
    rec.alpha_peak = state.alpha.empty()
                         ? 0.0
                         : *std::max_element(state.alpha.begin(),
                                             state.alpha.end());
    rec.lp_solves = state.lp_solves;
    state.trace.push_back(std::move(rec));

    state.x = std::move(xnew);
    ++state.k;
    rep = std::move(rep_new);
    return true;
}

} // namespace

double derive_sigma(const Instance& inst) {
    double m = 0.0;
    for (const Generator& g : inst.generators)
        m = std::max(m, std::max(g.cost_quad, g.cost_lin));
    return 0.1 * m;
}

double derive_beta(const Instance& inst) {
    double m = 0.0;
    for (const Supply& s : inst.supplies) m = std::max(m, s.cost);
    return 0.1 * m;
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::IterationLimit: return "iteration-limit";
        case SolveStatus::SubproblemFailed: return "subproblem-failed";
    }
    return "?";
}

std::vector<double> make_cold_start(const ProblemModel& model) {
    const Instance& inst = model.instance;
    const VariableSpace& vs = model.vars;
    const int H = inst.horizon.periods;

    std::vector<double> x(vs.size());
    for (int j = 0; j < vs.size(); ++j)
        x[j] = 0.5 * (vs.lower[j] + vs.upper[j]);

    for (int i = 0; i < (int)inst.buses.size(); ++i)
        for (int t = 0; t < H; ++t) x[vs.index(VarKind::BusAngle, i, t)] = 0.0;
    for (int l = 0; l < (int)inst.branches.size(); ++l) {
        const Branch& br = inst.branches[l];
        const double th =
            std::clamp(0.01, br.angle_min, br.angle_max);
        for (int t = 0; t < H; ++t) {
            x[vs.index(VarKind::BranchAngle, l, t)] = th;
            x[vs.index(VarKind::BranchFlowFwd, l, t)] =
                0.5 * br.g_ij * th * th + br.b_ij * th;
            x[vs.index(VarKind::BranchFlowRev, l, t)] =
                0.5 * br.g_ji * th * th - br.b_ji * th;
        }
    }
    for (int p = 0; p < (int)inst.pipelines.size(); ++p) {
        const Pipeline& pipe = inst.pipelines[p];
        for (int t = 0; t < H; ++t) {
            const double phi = 0.1 * pipe.flow_limit;
            x[vs.index(VarKind::PipeFlow, p, t)] = phi;
            x[vs.index(VarKind::PipeFlowIn, p, t)] = phi;
            x[vs.index(VarKind::PipeFlowOut, p, t)] = phi;
            const double pm = x[vs.index(VarKind::NodePressure, pipe.from, t)];
            const double pn = x[vs.index(VarKind::NodePressure, pipe.to, t)];
            const double pt = average_pressure(pm, pn);
            x[vs.index(VarKind::PipeAvgPressure, p, t)] = pt;
            x[vs.index(VarKind::PipeLinepack, p, t)] =
                pipe.linepack_coeff * pt;
        }
    }
    project_into_bounds(vs, x);
    return x;
}

SolverState init_state(const ProblemModel& model, std::vector<double> x0,
                       const SolverParams& params) {
    SolverState s;
    s.x = std::move(x0);
    project_into_bounds(model.vars, s.x);
    s.registry.resize(model.num_electric);
    s.registry_stamps.resize(model.num_electric);
    s.alpha.assign((size_t)model.instance.pipelines.size() *
                       model.instance.horizon.periods,
                   params.alpha_init);
    s.steering.assign(model.binaries.size(), -1);
    return s;
}

SolveStatus phase1_slp(const ProblemModel& model, SolverState& state,
                       const SolverParams& params) {
    const double sigma = sigma_of(model, params);
    FeasibilityReport rep = evaluate_feasibility(model, state.x);
    while (rep.c_max > params.epsilon && state.k <= params.max_iterations) {
        if (!advance(model, state, params, sigma, false, nullptr, 0.0,
                     "phase1", rep))
            return SolveStatus::SubproblemFailed;
    }
    return rep.c_max <= params.epsilon ? SolveStatus::Converged
                                       : SolveStatus::IterationLimit;
}

SolveStatus phase2_milp(const ProblemModel& model, SolverState& state,
                        const SolverParams& params) {
    if (model.binaries.empty()) return SolveStatus::Converged;
    const double sigma = sigma_of(model, params);
    FeasibilityReport rep = evaluate_feasibility(model, state.x);
    // Runs at least once: the integral subproblem may move the iterate even
    // when the relaxed phase already satisfies the residual target.
    do {
        if (state.k > params.max_iterations)
            return SolveStatus::IterationLimit;
        if (!advance(model, state, params, sigma, true, nullptr, 0.0,
                     "phase2-milp", rep))
            return SolveStatus::SubproblemFailed;
    } while (rep.c_max > params.epsilon);
    return SolveStatus::Converged;
}

bool apply_steering_flips(std::vector<int>& steering,
                          const std::vector<double>& z, double eps, int k2,
                          int flip_gate) {
    if (k2 % flip_gate != 0) return false;
    bool changed = false;
    for (size_t b = 0; b < steering.size(); ++b) {
        if (steering[b] == 0 && z[b] > eps) {
            steering[b] = 1;
            changed = true;
        } else if (steering[b] == 1 && z[b] < 1.0 - eps) {
            steering[b] = 0;
            changed = true;
        }
    }
    return changed;
}

SolveStatus phase2_steering(const ProblemModel& model, SolverState& state,
                            const SolverParams& params) {
    if (model.binaries.empty()) return SolveStatus::Converged;
    const double sigma = sigma_of(model, params);
    const double beta = beta_of(model, params);
    const Instance& inst = model.instance;
    const int nE = (int)inst.nonpipes.size();

    // Initial flow-sign targets; binaries are laid out (period, element).
    for (size_t b = 0; b < model.binaries.size(); ++b) {
        const int t = (int)b / nE, e = (int)b % nE;
        const double phi =
            state.x[model.vars.index(VarKind::NonPipeFlow, e, t)];
        state.steering[b] = phi > 0.0 ? 1 : 0;
    }

    FeasibilityReport rep = evaluate_feasibility(model, state.x);
    const double eps = params.epsilon;
    while (state.k <= params.max_iterations) {
        if (!advance(model, state, params, sigma, false, &state.steering,
                     beta, "phase2-steer", rep))
            return SolveStatus::SubproblemFailed;

        bool integral = true;
        for (int b : model.binaries) {
            const double z = state.x[b];
            if (std::min(z, 1.0 - z) > eps) integral = false;
        }
        if (rep.c_max <= eps && integral) {
            for (int b : model.binaries)
                state.x[b] = state.x[b] > 0.5 ? 1.0 : 0.0;
            return SolveStatus::Converged;
        }
        std::vector<double> z(model.binaries.size());
        for (size_t b = 0; b < model.binaries.size(); ++b)
            z[b] = state.x[model.binaries[b]];
        apply_steering_flips(state.steering, z, eps, state.k2,
                             params.flip_gate);
        ++state.k2;
    }
    return SolveStatus::IterationLimit;
}

namespace {

SolveOutcome finish(const ProblemModel& model, SolverState state,
                    SolveStatus status) {
    SolveOutcome out;
    out.status = status;
    const FeasibilityReport rep = evaluate_feasibility(model, state.x);
    out.c_max = rep.c_max;
    out.c_mean = rep.c_mean;
    out.objective = objective_value(model, state.x);
    out.iterations = state.k - 1;
    out.x = state.x;
    out.state = std::move(state);
    return out;
}

} // namespace

SolveOutcome run_algorithm1(const ProblemModel& model, std::vector<double> x0,
                            const SolverParams& params) {
    SolverState state = init_state(model, std::move(x0), params);
    SolveStatus st = phase1_slp(model, state, params);
    if (st == SolveStatus::Converged && !model.binaries.empty())
        st = phase2_milp(model, state, params);
    return finish(model, std::move(state), st);
}

SolveOutcome run_algorithm2(const ProblemModel& model, std::vector<double> x0,
                            const SolverParams& params) {
    SolverState state = init_state(model, std::move(x0), params);
    SolveStatus st = phase1_slp(model, state, params);
    if (st == SolveStatus::Converged && !model.binaries.empty())
        st = phase2_steering(model, state, params);
    return finish(model, std::move(state), st);
}

} // namespace moegf
