#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "moegf/diagnostics.hpp"
#include "moegf/instance.hpp"
#include "moegf/relaxation.hpp"
#include "moegf/slp.hpp"

namespace {

using namespace moegf;

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

void emit_artifacts(const std::filesystem::path& out, const SolveReport& rep) {
    std::filesystem::create_directories(out);
    write_file(out / (rep.method + "_report.json"), report_to_json(rep));
    write_file(out / (rep.method + "_trace.csv"), trace_to_csv(rep.trace));
    write_file(out / (rep.method + "_linepack.csv"),
               linepack_to_csv(rep.linepack));
}

SolveReport report_from_outcome(const ProblemModel& model,
                                const std::string& method,
                                const SolveOutcome& oc, double wall_ms) {
    SolveReport rep;
    rep.method = method;
    rep.status = to_string(oc.status);
    rep.objective = oc.objective;
    rep.c_max = oc.c_max;
    rep.c_mean = oc.c_mean;
    rep.iterations = oc.iterations;
    rep.lp_solves = oc.state.lp_solves;
    rep.wall_time_ms = wall_ms;
    rep.trace = oc.state.trace;
    rep.linepack = linepack_trajectory(model, oc.x);
    return rep;
}

struct MethodRun {
    SolveReport report;
    int exit_code = 0;
};

std::vector<double> pick_start(const ProblemModel& model,
                               const std::string& start,
                               const RelaxOptions& ropt) {
    if (start == "cold") return make_cold_start(model);
    RelaxResult rr = solve_polyhedral_relaxation(model, ropt);
    if (rr.status != LpStatus::Optimal)
        throw std::runtime_error("warm-start relaxation not optimal: " +
                                 std::string(to_string(rr.status)));
    return rr.x;
}

MethodRun run_method(const ProblemModel& model, const std::string& method,
                     const std::string& start, const SolverParams& params,
                     const RelaxOptions& ropt) {
    MethodRun mr;
    const auto t0 = std::chrono::steady_clock::now();
    if (method == "relax") {
        RelaxResult rr = solve_polyhedral_relaxation(model, ropt);
        mr.report.method = "poly-relax";
        mr.report.status = to_string(rr.status);
        mr.report.lp_solves = rr.lp_solves;
        if (rr.status == LpStatus::Optimal) {
            mr.report.objective = rr.objective;
            const FeasibilityReport fr = evaluate_feasibility(model, rr.x);
            mr.report.c_max = fr.c_max;
            mr.report.c_mean = fr.c_mean;
            mr.report.linepack = linepack_trajectory(model, rr.x);
        } else {
            mr.exit_code = 1;
        }
    } else if (method == "lower-bound") {
        LowerBoundResult lb = micp_lower_bound(model, ropt);
        mr.report.method = "micp-lb";
        mr.report.status = to_string(lb.status);
        mr.report.lp_solves = lb.lp_solves;
        mr.report.iterations = lb.rounds;
        if (lb.status == LpStatus::Optimal) {
            mr.report.objective = lb.bound;
            const FeasibilityReport fr = evaluate_feasibility(model, lb.x);
            mr.report.c_max = fr.c_max;
            mr.report.c_mean = fr.c_mean;
            mr.report.linepack = linepack_trajectory(model, lb.x);
        } else {
            mr.exit_code = 1;
        }
    } else {
        const std::vector<double> x0 = pick_start(model, start, ropt);
        SolveOutcome oc;
        if (method == "phase1") {
            SolverState state = init_state(model, x0, params);
            const SolveStatus st = phase1_slp(model, state, params);
            oc.status = st;
            const FeasibilityReport fr = evaluate_feasibility(model, state.x);
            oc.c_max = fr.c_max;
            oc.c_mean = fr.c_mean;
            oc.objective = objective_value(model, state.x);
            oc.iterations = state.k - 1;
            oc.x = state.x;
            oc.state = std::move(state);
        } else if (method == "alg1") {
            oc = run_algorithm1(model, x0, params);
        } else if (method == "alg2") {
            oc = run_algorithm2(model, x0, params);
        } else {
            throw std::runtime_error("unknown method: " + method);
        }
        mr.report = report_from_outcome(model, method, oc, 0.0);
        if (oc.status == SolveStatus::IterationLimit) mr.exit_code = 3;
        if (oc.status == SolveStatus::SubproblemFailed) mr.exit_code = 1;
    }
    mr.report.wall_time_ms = ms_since(t0);
    return mr;
}

int run_compare(const ProblemModel& model, const std::string& start,
                const SolverParams& params, const RelaxOptions& ropt,
                const std::filesystem::path& out) {
    std::vector<MethodRun> runs;
    runs.push_back(run_method(model, "relax", start, params, ropt));
    runs.push_back(run_method(model, "lower-bound", start, params, ropt));
    runs.push_back(run_method(model, "alg1", start, params, ropt));
    runs.push_back(run_method(model, "alg2", start, params, ropt));

    const double f_lb = runs[1].report.objective;
    for (size_t i = 2; i < runs.size(); ++i)
        if (runs[i].exit_code == 0 && runs[1].exit_code == 0)
            runs[i].report.gaps = compute_gaps(runs[i].report.objective, f_lb,
                                               std::nullopt);

    std::cout << "method,cost,ogap_pct,c_mean,iterations,wall_ms\n";
    int worst = 0;
    for (MethodRun& mr : runs) {
        const auto& r = mr.report;
        std::cout << r.method << ',' << r.objective << ',';
        if (r.gaps.optimality_gap_pct)
            std::cout << *r.gaps.optimality_gap_pct;
        else
            std::cout << "n/a";
        std::cout << ',' << r.c_mean << ',' << r.iterations << ','
                  << r.wall_time_ms << '\n';
        emit_artifacts(out, r);
        worst = std::max(worst, mr.exit_code);
    }
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiperiod optimal electricity and gas flow solver"};
    std::string instance_path, method = "alg1", start = "warm", out = ".";
    SolverParams params;
    RelaxOptions ropt;
    int seed = 0;

    app.add_option("instance", instance_path, "instance JSON file")
        ->required();
    app.add_option("--method", method,
                   "validate|relax|phase1|alg1|alg2|lower-bound|compare")
        ->envname("MOEGF_METHOD");
    app.add_option("--start", start, "cold|warm")->envname("MOEGF_START");
    app.add_option("--epsilon", params.epsilon, "feasibility tolerance")
        ->envname("MOEGF_EPSILON");
    app.add_option("--max-iters", params.max_iterations, "iteration cap")
        ->envname("MOEGF_MAX_ITERS");
    app.add_option("--kf", params.flip_gate, "steering flip gate")
        ->envname("MOEGF_KF");
    app.add_option("--segments", params.cost_segments,
                   "cost epigraph segments")
        ->envname("MOEGF_SEGMENTS");
    app.add_option("--cut-rounds", ropt.max_cut_rounds,
                   "lower-bound cut rounds")
        ->envname("MOEGF_CUT_ROUNDS");
    app.add_option("--out", out, "output directory")->envname("MOEGF_OUT");
    app.add_option("--seed", seed, "seed for sampled checks")
        ->envname("MOEGF_SEED");
    CLI11_PARSE(app, argc, argv);
    ropt.cost_segments = params.cost_segments;

    try {
        Instance inst;
        try {
            inst = load_instance(instance_path);
        } catch (const InvalidInstance& e) {
            std::cerr << nlohmann::json{{"error", e.what()}}.dump() << '\n';
            return 2;
        }
        if (method == "validate") {
            nlohmann::json j{{"name", inst.name},
                             {"periods", inst.horizon.periods},
                             {"buses", inst.buses.size()},
                             {"branches", inst.branches.size()},
                             {"generators", inst.generators.size()},
                             {"nodes", inst.nodes.size()},
                             {"pipelines", inst.pipelines.size()},
                             {"non_pipes", inst.nonpipes.size()},
                             {"supplies", inst.supplies.size()}};
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        const ProblemModel model = build_moegf(inst);
        if (method == "compare")
            return run_compare(model, start, params, ropt, out);

        MethodRun mr = run_method(model, method, start, params, ropt);
        emit_artifacts(out, mr.report);
        std::cout << report_to_json(mr.report) << '\n';
        return mr.exit_code;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << '\n';
        return 1;
    }
}
