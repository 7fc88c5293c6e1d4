#include <cmath>
#include <string>

#include "doctest.h"
#include "moegf/diagnostics.hpp"
#include "moegf/instance.hpp"
#include "moegf/relaxation.hpp"

using namespace moegf;

namespace {

std::string data(const char* name) {
    return std::string(MOEGF_DATA_DIR) + "/" + name;
}

} // namespace

TEST_CASE("relaxation layout and auxiliary census") {
    const ProblemModel m = build_moegf(load_instance(data("nano.json")));
    const RelaxedModel r = build_polyhedral_relaxation(m);
    CHECK(r.num_model_vars == m.vars.size());
    CHECK(r.lp.num_vars() > r.num_model_vars);
    const int H = m.instance.horizon.periods;
    CHECK(r.branch_sq.size() == m.instance.branches.size() * H);
    CHECK(r.node_sq.size() == m.instance.nodes.size() * H);
    CHECK(r.pipe_u.size() == m.instance.pipelines.size() * H);
    CHECK(r.pipe_w.size() == m.instance.pipelines.size() * H);
    CHECK(r.pwl_accuracy > 0.0);
    // Accuracy is the worst generator's midpoint-tangent gap.
    double expect = 0.0;
    for (const Generator& g : m.instance.generators) {
        if (g.cost_quad <= 0.0) continue;
        const double s =
            std::sqrt(g.cost_quad) * m.instance.horizon.dt_hours;
        expect = std::max(
            expect, std::pow(s * (g.p_max - g.p_min) / (2.0 * 32), 2));
    }
    CHECK(r.pwl_accuracy == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("warm start relaxation solves all bundled instances") {
    for (const char* name : {"nano.json", "case_a.json", "case_b.json"}) {
        CAPTURE(name);
        const ProblemModel m = build_moegf(load_instance(data(name)));
        const RelaxResult r = solve_polyhedral_relaxation(m);
        REQUIRE(r.status == LpStatus::Optimal);
        CHECK(r.objective > 0.0);
        CHECK((int)r.x.size() == m.vars.size());
        // The relaxed point satisfies the model's linear constraints.
        const FeasibilityReport fr = evaluate_feasibility(m, r.x);
        CHECK(fr.max_linear_violation < 1e-6);
    }
}

TEST_CASE("lower bound dominates the plain relaxation and grows monotonically") {
    const ProblemModel m = build_moegf(load_instance(data("nano.json")));
    const RelaxResult relax = solve_polyhedral_relaxation(m);
    REQUIRE(relax.status == LpStatus::Optimal);
    RelaxOptions opt;
    opt.max_cut_rounds = 8;
    const LowerBoundResult lb = micp_lower_bound(m, opt);
    REQUIRE(lb.status == LpStatus::Optimal);
    CHECK(lb.bound >= relax.objective - 1e-6);
    REQUIRE(!lb.bound_history.empty());
    for (size_t i = 1; i < lb.bound_history.size(); ++i)
        CHECK(lb.bound_history[i] >= lb.bound_history[i - 1] - 1e-7);
    CHECK(lb.bound == doctest::Approx(lb.bound_history.back()));
    CHECK(lb.cuts_added > 0);
    // Binary integrality holds at the bounding solution.
    for (int b : m.binaries)
        CHECK(std::min(lb.x[b], 1.0 - lb.x[b]) < 1e-6);
}
