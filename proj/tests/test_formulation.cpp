#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "moegf/formulation.hpp"
#include "moegf/instance.hpp"

using namespace moegf;

namespace {

std::string data(const char* name) {
    return std::string(MOEGF_DATA_DIR) + "/" + name;
}

const ProblemModel& nano_model() {
    static const ProblemModel model =
        build_moegf(load_instance(data("nano.json")));
    return model;
}

std::vector<double> random_point(const VariableSpace& vs, std::mt19937& rng) {
    std::uniform_real_distribution<double> unit(0.1, 0.9);
    std::vector<double> x(vs.size());
    for (int j = 0; j < vs.size(); ++j)
        x[j] = vs.lower[j] + (vs.upper[j] - vs.lower[j]) * unit(rng);
    return x;
}

double fd_gradient(const Residual& r, std::vector<double> x, int var,
                   double step) {
    x[var] += step;
    const double up = eval_residual(r, x).value;
    x[var] -= 2.0 * step;
    const double dn = eval_residual(r, x).value;
    return (up - dn) / (2.0 * step);
}

} // namespace

TEST_CASE("model census on the nano instance") {
    const ProblemModel& m = nano_model();
    const VariableSpace& vs = m.vars;
    CHECK(vs.periods == 2);
    CHECK(vs.count(VarKind::GenP) == 4);
    CHECK(vs.count(VarKind::BranchFlowFwd) == 2);
    CHECK(vs.count(VarKind::BusAngle) == 4);
    CHECK(vs.count(VarKind::NodePressure) == 4);
    CHECK(vs.count(VarKind::PipeFlow) == 2);
    CHECK(vs.count(VarKind::NonPipeBinary) == 2);
    CHECK(vs.count(VarKind::SupplyFlow) == 2);
    int total = 0;
    for (int k = 0; k < (int)VarKind::KindCount; ++k)
        total += vs.count((VarKind)k);
    CHECK(total == vs.size());

    // Two electric residuals per branch-period, two gas per pipeline-period.
    CHECK(m.num_electric == 4);
    CHECK(m.residuals.size() == 8);
    CHECK(m.binaries.size() == 2);
    for (int b : m.binaries) {
        CHECK(vs.lower[b] == 0.0);
        CHECK(vs.upper[b] == 1.0);
    }
    CHECK(!m.rows.empty());
}

TEST_CASE("residual gradients agree with central differences") {
    const ProblemModel& m = nano_model();
    std::mt19937 rng(5);
    for (const Residual& r : m.residuals) {
        for (int rep = 0; rep < 25; ++rep) {
            const std::vector<double> x = random_point(m.vars, rng);
            const ResidualEval ev = eval_residual(r, x);
            for (auto [var, g] : ev.grad) {
                const double fd = fd_gradient(r, x, var, 1e-6);
                CHECK(g == doctest::Approx(fd).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("linearization is tangent at the expansion point") {
    const ProblemModel& m = nano_model();
    std::mt19937 rng(9);
    for (const Residual& r : m.residuals) {
        const std::vector<double> x = random_point(m.vars, rng);
        const double h = eval_residual(r, x).value;
        const LpRow row = linearize_residual(r, x, RowSense::Equal);
        double lhs = 0.0;
        for (auto [j, c] : row.terms) lhs += c * x[j];
        // grad^T x - rhs == h(x) by construction.
        CHECK(lhs - row.rhs == doctest::Approx(h).epsilon(1e-10));
    }
}

TEST_CASE("gas residuals reject out-of-domain points") {
    const ProblemModel& m = nano_model();
    std::vector<double> x(m.vars.size(), 0.0);
    bool found = false;
    for (const Residual& r : m.residuals) {
        if (r.kind != ResidualKind::GasAvgPressure) continue;
        found = true;
        // pm + pn == 0 is outside the constraint's domain.
        CHECK_THROWS_AS(eval_residual(r, x), ResidualDomainError);
    }
    CHECK(found);
}

TEST_CASE("objective arithmetic on a hand-computed point") {
    const ProblemModel& m = nano_model();
    const VariableSpace& vs = m.vars;
    std::vector<double> x(vs.size(), 0.0);
    for (int t = 0; t < 2; ++t) {
        x[vs.index(VarKind::GenP, 0, t)] = 0.5;
        x[vs.index(VarKind::GenP, 1, t)] = 0.4;
        x[vs.index(VarKind::SupplyFlow, 0, t)] = 0.3;
    }
    // g0: 200*(0.5)^2 + 3000*0.5 + 10, g1: 100*(0.4)^2 + 500*0.4,
    // supply: 2 * 0.3 * 3600, each over two periods.
    const double expect =
        2.0 * (200.0 * 0.25 + 3000.0 * 0.5 + 10.0) +
        2.0 * (100.0 * 0.16 + 500.0 * 0.4) + 2.0 * (2.0 * 0.3 * 3600.0);
    CHECK(objective_value(m, x) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("bound projection clamps into the variable box") {
    const ProblemModel& m = nano_model();
    std::vector<double> x(m.vars.size(), 1e9);
    project_into_bounds(m.vars, x);
    for (int j = 0; j < m.vars.size(); ++j) {
        CHECK(x[j] >= m.vars.lower[j]);
        CHECK(x[j] <= m.vars.upper[j]);
    }
}
