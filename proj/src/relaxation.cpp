#include "moegf/relaxation.hpp"

#include <algorithm>
#include <cmath>

namespace moegf {

namespace {

// Appends an envelope's halfspaces, mapping local variables to LP indices.
void append_envelope(LpProblem& lp, const Envelope& env,
                     const std::vector<int>& var_map, RowTag tag) {
    for (const Halfspace& h : env.halfspaces) {
        LpRow row;
        row.sense = RowSense::LessEqual;
        row.rhs = h.rhs;
        row.tag = (int)tag;
        for (size_t j = 0; j < h.coeff.size(); ++j)
            if (h.coeff[j] != 0.0) row.terms.emplace_back(var_map[j], h.coeff[j]);
        lp.add_row(std::move(row));
    }
}

LpRow le_row(RowTag tag, double rhs,
             std::vector<std::pair<int, double>> terms) {
    LpRow r;
    r.terms = std::move(terms);
    r.rhs = rhs;
    r.tag = (int)tag;
    return r;
}

LpRow eq_row(RowTag tag, double rhs,
             std::vector<std::pair<int, double>> terms) {
    LpRow r = le_row(tag, rhs, std::move(terms));
    r.sense = RowSense::Equal;
    return r;
}

} // namespace

double append_pwl_objective(const ProblemModel& model, LpProblem& lp,
                            int cost_segments) {
    const Instance& inst = model.instance;
    const VariableSpace& vs = model.vars;
    const double dt = inst.horizon.dt_hours;
    const double dtau = inst.horizon.dtau_seconds();
    double accuracy = 0.0;

    for (int t = 0; t < inst.horizon.periods; ++t) {
        std::vector<int> period_q;  // epigraph vars of this period, in order
        for (int g = 0; g < (int)inst.generators.size(); ++g) {
            const Generator& gen = inst.generators[g];
            const int vp = vs.index(VarKind::GenP, g, t);
            lp.objective[vp] += gen.cost_lin * dt;
            lp.objective_constant += gen.cost_const * dt;
            if (gen.cost_quad <= 0.0) continue;

            const Envelope env =
                pwl_cost_epigraph(gen.cost_quad, dt, gen.p_min, gen.p_max,
                                  cost_segments);
            const double s2 = gen.cost_quad * dt * dt;
            const double qmax =
                s2 * std::max(gen.p_min * gen.p_min, gen.p_max * gen.p_max);
            const int vq = lp.add_var(0.0, qmax);
            append_envelope(lp, env, {vp, vq}, RowTag::PwlCost);
            period_q.push_back(vq);
            const double gap = s2 * (gen.p_max - gen.p_min) /
                               (2.0 * cost_segments) * (gen.p_max - gen.p_min) /
                               (2.0 * cost_segments);
            accuracy = std::max(accuracy, gap);
        }
        // Paired aggregation: one delta per two consecutive epigraph blocks.
        for (size_t n = 0; n < period_q.size(); n += 2) {
            double cap = lp.upper[period_q[n]];
            std::vector<std::pair<int, double>> terms = {{period_q[n], -1.0}};
            if (n + 1 < period_q.size()) {
                cap += lp.upper[period_q[n + 1]];
                terms.emplace_back(period_q[n + 1], -1.0);
            }
            const int vd = lp.add_var(0.0, cap, 1.0);
            terms.emplace_back(vd, 1.0);
            lp.add_row(eq_row(RowTag::PwlCost, 0.0, std::move(terms)));
        }
        for (int s = 0; s < (int)inst.supplies.size(); ++s)
            lp.objective[vs.index(VarKind::SupplyFlow, s, t)] +=
                inst.supplies[s].cost * dtau;
    }
    return accuracy;
}

RelaxedModel build_polyhedral_relaxation(const ProblemModel& model,
                                         const RelaxOptions& opt) {
    const Instance& inst = model.instance;
    const VariableSpace& vs = model.vars;
    const int H = inst.horizon.periods;

    RelaxedModel rm;
    rm.num_model_vars = vs.size();
    LpProblem& lp = rm.lp;
    lp.objective.assign(vs.size(), 0.0);
    lp.lower = vs.lower;
    lp.upper = vs.upper;
    lp.rows = model.rows;
    rm.pwl_accuracy = append_pwl_objective(model, lp, opt.cost_segments);

    auto square_box = [](double lo, double hi, double& vlo, double& vhi) {
        vhi = std::max(lo * lo, hi * hi);
        vlo = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(lo * lo, hi * hi);
    };

    // conv(theta^2) per branch, substituted into both directed flows.
    rm.branch_sq.assign((size_t)inst.branches.size() * H, -1);
    for (int l = 0; l < (int)inst.branches.size(); ++l) {
        const Branch& br = inst.branches[l];
        const Envelope env =
            envelope_square(br.angle_min, br.angle_max, opt.square_points);
        double vlo, vhi;
        square_box(br.angle_min, br.angle_max, vlo, vhi);
        for (int t = 0; t < H; ++t) {
            const int va = vs.index(VarKind::BranchAngle, l, t);
            const int vv = lp.add_var(vlo, vhi);
            rm.branch_sq[(size_t)l * H + t] = vv;
            append_envelope(lp, env, {va, vv}, RowTag::EnvelopeCut);
            lp.add_row(eq_row(RowTag::EnvelopeCut, 0.0,
                              {{vs.index(VarKind::BranchFlowFwd, l, t), 1.0},
                               {vv, -0.5 * br.g_ij},
                               {va, -br.b_ij}}));
            lp.add_row(eq_row(RowTag::EnvelopeCut, 0.0,
                              {{vs.index(VarKind::BranchFlowRev, l, t), 1.0},
                               {vv, -0.5 * br.g_ji},
                               {va, br.b_ji}}));
        }
    }

    // conv(pressure^2) per node.
    rm.node_sq.assign((size_t)inst.nodes.size() * H, -1);
    for (int m = 0; m < (int)inst.nodes.size(); ++m) {
        const GasNode& n = inst.nodes[m];
        const Envelope env =
            envelope_square(n.pressure_min, n.pressure_max, opt.square_points);
        for (int t = 0; t < H; ++t) {
            const int vp = vs.index(VarKind::NodePressure, m, t);
            const int vv = lp.add_var(n.pressure_min * n.pressure_min,
                                      n.pressure_max * n.pressure_max);
            rm.node_sq[(size_t)m * H + t] = vv;
            append_envelope(lp, env, {vp, vv}, RowTag::EnvelopeCut);
        }
    }

    // conv(phi|phi|) per pipeline, linked to the pressure squares, plus the
    // average-pressure envelope.
    rm.pipe_u.assign((size_t)inst.pipelines.size() * H, -1);
    rm.pipe_w.assign((size_t)inst.pipelines.size() * H, -1);
    for (int p = 0; p < (int)inst.pipelines.size(); ++p) {
        const Pipeline& pipe = inst.pipelines[p];
        const GasNode& nm = inst.nodes[pipe.from];
        const GasNode& nn = inst.nodes[pipe.to];
        const Envelope uenv =
            envelope_signed_square(-pipe.flow_limit, pipe.flow_limit);
        const Envelope wenv =
            envelope_avg_pressure(nm.pressure_min, nm.pressure_max,
                                  nn.pressure_min, nn.pressure_max);
        auto f = [](double x, double y) { return -x * y / (x + y); };
        const double wlo = f(nm.pressure_max, nn.pressure_max);
        const double whi = f(nm.pressure_min, nn.pressure_min);
        const double ucap = pipe.flow_limit * pipe.flow_limit;
        for (int t = 0; t < H; ++t) {
            const int vphi = vs.index(VarKind::PipeFlow, p, t);
            const int vpm = vs.index(VarKind::NodePressure, pipe.from, t);
            const int vpn = vs.index(VarKind::NodePressure, pipe.to, t);
            const int vptilde = vs.index(VarKind::PipeAvgPressure, p, t);
            const int vu = lp.add_var(-ucap, ucap);
            const int vw = lp.add_var(wlo, whi);
            rm.pipe_u[(size_t)p * H + t] = vu;
            rm.pipe_w[(size_t)p * H + t] = vw;
            append_envelope(lp, uenv, {vphi, vu}, RowTag::EnvelopeCut);
            append_envelope(lp, wenv, {vpm, vpn, vw}, RowTag::EnvelopeCut);
            // u = Phi (pm^2 - pn^2) through the square auxiliaries.
            lp.add_row(eq_row(
                RowTag::EnvelopeCut, 0.0,
                {{vu, 1.0},
                 {rm.node_sq[(size_t)pipe.from * H + t], -pipe.flow_coeff},
                 {rm.node_sq[(size_t)pipe.to * H + t], pipe.flow_coeff}}));
            // ptilde = (2/3)(pm + pn + w).
            lp.add_row(eq_row(RowTag::EnvelopeCut, 0.0,
                              {{vptilde, 1.0},
                               {vpm, -2.0 / 3.0},
                               {vpn, -2.0 / 3.0},
                               {vw, -2.0 / 3.0}}));
        }
    }
    return rm;
}

RelaxResult solve_polyhedral_relaxation(const ProblemModel& model,
                                        const RelaxOptions& opt) {
    const RelaxedModel rm = build_polyhedral_relaxation(model, opt);
    const LpSolution sol = lp_solve(rm.lp);
    RelaxResult res;
    res.status = sol.status;
    res.lp_solves = sol.lp_solves;
    if (sol.status == LpStatus::Optimal) {
        res.x.assign(sol.x.begin(), sol.x.begin() + rm.num_model_vars);
        res.objective = sol.objective;
    }
    return res;
}

LowerBoundResult micp_lower_bound(const ProblemModel& model,
                                  const RelaxOptions& opt) {
    const Instance& inst = model.instance;
    const VariableSpace& vs = model.vars;
    const int H = inst.horizon.periods;

    RelaxedModel rm = build_polyhedral_relaxation(model, opt);
    LpProblem& lp = rm.lp;
    std::vector<int> binaries = model.binaries;

    // Pipeline direction binaries: z = 1 forces phi >= 0 and pm >= pn,
    // z = 0 the reverse. xi/zeta select the higher/lower end pressure.
    struct PipeAux { int z, xi, zeta; };
    std::vector<PipeAux> aux((size_t)inst.pipelines.size() * H);
    for (int p = 0; p < (int)inst.pipelines.size(); ++p) {
        const Pipeline& pipe = inst.pipelines[p];
        const GasNode& nm = inst.nodes[pipe.from];
        const GasNode& nn = inst.nodes[pipe.to];
        const double cap = pipe.flow_limit;
        const double plo = std::min(nm.pressure_min, nn.pressure_min);
        const double phi_ub = std::max(nm.pressure_max, nn.pressure_max);
        const double u1 = nn.pressure_max - nm.pressure_min;
        const double l1 = nn.pressure_min - nm.pressure_max;
        const double u2 = nm.pressure_max - nn.pressure_min;
        const double l2 = nm.pressure_min - nn.pressure_max;
        for (int t = 0; t < H; ++t) {
            const int vphi = vs.index(VarKind::PipeFlow, p, t);
            const int vpm = vs.index(VarKind::NodePressure, pipe.from, t);
            const int vpn = vs.index(VarKind::NodePressure, pipe.to, t);
            const int vz = lp.add_var(0.0, 1.0);
            const int vxi = lp.add_var(plo, phi_ub);
            const int vzeta = lp.add_var(plo, phi_ub);
            aux[(size_t)p * H + t] = {vz, vxi, vzeta};
            binaries.push_back(vz);

            lp.add_row(le_row(RowTag::MicpAux, 0.0,
                              {{vphi, 1.0}, {vz, -cap}}));
            lp.add_row(le_row(RowTag::MicpAux, cap,
                              {{vphi, -1.0}, {vz, cap}}));
            lp.add_row(le_row(RowTag::MicpAux, 0.0,
                              {{vpm, 1.0}, {vpn, -1.0}, {vz, -u2}}));
            lp.add_row(le_row(RowTag::MicpAux, -l2,
                              {{vpm, -1.0}, {vpn, 1.0}, {vz, -l2}}));

            // z=1: xi = pm, zeta = pn; z=0: xi = pn, zeta = pm.
            lp.add_row(le_row(RowTag::MicpAux, u1,
                              {{vxi, 1.0}, {vpm, -1.0}, {vz, u1}}));
            lp.add_row(le_row(RowTag::MicpAux, -l1,
                              {{vxi, -1.0}, {vpm, 1.0}, {vz, l1}}));
            lp.add_row(le_row(RowTag::MicpAux, 0.0,
                              {{vxi, 1.0}, {vpn, -1.0}, {vz, -u2}}));
            lp.add_row(le_row(RowTag::MicpAux, 0.0,
                              {{vxi, -1.0}, {vpn, 1.0}, {vz, l2}}));
            lp.add_row(le_row(RowTag::MicpAux, u2,
                              {{vzeta, 1.0}, {vpn, -1.0}, {vz, u2}}));
            lp.add_row(le_row(RowTag::MicpAux, -l2,
                              {{vzeta, -1.0}, {vpn, 1.0}, {vz, l2}}));
            lp.add_row(le_row(RowTag::MicpAux, 0.0,
                              {{vzeta, 1.0}, {vpm, -1.0}, {vz, -u1}}));
            lp.add_row(le_row(RowTag::MicpAux, 0.0,
                              {{vzeta, -1.0}, {vpm, 1.0}, {vz, l1}}));
        }
    }

    LowerBoundResult out;
    const double tol = opt.cut_tol;
    for (int round = 0; round < std::max(1, opt.max_cut_rounds); ++round) {
        const LpSolution sol = bnb_solve(lp, binaries);
        out.lp_solves += sol.lp_solves;
        out.status = sol.status;
        out.rounds = round + 1;
        if (sol.status != LpStatus::Optimal) return out;
        out.bound = sol.objective;
        out.bound_history.push_back(sol.objective);
        out.x.assign(sol.x.begin(), sol.x.begin() + rm.num_model_vars);

        double worst = 0.0;
        int added = 0;
        auto cut = [&](std::vector<std::pair<int, double>> terms, double rhs) {
            lp.add_row(le_row(RowTag::MicpCut, rhs, std::move(terms)));
            ++added;
        };

        // Second-order cone: xi >= ||(zeta, phi/sqrt(Phi))||, supported by
        // tangents of the norm at the incumbent.
        for (int p = 0; p < (int)inst.pipelines.size(); ++p) {
            const double Phi = inst.pipelines[p].flow_coeff;
            for (int t = 0; t < H; ++t) {
                const PipeAux& a = aux[(size_t)p * H + t];
                const double z0 = sol.x[a.zeta];
                const double f0 = sol.x[vs.index(VarKind::PipeFlow, p, t)];
                const double nrm = std::sqrt(z0 * z0 + f0 * f0 / Phi);
                const double viol = nrm - sol.x[a.xi];
                worst = std::max(worst, viol);
                if (viol > tol && nrm > tol) {
                    cut({{a.zeta, z0 / nrm},
                         {vs.index(VarKind::PipeFlow, p, t), f0 / (Phi * nrm)},
                         {a.xi, -1.0}},
                        0.0);
                }
            }
        }

        // Convex side of the average pressure: ptilde >= g(pm, pn).
        for (int p = 0; p < (int)inst.pipelines.size(); ++p) {
            const Pipeline& pipe = inst.pipelines[p];
            for (int t = 0; t < H; ++t) {
                const int vpm = vs.index(VarKind::NodePressure, pipe.from, t);
                const int vpn = vs.index(VarKind::NodePressure, pipe.to, t);
                const int vpt = vs.index(VarKind::PipeAvgPressure, p, t);
                const double pm = sol.x[vpm], pn = sol.x[vpn];
                const double s = pm + pn;
                const double g0 = (2.0 / 3.0) * (s - pm * pn / s);
                const double gx = (2.0 / 3.0) * (1.0 - pn * pn / (s * s));
                const double gy = (2.0 / 3.0) * (1.0 - pm * pm / (s * s));
                const double viol = g0 - sol.x[vpt];
                worst = std::max(worst, viol);
                if (viol > tol)
                    cut({{vpm, gx}, {vpn, gy}, {vpt, -1.0}},
                        gx * pm + gy * pn - g0);
            }
        }

        // Square refinements: v >= x^2 on angle and pressure auxiliaries.
        auto square_refine = [&](int vx, int vv) {
            const double x0 = sol.x[vx];
            const double viol = x0 * x0 - sol.x[vv];
            worst = std::max(worst, viol);
            if (viol > tol) cut({{vx, 2.0 * x0}, {vv, -1.0}}, x0 * x0);
        };
        for (int l = 0; l < (int)inst.branches.size(); ++l)
            for (int t = 0; t < H; ++t)
                square_refine(vs.index(VarKind::BranchAngle, l, t),
                              rm.branch_sq[(size_t)l * H + t]);
        for (int m = 0; m < (int)inst.nodes.size(); ++m)
            for (int t = 0; t < H; ++t)
                square_refine(vs.index(VarKind::NodePressure, m, t),
                              rm.node_sq[(size_t)m * H + t]);

        out.cuts_added += added;
        out.residual_violation = worst;
        if (worst <= tol || added == 0) break;
    }
    return out;
}

} // namespace moegf
