#include "moegf/formulation.hpp"

#include <cmath>
#include <numbers>

namespace moegf {

namespace {

VariableSpace make_variable_space(const Instance& inst) {
    VariableSpace vs;
    const int H = inst.horizon.periods;
    vs.periods = H;
    const int nk = (int)VarKind::KindCount;
    vs.offset.assign(nk, 0);
    vs.element_count.assign(nk, 0);

    auto set_count = [&](VarKind k, int c) { vs.element_count[(int)k] = c; };
    set_count(VarKind::GenP, (int)inst.generators.size());
    set_count(VarKind::BranchFlowFwd, (int)inst.branches.size());
    set_count(VarKind::BranchFlowRev, (int)inst.branches.size());
    set_count(VarKind::BusAngle, (int)inst.buses.size());
    set_count(VarKind::BranchAngle, (int)inst.branches.size());
    set_count(VarKind::NodePressure, (int)inst.nodes.size());
    set_count(VarKind::PipeAvgPressure, (int)inst.pipelines.size());
    set_count(VarKind::PipeFlow, (int)inst.pipelines.size());
    set_count(VarKind::PipeLinepack, (int)inst.pipelines.size());
    set_count(VarKind::PipeFlowIn, (int)inst.pipelines.size());
    set_count(VarKind::PipeFlowOut, (int)inst.pipelines.size());
    set_count(VarKind::NonPipeFlow, (int)inst.nonpipes.size());
    set_count(VarKind::NonPipeBinary, (int)inst.nonpipes.size());
    int ncomp = 0;
    for (const auto& np : inst.nonpipes)
        if (np.is_compressor) ++ncomp;
    set_count(VarKind::CompFlowPlus, ncomp);
    set_count(VarKind::CompFlowMinus, ncomp);
    set_count(VarKind::CompTrapped, ncomp);
    set_count(VarKind::GpgFuel, (int)inst.generators.size());
    set_count(VarKind::SupplyFlow, (int)inst.supplies.size());

    int total = 0;
    for (int k = 0; k < nk; ++k) {
        vs.offset[k] = total;
        total += vs.element_count[k] * H;
    }
    vs.lower.assign(total, 0.0);
    vs.upper.assign(total, 0.0);

    auto set_bounds = [&](VarKind k, int e, double lo, double hi) {
        for (int t = 0; t < H; ++t) {
            vs.lower[vs.index(k, e, t)] = lo;
            vs.upper[vs.index(k, e, t)] = hi;
        }
    };

    const double pi = std::numbers::pi;
    for (int g = 0; g < (int)inst.generators.size(); ++g) {
        const Generator& gen = inst.generators[g];
        set_bounds(VarKind::GenP, g, gen.p_min, gen.p_max);
        if (gen.type == GenType::Gpg) {
            const double c = inst.gas.HHV * gen.efficiency;
            set_bounds(VarKind::GpgFuel, g, gen.p_min / c, gen.p_max / c);
        } else {
            set_bounds(VarKind::GpgFuel, g, 0.0, 0.0);
        }
    }
    for (int l = 0; l < (int)inst.branches.size(); ++l) {
        const Branch& br = inst.branches[l];
        set_bounds(VarKind::BranchFlowFwd, l, -br.flow_limit, br.flow_limit);
        set_bounds(VarKind::BranchFlowRev, l, -br.flow_limit, br.flow_limit);
        set_bounds(VarKind::BranchAngle, l, br.angle_min, br.angle_max);
    }
    for (int i = 0; i < (int)inst.buses.size(); ++i) {
        if (i == 0)
            set_bounds(VarKind::BusAngle, i, 0.0, 0.0);  // reference bus
        else
            set_bounds(VarKind::BusAngle, i, -pi, pi);
    }
    for (int m = 0; m < (int)inst.nodes.size(); ++m) {
        const GasNode& n = inst.nodes[m];
        set_bounds(VarKind::NodePressure, m, n.pressure_min, n.pressure_max);
    }
    for (int p = 0; p < (int)inst.pipelines.size(); ++p) {
        const Pipeline& pipe = inst.pipelines[p];
        const GasNode& nm = inst.nodes[pipe.from];
        const GasNode& nn = inst.nodes[pipe.to];
        const double avg_lo = average_pressure(nm.pressure_min, nn.pressure_min);
        const double avg_hi = average_pressure(nm.pressure_max, nn.pressure_max);
        set_bounds(VarKind::PipeAvgPressure, p, avg_lo, avg_hi);
        set_bounds(VarKind::PipeFlow, p, -pipe.flow_limit, pipe.flow_limit);
        set_bounds(VarKind::PipeFlowIn, p, -pipe.flow_limit, pipe.flow_limit);
        set_bounds(VarKind::PipeFlowOut, p, -pipe.flow_limit, pipe.flow_limit);
        set_bounds(VarKind::PipeLinepack, p, pipe.linepack_coeff * avg_lo,
                   pipe.linepack_coeff * avg_hi);
    }
    int ci = 0;
    for (int e = 0; e < (int)inst.nonpipes.size(); ++e) {
        const NonPipe& np = inst.nonpipes[e];
        set_bounds(VarKind::NonPipeFlow, e, -np.flow_limit, np.flow_limit);
        set_bounds(VarKind::NonPipeBinary, e, 0.0, 1.0);
        if (np.is_compressor) {
            set_bounds(VarKind::CompFlowPlus, ci, 0.0, np.flow_limit);
            set_bounds(VarKind::CompFlowMinus, ci, -np.flow_limit, 0.0);
            set_bounds(VarKind::CompTrapped, ci, 0.0,
                       np.consumption_coeff * np.flow_limit);
            ++ci;
        }
    }
    for (int s = 0; s < (int)inst.supplies.size(); ++s)
        set_bounds(VarKind::SupplyFlow, s, inst.supplies[s].flow_min,
                   inst.supplies[s].flow_max);
    return vs;
}

LpRow row(RowTag tag, RowSense sense, double rhs,
          std::vector<std::pair<int, double>> terms) {
    LpRow r;
    r.terms = std::move(terms);
    r.rhs = rhs;
    r.sense = sense;
    r.tag = (int)tag;
    return r;
}

} // namespace

ProblemModel build_moegf(const Instance& inst) {
    ProblemModel model;
    model.instance = inst;
    model.vars = make_variable_space(inst);
    const VariableSpace& vs = model.vars;
    const int H = inst.horizon.periods;
    const double dt = inst.horizon.dt_hours;
    const double dtau = inst.horizon.dtau_seconds();

    auto& rows = model.rows;

    for (int t = 0; t < H; ++t) {
        // Generator ramps; period 0 ramps against the instance-provided
        // pre-horizon generation.
        for (int g = 0; g < (int)inst.generators.size(); ++g) {
            const Generator& gen = inst.generators[g];
            const int pt = vs.index(VarKind::GenP, g, t);
            if (t == 0) {
                rows.push_back(row(RowTag::RampUp, RowSense::LessEqual,
                                   gen.ramp_up * dt + gen.initial_p, {{pt, 1.0}}));
                rows.push_back(row(RowTag::RampDown, RowSense::LessEqual,
                                   gen.ramp_down * dt - gen.initial_p,
                                   {{pt, -1.0}}));
            } else {
                const int pp = vs.index(VarKind::GenP, g, t - 1);
                rows.push_back(row(RowTag::RampUp, RowSense::LessEqual,
                                   gen.ramp_up * dt, {{pt, 1.0}, {pp, -1.0}}));
                rows.push_back(row(RowTag::RampDown, RowSense::LessEqual,
                                   gen.ramp_down * dt, {{pt, -1.0}, {pp, 1.0}}));
            }
        }

        // theta_ij definition.
        for (int l = 0; l < (int)inst.branches.size(); ++l) {
            const Branch& br = inst.branches[l];
            rows.push_back(row(RowTag::AngleDiffDef, RowSense::Equal, 0.0,
                               {{vs.index(VarKind::BranchAngle, l, t), 1.0},
                                {vs.index(VarKind::BusAngle, br.from, t), -1.0},
                                {vs.index(VarKind::BusAngle, br.to, t), 1.0}}));
        }

        // KCL per bus: sum of generation = demand + outgoing branch flows +
        // shunt withdrawal.
        for (int i = 0; i < (int)inst.buses.size(); ++i) {
            std::vector<std::pair<int, double>> terms;
            for (int g = 0; g < (int)inst.generators.size(); ++g)
                if (inst.generators[g].bus == i)
                    terms.emplace_back(vs.index(VarKind::GenP, g, t), 1.0);
            for (int l = 0; l < (int)inst.branches.size(); ++l) {
                if (inst.branches[l].from == i)
                    terms.emplace_back(vs.index(VarKind::BranchFlowFwd, l, t), -1.0);
                if (inst.branches[l].to == i)
                    terms.emplace_back(vs.index(VarKind::BranchFlowRev, l, t), -1.0);
            }
            rows.push_back(row(RowTag::Kcl, RowSense::Equal,
                               inst.buses[i].demand[t] +
                                   inst.buses[i].shunt_conductance,
                               std::move(terms)));
        }

        // GPG fuel coupling: p = HHV * eta * phi_fuel.
        for (int g = 0; g < (int)inst.generators.size(); ++g) {
            const Generator& gen = inst.generators[g];
            if (gen.type != GenType::Gpg) continue;
            rows.push_back(
                row(RowTag::GpgCoupling, RowSense::Equal, 0.0,
                    {{vs.index(VarKind::GenP, g, t), 1.0},
                     {vs.index(VarKind::GpgFuel, g, t),
                      -inst.gas.HHV * gen.efficiency}}));
        }

        // Gas nodal balance.
        for (int m = 0; m < (int)inst.nodes.size(); ++m) {
            std::vector<std::pair<int, double>> terms;
            for (int s = 0; s < (int)inst.supplies.size(); ++s)
                if (inst.supplies[s].node == m)
                    terms.emplace_back(vs.index(VarKind::SupplyFlow, s, t), 1.0);
            for (int p = 0; p < (int)inst.pipelines.size(); ++p) {
                if (inst.pipelines[p].from == m)
                    terms.emplace_back(vs.index(VarKind::PipeFlowIn, p, t), -1.0);
                if (inst.pipelines[p].to == m)
                    terms.emplace_back(vs.index(VarKind::PipeFlowOut, p, t), 1.0);
            }
            for (int e = 0; e < (int)inst.nonpipes.size(); ++e) {
                if (inst.nonpipes[e].from == m)
                    terms.emplace_back(vs.index(VarKind::NonPipeFlow, e, t), -1.0);
                if (inst.nonpipes[e].to == m)
                    terms.emplace_back(vs.index(VarKind::NonPipeFlow, e, t), 1.0);
            }
            for (int g = 0; g < (int)inst.generators.size(); ++g)
                if (inst.generators[g].type == GenType::Gpg &&
                    inst.generators[g].gas_node == m)
                    terms.emplace_back(vs.index(VarKind::GpgFuel, g, t), -1.0);
            rows.push_back(row(RowTag::GasNodal, RowSense::Equal,
                               inst.nodes[m].demand[t], std::move(terms)));
        }

        // Pipeline linear physics.
        for (int p = 0; p < (int)inst.pipelines.size(); ++p) {
            const Pipeline& pipe = inst.pipelines[p];
            rows.push_back(row(RowTag::AvgFlow, RowSense::Equal, 0.0,
                               {{vs.index(VarKind::PipeFlow, p, t), 1.0},
                                {vs.index(VarKind::PipeFlowIn, p, t), -0.5},
                                {vs.index(VarKind::PipeFlowOut, p, t), -0.5}}));
            rows.push_back(row(RowTag::LinepackEq, RowSense::Equal, 0.0,
                               {{vs.index(VarKind::PipeLinepack, p, t), 1.0},
                                {vs.index(VarKind::PipeAvgPressure, p, t),
                                 -pipe.linepack_coeff}}));
            std::vector<std::pair<int, double>> terms = {
                {vs.index(VarKind::PipeLinepack, p, t), 1.0},
                {vs.index(VarKind::PipeFlowIn, p, t), -dtau},
                {vs.index(VarKind::PipeFlowOut, p, t), dtau}};
            double rhs = 0.0;
            if (t == 0)
                rhs = pipe.initial_linepack;
            else
                terms.emplace_back(vs.index(VarKind::PipeLinepack, p, t - 1), -1.0);
            rows.push_back(row(RowTag::Continuity, RowSense::Equal, rhs,
                               std::move(terms)));
        }

        // Non-pipe elements.
        int ci = 0;
        for (int e = 0; e < (int)inst.nonpipes.size(); ++e) {
            const NonPipe& np = inst.nonpipes[e];
            const int vphi = vs.index(VarKind::NonPipeFlow, e, t);
            const int vz = vs.index(VarKind::NonPipeBinary, e, t);
            const GasNode& nm = inst.nodes[np.from];
            const GasNode& nn = inst.nodes[np.to];
            const int vpm = vs.index(VarKind::NodePressure, np.from, t);
            const int vpn = vs.index(VarKind::NodePressure, np.to, t);

            if (np.is_compressor) {
                const int vplus = vs.index(VarKind::CompFlowPlus, ci, t);
                const int vminus = vs.index(VarKind::CompFlowMinus, ci, t);
                const int vtrap = vs.index(VarKind::CompTrapped, ci, t);
                rows.push_back(row(RowTag::CompSplit, RowSense::Equal, 0.0,
                                   {{vphi, 1.0}, {vplus, -1.0}, {vminus, -1.0}}));
                rows.push_back(row(RowTag::CompTrap, RowSense::Equal, 0.0,
                                   {{vtrap, 1.0},
                                    {vplus, -np.consumption_coeff}}));
                rows.push_back(row(RowTag::CompPlusCap, RowSense::LessEqual, 0.0,
                                   {{vplus, 1.0}, {vz, -np.flow_limit}}));
                // -(1-z) cap <= phi-  ->  -phi- + z cap <= cap
                rows.push_back(row(RowTag::CompMinusCap, RowSense::LessEqual,
                                   np.flow_limit,
                                   {{vminus, -1.0}, {vz, np.flow_limit}}));
            }
            rows.push_back(row(RowTag::NonPipeFlowCap, RowSense::LessEqual, 0.0,
                               {{vphi, 1.0}, {vz, -np.flow_limit}}));
            rows.push_back(row(RowTag::NonPipeFlowFloor, RowSense::LessEqual,
                               np.flow_limit,
                               {{vphi, -1.0}, {vz, np.flow_limit}}));

            // Pressure ratio windows (boost mode z=1) and bypass (z=0).
            const double c1 = nn.pressure_max - nm.pressure_min * np.ratio_max;
            rows.push_back(row(RowTag::BoostUpper, RowSense::LessEqual, c1,
                               {{vpn, 1.0}, {vpm, -np.ratio_max}, {vz, c1}}));
            const double c2 = nm.pressure_max * np.ratio_min - nn.pressure_min;
            rows.push_back(row(RowTag::BoostLower, RowSense::LessEqual, c2,
                               {{vpm, np.ratio_min}, {vpn, -1.0}, {vz, c2}}));
            rows.push_back(row(RowTag::NoBoostUpper, RowSense::LessEqual, 0.0,
                               {{vpn, 1.0}, {vpm, -1.0},
                                {vz, -(nn.pressure_max - nm.pressure_min)}}));
            rows.push_back(row(RowTag::NoBoostLower, RowSense::LessEqual, 0.0,
                               {{vpm, 1.0}, {vpn, -1.0},
                                {vz, -(nm.pressure_max - nn.pressure_min)}}));
            model.binaries.push_back(vz);
            if (np.is_compressor) ++ci;
        }
    }

    if (inst.terminal_linepack_min) {
        std::vector<std::pair<int, double>> terms;
        for (int p = 0; p < (int)inst.pipelines.size(); ++p)
            terms.emplace_back(vs.index(VarKind::PipeLinepack, p, H - 1), -1.0);
        rows.push_back(row(RowTag::TerminalLinepack, RowSense::LessEqual,
                           -*inst.terminal_linepack_min, std::move(terms)));
    }

    // Residuals: electric block first, then gas.
    for (int l = 0; l < (int)inst.branches.size(); ++l) {
        const Branch& br = inst.branches[l];
        for (int t = 0; t < H; ++t) {
            Residual fwd;
            fwd.kind = ResidualKind::ElectricFwd;
            fwd.element = l;
            fwd.period = t;
            fwd.v_flow = vs.index(VarKind::BranchFlowFwd, l, t);
            fwd.v_angle = vs.index(VarKind::BranchAngle, l, t);
            fwd.g = br.g_ij;
            fwd.b = br.b_ij;
            model.residuals.push_back(fwd);

            Residual rev = fwd;
            rev.kind = ResidualKind::ElectricRev;
            rev.v_flow = vs.index(VarKind::BranchFlowRev, l, t);
            rev.g = br.g_ji;
            rev.b = br.b_ji;
            model.residuals.push_back(rev);
        }
    }
    model.num_electric = (int)model.residuals.size();
    for (int p = 0; p < (int)inst.pipelines.size(); ++p) {
        const Pipeline& pipe = inst.pipelines[p];
        for (int t = 0; t < H; ++t) {
            Residual mo;
            mo.kind = ResidualKind::GasMotion;
            mo.element = p;
            mo.period = t;
            mo.v_flow = vs.index(VarKind::PipeFlow, p, t);
            mo.v_pm = vs.index(VarKind::NodePressure, pipe.from, t);
            mo.v_pn = vs.index(VarKind::NodePressure, pipe.to, t);
            mo.flow_coeff = pipe.flow_coeff;
            model.residuals.push_back(mo);

            Residual ap = mo;
            ap.kind = ResidualKind::GasAvgPressure;
            ap.v_flow = -1;
            ap.v_pavg = vs.index(VarKind::PipeAvgPressure, p, t);
            model.residuals.push_back(ap);
        }
    }
    return model;
}

ResidualEval eval_residual(const Residual& r, std::span<const double> x) {
    ResidualEval ev;
    switch (r.kind) {
        case ResidualKind::ElectricFwd:
        case ResidualKind::ElectricRev: {
            const double th = x[r.v_angle];
            const double sgn = r.kind == ResidualKind::ElectricFwd ? 1.0 : -1.0;
            ev.value = 0.5 * r.g * th * th + sgn * r.b * th - x[r.v_flow];
            ev.grad = {{r.v_angle, r.g * th + sgn * r.b}, {r.v_flow, -1.0}};
            break;
        }
        case ResidualKind::GasMotion: {
            const double phi = x[r.v_flow];
            const double pm = x[r.v_pm], pn = x[r.v_pn];
            ev.value = phi * std::abs(phi) -
                       r.flow_coeff * (pm * pm - pn * pn);
            ev.grad = {{r.v_flow, 2.0 * std::abs(phi)},
                       {r.v_pm, -2.0 * r.flow_coeff * pm},
                       {r.v_pn, 2.0 * r.flow_coeff * pn}};
            break;
        }
        case ResidualKind::GasAvgPressure: {
            const double pm = x[r.v_pm], pn = x[r.v_pn];
            const double s = pm + pn;
            if (s <= 0.0)
                throw ResidualDomainError(
                    "average-pressure residual requires pm + pn > 0");
            ev.value = (2.0 / 3.0) * (s - pm * pn / s) - x[r.v_pavg];
            // d/dpm of (s - pm pn / s) = 1 - pn^2/s^2 (same with m<->n).
            ev.grad = {{r.v_pm, (2.0 / 3.0) * (1.0 - pn * pn / (s * s))},
                       {r.v_pn, (2.0 / 3.0) * (1.0 - pm * pm / (s * s))},
                       {r.v_pavg, -1.0}};
            break;
        }
    }
    return ev;
}

LpRow linearize_residual(const Residual& r, std::span<const double> x,
                         RowSense sense) {
    const ResidualEval ev = eval_residual(r, x);
    LpRow out;
    out.sense = sense;
    out.terms = ev.grad;
    double rhs = -ev.value;
    for (auto& [j, v] : ev.grad) rhs += v * x[j];
    out.rhs = rhs;
    out.tag = (int)(r.kind == ResidualKind::ElectricFwd ||
                            r.kind == ResidualKind::ElectricRev
                        ? RowTag::ElectricTangent
                        : RowTag::GasTangent);
    return out;
}

double objective_value(const ProblemModel& model, std::span<const double> x) {
    const Instance& inst = model.instance;
    const double dt = inst.horizon.dt_hours;
    const double dtau = inst.horizon.dtau_seconds();
    double obj = 0.0;
    for (int t = 0; t < inst.horizon.periods; ++t) {
        for (int g = 0; g < (int)inst.generators.size(); ++g) {
            const Generator& gen = inst.generators[g];
            const double p = x[model.vars.index(VarKind::GenP, g, t)];
            obj += gen.cost_quad * (p * dt) * (p * dt) + gen.cost_lin * p * dt +
                   gen.cost_const * dt;
        }
        for (int s = 0; s < (int)inst.supplies.size(); ++s)
            obj += inst.supplies[s].cost *
                   x[model.vars.index(VarKind::SupplyFlow, s, t)] * dtau;
    }
    return obj;
}

void project_into_bounds(const VariableSpace& vars, std::vector<double>& x) {
    for (int j = 0; j < vars.size(); ++j)
        x[j] = std::min(std::max(x[j], vars.lower[j]), vars.upper[j]);
}

std::string dump_model_lp_text(const ProblemModel& model) {
    LpProblem lp;
    lp.objective.assign(model.vars.size(), 0.0);
    lp.lower = model.vars.lower;
    lp.upper = model.vars.upper;
    lp.rows = model.rows;
    return dump_lp_text(lp);
}

} // namespace moegf
