#include "moegf/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace moegf {

using nlohmann::json;

PipeConstants compute_pipe_constants(double diameter_m, double length_m,
                                     double pmin_from_pa, double pmax_from_pa,
                                     double pmin_to_pa, double pmax_to_pa,
                                     const GasConstants& gas) {
    if (diameter_m <= 0.0)
        throw InvalidInstance("pipe diameter must be positive");
    if (length_m <= 0.0)
        throw InvalidInstance("pipe length must be positive");
    if (pmin_from_pa < 0.0 || pmin_to_pa < 0.0)
        throw InvalidInstance("pipe endpoint pressure bounds must be non-negative");

    PipeConstants pc;
    const double d16 = std::pow(diameter_m, 1.0 / 6.0);
    pc.friction = 4.0 / std::pow(20.621 * d16, 2.0);

    const double pm = 0.5 * (pmin_from_pa + pmax_from_pa);
    const double pn = 0.5 * (pmin_to_pa + pmax_to_pa);
    double comb = 0.0;
    if (pm + pn > 0.0)
        comb = pm + pn - pm * pn / (pm + pn);
    const double denom = 3.0 * std::pow(1.8 * gas.T, 3.825) / 2.0;
    pc.compressibility =
        1.0 / (1.0 + 49.9511 * std::pow(10.0, 1.785 * gas.S) * comb / denom);

    const double pi = 3.14159265358979323846;
    pc.flow_coeff = pi * pi * std::pow(diameter_m, 5.0) /
                    (16.0 * gas.rho * gas.rho * pc.compressibility * gas.R *
                     gas.T * length_m * pc.friction);
    pc.linepack_coeff = pi * diameter_m * diameter_m * length_m /
                        (4.0 * gas.rho * pc.compressibility * gas.R * gas.T);
    return pc;
}

double average_pressure(double pm, double pn) {
    return (2.0 / 3.0) * (pm + pn - pm * pn / (pm + pn));
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw InvalidInstance(where + ": " + what);
}

double req_num(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) fail(where, "missing field '" + key + "'");
    if (!j[key].is_number()) fail(where, "field '" + key + "' must be a number");
    return j[key].get<double>();
}

std::string req_str(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) fail(where, "missing field '" + key + "'");
    return j[key].get<std::string>();
}

std::vector<double> req_series(const json& j, const std::string& key, int periods,
                               const std::string& where) {
    if (!j.contains(key)) fail(where, "missing field '" + key + "'");
    std::vector<double> out;
    if (j[key].is_number()) {
        out.assign(periods, j[key].get<double>());
    } else {
        out = j[key].get<std::vector<double>>();
    }
    if ((int)out.size() != periods)
        fail(where, "series '" + key + "' must have one value per period");
    return out;
}

int lookup(const std::unordered_map<std::string, int>& map, const std::string& id,
           const std::string& where) {
    auto it = map.find(id);
    if (it == map.end()) fail(where, "dangling reference to '" + id + "'");
    return it->second;
}

} // namespace

Instance parse_instance(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(origin, std::string("JSON parse error: ") + e.what());
    }

    Instance inst;
    inst.name = j.value("name", origin);
    const BaseUnits& bu = inst.base;

    if (!j.contains("horizon")) fail(origin, "missing field 'horizon'");
    inst.horizon.periods = (int)req_num(j["horizon"], "periods", "horizon");
    inst.horizon.dt_hours = req_num(j["horizon"], "dt_hours", "horizon");
    if (inst.horizon.periods < 1) fail(origin, "horizon must have at least one period");
    if (inst.horizon.dt_hours <= 0.0) fail(origin, "dt_hours must be positive");
    const int H = inst.horizon.periods;

    const json& je = j.contains("electricity") ? j["electricity"] : json::object();
    const json& jg = j.contains("gas") ? j["gas"] : json::object();

    std::unordered_map<std::string, int> bus_ids, node_ids;

    for (const json& b : je.value("buses", json::array())) {
        Bus bus;
        bus.id = req_str(b, "id", "bus");
        bus.shunt_conductance = b.value("shunt_conductance_pu", 0.0);
        auto dem = req_series(b, "demand_mw", H, "bus " + bus.id);
        for (double d : dem) bus.demand.push_back(bu.power_to_pu(d));
        if (bus_ids.count(bus.id)) fail("bus " + bus.id, "duplicate id");
        bus_ids[bus.id] = (int)inst.buses.size();
        inst.buses.push_back(std::move(bus));
    }

    for (const json& b : je.value("branches", json::array())) {
        Branch br;
        br.id = req_str(b, "id", "branch");
        const std::string where = "branch " + br.id;
        br.from = lookup(bus_ids, req_str(b, "from", where), where);
        br.to = lookup(bus_ids, req_str(b, "to", where), where);
        if (!b.contains("admittance_pu")) fail(where, "missing field 'admittance_pu'");
        br.admittance = {req_num(b["admittance_pu"], "re", where),
                         req_num(b["admittance_pu"], "im", where)};
        br.tap_ratio = b.value("tap_ratio", 1.0);
        br.tap_shift = b.value("tap_shift_rad", 0.0);
        if (br.tap_ratio <= 0.0) fail(where, "tap ratio must be positive");
        br.flow_limit = bu.power_to_pu(req_num(b, "flow_limit_mw", where));
        if (br.flow_limit <= 0.0) fail(where, "flow limit must be positive");
        br.angle_min = req_num(b, "angle_min_rad", where);
        br.angle_max = req_num(b, "angle_max_rad", where);
        if (!(br.angle_min < br.angle_max))
            fail(where, "angle bounds must satisfy angle_min < angle_max");

        const std::complex<double> T =
            std::polar(br.tap_ratio, br.tap_shift);
        const std::complex<double> Yc = std::conj(br.admittance);
        const std::complex<double> fwd = Yc / T;
        const std::complex<double> rev = Yc / std::conj(T);
        br.g_ij = fwd.real();
        br.b_ij = fwd.imag();
        br.g_ji = rev.real();
        br.b_ji = rev.imag();
        inst.branches.push_back(std::move(br));
    }

    for (const json& n : jg.value("nodes", json::array())) {
        GasNode node;
        node.id = req_str(n, "id", "gas node");
        const std::string where = "gas node " + node.id;
        node.pressure_min = bu.pressure_to_pu(req_num(n, "pressure_min_pa", where));
        node.pressure_max = bu.pressure_to_pu(req_num(n, "pressure_max_pa", where));
        if (node.pressure_min <= 0.0)
            fail(where, "pressure_min_pa must be positive");
        if (!(node.pressure_min < node.pressure_max))
            fail(where, "pressure_min_pa must be below pressure_max_pa");
        auto dem = req_series(n, "demand_m3_per_s", H, where);
        for (double d : dem) node.demand.push_back(bu.flow_to_pu(d));
        if (node_ids.count(node.id)) fail(where, "duplicate id");
        node_ids[node.id] = (int)inst.nodes.size();
        inst.nodes.push_back(std::move(node));
    }

    for (const json& g : je.value("generators", json::array())) {
        Generator gen;
        gen.id = req_str(g, "id", "generator");
        const std::string where = "generator " + gen.id;
        gen.bus = lookup(bus_ids, req_str(g, "bus", where), where);
        const std::string type = g.value("type", "non-gpg");
        if (type == "gpg")
            gen.type = GenType::Gpg;
        else if (type == "non-gpg")
            gen.type = GenType::NonGpg;
        else
            fail(where, "unknown generator type '" + type + "'");
        gen.p_min = bu.power_to_pu(req_num(g, "pmin_mw", where));
        gen.p_max = bu.power_to_pu(req_num(g, "pmax_mw", where));
        if (!(gen.p_min <= gen.p_max)) fail(where, "pmin must not exceed pmax");
        gen.ramp_down = bu.power_to_pu(req_num(g, "ramp_down_mw_per_h", where));
        gen.ramp_up = bu.power_to_pu(req_num(g, "ramp_up_mw_per_h", where));
        if (gen.ramp_down < 0.0 || gen.ramp_up < 0.0)
            fail(where, "ramp rates must be non-negative");
        gen.cost_quad = bu.cost_quad_to_pu(g.value("cost_quadratic", 0.0));
        gen.cost_lin = bu.cost_lin_to_pu(g.value("cost_linear", 0.0));
        gen.cost_const = g.value("cost_constant", 0.0);
        if (gen.cost_quad < 0.0) fail(where, "quadratic cost must be non-negative");
        gen.initial_p = bu.power_to_pu(req_num(g, "initial_mw", where));
        if (gen.type == GenType::Gpg) {
            gen.efficiency = req_num(g, "efficiency", where);
            if (!(gen.efficiency > 0.0 && gen.efficiency <= 1.0))
                fail(where, "GPG efficiency must be in (0, 1]");
            gen.gas_node = lookup(node_ids, req_str(g, "gas_node", where), where);
        }
        inst.generators.push_back(std::move(gen));
    }

    for (const json& p : jg.value("pipelines", json::array())) {
        Pipeline pipe;
        pipe.id = req_str(p, "id", "pipeline");
        const std::string where = "pipeline " + pipe.id;
        pipe.from = lookup(node_ids, req_str(p, "from", where), where);
        pipe.to = lookup(node_ids, req_str(p, "to", where), where);
        pipe.diameter = req_num(p, "diameter_m", where);
        pipe.length = req_num(p, "length_m", where);
        pipe.flow_limit = bu.flow_to_pu(req_num(p, "flow_limit_m3_per_s", where));
        if (pipe.flow_limit <= 0.0) fail(where, "flow limit must be positive");
        const GasNode& nm = inst.nodes[pipe.from];
        const GasNode& nn = inst.nodes[pipe.to];
        try {
            pipe.constants = compute_pipe_constants(
                pipe.diameter, pipe.length,
                bu.pressure_from_pu(nm.pressure_min), bu.pressure_from_pu(nm.pressure_max),
                bu.pressure_from_pu(nn.pressure_min), bu.pressure_from_pu(nn.pressure_max),
                inst.gas);
        } catch (const InvalidInstance& e) {
            fail(where, e.what());
        }
        pipe.flow_coeff = bu.flow_coeff_to_pu(pipe.constants.flow_coeff);
        pipe.linepack_coeff = bu.linepack_coeff_to_pu(pipe.constants.linepack_coeff);
        pipe.initial_linepack = bu.linepack_to_pu(req_num(p, "initial_linepack_m3", where));
        const double l_lo = pipe.linepack_coeff *
            average_pressure(nm.pressure_min, nn.pressure_min);
        const double l_hi = pipe.linepack_coeff *
            average_pressure(nm.pressure_max, nn.pressure_max);
        if (pipe.initial_linepack < l_lo - 1e-9 || pipe.initial_linepack > l_hi + 1e-9)
            fail(where, "initial_linepack_m3 outside the range implied by pressure bounds");
        inst.pipelines.push_back(std::move(pipe));
    }

    auto parse_nonpipe = [&](const json& c, bool is_compressor) {
        NonPipe np;
        np.id = req_str(c, "id", is_compressor ? "compressor" : "regulator");
        const std::string where =
            (is_compressor ? "compressor " : "regulator ") + np.id;
        np.is_compressor = is_compressor;
        np.from = lookup(node_ids, req_str(c, "from", where), where);
        np.to = lookup(node_ids, req_str(c, "to", where), where);
        np.flow_limit = bu.flow_to_pu(req_num(c, "flow_limit_m3_per_s", where));
        if (np.flow_limit <= 0.0) fail(where, "flow limit must be positive");
        np.ratio_min = req_num(c, "ratio_min", where);
        np.ratio_max = req_num(c, "ratio_max", where);
        if (is_compressor) {
            if (!(np.ratio_min >= 1.0 && np.ratio_max > 1.0))
                fail(where, "compressor requires ratio_min >= 1 and ratio_max > 1");
            np.consumption_coeff = c.value("consumption_coeff", 0.0);
            if (np.consumption_coeff < 0.0 || np.consumption_coeff > 0.05)
                fail(where, "consumption_coeff must be in [0, 0.05]");
        } else {
            if (!(np.ratio_min > 0.0 && np.ratio_min < 1.0 && np.ratio_max <= 1.0))
                fail(where, "regulator requires 0 < ratio_min < 1 and ratio_max <= 1");
        }
        inst.nonpipes.push_back(std::move(np));
    };
    for (const json& c : jg.value("compressors", json::array()))
        parse_nonpipe(c, true);
    for (const json& c : jg.value("regulators", json::array()))
        parse_nonpipe(c, false);

    for (const json& s : jg.value("supplies", json::array())) {
        Supply sup;
        sup.id = req_str(s, "id", "supply");
        const std::string where = "supply " + sup.id;
        sup.node = lookup(node_ids, req_str(s, "node", where), where);
        sup.flow_min = bu.flow_to_pu(req_num(s, "min_m3_per_s", where));
        sup.flow_max = bu.flow_to_pu(req_num(s, "max_m3_per_s", where));
        if (!(sup.flow_min <= sup.flow_max)) fail(where, "flow bounds inverted");
        sup.cost = bu.supply_cost_to_pu(req_num(s, "cost_per_m3", where));
        inst.supplies.push_back(std::move(sup));
    }

    if (j.contains("options")) {
        const json& jo = j["options"];
        if (jo.contains("terminal_linepack_min_m3") &&
            !jo["terminal_linepack_min_m3"].is_null())
            inst.terminal_linepack_min =
                bu.linepack_to_pu(jo["terminal_linepack_min_m3"].get<double>());
    }

    return inst;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInstance("cannot open instance file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    Instance inst = parse_instance(ss.str(), path);
    return inst;
}

} // namespace moegf
