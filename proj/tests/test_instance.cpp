#include <cmath>
#include <string>

#include "doctest.h"
#include "moegf/instance.hpp"

using namespace moegf;

namespace {

std::string data(const char* name) {
    return std::string(MOEGF_DATA_DIR) + "/" + name;
}

// Minimal valid instance text used as a mutation base for validation tests.
std::string tiny_json(const std::string& patch_key = "",
                      const std::string& patch_val = "") {
    std::string s = R"({
  "name": "tiny",
  "horizon": {"periods": 1, "dt_hours": 1.0},
  "electricity": {
    "buses": [
      {"id": "b0", "demand_mw": 10.0},
      {"id": "b1", "demand_mw": 10.0}
    ],
    "branches": [
      {"id": "l0", "from": "b0", "to": "b1",
       "admittance_pu": {"re": 1.0, "im": -10.0},
       "flow_limit_mw": 100.0,
       "angle_min_rad": -0.5, "angle_max_rad": 0.5}
    ],
    "generators": [
      {"id": "g0", "bus": "b0", "type": "non-gpg",
       "pmin_mw": 0.0, "pmax_mw": 50.0,
       "ramp_down_mw_per_h": 50.0, "ramp_up_mw_per_h": 50.0,
       "cost_linear": 10.0, "initial_mw": 20.0},
      {"id": "g1", "bus": "b1", "type": "gpg",
       "pmin_mw": 0.0, "pmax_mw": 50.0,
       "ramp_down_mw_per_h": 50.0, "ramp_up_mw_per_h": 50.0,
       "efficiency": 0.45, "gas_node": "n1", "initial_mw": 20.0}
    ]
  },
  "gas": {
    "nodes": [
      {"id": "n0", "pressure_min_pa": 3.0e6, "pressure_max_pa": 7.0e6,
       "demand_m3_per_s": 5.0},
      {"id": "n1", "pressure_min_pa": 3.0e6, "pressure_max_pa": 7.0e6,
       "demand_m3_per_s": 5.0}
    ],
    "pipelines": [
      {"id": "p0", "from": "n0", "to": "n1", "diameter_m": 0.9,
       "length_m": 60000.0, "flow_limit_m3_per_s": 60.0,
       "initial_linepack_m3": 1500000.0}
    ],
    "compressors": [
      {"id": "c0", "from": "n0", "to": "n1", "flow_limit_m3_per_s": 40.0,
       "ratio_min": 1.1, "ratio_max": 1.8, "consumption_coeff": 0.01}
    ],
    "supplies": [
      {"id": "s0", "node": "n0", "min_m3_per_s": 0.0, "max_m3_per_s": 50.0,
       "cost_per_m3": 0.02}
    ]
  }
})";
    if (!patch_key.empty()) {
        const auto pos = s.find(patch_key);
        REQUIRE(pos != std::string::npos);
        const auto colon = s.find(':', pos);
        const auto end = s.find_first_of(",}\n", colon);
        s = s.substr(0, colon + 1) + " " + patch_val + s.substr(end);
    }
    return s;
}

} // namespace

TEST_CASE("pipe constants match high-precision references") {
    // References computed independently with 50-digit arithmetic.
    const PipeConstants pc = compute_pipe_constants(0.9, 60000.0, 3.0e6, 7.0e6,
                                                    3.0e6, 7.0e6);
    CHECK(pc.friction == doctest::Approx(0.0097430076532123921).epsilon(1e-12));
    CHECK(pc.compressibility ==
          doctest::Approx(0.89177851314434214884).epsilon(1e-12));
    CHECK(pc.flow_coeff ==
          doctest::Approx(9.3818477951152589062e-9).epsilon(1e-12));
    CHECK(pc.linepack_coeff ==
          doctest::Approx(0.42242912810170837859).epsilon(1e-12));

    const PipeConstants pc2 = compute_pipe_constants(0.5, 60000.0, 3.0e6,
                                                     7.0e6, 3.0e6, 7.0e6);
    CHECK(pc2.friction ==
          doctest::Approx(0.011851788118251064402).epsilon(1e-12));
}

TEST_CASE("per-unit round trips") {
    const BaseUnits b;
    CHECK(b.power_from_pu(b.power_to_pu(137.5)) == doctest::Approx(137.5));
    CHECK(b.flow_from_pu(b.flow_to_pu(42.0)) == doctest::Approx(42.0));
    CHECK(b.pressure_from_pu(b.pressure_to_pu(5.5e6)) ==
          doctest::Approx(5.5e6));
    CHECK(b.linepack_from_pu(b.linepack_to_pu(123456.0)) ==
          doctest::Approx(123456.0));
    // phi|phi| = Phi (pm^2 - pn^2) must hold verbatim in both unit systems.
    const double phi_si = 55.0, pm = 6.2e6, pn = 4.1e6;
    const double Phi_si = phi_si * phi_si / (pm * pm - pn * pn);
    const double lhs_pu = b.flow_to_pu(phi_si) * std::abs(b.flow_to_pu(phi_si));
    const double rhs_pu =
        b.flow_coeff_to_pu(Phi_si) *
        (std::pow(b.pressure_to_pu(pm), 2) - std::pow(b.pressure_to_pu(pn), 2));
    CHECK(lhs_pu == doctest::Approx(rhs_pu).epsilon(1e-12));
    // l = Psi p holds likewise.
    const double Psi_si = 0.42242912810170837859;
    CHECK(b.linepack_to_pu(Psi_si * pm) ==
          doctest::Approx(b.linepack_coeff_to_pu(Psi_si) * b.pressure_to_pu(pm))
              .epsilon(1e-12));
}

TEST_CASE("average pressure degenerates to the common value") {
    for (double p : {2.0, 3.7, 6.9})
        CHECK(average_pressure(p, p) == doctest::Approx(p).epsilon(1e-14));
    // And always lies between the arithmetic mean and the larger endpoint:
    // the flow-weighted profile leans toward the high-pressure end.
    const double a = 3.0, c = 7.0;
    const double avg = average_pressure(a, c);
    CHECK(avg > 0.5 * (a + c));
    CHECK(avg < c);
}

TEST_CASE("valid instance parses with resolved references") {
    const Instance inst = parse_instance(tiny_json());
    REQUIRE(inst.generators.size() == 2);
    CHECK(inst.generators[1].type == GenType::Gpg);
    CHECK(inst.generators[1].gas_node == 1);
    CHECK(inst.branches[0].from == 0);
    CHECK(inst.branches[0].to == 1);
    CHECK(inst.pipelines[0].flow_coeff ==
          doctest::Approx(9.3818477951152589062e-9 * 1e8).epsilon(1e-10));
    CHECK(inst.pipelines[0].linepack_coeff ==
          doctest::Approx(0.42242912810170837859 * 1e4).epsilon(1e-10));
    CHECK(inst.supplies[0].cost == doctest::Approx(0.02 * 100.0));
}

TEST_CASE("validation failures name the offending field") {
    CHECK_THROWS_WITH_AS(parse_instance(tiny_json("\"ratio_min\"", "0.9")),
                         doctest::Contains("ratio_min"), InvalidInstance);
    CHECK_THROWS_WITH_AS(
        parse_instance(tiny_json("\"consumption_coeff\"", "0.2")),
        doctest::Contains("consumption_coeff"), InvalidInstance);
    CHECK_THROWS_WITH_AS(
        parse_instance(tiny_json("\"pressure_min_pa\"", "-1.0")),
        doctest::Contains("pressure_min_pa"), InvalidInstance);
    CHECK_THROWS_WITH_AS(
        parse_instance(tiny_json("\"initial_linepack_m3\"", "1.0")),
        doctest::Contains("initial_linepack_m3"), InvalidInstance);
    // Dangling reference.
    CHECK_THROWS_WITH_AS(parse_instance(tiny_json("\"gas_node\"", "\"nope\"")),
                         doctest::Contains("nope"), InvalidInstance);
}

TEST_CASE("bundled instances load with the expected census") {
    const Instance nano = load_instance(data("nano.json"));
    CHECK(nano.buses.size() == 2);
    CHECK(nano.branches.size() == 1);
    CHECK(nano.generators.size() == 2);
    CHECK(nano.nodes.size() == 2);
    CHECK(nano.pipelines.size() == 1);
    CHECK(nano.nonpipes.size() == 1);
    CHECK(nano.supplies.size() == 1);
    CHECK(nano.horizon.periods == 2);
    CHECK(nano.terminal_linepack_min.has_value());

    const Instance a = load_instance(data("case_a.json"));
    CHECK(a.buses.size() == 5);
    CHECK(a.branches.size() == 6);
    CHECK(a.nodes.size() == 7);
    CHECK(a.pipelines.size() == 4);
    CHECK(a.nonpipes.size() == 2);
    CHECK(a.horizon.periods == 6);

    const Instance b = load_instance(data("case_b.json"));
    CHECK(b.buses.size() == 14);
    CHECK(b.branches.size() == 20);
    CHECK(b.nodes.size() == 25);
    CHECK(b.pipelines.size() == 24);
    CHECK(b.nonpipes.size() == 6);
    CHECK(b.supplies.size() == 6);
}
