#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "moegf/units.hpp"

namespace moegf {

struct InvalidInstance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Derived constants of a pipeline. SI units.
struct PipeConstants {
    double friction = 0.0;        // Weymouth friction factor, dimensionless
    double compressibility = 0.0; // Z, dimensionless
    double flow_coeff = 0.0;      // Phi, SI composite
    double linepack_coeff = 0.0;  // Psi, m^3/Pa
};

struct Bus {
    std::string id;
    double shunt_conductance = 0.0;  // pu
    std::vector<double> demand;      // per period, pu after load
};

struct Branch {
    std::string id;
    int from = -1;
    int to = -1;
    std::complex<double> admittance;  // series Y, pu
    double tap_ratio = 1.0;
    double tap_shift = 0.0;  // rad
    double flow_limit = 0.0; // pu
    double angle_min = 0.0;  // rad
    double angle_max = 0.0;
    // Derived strengthened-DC coefficients.
    double g_ij = 0.0, b_ij = 0.0, g_ji = 0.0, b_ji = 0.0;
};

enum class GenType { NonGpg, Gpg };

struct Generator {
    std::string id;
    int bus = -1;
    GenType type = GenType::NonGpg;
    double p_min = 0.0, p_max = 0.0;      // pu
    double ramp_down = 0.0, ramp_up = 0.0;// pu per hour
    double cost_quad = 0.0;               // $ / (pu h)^2
    double cost_lin = 0.0;                // $ / (pu h)
    double cost_const = 0.0;              // $ / h
    double efficiency = 1.0;              // GPG only
    int gas_node = -1;                    // GPG only
    double initial_p = 0.0;               // pu, generation at t0-1
};

struct GasNode {
    std::string id;
    double pressure_min = 0.0, pressure_max = 0.0;  // pu
    std::vector<double> demand;                     // per period, pu
};

struct Pipeline {
    std::string id;
    int from = -1;
    int to = -1;
    double diameter = 0.0;   // m
    double length = 0.0;     // m
    double flow_limit = 0.0; // pu
    double initial_linepack = 0.0;  // pu, at t0-1
    PipeConstants constants;        // SI
    double flow_coeff = 0.0;        // Phi, pu
    double linepack_coeff = 0.0;    // Psi, pu
};

// Compressor or pressure regulator.
struct NonPipe {
    std::string id;
    int from = -1;
    int to = -1;
    bool is_compressor = true;
    double flow_limit = 0.0;   // pu
    double ratio_min = 1.0, ratio_max = 1.0;
    double consumption_coeff = 0.0;  // nu, compressors only
};

struct Supply {
    std::string id;
    int node = -1;
    double flow_min = 0.0, flow_max = 0.0;  // pu
    double cost = 0.0;                      // $ s / pu
};

struct Horizon {
    int periods = 1;
    double dt_hours = 1.0;
    double dtau_seconds() const { return 3600.0 * dt_hours; }
};

struct Instance {
    std::string name;
    Horizon horizon;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;
    std::vector<GasNode> nodes;
    std::vector<Pipeline> pipelines;
    std::vector<NonPipe> nonpipes;
    std::vector<Supply> supplies;
    GasConstants gas;
    BaseUnits base;
    // Optional end-of-horizon bound on total linepack (pu). Off by default.
    std::optional<double> terminal_linepack_min;
};

// Weymouth friction, compressibility, flow and linepack coefficients from
// pipe geometry and the node pressure bounds (SI pascals).
PipeConstants compute_pipe_constants(double diameter_m, double length_m,
                                     double pmin_from_pa, double pmax_from_pa,
                                     double pmin_to_pa, double pmax_to_pa,
                                     const GasConstants& gas = {});

// Average pressure across a pipe: (2/3)(pm + pn - pm*pn/(pm+pn)).
double average_pressure(double pm, double pn);

// Loads a JSON instance file (SI units on disk), validates all invariants and
// returns a fully nondimensionalized Instance.
Instance load_instance(const std::string& path);
Instance parse_instance(const std::string& json_text, const std::string& origin = "<memory>");

} // namespace moegf
