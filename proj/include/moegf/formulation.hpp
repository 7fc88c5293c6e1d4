#pragma once

#include <span>
#include <vector>

#include "moegf/instance.hpp"
#include "moegf/lp.hpp"

namespace moegf {

enum class VarKind : int {
    GenP = 0,        // active power per generator
    BranchFlowFwd,   // p_ij per branch
    BranchFlowRev,   // p_ji per branch
    BusAngle,        // theta per bus (bus 0 is the reference)
    BranchAngle,     // theta_ij = theta_i - theta_j, per branch
    NodePressure,    // per gas node
    PipeAvgPressure, // per pipeline
    PipeFlow,        // average flow per pipeline
    PipeLinepack,    // per pipeline
    PipeFlowIn,
    PipeFlowOut,
    NonPipeFlow,     // per compressor/regulator
    NonPipeBinary,   // z per compressor/regulator
    CompFlowPlus,    // per compressor
    CompFlowMinus,
    CompTrapped,
    GpgFuel,         // per GPG (dense over all generators for simplicity of indexing)
    SupplyFlow,      // per supply
    KindCount
};

struct VariableSpace {
    int periods = 0;
    std::vector<int> offset;       // per kind
    std::vector<int> element_count;// per kind
    std::vector<double> lower, upper;

    int size() const { return (int)lower.size(); }
    int index(VarKind k, int element, int t) const {
        return offset[(int)k] + element * periods + t;
    }
    int count(VarKind k) const { return element_count[(int)k] * periods; }
};

// Provenance of a linear row, named after what it encodes.
enum class RowTag : int {
    RampUp, RampDown, AngleDiffDef, Kcl, GpgCoupling, GasNodal, AvgFlow,
    LinepackEq, Continuity, CompSplit, CompTrap, CompPlusCap, CompMinusCap,
    NonPipeFlowCap, NonPipeFlowFloor, BoostUpper, BoostLower, NoBoostUpper,
    NoBoostLower, TerminalLinepack,
    // Tags used by LP assemblies downstream:
    ElectricTangent, ElectricHalfspace, GasTangent, EnvelopeCut, PwlCost,
    StepPenalty, SteeringPenalty, MicpAux, MicpCut
};

enum class ResidualKind { ElectricFwd, ElectricRev, GasMotion, GasAvgPressure };

// One nonlinear equality h_i(x) = 0 of the problem, with analytic gradient.
// Electric (flow vs. quadratic-loss angle terms):
//   fwd: h = 0.5 g theta^2 + b theta - p_ij
//   rev: h = 0.5 g theta^2 - b theta - p_ji
// Gas:
//   motion:       h = phi|phi| - Phi (pm^2 - pn^2)
//   avg pressure: h = (2/3)(pm + pn - pm pn/(pm+pn)) - ptilde
struct Residual {
    ResidualKind kind;
    int element = -1;  // branch or pipeline index
    int period = -1;
    int v_flow = -1;   // p_ij / p_ji / phi_mn
    int v_angle = -1;  // theta_ij (electric)
    int v_pm = -1, v_pn = -1, v_pavg = -1;  // gas
    double g = 0.0, b = 0.0;  // electric coefficients
    double flow_coeff = 0.0;  // Phi (gas motion)
};

struct ResidualEval {
    double value = 0.0;
    std::vector<std::pair<int, double>> grad;
};

struct ResidualDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProblemModel {
    Instance instance;
    VariableSpace vars;
    std::vector<LpRow> rows;          // all linear constraints, tagged
    std::vector<Residual> residuals;  // electric block first, then gas
    int num_electric = 0;
    std::vector<int> binaries;        // z variable indices, one per (non-pipe, t)
};

ProblemModel build_moegf(const Instance& instance);

ResidualEval eval_residual(const Residual& r, std::span<const double> x);

// First-order expansion at x:  grad(x)^T y  (sense)  grad(x)^T x - h(x).
LpRow linearize_residual(const Residual& r, std::span<const double> x,
                         RowSense sense);

// Exact objective of Problem (1) at x, in dollars.
double objective_value(const ProblemModel& model, std::span<const double> x);

// Clamp x into the variable box.
void project_into_bounds(const VariableSpace& vars, std::vector<double>& x);

// LP-text dump of the model's linear skeleton (rows + bounds).
std::string dump_model_lp_text(const ProblemModel& model);

} // namespace moegf
