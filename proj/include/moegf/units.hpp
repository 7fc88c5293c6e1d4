#pragma once

namespace moegf {

// Physical constants for natural gas at standard conditions.
struct GasConstants {
    double R = 478.42;      // specific gas constant, J/kg/K
    double rho = 0.735;     // density, kg/m^3
    double T = 288.15;      // temperature, K
    double S = 0.6;         // specific gravity, dimensionless
    double HHV = 38.07;     // higher heating value, MJ/m^3
};

// Base quantities for nondimensionalization. All solver-side quantities are
// per-unit; conversion happens only at the instance boundary and in reports.
struct BaseUnits {
    double power_mw = 100.0;       // base apparent power, MVA (== MW here)
    double flow_m3s = 100.0;       // base volumetric flow rate, m^3/s
    double pressure_pa = 1.0e6;    // base pressure, Pa
    double linepack_m3 = 100.0;    // base linepack volume, m^3

    double power_to_pu(double mw) const { return mw / power_mw; }
    double power_from_pu(double pu) const { return pu * power_mw; }
    double flow_to_pu(double m3s) const { return m3s / flow_m3s; }
    double flow_from_pu(double pu) const { return pu * flow_m3s; }
    double pressure_to_pu(double pa) const { return pa / pressure_pa; }
    double pressure_from_pu(double pu) const { return pu * pressure_pa; }
    double linepack_to_pu(double m3) const { return m3 / linepack_m3; }
    double linepack_from_pu(double pu) const { return pu * linepack_m3; }

    // Flow coefficient: phi|phi| = Phi (pm^2 - pn^2).
    double flow_coeff_to_pu(double si) const {
        return si * pressure_pa * pressure_pa / (flow_m3s * flow_m3s);
    }
    // Linepack coefficient: l = Psi * p_avg.
    double linepack_coeff_to_pu(double si) const {
        return si * pressure_pa / linepack_m3;
    }
    // Generator cost coefficients act on (p_MW * dt_h) terms.
    double cost_quad_to_pu(double si) const { return si * power_mw * power_mw; }
    double cost_lin_to_pu(double si) const { return si * power_mw; }
    // Supply cost acts on (phi_m3s * dtau_s).
    double supply_cost_to_pu(double si) const { return si * flow_m3s; }
};

} // namespace moegf
