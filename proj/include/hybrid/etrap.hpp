#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "hybrid/constants.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/physcore.hpp"

namespace hybrid {

struct TrapCapacitances {
    double c_rf1 = 0.0;
    double c_rf2 = 0.0;
    double c_cap = 0.0;
    double c_iso1 = 0.0;
    double c_iso2 = 0.0;
    double c_iso3 = 0.0;
    double c_iso4 = 0.0;
};

struct TrapDesign {
    std::string name;
    double v_rf = 0.0;       // V, amplitude
    double omega_rf = 0.0;   // rad/s
    double scale_d = 0.0;    // m
    double beta_geom = 1.0;  // Mathieu geometry prefactor
    double zeta_depth = 6.0;
    double zeta_anharmonic = 0.0;
    double alpha = 1.0;
    double c_trap = 0.0;     // F, rf electrode capacitance driven by the source
    TrapCapacitances capacitances;
    std::optional<double> detection_gap;  // m, distance used in the detection linewidth; defaults to scale_d

    void validate() const {
        require(v_rf > 0.0 && omega_rf > 0.0 && scale_d > 0.0, "trap '" + name + "': V, Omega, d must be positive");
        require(beta_geom > 0.0 && beta_geom <= 1.0, "trap '" + name + "': beta must be in (0, 1]");
        const auto& c = capacitances;
        require(c.c_rf1 >= 0 && c.c_rf2 >= 0 && c.c_cap >= 0 && c.c_iso1 >= 0 && c.c_iso2 >= 0 && c.c_iso3 >= 0 &&
                    c.c_iso4 >= 0,
                "trap '" + name + "': capacitances must be nonnegative");
    }
};

struct FilmWire {
    double width_w = 0.0;             // m
    double thickness_b = 0.0;         // m
    double penetration_lambda = 0.0;  // m
    double critical_density_jc = 0.0; // A/m^2
};

struct MathieuResult {
    double q = 0.0;
    bool stable = true;
};

inline MathieuResult mathieu_q(const Particle& p, const TrapDesign& trap) {
    trap.validate();
    const double q = 8.0 * trap.beta_geom * std::abs(p.charge) * trap.v_rf /
                     (p.mass * trap.scale_d * trap.scale_d * trap.omega_rf * trap.omega_rf);
    return MathieuResult{q, q < 1.0};
}

// Geometry prefactor that puts a species at a target q.
inline double beta_for_q(const Particle& p, double q_target, double v_rf, double omega_rf, double d) {
    return q_target * p.mass * d * d * omega_rf * omega_rf / (8.0 * std::abs(p.charge) * v_rf);
}

struct DepthSecular {
    double depth_ev = 0.0;
    double omega_secular = 0.0;
    double q = 0.0;
};

// Depth D = q V q_m / zeta and the lowest-order secular frequency q_m Omega / (2 sqrt 2).
inline DepthSecular trap_depth_and_secular(const TrapDesign& trap, const Particle& p) {
    const MathieuResult m = mathieu_q(p, trap);
    if (!m.stable)
        throw PreconditionError("trap '" + trap.name + "': unstable, Mathieu q = " + std::to_string(m.q) + " >= 1");
    DepthSecular out;
    out.q = m.q;
    // qV in joules, reported in eV: charge magnitude in units of e times V.
    out.depth_ev = (std::abs(p.charge) / constants::elementary_charge) * trap.v_rf * m.q / trap.zeta_depth;
    out.omega_secular = m.q * trap.omega_rf / (2.0 * std::sqrt(2.0));
    return out;
}

inline double critical_current(const FilmWire& w) {
    require(w.width_w > 0 && w.thickness_b > 0 && w.penetration_lambda > 0 && w.critical_density_jc > 0,
            "critical_current: wire parameters must be positive");
    return w.penetration_lambda * std::sqrt(w.width_w * w.thickness_b) * w.critical_density_jc / 0.74;
}

// Critical density that reproduces a measured I_c for given dimensions and penetration depth.
inline double critical_density_for(double i_c, double width, double thickness, double lambda) {
    return 0.74 * i_c / (lambda * std::sqrt(width * thickness));
}

struct RfPower {
    double dissipation = 0.0;   // W
    double peak_current = 0.0;  // A
};

inline RfPower rf_power_current(double omega_rf, double c_total, double v_rf, double q_factor) {
    require(omega_rf > 0 && c_total > 0 && v_rf > 0 && q_factor > 0, "rf_power_current: arguments must be positive");
    return RfPower{omega_rf * c_total * v_rf * v_rf / q_factor, omega_rf * c_total * v_rf};
}

inline double series(double a, double b) { return (a > 0.0 && b > 0.0) ? a * b / (a + b) : 0.0; }

struct DetectionMetrics {
    double c_total = 0.0;    // F
    double linewidth = 0.0;  // rad/s
};

inline DetectionMetrics detection_metrics(const TrapDesign& trap, const Particle& p, double q_det, double omega0) {
    trap.validate();
    require(q_det > 0.0 && omega0 > 0.0, "detection_metrics: Q and omega0 must be positive");
    const auto& c = trap.capacitances;
    DetectionMetrics out;
    out.c_total = c.c_cap + series(c.c_rf1, c.c_rf2) + series(c.c_iso1, c.c_iso2);
    require(out.c_total > 0.0, "detection_metrics: network has zero capacitance");
    const double d = trap.detection_gap.value_or(trap.scale_d);
    const double qa = p.charge * trap.alpha;
    out.linewidth = q_det * qa * qa / (omega0 * out.c_total * p.mass * d * d);
    return out;
}

struct Crosstalk {
    double dq_rf_rel = 0.0;
    double dq_det_rel = 0.0;
    double epsilon = 0.0;
};

// Relative Q changes from coupling between the rf and detection resonators through arm asymmetry.
inline Crosstalk crosstalk(const TrapDesign& trap, double q_rf, double q_det, double omega0, double omega_rf) {
    trap.validate();
    require(q_rf > 0 && q_det > 0 && omega0 > 0 && omega_rf > 0, "crosstalk: arguments must be positive");
    const auto& c = trap.capacitances;
    Crosstalk out;
    const double arm = c.c_rf1 + c.c_iso1;
    require(arm > 0.0, "crosstalk: C_rf1 + C_iso1 must be positive");
    out.epsilon = (std::abs(c.c_rf1 - c.c_rf2) + std::abs(c.c_iso1 - c.c_iso2)) / arm;
    const double denom = c.c_iso1 + c.c_rf1 + 2.0 * c.c_cap;
    out.dq_rf_rel = (q_rf * omega0 / (q_det * omega_rf)) * (c.c_cap / denom) * out.epsilon;
    out.dq_det_rel = (q_det * omega0 / (q_rf * omega_rf)) * ((c.c_iso1 + c.c_rf1) / denom) * out.epsilon;
    return out;
}

struct ParametricDrive {
    double rate_2xialpha = 0.0;   // rad/s
    double drive_amplitude = 0.0; // m
    double drive_freq = 0.0;      // rad/s
};

// x-z exchange through the quartic pseudopotential term driven at 2 w_x - w_z.
inline ParametricDrive parametric_rate(const TrapDesign& trap, const Particle& p, double omega_x, double omega_z,
                                       double v_drive) {
    trap.validate();
    require(trap.zeta_anharmonic > 0.0, "parametric_rate: design '" + trap.name + "' has no anharmonic prefactor");
    require(omega_x > 0 && omega_z > 0, "parametric_rate: secular frequencies must be positive");
    using constants::hbar;
    const double q = std::abs(p.charge);
    const double m = p.mass;
    const double d = trap.scale_d;
    ParametricDrive out;
    out.rate_2xialpha = trap.zeta_anharmonic * std::sqrt(2.0 * hbar) * q * q * q * trap.v_rf * trap.v_rf *
                        std::abs(v_drive) /
                        (std::pow(m, 3.5) * trap.omega_rf * trap.omega_rf * omega_x * std::pow(omega_z, 2.5) *
                         std::pow(d, 7));
    out.drive_freq = 2.0 * omega_x - omega_z;
    const double detune = std::abs(omega_z * omega_z - out.drive_freq * out.drive_freq);
    out.drive_amplitude = q * std::abs(v_drive) / (d * m * detune);
    return out;
}

// Largest offset from the rf null whose micromotion energy m v^2 stays below E.
inline double micromotion_limit(double e_capture, double q_m, double omega_rf, const Particle& p) {
    require(e_capture > 0 && q_m > 0 && omega_rf > 0, "micromotion_limit: arguments must be positive");
    return std::sqrt(e_capture / p.mass) * 2.0 / (q_m * omega_rf);
}

}  // namespace hybrid
