#pragma once

#include <cmath>
#include <string>

#include "hybrid/constants.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/physcore.hpp"

namespace hybrid {

struct BVDEquivalent {
    double series_inductance = 0.0;   // H
    double series_resistance = 0.0;   // ohm
    double series_capacitance = 0.0;  // F
    double shunt_capacitance = 0.0;   // F

    double resonance() const { return 1.0 / std::sqrt(series_inductance * series_capacitance); }
};

enum class Regime { strong_quantum, marginal, classical };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::strong_quantum: return "strong-quantum";
        case Regime::marginal: return "marginal";
        case Regime::classical: return "classical";
    }
    return "?";
}

// Swap time used when counting exchanges per thermal quantum.
// pi_over_g is the default; two_pi_over_g reproduces the published Q_min table.
enum class SwapConvention { pi_over_g, two_pi_over_g };

inline const char* to_string(SwapConvention c) {
    return c == SwapConvention::pi_over_g ? "pi/g" : "2pi/g";
}

struct RegimeThresholds {
    double strong = 10.0;
    double marginal = 1.0;
};

struct CouplingReport {
    double coupling_rate_g = 0.0;  // rad/s
    double swap_count_N = 0.0;
    double min_quality_factor = 0.0;  // Q giving N = 1
    Regime regime_label = Regime::classical;
};

// Electromechanical transducer with force F = beta V: L = m/b^2, R = gamma/b^2, C = b^2/(m w^2).
inline BVDEquivalent bvd_equivalent(double mass, double friction, double omega0, double beta,
                                    double shunt_c = 0.0) {
    require(mass > 0.0, "bvd_equivalent: mass must be positive");
    require(omega0 > 0.0, "bvd_equivalent: omega0 must be positive");
    require(friction >= 0.0 && shunt_c >= 0.0, "bvd_equivalent: friction and shunt must be >= 0");
    if (beta == 0.0) throw PreconditionError("bvd_equivalent: beta = 0, no electromechanical transduction");
    const double b2 = beta * beta;
    return BVDEquivalent{mass / b2, friction / b2, b2 / (mass * omega0 * omega0), shunt_c};
}

inline BVDEquivalent particle_bvd(const Particle& p, double gap_d, double alpha, double omega0) {
    require(gap_d > 0.0, "particle_bvd: gap must be positive");
    require(alpha > 0.0 && alpha <= 1.0, "particle_bvd: alpha must be in (0, 1]");
    require(omega0 > 0.0, "particle_bvd: omega0 must be positive");
    const double qa = alpha * p.charge;
    const double L = p.mass * gap_d * gap_d / (qa * qa);
    return BVDEquivalent{L, 0.0, 1.0 / (L * omega0 * omega0), 0.0};
}

// eta = 1 and omega1 == omega2 selects the resonant spring; otherwise the modulated-spring form.
inline double spring_coupling(double k, double omega1, double omega2, double m1, double m2,
                              double eta = 1.0) {
    require(k > 0.0 && omega1 > 0.0 && omega2 > 0.0 && m1 > 0.0 && m2 > 0.0,
            "spring_coupling: all arguments must be positive");
    if (omega1 == omega2) return k / (2.0 * omega1 * std::sqrt(m1 * m2));
    require(eta > 0.0 && eta <= 1.0, "spring_coupling: eta must be in (0, 1]");
    return eta * k / (4.0 * std::sqrt(omega1 * omega2 * m1 * m2));
}

// Modulated spring evaluated at equal frequencies, for comparison with the resonant case.
inline double parametric_spring_coupling(double k, double omega1, double omega2, double m1,
                                         double m2, double eta) {
    require(k > 0.0 && omega1 > 0.0 && omega2 > 0.0 && m1 > 0.0 && m2 > 0.0,
            "parametric_spring_coupling: all arguments must be positive");
    require(eta > 0.0 && eta <= 1.0, "parametric_spring_coupling: eta must be in (0, 1]");
    return eta * k / (4.0 * std::sqrt(omega1 * omega2 * m1 * m2));
}

inline double capacitive_coupling(double c1, double c2, double c_shared, double omega0) {
    require(c1 > 0.0 && c2 > 0.0 && c_shared > 0.0, "capacitive_coupling: capacitances must be positive");
    return 0.5 * omega0 * std::sqrt(c1 * c2 / ((c1 + c_shared) * (c2 + c_shared)));
}

// Large shunt limit: g = (aq/2d) sqrt(N/(m C_trap)); N particles act as charge Nq, mass Nm.
inline double particle_resonator_coupling(const Particle& p, double gap_d, double alpha,
                                          double c_trap, double omega0 = 0.0, int n_particles = 1) {
    (void)omega0;  // cancels between C_p and the capacitive form
    require(n_particles >= 1, "particle_resonator_coupling: n_particles must be >= 1");
    require(gap_d > 0.0 && c_trap > 0.0, "particle_resonator_coupling: gap and c_trap must be positive");
    return alpha * std::abs(p.charge) / (2.0 * gap_d) *
           std::sqrt(static_cast<double>(n_particles) / (p.mass * c_trap));
}

struct LumpedLC {
    double inductance = 0.0;
    double capacitance = 0.0;
};

inline LumpedLC quarterwave_lumped(double z0, double omega0) {
    require(z0 > 0.0 && omega0 > 0.0, "quarterwave_lumped: z0 and omega0 must be positive");
    const double C = constants::pi / (4.0 * omega0 * z0);
    return LumpedLC{1.0 / (omega0 * omega0 * C), C};
}

// Particle across C_trap loaded by the resonator's own capacitance.
inline double quarterwave_coupling(double c_particle, double c_resonator, double c_trap, double omega0) {
    require(c_particle > 0.0 && c_resonator > 0.0 && c_trap > 0.0,
            "quarterwave_coupling: capacitances must be positive");
    return 0.5 * omega0 * std::sqrt(c_particle / (c_resonator + c_trap));
}

inline double swap_count(double g, double q_factor, double omega0, const Environment& env,
                         SwapConvention conv = SwapConvention::pi_over_g) {
    const double n_th = thermal_occupation(omega0, env);
    const double swap_phase = conv == SwapConvention::pi_over_g ? constants::pi : constants::two_pi;
    return g * q_factor / (swap_phase * (n_th + 1.0) * omega0);
}

inline double min_quality_factor(double g, double omega0, const Environment& env, double n_target = 1.0,
                                 SwapConvention conv = SwapConvention::pi_over_g) {
    require(n_target >= 1.0, "min_quality_factor: n_target must be >= 1");
    require(g > 0.0, "min_quality_factor: g must be positive");
    const double n_th = thermal_occupation(omega0, env);
    const double swap_phase = conv == SwapConvention::pi_over_g ? constants::pi : constants::two_pi;
    return n_target * swap_phase * (n_th + 1.0) * omega0 / g;
}

inline CouplingReport swap_metric(double g, double q_factor, double omega0, const Environment& env,
                                  SwapConvention conv = SwapConvention::pi_over_g,
                                  RegimeThresholds thresholds = {}) {
    require(g > 0.0 && q_factor > 0.0 && omega0 > 0.0, "swap_metric: arguments must be positive");
    CouplingReport r;
    r.coupling_rate_g = g;
    r.swap_count_N = swap_count(g, q_factor, omega0, env, conv);
    r.min_quality_factor = min_quality_factor(g, omega0, env, 1.0, conv);
    if (r.swap_count_N >= thresholds.strong)
        r.regime_label = Regime::strong_quantum;
    else if (r.swap_count_N >= thresholds.marginal)
        r.regime_label = Regime::marginal;
    else
        r.regime_label = Regime::classical;
    return r;
}

// High-temperature shortcut N ~ (g/2pi) Q / D with D = kT/(2 hbar), in Hz.
inline double high_temperature_swap_denominator_hz(const Environment& env) {
    return constants::boltzmann * env.temperature / (2.0 * constants::hbar);
}

struct CoolingLimit {
    double steady_quanta = 0.0;
    double coherence_time = 0.0;  // s
};

inline CoolingLimit cooling_limit(double g, double q_factor, const Environment& env) {
    require(g > 0.0 && q_factor > 0.0 && env.temperature > 0.0, "cooling_limit: arguments must be positive");
    const double kT = constants::boltzmann * env.temperature;
    CoolingLimit out;
    out.steady_quanta = constants::pi * (1.0 - std::exp(-1.0)) * kT / (constants::hbar * g * q_factor);
    out.coherence_time = constants::hbar * q_factor / kT;
    return out;
}

}  // namespace hybrid
