#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hybrid/circuits.hpp"

using namespace hybrid;

namespace {
const Particle e = particle_lookup("electron");
const Particle be = particle_lookup("9Be+");
}  // namespace

TEST(Circuits, BvdReproducesMechanicalResonance) {
    const double m = 1e-12, w = constants::two_pi * 5e6, beta = 3e-4, gamma = 1e-6;
    const BVDEquivalent b = bvd_equivalent(m, gamma, w, beta);
    EXPECT_NEAR(b.resonance() / w, 1.0, 1e-12);
    EXPECT_NEAR(b.series_inductance, m / (beta * beta), 1e-12 * b.series_inductance);
    EXPECT_NEAR(b.series_resistance, gamma / (beta * beta), 1e-12 * b.series_resistance);
    EXPECT_THROW(bvd_equivalent(m, gamma, w, 0.0), PreconditionError);
}

TEST(Circuits, ParticleInductance) {
    const double d = 50e-6;
    const BVDEquivalent b = particle_bvd(be, d, 1.0, constants::two_pi * 10e6);
    const long double q = constants::elementary_charge;
    const long double oracle = static_cast<long double>(be.mass) * d * d / (q * q);
    EXPECT_NEAR(b.series_inductance / static_cast<double>(oracle), 1.0, 1e-12);
}

TEST(Circuits, ElectronCouplingOracle) {
    const long double q = constants::elementary_charge, m = constants::electron_mass;
    const long double oracle = q / (2.0L * 50e-6L) * std::sqrt(1.0L / (m * 50e-15L));
    EXPECT_NEAR(particle_resonator_coupling(e, 50e-6, 1.0, 50e-15) / static_cast<double>(oracle), 1.0, 1e-12);
    EXPECT_NEAR(rad_to_hz(particle_resonator_coupling(e, 50e-6, 1.0, 50e-15)), 1.19e6, 0.01e6);
}

TEST(Circuits, CouplingScalings) {
    const double g1 = particle_resonator_coupling(be, 50e-6, 1.0, 50e-15);
    EXPECT_NEAR(particle_resonator_coupling(be, 50e-6, 1.0, 50e-15, 0.0, 4) / g1, 2.0, 1e-12);
    EXPECT_NEAR(particle_resonator_coupling(be, 100e-6, 1.0, 50e-15) / g1, 0.5, 1e-12);
    EXPECT_NEAR(particle_resonator_coupling(be, 50e-6, 0.5, 50e-15) / g1, 0.5, 1e-12);
    EXPECT_NEAR(particle_resonator_coupling(be, 50e-6, 1.0, 200e-15) / g1, 0.5, 1e-12);
}

TEST(Circuits, LargeTrapCapacitanceLimitOfCapacitiveForm) {
    // C_p << C_trap: (w/2) sqrt(C_p C_r / ((C_p + C) (C_r + C))) with C_r -> inf gives the particle form.
    const double w = constants::two_pi * 10e6, d = 50e-6, ct = 50e-15;
    const double cp = particle_bvd(be, d, 1.0, w).series_capacitance;
    const double g = capacitive_coupling(cp, 1e3, ct, w);
    EXPECT_NEAR(g / particle_resonator_coupling(be, d, 1.0, ct), 1.0, 1e-5);
}

TEST(Circuits, QuarterWaveLumpedEquivalent) {
    const double w = constants::two_pi * 10e6;
    const LumpedLC lc = quarterwave_lumped(50.0, w);
    EXPECT_NEAR(lc.capacitance, 250e-12, 0.5e-12);
    EXPECT_NEAR(1.0 / std::sqrt(lc.inductance * lc.capacitance) / w, 1.0, 1e-12);
}

TEST(Circuits, QuarterWavePenaltyIsCapacitanceRatio) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double w = constants::two_pi * (1e6 + 1e8 * u(rng));
        const double ct = 1e-15 + 1e-12 * u(rng), cr = 1e-12 + 1e-9 * u(rng);
        const double cp = particle_bvd(be, 50e-6, 1.0, w).series_capacitance;
        const double ratio = particle_resonator_coupling(be, 50e-6, 1.0, ct) / quarterwave_coupling(cp, cr, ct, w);
        EXPECT_NEAR(ratio / std::sqrt((cr + ct) / ct), 1.0, 1e-10);
    }
}

TEST(Circuits, SpringCouplingResonantAndModulated) {
    const double k = 1e-3, w = 1e6, m1 = 1e-25, m2 = 1e-20;
    EXPECT_NEAR(spring_coupling(k, w, w, m1, m2), k / (2.0 * w * std::sqrt(m1 * m2)), 1e-9);
    EXPECT_NEAR(parametric_spring_coupling(k, w, w, m1, m2, 1.0) / spring_coupling(k, w, w, m1, m2), 0.5, 1e-12);
}

TEST(Circuits, MinimalQualityFactorGivesOneSwap) {
    const double w = constants::two_pi * 10e6, g = hz_to_rad(9e3);
    for (auto conv : {SwapConvention::pi_over_g, SwapConvention::two_pi_over_g}) {
        const double q = min_quality_factor(g, w, Environment{4.0}, 1.0, conv);
        EXPECT_NEAR(swap_count(g, q, w, Environment{4.0}, conv), 1.0, 1e-12);
    }
    EXPECT_NEAR(min_quality_factor(g, w, Environment{4.0}, 1.0, SwapConvention::two_pi_over_g) /
                    min_quality_factor(g, w, Environment{4.0}, 1.0, SwapConvention::pi_over_g),
                2.0, 1e-12);
}

TEST(Circuits, MinimalQualityFactorTableAnchors) {
    const double g = particle_resonator_coupling(be, 50e-6, 1.0, 50e-15);
    const double w = constants::two_pi * 10e6;
    const auto conv = SwapConvention::two_pi_over_g;
    EXPECT_NEAR(min_quality_factor(g, w, Environment{4.0}, 1.0, conv) / 56e6, 1.0, 0.05);
    EXPECT_NEAR(min_quality_factor(g, w, Environment{0.05}, 1.0, conv) / 7e5, 1.0, 0.05);
}

TEST(Circuits, RegimeLabels) {
    const double w = constants::two_pi * 10e6, g = hz_to_rad(9e3);
    const double q1 = min_quality_factor(g, w, Environment{4.0});
    EXPECT_EQ(swap_metric(g, 20.0 * q1, w, Environment{4.0}).regime_label, Regime::strong_quantum);
    EXPECT_EQ(swap_metric(g, 2.0 * q1, w, Environment{4.0}).regime_label, Regime::marginal);
    EXPECT_EQ(swap_metric(g, 0.5 * q1, w, Environment{4.0}).regime_label, Regime::classical);
}

TEST(Circuits, HighTemperatureShortcutAgreesWithExactOccupation) {
    // N = g Q / (pi (n + 1) w) -> (g/2pi) Q / D with D = kT / (2 hbar) when n >> 1.
    const double w = constants::two_pi * 1e6, g = hz_to_rad(100.0), q = 1e6;
    const double exact = swap_count(g, q, w, Environment{4.0});
    const double shortcut = rad_to_hz(g) * q / high_temperature_swap_denominator_hz(Environment{4.0});
    EXPECT_NEAR(exact / shortcut, 1.0, 1e-3);
}

TEST(Circuits, CoolingLimitAnchors) {
    const CoolingLimit hot = cooling_limit(hz_to_rad(15.0), 1e9, Environment{4.0});
    EXPECT_NEAR(hot.coherence_time, constants::hbar * 1e9 / (constants::boltzmann * 4.0), 1e-15);
    EXPECT_NEAR(hot.coherence_time, 1.91e-3, 0.01e-3);
    const CoolingLimit cold = cooling_limit(hz_to_rad(15.0), 1e9, Environment{0.05});
    EXPECT_NEAR(hot.steady_quanta / cold.steady_quanta, 80.0, 1e-9);
}
