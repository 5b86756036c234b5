#include <cmath>

#include <gtest/gtest.h>

#include "hybrid/etrap.hpp"

using namespace hybrid;

namespace {

const Particle e = particle_lookup("electron");

TrapDesign design_b() {
    TrapDesign t;
    t.name = "b";
    t.v_rf = 50.0;
    t.omega_rf = hz_to_rad(7.15e9);
    t.scale_d = 200e-6;
    t.beta_geom = beta_for_q(e, 0.6, t.v_rf, t.omega_rf, t.scale_d);
    t.zeta_depth = t.v_rf * 0.6 / 0.9;
    t.c_trap = 108e-15;
    t.capacitances = {146e-15, 146e-15, 35e-15, 146e-15, 146e-15, 0.0, 0.0};
    return t;
}

}  // namespace

TEST(Etrap, MathieuQOracle) {
    TrapDesign t = design_b();
    t.beta_geom = 0.5;
    const long double q = 8.0L * 0.5L * constants::elementary_charge * 50.0L /
                          (static_cast<long double>(constants::electron_mass) * 4e-8L * t.omega_rf * t.omega_rf);
    EXPECT_NEAR(mathieu_q(e, t).q / static_cast<double>(q), 1.0, 1e-12);
}

TEST(Etrap, CalibratedDesignReproducesTargets) {
    const DepthSecular ds = trap_depth_and_secular(design_b(), e);
    EXPECT_NEAR(ds.q, 0.6, 1e-12);
    EXPECT_NEAR(ds.depth_ev, 0.9, 1e-12);
    EXPECT_NEAR(ds.omega_secular, 0.6 * hz_to_rad(7.15e9) / (2.0 * std::sqrt(2.0)), 1e-3);
}

TEST(Etrap, UnstableTrapRejected) {
    TrapDesign t = design_b();
    t.beta_geom = 1.0;
    t.v_rf = 5000.0;
    EXPECT_FALSE(mathieu_q(e, t).stable);
    EXPECT_THROW(trap_depth_and_secular(t, e), PreconditionError);
}

TEST(Etrap, CriticalCurrentCalibrationRoundTrips) {
    const double jc = critical_density_for(0.221, 10e-6, 100e-9, 39e-9);
    const double ic = critical_current(FilmWire{10e-6, 100e-9, 39e-9, jc});
    EXPECT_NEAR(ic, 0.221, 1e-15);
    // I_c scales with sqrt(w b).
    EXPECT_NEAR(critical_current(FilmWire{40e-6, 100e-9, 39e-9, jc}) / ic, 2.0, 1e-12);
}

TEST(Etrap, DissipationAndCurrent) {
    const RfPower p = rf_power_current(hz_to_rad(9e9), 150e-15, 50.0, 1e4);
    EXPECT_NEAR(p.dissipation, hz_to_rad(9e9) * 150e-15 * 2500.0 / 1e4, 1e-15);
    EXPECT_NEAR(p.dissipation, 2e-3, 0.15 * 2e-3);
    EXPECT_NEAR(rf_power_current(hz_to_rad(9e9), 150e-15, 100.0, 1e4).dissipation / p.dissipation, 4.0, 1e-12);
    EXPECT_NEAR(rf_power_current(hz_to_rad(7.15e9), 108e-15, 50.0, 1.0).peak_current, 0.2426, 1e-3);
}

TEST(Etrap, DetectionNetwork) {
    const TrapDesign t = design_b();
    const DetectionMetrics d = detection_metrics(t, e, 1000.0, hz_to_rad(1e9));
    EXPECT_NEAR(d.c_total, 35e-15 + 73e-15 + 73e-15, 1e-27);
    const double oracle = 1000.0 * constants::elementary_charge * constants::elementary_charge /
                          (hz_to_rad(1e9) * d.c_total * constants::electron_mass * 4e-8);
    EXPECT_NEAR(d.linewidth / oracle, 1.0, 1e-12);
    EXPECT_NEAR(rad_to_hz(d.linewidth) / 100e3, 1.0, 0.10);
}

TEST(Etrap, CrosstalkVanishesForSymmetricArms) {
    TrapDesign t = design_b();
    const Crosstalk x0 = crosstalk(t, 1e4, 1e3, hz_to_rad(1e9), t.omega_rf);
    EXPECT_EQ(x0.epsilon, 0.0);
    EXPECT_EQ(x0.dq_rf_rel, 0.0);
    EXPECT_EQ(x0.dq_det_rel, 0.0);
    t.capacitances.c_rf2 *= 1.02;
    const Crosstalk x1 = crosstalk(t, 1e4, 1e3, hz_to_rad(1e9), t.omega_rf);
    EXPECT_GT(x1.epsilon, 0.0);
    t.capacitances.c_rf2 = t.capacitances.c_rf1 * 1.04;
    EXPECT_NEAR(crosstalk(t, 1e4, 1e3, hz_to_rad(1e9), t.omega_rf).dq_rf_rel / x1.dq_rf_rel, 2.0, 1e-9);
}

TEST(Etrap, ParametricRateScalings) {
    TrapDesign t;
    t.name = "a";
    t.v_rf = 50.0;
    t.omega_rf = hz_to_rad(9e9);
    t.scale_d = 100e-6;
    t.zeta_anharmonic = 0.166;
    const double wx = hz_to_rad(0.6e9), wz = hz_to_rad(1.2e9);
    const ParametricDrive r1 = parametric_rate(t, e, wx, wz, 1.0);
    EXPECT_NEAR(rad_to_hz(r1.rate_2xialpha) / 0.92e6, 1.0, 0.05);
    EXPECT_NEAR(parametric_rate(t, e, wx, wz, 0.109).rate_2xialpha / r1.rate_2xialpha, 0.109, 1e-12);
    EXPECT_NEAR(r1.drive_freq, 2.0 * wx - wz, 1e-3);
    t.scale_d *= 2.0;
    EXPECT_NEAR(parametric_rate(t, e, wx, wz, 1.0).rate_2xialpha / r1.rate_2xialpha, std::pow(2.0, -7), 1e-12);
    t.zeta_anharmonic = 0.0;
    EXPECT_THROW(parametric_rate(t, e, wx, wz, 1.0), PreconditionError);
}

TEST(Etrap, MicromotionLimit) {
    const double x = micromotion_limit(ev_to_joule(1e-3), 0.4, hz_to_rad(9e9), e);
    // Micromotion velocity q Omega x / 2 at that offset carries energy m v^2 = E.
    const double v = 0.4 * hz_to_rad(9e9) * x / 2.0;
    EXPECT_NEAR(constants::electron_mass * v * v / ev_to_joule(1e-3), 1.0, 1e-12);
}
