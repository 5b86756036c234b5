#include <cmath>

#include <gtest/gtest.h>

#include "hybrid/loading.hpp"

using namespace hybrid;

TEST(Loading, HeliumHeatingTimeAnchor) {
    const LoadingRates r = rates(LoadingConfig{});
    EXPECT_GE(1.0 / r.gamma_he, 1.3e-6 * 0.85);
    EXPECT_LE(1.0 / r.gamma_he, 1.5e-6);
}

TEST(Loading, RatesMatchClosedForms) {
    LoadingConfig c;
    c.current_density_j = 37.0;
    c.helium_pressure = 3e-3;
    const LoadingRates r = rates(c);
    using namespace constants;
    const long double n = c.helium_pressure / (static_cast<long double>(boltzmann) * c.gas_temperature);
    const long double gi = c.current_density_j * static_cast<long double>(pi) * c.beam_radius_r0 * c.beam_radius_r0 /
                           elementary_charge * n * c.trap_radius_l * c.sigma_ion;
    const long double ge = c.current_density_j * c.beam_radius_r0 * static_cast<long double>(elementary_charge) /
                           (4.0L * epsilon0 * elementary_charge * c.trap_depth);
    EXPECT_NEAR(r.gamma_ion / static_cast<double>(gi), 1.0, 1e-12);
    EXPECT_NEAR(r.gamma_e / static_cast<double>(ge), 1.0, 1e-12);
    EXPECT_NEAR(r.n_steady, r.gamma_ion / (r.gamma_e + r.gamma_he), 1e-15 * r.n_steady);
}

TEST(Loading, NoBeamNoElectrons) {
    LoadingConfig c;
    c.current_density_j = 0.0;
    const LoadingRates r = rates(c);
    EXPECT_EQ(r.gamma_ion, 0.0);
    EXPECT_EQ(r.gamma_e, 0.0);
    EXPECT_EQ(r.n_steady, 0.0);
}

TEST(Loading, SteadyStateLinearInPressureWhenBeamLossDominates) {
    LoadingConfig c;
    c.current_density_j = 100.0;
    c.helium_pressure = 1e-4;
    const double n1 = rates(c).n_steady;
    c.helium_pressure = 2e-4;
    EXPECT_NEAR(rates(c).n_steady / n1, 2.0, 0.01);
}

TEST(Loading, CaptureEnergyCrossoverAndScaling) {
    LoadingConfig c;
    const double p = capture_crossover_pressure(c, 3e-4);
    EXPECT_NEAR(p / 0.027, 1.0, 0.20);
    c.helium_pressure = p;
    EXPECT_NEAR(capture_energy(c).e_capture / 3e-4, 1.0, 1e-12);
    const double e1 = capture_energy(c).e_capture;
    c.helium_pressure = 2.0 * p;
    EXPECT_NEAR(capture_energy(c).e_capture / e1, 0.25, 1e-12);
    c.helium_pressure = 0.0;
    EXPECT_TRUE(std::isinf(capture_energy(c).e_capture));
    EXPECT_EQ(capture_energy(c).e_thresh, c.e_init);
}

TEST(Loading, CaptureEnergyIsTheOdeFixedPoint) {
    LoadingConfig c;
    c.helium_pressure = 0.05;
    const double ec = capture_energy(c).e_capture;
    EXPECT_NEAR(energy_rate(ec, c) / (c.gamma_cool * ec), 0.0, 1e-10);
    // Bisection on the right-hand side agrees with the closed form.
    double lo = 0.1 * ec, hi = 10.0 * ec;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (energy_rate(mid, c) < 0.0 ? lo : hi) = mid;
    }
    EXPECT_NEAR(0.5 * (lo + hi) / ec, 1.0, 1e-10);
}

TEST(Loading, EnergyBelowCaptureDecays) {
    LoadingConfig c;
    c.helium_pressure = 0.05;
    const double ec = capture_energy(c).e_capture;
    const EnergyTrajectory t = energy_ode(0.5 * ec, c, 100.0 / c.gamma_cool);
    EXPECT_FALSE(t.boiled_off);
    for (std::size_t i = 1; i < t.energy.size(); ++i) EXPECT_LE(t.energy[i], t.energy[i - 1] + 1e-12 * ec);
    EXPECT_LT(std::abs(t.energy.back()), 1e-10 * ec);
}

TEST(Loading, EnergyAtCaptureIsStationary) {
    LoadingConfig c;
    c.helium_pressure = 0.05;
    const double ec = capture_energy(c).e_capture;
    const EnergyTrajectory t = energy_ode(ec, c, 5.0 / c.gamma_cool);
    EXPECT_NEAR(t.energy.back() / ec, 1.0, 1e-6);
}

TEST(Loading, BoilOffMatchesClosedFormAndFallsWithPressure) {
    LoadingConfig c;
    c.helium_pressure = 0.1;
    const double ec = capture_energy(c).e_capture;
    const EnergyTrajectory t = energy_ode(2.0 * ec, c, 1.0);
    ASSERT_TRUE(t.boiled_off);
    for (std::size_t i = 1; i < t.energy.size(); ++i) EXPECT_GT(t.energy[i], t.energy[i - 1]);
    for (std::size_t i = 0; i < t.time.size(); i += 7)
        EXPECT_NEAR(t.energy[i] / energy_closed_form(2.0 * ec, c, t.time[i]), 1.0, 1e-6);
    // Boil-off from the closed form: sqrt(U) = G / (c + (G/w0 - c) e^{Gt/2}).
    LoadingConfig c2 = c;
    c2.helium_pressure = 0.2;
    const EnergyTrajectory t2 = energy_ode(2.0 * ec, c2, 1.0);
    ASSERT_TRUE(t2.boiled_off);
    EXPECT_LT(t2.boil_off_time, t.boil_off_time);
}

TEST(Loading, PopulationOdeConvergesToAnalyticSteadyState) {
    const PopulationResult p = integrate_population(LoadingConfig{});
    EXPECT_NEAR(p.n_final / p.n_steady_analytic, 1.0, 1e-6);
}

TEST(Loading, PulsesScaleInverselyWithThreshold) {
    LoadingConfig c;
    c.helium_pressure = 1e-3;
    const TrapTimeCell a = time_to_trap_cell(c);
    c.e_init *= 0.5;
    const TrapTimeCell b = time_to_trap_cell(c);
    EXPECT_NEAR(b.pulses_needed / a.pulses_needed, 2.0, 1e-12);
    EXPECT_NEAR(b.t_total / a.t_total, 2.0, 1e-12);
}

TEST(Loading, MapIsIndependentOfWorkerCountAndHasRidge) {
    LoadingConfig c;
    const auto js = log_grid(1.0, 100.0, 9);
    const auto ps = log_grid(1e-4, 1e-1, 61);
    const auto a = time_to_trap(c, js, ps, 1);
    const auto b = time_to_trap(c, js, ps, 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].t_total, b[i].t_total);
        EXPECT_TRUE(std::isfinite(a[i].t_total));
        EXPECT_GE(a[i].n_steady, 0.0);
    }
    for (std::size_t i = 0; i < js.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < ps.size(); ++k)
            if (a[i * ps.size() + k].t_total < a[i * ps.size() + best].t_total) best = k;
        EXPECT_NEAR(ps[best] / 0.027, 1.0, 0.2);
    }
}

TEST(Loading, InvalidConfigRejected) {
    LoadingConfig c;
    c.sigma_ion = 1e-19;
    EXPECT_THROW(rates(c), PreconditionError);
    c = LoadingConfig{};
    c.helium_pressure = -1.0;
    EXPECT_THROW(rates(c), PreconditionError);
    EXPECT_THROW(energy_ode(2.0, LoadingConfig{}, 1.0), PreconditionError);
}
