#include <cmath>

#include <gtest/gtest.h>

#include "hybrid/physcore.hpp"

using namespace hybrid;

TEST(Physcore, CatalogMassesUseProtonConvention) {
    const Particle be = particle_lookup("9Be+");
    EXPECT_DOUBLE_EQ(be.mass, 9.0 * constants::proton_mass);
    EXPECT_DOUBLE_EQ(be.charge, constants::elementary_charge);
    EXPECT_LT(particle_lookup("electron").charge, 0.0);
}

TEST(Physcore, UnknownSpeciesIsConfigError) {
    EXPECT_THROW(particle_lookup("7Li+"), ConfigError);
}

TEST(Physcore, ParticleValidation) {
    EXPECT_THROW(make_particle("x", 1.0, 0.0), PreconditionError);
    EXPECT_THROW(make_particle("x", 0.0, 1.0), PreconditionError);
}

TEST(Physcore, OccupationMatchesBoseFormula) {
    const double w = constants::two_pi * 10e6;
    const long double x = static_cast<long double>(constants::hbar) * w / (constants::boltzmann * 4.0L);
    const long double oracle = 1.0L / (std::exp(x) - 1.0L);
    EXPECT_NEAR(thermal_occupation(w, Environment{4.0}), static_cast<double>(oracle), 1e-12 * oracle);
}

TEST(Physcore, OccupationHighTemperatureLimit) {
    // n = kT / (hbar w) - 1/2 + O(hbar w / kT).
    const double w = constants::two_pi * 1e6;
    const double kt_over = constants::boltzmann * 300.0 / (constants::hbar * w);
    EXPECT_NEAR(thermal_occupation(w, Environment{300.0}), kt_over - 0.5, 1e-3);
}

TEST(Physcore, OccupationLowTemperatureIsExponential) {
    const double w = constants::two_pi * 10e9;
    const double x = constants::hbar * w / (constants::boltzmann * 0.05);
    EXPECT_NEAR(thermal_occupation(w, Environment{0.05}) / std::exp(-x), 1.0, 1e-3);
}

TEST(Physcore, OccupationRejectsBadInput) {
    EXPECT_THROW(thermal_occupation(0.0, Environment{4.0}), PreconditionError);
    EXPECT_THROW(thermal_occupation(1.0, Environment{0.0}), PreconditionError);
}

TEST(Physcore, FrequencyConversionRoundTrips) {
    EXPECT_DOUBLE_EQ(rad_to_hz(hz_to_rad(1.3e9)), 1.3e9);
    EXPECT_DOUBLE_EQ(hz_to_rad(1.0), constants::two_pi);
}
