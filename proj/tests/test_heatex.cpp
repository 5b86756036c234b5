#include <cmath>

#include <gtest/gtest.h>

#include "hybrid/heatex.hpp"

using namespace hybrid;

namespace {

HeatingReference sr_row() {
    HeatingReference r;
    r.label = "sr";
    r.species = particle_lookup("88Sr+");
    r.distance_d = 50e-6;
    r.frequency_f = 1.32e6;
    r.rate = 4.0;
    r.temperature = 5.0;
    return r;
}

}  // namespace

TEST(Heatex, IdentityExtrapolation) {
    const HeatingReference r = sr_row();
    EXPECT_EQ(extrapolate(r, r.species, r.distance_d, r.frequency_f, 1.3), r.rate);
}

TEST(Heatex, StrontiumRowToElectron) {
    const Particle e = particle_lookup("electron");
    const double rate = extrapolate(sr_row(), e, 50e-6, 1e9, 0.5);
    const double oracle = 4.0 * (88.0 * constants::proton_mass / constants::electron_mass) * std::pow(1.32e6 / 1e9, 1.5);
    EXPECT_NEAR(rate / oracle, 1.0, 1e-12);
    EXPECT_NEAR(rate, 31.0, 0.5);
    EXPECT_LT(extrapolate(sr_row(), e, 50e-6, 1e9, 2.0), 0.02);
}

TEST(Heatex, ExtrapolationComposes) {
    const HeatingReference r = sr_row();
    const Particle be = particle_lookup("9Be+");
    const Particle e = particle_lookup("electron");
    const HeatingReference mid = rebase(r, be, 80e-6, 5e6, 0.8);
    EXPECT_NEAR(extrapolate(mid, e, 50e-6, 1e9, 0.8) / extrapolate(r, e, 50e-6, 1e9, 0.8), 1.0, 1e-12);
}

TEST(Heatex, DistanceAndFrequencyExponents) {
    const HeatingReference r = sr_row();
    const double base = extrapolate(r, r.species, 50e-6, 2e6, 1.0);
    EXPECT_NEAR(extrapolate(r, r.species, 100e-6, 2e6, 1.0) / base, 1.0 / 16.0, 1e-12);
    EXPECT_NEAR(extrapolate(r, r.species, 50e-6, 4e6, 1.0) / base, 0.25, 1e-12);
}

TEST(Heatex, AlphaOutsideObservedRangeRejected) {
    EXPECT_THROW(extrapolate(sr_row(), particle_lookup("electron"), 50e-6, 1e9, 0.3), PreconditionError);
    EXPECT_THROW(extrapolate(sr_row(), particle_lookup("electron"), 50e-6, 1e9, 2.5), PreconditionError);
}
