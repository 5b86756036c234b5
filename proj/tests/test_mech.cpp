#include <cmath>

#include <gtest/gtest.h>

#include "hybrid/mech.hpp"

using namespace hybrid;

TEST(Mech, DrumModeMassIsQuarterOfPlate) {
    const ModeModel m = membrane_mode(MembraneKind::clamped_drum, 500e-6, 100e-9, 3100.0, hz_to_rad(1e6));
    EXPECT_NEAR(m.mode_mass / m.total_mass(), 0.25, 1e-12);
    QuadratureSpec q;
    q.relative_tolerance = 1e-6;
    EXPECT_NEAR(mode_mass(m, q) / m.mode_mass, 1.0, 1e-5);
}

TEST(Mech, TrampolineMovesRigidly) {
    const ModeModel m = membrane_mode(MembraneKind::trampoline_com, 100e-6, 100e-9, 3100.0, hz_to_rad(140e3));
    EXPECT_NEAR(m.mode_mass / m.total_mass(), 1.0, 1e-12);
    EXPECT_NEAR(mode_mass(m) / m.mode_mass, 1.0, 1e-8);
}

TEST(Mech, MembraneCouplingOracleAndAnchors) {
    const Particle be = particle_lookup("9Be+");
    const ModeModel drum = membrane_mode(MembraneKind::clamped_drum, 500e-6, 100e-9, 3100.0, hz_to_rad(1e6));
    const long double q = constants::elementary_charge;
    const long double oracle =
        q * 1.0L / (2.0L * 1e-8L * static_cast<long double>(drum.omega0) *
                    std::sqrt(static_cast<long double>(be.mass) * drum.mode_mass));
    const double g = membrane_coupling(be, 1.0, 100e-6, drum.omega0, drum.mode_mass);
    EXPECT_NEAR(g / static_cast<double>(oracle), 1.0, 1e-12);
    EXPECT_NEAR(rad_to_hz(g), 0.375, 0.01);
    EXPECT_THROW(membrane_coupling(be, 1.0, 100e-6, drum.omega0, drum.mode_mass, 0.2), PreconditionError);
}

TEST(Mech, CantileverRadiusCalibrationRoundTrips) {
    const double l = 15e-6, E = 3e11, rho = 6150.0, w = hz_to_rad(868e3);
    const double a = cantilever_radius_for(l, SectionShape::hexagonal, E, rho, w);
    const ModeModel m = cantilever_mode(l, BeamSection{SectionShape::hexagonal, a}, E, rho);
    EXPECT_NEAR(m.omega0 / w, 1.0, 1e-12);
    EXPECT_NEAR(m.mode_mass / m.total_mass(), 0.25, 1e-12);
}

TEST(Mech, CantileverShapeIsTipNormalisedAndClamped) {
    const ModeModel m = cantilever_mode(15e-6, BeamSection{SectionShape::circular, 0.3e-6}, 3e11, 6150.0);
    EXPECT_NEAR(m.shape(Vec3(15e-6, 0, 0))[2], 1.0, 1e-12);
    EXPECT_NEAR(m.shape(Vec3(0, 0, 0))[2], 0.0, 1e-12);
    EXPECT_NEAR(m.shape_gradient(Vec3(0, 0, 0))(2, 0), 0.0, 1e-6);
}

TEST(Mech, CantileverModeMassByQuadrature) {
    // Euler-Bernoulli fundamental, tip normalised: int phi^2 dx = l / 4.
    for (auto shape : {SectionShape::circular, SectionShape::hexagonal}) {
        const ModeModel m = cantilever_mode(15e-6, BeamSection{shape, 0.35e-6}, 3e11, 6150.0);
        QuadratureSpec q;
        q.relative_tolerance = 1e-7;
        EXPECT_NEAR(mode_mass(m, q) / m.mode_mass, 1.0, 1e-5);
    }
}

TEST(Mech, BvaWaistAndFrequency) {
    const BvaGeometry g{1.08e-3, 0.3, 6.5e-3};
    const ModeModel m = bva_mode(g, 3, 2650.0, 6757.0, Vec3(0.226, 0.968, 0.111));
    const double sigma = std::pow(0.3 * std::pow(1.08e-3, 3) / (3.0 * 9.0 * constants::pi * constants::pi), 0.25);
    EXPECT_NEAR(m.sigma / sigma, 1.0, 1e-12);
    EXPECT_NEAR(rad_to_hz(m.omega0), 3.0 * 6757.0 / (2.0 * 1.08e-3), 1e-3);
    EXPECT_NEAR(bva_sigma(1.08e-3, 0.3, 9) / bva_sigma(1.08e-3, 0.3, 3), 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(Mech, BvaModeMassClosedFormMatchesQuadrature) {
    const BvaGeometry g{1.08e-3, 0.3, 6.5e-3};
    const ModeModel m = bva_mode(g, 3, 2650.0, 6757.0, Vec3(0.226, 0.968, 0.111));
    EXPECT_NEAR(mode_mass(m) / m.mode_mass, 1.0, 1e-4);
}

TEST(Mech, BvaFacesAreAntinodesForOddOvertones) {
    const BvaGeometry g{1.08e-3, 0.3, 6.5e-3};
    for (int n : {3, 5, 7}) {
        const ModeModel m = bva_mode(g, n, 2650.0, 6757.0, Vec3::UnitY());
        EXPECT_NEAR(std::abs(m.shape(Vec3(0, g.thickness_t, 0))[1]), 1.0, 1e-12);
        EXPECT_NEAR(m.shape_gradient(Vec3(0, g.thickness_t, 0))(1, 1), 0.0, 1e-6 * m.wavenumber);
    }
}

TEST(Mech, BvaRejectsEvenOvertones) {
    EXPECT_THROW(bva_mode(BvaGeometry{}, 4, 2650.0, 6757.0, Vec3::UnitY()), PreconditionError);
    EXPECT_THROW(bva_mode(BvaGeometry{}, 1, 2650.0, 6757.0, Vec3::UnitY()), PreconditionError);
}
