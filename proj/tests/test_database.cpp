#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "hybrid/database.hpp"

using namespace hybrid;

namespace {

nlohmann::json base_json() { return Database::load().json(); }

std::string config_message(const nlohmann::json& j) {
    try {
        Database db(j, "inline");
        (void)db.loading();
        (void)db.scatter("fig14");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Database, DefaultLoads) {
    const Database db = Database::load();
    EXPECT_EQ(db.root().integer("schema_version"), database_schema_version);
    EXPECT_FALSE(db.design_names().empty());
    EXPECT_EQ(db.table1().size(), 5u);
    EXPECT_FALSE(db.table5().empty());
    EXPECT_EQ(db.heating_references().size(), 3u);
    EXPECT_NEAR(db.particle("9Be+").mass / (9.0 * constants::proton_mass), 1.0, 1e-15);
}

TEST(Database, MissingFileIsConfigError) {
    EXPECT_THROW(Database::load("/nonexistent/db.json"), ConfigError);
}

TEST(Database, ErrorsNameTheOffendingPath) {
    nlohmann::json j = base_json();
    j["schema_version"] = 99;
    EXPECT_NE(config_message(j).find("$.schema_version"), std::string::npos);

    j = base_json();
    j["loading"].erase("beam_radius_m");
    EXPECT_NE(config_message(j).find("$.loading.beam_radius_m"), std::string::npos);

    j = base_json();
    j["loading"]["trap_depth_ev"] = "deep";
    EXPECT_NE(config_message(j).find("$.loading.trap_depth_ev: expected a number"), std::string::npos);

    j = base_json();
    j["particles"]["bad"] = {{"charge_e", 1}};
    EXPECT_NE(config_message(j).find("$.particles.bad"), std::string::npos);
}

TEST(Database, UnknownNamesRejected) {
    const Database db = Database::load();
    EXPECT_THROW(db.particle("unobtainium"), ConfigError);
    EXPECT_THROW(db.design("no-such-design"), ConfigError);
    EXPECT_THROW(db.superconductor("Pb"), ConfigError);
    EXPECT_THROW(db.heating_reference("missing"), ConfigError);
}

TEST(Database, DesignsHitTheirCalibrationTargets) {
    const Database db = Database::load();
    const Particle e = db.particle("electron");
    int calibrated = 0;
    for (const auto& name : db.design_names()) {
        const Node d = db.root().at("designs").at(name);
        if (!d.has("calibrate") || !d.at("calibrate").has("q_mathieu")) continue;
        ++calibrated;
        EXPECT_NEAR(mathieu_q(e, db.design(name)).q, d.at("calibrate").num("q_mathieu"), 1e-12) << name;
    }
    EXPECT_GT(calibrated, 0);
}

TEST(Database, SuperconductorCalibrationRoundTrips) {
    const Database db = Database::load();
    for (const std::string name : {"Nb", "Al"}) {
        const SuperconductorEntry s = db.superconductor(name);
        if (s.calib_current == 0.0) continue;
        EXPECT_NEAR(critical_current(s.wire(s.calib_width, s.calib_thickness)) / s.calib_current, 1.0, 1e-12) << name;
    }
}

TEST(Database, LoadingAndScatterSectionsMatchDefaults) {
    const Database db = Database::load();
    const LoadingConfig l = db.loading();
    EXPECT_EQ(l.beam_radius_r0, 10e-6);
    EXPECT_EQ(l.trap_depth, 1.0);
    const CollisionConfig s = db.scatter("fig14");
    EXPECT_EQ(s.primary_energy_ep, 30.0);
    EXPECT_FALSE(s.rf.has_value());
}

TEST(Database, EnvironmentOverridesDefaultPath) {
    setenv(database_env_var, "/nonexistent/override.json", 1);
    EXPECT_EQ(Database::default_path(), "/nonexistent/override.json");
    unsetenv(database_env_var);
    EXPECT_EQ(Database::default_path(), std::string(HYBRID_DEFAULT_DATABASE));
}
