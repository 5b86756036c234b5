#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hybrid/constants.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/etrap.hpp"
#include "hybrid/heatex.hpp"
#include "hybrid/loading.hpp"
#include "hybrid/mech.hpp"
#include "hybrid/physcore.hpp"
#include "hybrid/piezo.hpp"
#include "hybrid/scatter.hpp"

#ifndef HYBRID_DEFAULT_DATABASE
#define HYBRID_DEFAULT_DATABASE "data/database.json"
#endif

namespace hybrid {

inline constexpr int database_schema_version = 1;
inline constexpr const char* database_env_var = "HYBRID_DATABASE";

// Field access with the JSON path in every error message.
class Node {
public:
    Node(const nlohmann::json& j, std::string path) : j_(&j), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const nlohmann::json& raw() const { return *j_; }
    bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

    Node at(const std::string& key) const {
        if (!j_->is_object()) throw ConfigError(path_ + ": expected an object");
        auto it = j_->find(key);
        if (it == j_->end()) throw ConfigError(path_ + "." + key + ": missing field");
        return Node(*it, path_ + "." + key);
    }
    Node at(std::size_t i) const {
        if (!j_->is_array() || i >= j_->size()) throw ConfigError(path_ + "[" + std::to_string(i) + "]: out of range");
        return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]");
    }
    std::size_t size() const { return j_->is_array() || j_->is_object() ? j_->size() : 0; }

    double num(const std::string& key) const {
        const Node n = at(key);
        if (!n.raw().is_number()) throw ConfigError(n.path() + ": expected a number");
        const double v = n.raw().get<double>();
        if (!std::isfinite(v)) throw ConfigError(n.path() + ": must be finite");
        return v;
    }
    double num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }
    double positive(const std::string& key) const {
        const double v = num(key);
        if (!(v > 0.0)) throw ConfigError(path_ + "." + key + ": must be positive, got " + std::to_string(v));
        return v;
    }
    double nonnegative(const std::string& key) const {
        const double v = num(key);
        if (v < 0.0) throw ConfigError(path_ + "." + key + ": must be >= 0, got " + std::to_string(v));
        return v;
    }
    int integer(const std::string& key) const {
        const Node n = at(key);
        if (!n.raw().is_number_integer()) throw ConfigError(n.path() + ": expected an integer");
        return n.raw().get<int>();
    }
    std::string str(const std::string& key) const {
        const Node n = at(key);
        if (!n.raw().is_string()) throw ConfigError(n.path() + ": expected a string");
        return n.raw().get<std::string>();
    }
    std::vector<double> nums(const std::string& key) const {
        const Node n = at(key);
        if (!n.raw().is_array()) throw ConfigError(n.path() + ": expected an array");
        std::vector<double> out;
        for (std::size_t i = 0; i < n.size(); ++i) {
            if (!n.raw()[i].is_number()) throw ConfigError(n.path() + "[" + std::to_string(i) + "]: expected a number");
            out.push_back(n.raw()[i].get<double>());
        }
        return out;
    }
    Vec3 vec3(const std::string& key) const {
        const auto v = nums(key);
        if (v.size() != 3) throw ConfigError(path_ + "." + key + ": expected 3 numbers");
        return Vec3(v[0], v[1], v[2]);
    }

private:
    const nlohmann::json* j_;
    std::string path_;
};

struct TableOneRow {
    Particle species;
    double omega0 = 0.0;  // rad/s
    double g_ref = 0.0;   // rad/s
    double q_min_4k_ref = 0.0;
    double q_min_50mk_ref = 0.0;
};

struct TableFiveRow {
    int overtone = 0;
    double frequency_ref = 0.0;  // Hz
    Vec3 g_ref = Vec3::Zero();   // rad/s, motion along x, y, z
};

struct DesignReference {
    std::map<std::string, double> values;
    double get(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) throw ConfigError("design reference: missing '" + key + "'");
        return it->second;
    }
    bool has(const std::string& key) const { return values.count(key) != 0; }
};

struct SuperconductorEntry {
    std::string name;
    double penetration_depth = 0.0;  // m
    double critical_density = 0.0;   // A/m^2, calibrated
    double calib_current = 0.0;      // A
    double calib_width = 0.0;        // m
    double calib_thickness = 0.0;    // m

    FilmWire wire(double width, double thickness) const {
        return FilmWire{width, thickness, penetration_depth, critical_density};
    }
};

class Database {
public:
    static std::string default_path() {
        if (const char* env = std::getenv(database_env_var); env && *env) return env;
        return HYBRID_DEFAULT_DATABASE;
    }

    static Database load(const std::string& path = default_path()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("database: cannot open '" + path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("database '" + path + "': " + e.what());
        }
        return Database(std::move(j), path);
    }

    Database(nlohmann::json j, std::string path) : j_(std::move(j)), path_(std::move(path)) {
        const Node r = root();
        if (r.integer("schema_version") != database_schema_version)
            throw ConfigError("$.schema_version: expected " + std::to_string(database_schema_version));
        const Node ps = r.at("particles");
        for (auto it = j_["particles"].begin(); it != j_["particles"].end(); ++it) {
            const Node p = ps.at(it.key());
            double mass = 0.0;
            if (p.has("mass_mp"))
                mass = p.positive("mass_mp") * constants::proton_mass;
            else if (p.has("mass_me"))
                mass = p.positive("mass_me") * constants::electron_mass;
            else if (p.has("mass_kg"))
                mass = p.positive("mass_kg");
            else
                throw ConfigError(p.path() + ": needs mass_mp, mass_me or mass_kg");
            const double z = p.num("charge_e");
            if (z == 0.0) throw ConfigError(p.path() + ".charge_e: must be nonzero");
            catalog_.add(make_particle(it.key(), z * constants::elementary_charge, mass));
        }
    }

    const std::string& path() const { return path_; }
    Node root() const { return Node(j_, "$"); }
    const nlohmann::json& json() const { return j_; }
    const ParticleCatalog& catalog() const { return catalog_; }
    Particle particle(const std::string& name) const { return catalog_.lookup(name); }

    PiezoMaterial piezo_material(const std::string& name) const {
        const Node m = root().at("piezo_materials").at(name);
        PiezoMaterial out;
        out.name = name;
        const std::string cls = m.str("class");
        PiezoMatrix base;
        if (cls == "trigonal32")
            base = quartz_matrix(m.num("e11_c_per_m2"), m.num("e14_c_per_m2"));
        else if (cls == "wurtzite")
            base = wurtzite_matrix(m.num("e31_c_per_m2"), m.num("e33_c_per_m2"), m.num("e15_c_per_m2"));
        else
            throw ConfigError(m.path() + ".class: unknown crystal class '" + cls + "'");
        const Vec3 ang = m.vec3("euler_deg") * (constants::pi / 180.0);
        out.e_matrix = rotate_piezo(base, ang[0], ang[1], ang[2]);
        if (m.has("permittivity_f_per_m"))
            out.permittivity = m.positive("permittivity_f_per_m");
        else
            out.permittivity = m.positive("permittivity_rel") * constants::epsilon0;
        if (out.permittivity < constants::epsilon0) throw ConfigError(m.path() + ": permittivity below eps0");
        out.density = m.positive("density_kg_per_m3");
        out.sound_speed = m.num("sound_speed_m_per_s", 0.0);
        return out;
    }

    double youngs_modulus(const std::string& material) const {
        return root().at("piezo_materials").at(material).positive("youngs_modulus_pa");
    }

    std::vector<std::string> mode_names() const {
        std::vector<std::string> out;
        for (auto it = j_.at("modes").begin(); it != j_.at("modes").end(); ++it) out.push_back(it.key());
        return out;
    }

    Node mode_node(const std::string& name) const { return root().at("modes").at(name); }

    std::string mode_material(const std::string& name) const { return mode_node(name).str("material"); }

    std::vector<int> mode_overtones(const std::string& name) const {
        std::vector<int> out;
        const Node m = mode_node(name);
        if (!m.has("overtones")) return out;
        for (double v : m.nums("overtones")) out.push_back(static_cast<int>(v));
        return out;
    }

    // Builds a mode preset; overtone is used by BVA presets only (0 selects the first listed).
    ModeModel mode(const std::string& name, int overtone = 0) const {
        const Node m = mode_node(name);
        const std::string kind = m.str("kind");
        if (kind == "clamped_drum" || kind == "trampoline") {
            return membrane_mode(kind == "clamped_drum" ? MembraneKind::clamped_drum : MembraneKind::trampoline_com,
                                 m.positive("side_m"), m.positive("thickness_m"), m.positive("density_kg_per_m3"),
                                 hz_to_rad(m.positive("frequency_hz")));
        }
        if (kind == "cantilever") {
            const std::string mat = m.str("material");
            const double rho = piezo_material(mat).density;
            const double E = youngs_modulus(mat);
            const std::string sec = m.str("section");
            if (sec != "hexagonal" && sec != "circular") throw ConfigError(m.path() + ".section: unknown '" + sec + "'");
            const SectionShape shape = sec == "hexagonal" ? SectionShape::hexagonal : SectionShape::circular;
            const double l = m.positive("length_m");
            const double a = m.has("radius_m")
                                 ? m.positive("radius_m")
                                 : cantilever_radius_for(l, shape, E, rho, hz_to_rad(m.positive("calibrate_frequency_hz")));
            return cantilever_mode(l, BeamSection{shape, a}, E, rho);
        }
        if (kind == "bva") {
            const PiezoMaterial mat = piezo_material(m.str("material"));
            if (mat.sound_speed <= 0.0) throw ConfigError(m.path() + ": material needs sound_speed_m_per_s");
            const BvaGeometry g{m.positive("thickness_m"), m.positive("curvature_radius_m"), m.positive("disk_radius_m")};
            const int n = overtone > 0 ? overtone : mode_overtones(name).at(0);
            return bva_mode(g, n, mat.density, mat.sound_speed, m.vec3("direction"));
        }
        throw ConfigError(m.path() + ".kind: unknown mode kind '" + kind + "'");
    }

    Node setup(const std::string& name) const { return root().at("coupling_setups").at(name); }

    std::vector<TableOneRow> table1() const {
        const Node rows = root().at("table1").at("rows");
        std::vector<TableOneRow> out;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Node r = rows.at(i);
            out.push_back(TableOneRow{particle(r.str("species")), hz_to_rad(r.positive("trap_frequency_hz")),
                                      hz_to_rad(r.positive("g_hz")), r.positive("q_min_4k"),
                                      r.positive("q_min_50mk")});
        }
        return out;
    }

    std::vector<TableFiveRow> table5() const {
        const Node rows = root().at("table5").at("rows");
        std::vector<TableFiveRow> out;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Node r = rows.at(i);
            out.push_back(TableFiveRow{r.integer("overtone"), r.positive("frequency_hz"),
                                       Vec3(hz_to_rad(r.positive("g_x_hz")), hz_to_rad(r.positive("g_y_hz")),
                                            hz_to_rad(r.positive("g_z_hz")))});
        }
        return out;
    }

    std::vector<std::string> design_names() const {
        std::vector<std::string> out;
        for (auto it = j_.at("designs").begin(); it != j_.at("designs").end(); ++it) out.push_back(it.key());
        return out;
    }

    TrapDesign design(const std::string& name) const { return design_from(root().at("designs").at(name), name); }

    DesignReference design_reference(const std::string& name) const {
        DesignReference out;
        const Node d = root().at("designs").at(name);
        if (!d.has("reference")) return out;
        const Node r = d.at("reference");
        for (auto it = r.raw().begin(); it != r.raw().end(); ++it) out.values[it.key()] = r.num(it.key());
        return out;
    }

    // A design node as found in the database or in a user file for `trap check`.
    static TrapDesign design_from(const Node& d, const std::string& name) {
        TrapDesign t;
        t.name = name;
        t.v_rf = d.positive("v_rf_v");
        t.omega_rf = hz_to_rad(d.positive("rf_frequency_hz"));
        t.scale_d = d.positive("d_m");
        t.alpha = d.num("alpha", 1.0);
        t.zeta_anharmonic = d.num("zeta_anharmonic", 0.0);
        if (d.has("detection_gap_m")) t.detection_gap = d.positive("detection_gap_m");
        const Node c = d.at("capacitances_f");
        t.capacitances.c_rf1 = c.nonnegative("rf1");
        t.capacitances.c_rf2 = c.nonnegative("rf2");
        t.capacitances.c_cap = c.nonnegative("cap");
        t.capacitances.c_iso1 = c.nonnegative("iso1");
        t.capacitances.c_iso2 = c.nonnegative("iso2");
        t.capacitances.c_iso3 = c.num("iso3", 0.0);
        t.capacitances.c_iso4 = c.num("iso4", 0.0);
        t.c_trap = d.has("c_trap_f") ? d.positive("c_trap_f") : 0.0;
        const Particle e = builtin_catalog().lookup("electron");
        // Geometry factors come either directly or from a calibration target.
        if (d.has("beta_geom")) {
            t.beta_geom = d.positive("beta_geom");
        } else if (d.has("calibrate") && d.at("calibrate").has("q_mathieu")) {
            t.beta_geom = beta_for_q(e, d.at("calibrate").positive("q_mathieu"), t.v_rf, t.omega_rf, t.scale_d);
        }
        if (d.has("zeta_depth")) {
            t.zeta_depth = d.positive("zeta_depth");
        } else if (d.has("calibrate") && d.at("calibrate").has("depth_ev")) {
            const double q = d.at("calibrate").positive("q_mathieu");
            t.zeta_depth = t.v_rf * q / d.at("calibrate").positive("depth_ev");
        }
        if (t.c_trap == 0.0 && d.has("reference") && d.at("reference").has("c_trap_f"))
            t.c_trap = d.at("reference").positive("c_trap_f");
        if (!(t.beta_geom > 0.0 && t.beta_geom <= 1.0))
            throw ConfigError(d.path() + ": geometry factor beta must be in (0, 1], got " + std::to_string(t.beta_geom));
        return t;
    }

    SuperconductorEntry superconductor(const std::string& name) const {
        const Node s = root().at("superconductors").at(name);
        SuperconductorEntry out;
        out.name = name;
        out.penetration_depth = s.positive("penetration_depth_m");
        if (s.has("critical_current_density_a_per_m2")) {
            out.critical_density = s.positive("critical_current_density_a_per_m2");
        } else {
            const Node c = s.at("calibrate");
            out.calib_current = c.positive("critical_current_a");
            out.calib_width = c.positive("width_m");
            out.calib_thickness = c.positive("thickness_m");
            out.critical_density =
                critical_density_for(out.calib_current, out.calib_width, out.calib_thickness, out.penetration_depth);
        }
        return out;
    }

    std::vector<HeatingReference> heating_references() const {
        const Node rows = root().at("heating_references");
        std::vector<HeatingReference> out;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Node r = rows.at(i);
            HeatingReference h;
            h.label = r.str("label");
            h.species = particle(r.str("species"));
            h.distance_d = r.positive("distance_m");
            h.frequency_f = r.positive("frequency_hz");
            h.rate = r.positive("rate_quanta_per_s");
            h.temperature = r.positive("temperature_k");
            h.material = r.str("material");
            h.citation = r.str("citation");
            out.push_back(h);
        }
        return out;
    }

    HeatingReference heating_reference(const std::string& label) const {
        for (const auto& h : heating_references())
            if (h.label == label) return h;
        throw ConfigError("$.heating_references: no row labelled '" + label + "'");
    }

    LoadingConfig loading() const {
        const Node l = root().at("loading");
        LoadingConfig c;
        c.current_density_j = l.nonnegative("current_density_a_per_m2");
        c.beam_radius_r0 = l.positive("beam_radius_m");
        c.helium_pressure = l.nonnegative("helium_pressure_pa");
        c.gas_temperature = l.positive("gas_temperature_k");
        c.trap_radius_l = l.positive("trap_radius_m");
        c.trap_depth = l.positive("trap_depth_ev");
        c.sigma_ion = l.positive("sigma_ion_m2");
        c.sigma_elastic = l.positive("sigma_elastic_m2");
        c.gamma_cool = l.positive("gamma_cool_per_s");
        c.e_init = l.positive("e_init_ev");
        c.t_detect = l.nonnegative("t_detect_s");
        try {
            c.validate();
        } catch (const PreconditionError& e) {
            throw ConfigError(l.path() + ": " + e.what());
        }
        return c;
    }

    CollisionConfig scatter(const std::string& name) const {
        const Node s = root().at("scatter").at(name);
        CollisionConfig c;
        c.primary_energy_ep = s.positive("primary_energy_ev");
        c.beam_radius_r0 = s.positive("beam_radius_m");
        c.trap_freqs = s.vec3("trap_frequency_hz") * constants::two_pi;
        c.trap_volume_l = s.positive("trap_volume_m");
        c.u_depth = s.positive("u_depth_ev");
        c.e_thresh = s.positive("e_thresh_ev");
        c.injection_z = s.num("injection_z_m");
        c.current_density_j = s.num("current_density_a_per_m2", 1.0);
        if (s.has("rf")) {
            const Node r = s.at("rf");
            c.rf = RfDrive{hz_to_rad(r.positive("frequency_hz")), r.positive("q_mathieu"), 0.0,
                           r.positive("z_extent_m"), r.positive("rho_extent_m")};
        }
        try {
            c.validate();
        } catch (const PreconditionError& e) {
            throw ConfigError(s.path() + ": " + e.what());
        }
        return c;
    }

    Node scatter_node(const std::string& name) const { return root().at("scatter").at(name); }

private:
    nlohmann::json j_;
    std::string path_;
    ParticleCatalog catalog_;
};

}  // namespace hybrid
