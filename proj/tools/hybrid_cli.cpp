#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hybrid/acceptance.hpp"
#include "hybrid/database.hpp"

namespace {

using namespace hybrid;
using nlohmann::json;
namespace acc = hybrid::acceptance;

constexpr const char* tool_version = "0.1.0";

enum Exit { ok = 0, config_failure = 1, check_failure = 2, numerical_failure = 3 };

struct Column {
    std::string name;
    std::string provenance;  // "computed:<op>" or "database:<json path>"
};

using Cell = std::variant<double, std::string>;

struct Output {
    std::string kind;
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;
    json inputs = json::object();
    json summary = json::object();
    std::vector<int> criteria;  // acceptance criteria exercised by --check
};

std::string format_cell(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", std::get<double>(c));
    return buf;
}

std::string to_csv(const Output& o) {
    std::ostringstream s;
    for (std::size_t i = 0; i < o.columns.size(); ++i) s << (i ? "," : "") << o.columns[i].name;
    s << "\n";
    for (const auto& row : o.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << format_cell(row[i]);
        s << "\n";
    }
    return s.str();
}

struct Context {
    Database db;
    json overrides = json::object();
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::map<std::string, std::string> options;  // kind-specific flags, recorded in the sidecar

    unsigned worker_count() const { return workers > 0 ? workers : std::max(1u, std::thread::hardware_concurrency()); }
};

// Applies "a.b.c=value" to the database document. The path must already exist so typos fail loudly.
void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param '" + assignment + "': expected key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json* node = &doc;
    std::string path = "$";
    std::stringstream ks(key);
    std::string part;
    while (std::getline(ks, part, '.')) {
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(part);
            } catch (const std::exception&) {
                throw ConfigError("--param " + key + ": " + path + " is an array, '" + part + "' is not an index");
            }
            if (idx >= node->size()) throw ConfigError("--param " + key + ": " + path + "[" + part + "] out of range");
            node = &(*node)[idx];
            path += "[" + part + "]";
        } else if (node->is_object() && node->contains(part)) {
            node = &(*node)[part];
            path += "." + part;
        } else {
            throw ConfigError("--param " + key + ": no field '" + part + "' under " + path);
        }
    }
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    if (node->is_number() && !value.is_number())
        throw ConfigError("--param " + key + ": " + path + " expects a number, got '" + text + "'");
    *node = value;
}

std::string db_ref(const std::string& path) { return "database:" + path; }
std::string op(const std::string& name) { return "computed:" + name; }

// --- scenarios ---

Output run_table1(const Context& ctx) {
    const Database& db = ctx.db;
    const Node s = db.setup("table1");
    const double d = s.positive("gap_m"), ct = s.positive("c_trap_f"), alpha = s.positive("alpha");
    const std::string conv_name = ctx.options.count("convention") ? ctx.options.at("convention") : "2pi";
    if (conv_name != "pi" && conv_name != "2pi") throw ConfigError("--convention must be 'pi' or '2pi'");
    const auto conv = conv_name == "pi" ? SwapConvention::pi_over_g : SwapConvention::two_pi_over_g;
    const Node qw = db.setup("quarter_wave");
    const LumpedLC lc = quarterwave_lumped(qw.positive("z0_ohm"), hz_to_rad(qw.positive("frequency_hz")));

    Output o;
    o.kind = "table1";
    o.columns = {{"species", db_ref("$.table1.rows[*].species")},
                 {"trap_frequency_hz", db_ref("$.table1.rows[*].trap_frequency_hz")},
                 {"g_hz", op("particle_resonator_coupling")},
                 {"q_min_4k", op("min_quality_factor")},
                 {"q_min_50mk", op("min_quality_factor")},
                 {"convention", "input:--convention"},
                 {"g_quarterwave_hz", op("quarterwave_coupling")},
                 {"g_ref_hz", db_ref("$.table1.rows[*].g_hz")},
                 {"q_min_4k_ref", db_ref("$.table1.rows[*].q_min_4k")},
                 {"q_min_50mk_ref", db_ref("$.table1.rows[*].q_min_50mk")}};
    for (const auto& row : db.table1()) {
        const double g = particle_resonator_coupling(row.species, d, alpha, ct);
        const BVDEquivalent b = particle_bvd(row.species, d, alpha, row.omega0);
        const double gq = quarterwave_coupling(b.series_capacitance, lc.capacitance, ct, row.omega0);
        o.rows.push_back({row.species.name, rad_to_hz(row.omega0), rad_to_hz(g),
                          min_quality_factor(g, row.omega0, Environment{4.0}, 1.0, conv),
                          min_quality_factor(g, row.omega0, Environment{0.05}, 1.0, conv),
                          std::string(to_string(conv)), rad_to_hz(gq), rad_to_hz(row.g_ref), row.q_min_4k_ref,
                          row.q_min_50mk_ref});
    }
    o.inputs = {{"gap_m", d}, {"c_trap_f", ct}, {"alpha", alpha}, {"convention", conv_name},
                {"quarter_wave", {{"z0_ohm", qw.num("z0_ohm")}, {"frequency_hz", qw.num("frequency_hz")}}}};
    o.summary = {{"quarter_wave_capacitance_f", lc.capacitance},
                 {"quarter_wave_inductance_h", lc.inductance},
                 {"high_temperature_denominator_4k_hz", high_temperature_swap_denominator_hz(Environment{4.0})},
                 {"high_temperature_denominator_50mk_hz", high_temperature_swap_denominator_hz(Environment{0.05})}};
    o.criteria = {1, 2};
    return o;
}

Output run_table2(const Context& ctx) {
    const Database& db = ctx.db;
    const Particle e = db.particle("electron");
    const Node det = db.root().at("detection");
    const double qd = det.positive("quality_factor"), w0 = hz_to_rad(det.positive("secular_frequency_hz"));
    Output o;
    o.kind = "table2";
    o.columns = {{"design", db_ref("$.designs")},
                 {"v_rf_v", db_ref("$.designs.*.v_rf_v")},
                 {"rf_frequency_hz", db_ref("$.designs.*.rf_frequency_hz")},
                 {"d_m", db_ref("$.designs.*.d_m")},
                 {"beta_geom", op("beta_for_q")},
                 {"zeta_depth", op("calibration")},
                 {"q_mathieu", op("mathieu_q")},
                 {"secular_z_hz", op("trap_depth_and_secular")},
                 {"depth_ev", op("trap_depth_and_secular")},
                 {"i_rf_a", op("rf_power_current")},
                 {"c_trap_f", db_ref("$.designs.*.reference.c_trap_f")},
                 {"g_hz", op("particle_resonator_coupling")},
                 {"c_total_f", op("detection_metrics")},
                 {"linewidth_hz", op("detection_metrics")}};
    for (const auto& name : db.design_names()) {
        const TrapDesign t = db.design(name);
        const DepthSecular ds = trap_depth_and_secular(t, e);
        const bool has_trap_c = t.c_trap > 0.0;
        const double c_net = t.capacitances.c_cap + series(t.capacitances.c_rf1, t.capacitances.c_rf2) +
                             series(t.capacitances.c_iso1, t.capacitances.c_iso2);
        DetectionMetrics dm;
        if (c_net > 0.0) dm = detection_metrics(t, e, qd, w0);
        const DesignReference ref = db.design_reference(name);
        const double g = has_trap_c ? rad_to_hz(particle_resonator_coupling(e, t.scale_d, t.alpha, t.c_trap))
                                    : (ref.has("g_hz") ? ref.get("g_hz") : 0.0);
        o.rows.push_back({name, t.v_rf, rad_to_hz(t.omega_rf), t.scale_d, t.beta_geom, t.zeta_depth, ds.q,
                          rad_to_hz(ds.omega_secular), ds.depth_ev,
                          has_trap_c ? t.omega_rf * t.c_trap * t.v_rf : 0.0, t.c_trap, g, dm.c_total,
                          rad_to_hz(dm.linewidth)});
        json r = json::object();
        for (const auto& [k, v] : ref.values) r[k] = v;
        o.summary["reference"][name] = r;
    }
    o.inputs = {{"detection_quality_factor", qd}, {"detection_frequency_hz", det.num("secular_frequency_hz")}};
    o.summary["note"] = "designs without c_trap_f report the stored reference g and zero current";
    o.criteria = {8, 9, 10};
    return o;
}

Output run_table5(const Context& ctx) {
    const Database& db = ctx.db;
    const Node s = db.setup("quartz_direct");
    const Particle p = db.particle(s.str("species"));
    const double h = s.positive("height_m");
    const PiezoMaterial mat = db.piezo_material(db.mode_material("bva"));
    QuadratureSpec quad;
    if (ctx.options.count("tolerance")) quad.relative_tolerance = std::stod(ctx.options.at("tolerance"));
    Output o;
    o.kind = "table5";
    o.columns = {{"overtone", db_ref("$.modes.bva.overtones")},
                 {"frequency_hz", op("bva_mode")},
                 {"axis", "input:axis"},
                 {"g_hz", op("overlap_coupling_axes")},
                 {"g_dipole_hz", op("overlap_coupling_dipole_axes")},
                 {"error_hz", op("overlap_coupling_axes")},
                 {"aligned_bound_hz", op("aligned_dipole_bound")},
                 {"cs_bound_hz", op("cs_bound")},
                 {"g_ref_hz", db_ref("$.table5.rows[*].g_*_hz")}};
    const char* axes[] = {"x", "y", "z"};
    for (const auto& row : db.table5()) {
        const ModeModel m = db.mode("bva", row.overtone);
        const Vec3 ion(0, m.thickness + h, 0);
        const AxisCouplings a = overlap_coupling_axes(m, mat, p, ion, quad);
        const AxisCouplings b = overlap_coupling_dipole_axes(m, mat, p, ion, quad);
        const double bound = rad_to_hz(aligned_dipole_bound(p, m, mat, h));
        const double cs = rad_to_hz(cs_bound(m, mat, p, h));
        for (int i = 0; i < 3; ++i)
            o.rows.push_back({static_cast<double>(row.overtone), rad_to_hz(m.omega0), std::string(axes[i]),
                              rad_to_hz(a.g[i]), rad_to_hz(b.g[i]), rad_to_hz(a.error[i]), bound, cs,
                              rad_to_hz(row.g_ref[i])});
    }
    o.inputs = {{"species", p.name}, {"height_m", h}, {"relative_tolerance", quad.relative_tolerance}};
    o.summary = {{"e_bar_c_per_m2", mode_weighted_coefficient(mat.e_matrix, db.mode("bva", 3).polarization_axis)},
                 {"e_max_c_per_m2", largest_singular_value(mat.e_matrix)}};
    o.criteria = {5};
    return o;
}

Output run_fig7(const Context& ctx) {
    const Database& db = ctx.db;
    const Node s = db.setup("gan");
    const Particle p = db.particle(s.str("species"));
    const auto hs = s.nums("height_sweep_m");
    const int points = ctx.options.count("points") ? std::stoi(ctx.options.at("points")) : 16;
    const ModeModel beam = db.mode("gan_beam");
    const PiezoMaterial mat = db.piezo_material(db.mode_material("gan_beam"));
    const double x = s.positive("position_fraction") * beam.length;
    Output o;
    o.kind = "fig7";
    o.columns = {{"height_m", "input:height_sweep_m"},
                 {"g_x_hz", op("overlap_coupling_axes")},
                 {"g_y_hz", op("overlap_coupling_axes")},
                 {"g_z_hz", op("overlap_coupling_axes")}};
    for (double h : log_grid(hs[0], hs[1], static_cast<std::size_t>(points))) {
        const AxisCouplings a = overlap_coupling_axes(beam, mat, p, Vec3(x, 0, h));
        o.rows.push_back({h, rad_to_hz(a.g[0]), rad_to_hz(a.g[1]), rad_to_hz(a.g[2])});
    }
    const PositionOptimum opt = optimize_ion_along_beam(beam, mat, p, s.positive("height_m"), Vec3::UnitZ());
    o.inputs = {{"species", p.name}, {"position_fraction", s.num("position_fraction")}, {"points", points},
                {"beam_length_m", beam.length}, {"beam_frequency_hz", rad_to_hz(beam.omega0)}};
    o.summary = {{"optimal_position_fraction", opt.position / beam.length},
                 {"optimal_g_hz", rad_to_hz(opt.coupling)},
                 {"mode_mass_fraction", beam.mode_mass / beam.total_mass()}};
    o.criteria = {4};
    return o;
}

Output run_quartz_shunt(const Context& ctx) {
    const Database& db = ctx.db;
    const Node s = db.setup("quartz_shunt");
    const Particle p = db.particle(s.str("species"));
    const PiezoMaterial mat = db.piezo_material(db.mode_material("bva"));
    const double dT = s.positive("trap_gap_m"), ct = s.positive("c_trap_f");
    const auto span = s.nums("overtones");
    Output o;
    o.kind = "quartz-shunt";
    o.columns = {{"overtone", "input:overtones"},      {"frequency_hz", op("bva_mode")},
                 {"sigma_m", op("bva_sigma")},         {"electrode_radius_m", op("optimize_electrode")},
                 {"g_opt_hz", op("optimize_electrode")}, {"g_fixed_loading_hz", op("shunt_coupling_fixed_prefactor")}};
    const double ebar = mode_weighted_coefficient(mat.e_matrix, db.mode("bva", 3).polarization_axis);
    for (int n = static_cast<int>(span[0]); n <= static_cast<int>(span[1]); n += 2) {
        const ModeModel m = db.mode("bva", n);
        const ElectrodeOptimum e = optimize_electrode(p, dT, ebar, mat.permittivity, m, ct);
        o.rows.push_back({static_cast<double>(n), rad_to_hz(m.omega0), m.sigma, e.radius, rad_to_hz(e.coupling),
                          rad_to_hz(shunt_coupling_fixed_prefactor(p, dT, ebar, mat.permittivity, m, 0.58))});
    }
    const Node qc = db.setup("quartz_capacitive");
    const CapacitiveQuartzResult cap = quartz_capacitive_coupling(
        qc.positive("c_ion_f"), qc.positive("c_quartz_f"), qc.positive("c_total_f"), 0.0,
        hz_to_rad(qc.positive("frequency_hz")));
    o.inputs = {{"species", p.name}, {"trap_gap_m", dT}, {"c_trap_f", ct}, {"e_bar_c_per_m2", ebar},
                {"fixed_loading_prefactor", 0.58}};
    o.summary = {{"capacitive_g_hz", rad_to_hz(cap.g)}, {"capacitive_weak_loading", cap.weak_loading}};
    o.criteria = {6, 7};
    return o;
}

Output run_loading_map(const Context& ctx, bool fig10) {
    const Database& db = ctx.db;
    const LoadingConfig cfg = db.loading();
    const Node mp = db.root().at("loading").at("map");
    const auto jr = mp.nums("current_density_a_per_m2");
    const auto pr = mp.nums("helium_pressure_pa");
    const auto n = static_cast<std::size_t>(mp.integer("points"));
    const auto js = log_grid(jr[0], jr[1], n);
    const auto ps = log_grid(pr[0], pr[1], n);
    Output o;
    o.kind = fig10 ? "fig10" : "fig9";
    const auto a = time_to_trap(cfg, js, ps, ctx.worker_count());
    if (!fig10) {
        o.columns = {{"current_density_a_per_m2", "input:map"}, {"helium_pressure_pa", "input:map"},
                     {"n_steady", op("rates")},                 {"tau_1e_s", op("rates")},
                     {"e_capture_ev", op("capture_energy")}};
        for (const auto& c : a)
            o.rows.push_back({c.current_density_j, c.helium_pressure, c.n_steady, c.tau_1e, c.e_capture});
    } else {
        LoadingConfig cb = cfg;
        cb.t_detect = mp.nonnegative("t_detect_fig10b_s");
        const auto b = time_to_trap(cb, js, ps, ctx.worker_count());
        o.columns = {{"current_density_a_per_m2", "input:map"}, {"helium_pressure_pa", "input:map"},
                     {"pulses_needed", op("time_to_trap")},     {"t_total_s", op("time_to_trap")},
                     {"t_total_detect_s", op("time_to_trap")}};
        for (std::size_t i = 0; i < a.size(); ++i)
            o.rows.push_back({a[i].current_density_j, a[i].helium_pressure, a[i].pulses_needed, a[i].t_total,
                              b[i].t_total});
        o.inputs["t_detect_s"] = cb.t_detect;
    }
    const LoadingRates r = rates(cfg);
    o.inputs["loading"] = db.root().at("loading").raw();
    o.summary = {{"gamma_he_inverse_s", 1.0 / r.gamma_he},
                 {"capture_crossover_pa", capture_crossover_pressure(cfg, cfg.e_init)}};
    o.criteria = {11};
    return o;
}

CollisionConfig scatter_config(const Context& ctx, const std::string& name) {
    CollisionConfig cfg = ctx.db.scatter(name);
    cfg.seed = ctx.seed;
    return cfg;
}

Output run_fig14(const Context& ctx) {
    const CollisionConfig cfg = scatter_config(ctx, "fig14");
    const std::size_t n = ctx.options.count("samples")
                              ? static_cast<std::size_t>(std::stoull(ctx.options.at("samples")))
                              : static_cast<std::size_t>(ctx.db.scatter_node("fig14").integer("samples"));
    McOptions mo;
    mo.workers = ctx.worker_count();
    const KickHistogram h = collision_mc(cfg, n, mo);
    const KickBound kb = kick_bound(cfg);
    Output o;
    o.kind = "fig14";
    o.columns = {{"bin_lo_ev", op("collision_mc")}, {"bin_hi_ev", op("collision_mc")}, {"count", op("collision_mc")}};
    for (std::size_t i = 0; i + 1 < h.bin_edges.size(); ++i)
        o.rows.push_back({h.bin_edges[i], h.bin_edges[i + 1], static_cast<double>(h.counts[i])});
    o.inputs = {{"scatter", ctx.db.scatter_node("fig14").raw()}, {"samples", n}};
    o.summary = {{"mean_abs_de_ev", h.mean_abs_de},
                 {"mean_abs_de_over_ep", h.mean_abs_de / cfg.primary_energy_ep},
                 {"bound_ev", kb.mean_kick},
                 {"bound_exact_ev", kb.mean_kick_exact},
                 {"gamma", kb.gamma},
                 {"beam_heating_ev_per_s", kb.beam_heating},
                 {"rejected", h.rejected},
                 {"bound_violations", h.bound_violations},
                 {"max_bound_ratio", h.max_bound_ratio}};
    o.criteria = {12};
    return o;
}

Output run_fig15(const Context& ctx) {
    const std::string panel = ctx.options.count("panel") ? ctx.options.at("panel") : "c";
    const CollisionConfig cfg = scatter_config(ctx, "fig15");
    const Node s = ctx.db.scatter_node("fig15");
    Output o;
    o.kind = "fig15" + panel;
    o.inputs = {{"scatter", s.raw()}, {"panel", panel}};
    o.criteria = {13};
    const auto phases = static_cast<std::size_t>(s.integer("phases"));
    if (panel == "a" || panel == "b") {
        TrajectoryOptions to;
        to.impact_b = s.positive("escape_impact_m");
        // Panel a is the most decelerated injection phase, panel b the phase shifted by pi.
        double best = 0.0, e_best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < phases; ++i) {
            const double ph = constants::two_pi * static_cast<double>(i) / static_cast<double>(phases);
            const double e = two_electron_trajectory(cfg, 0.0, ph, to).e_col;
            if (e < e_best) e_best = e, best = ph;
        }
        const double phase = panel == "a" ? best : std::fmod(best + constants::pi, constants::two_pi);
        to.record_stride = ctx.options.count("stride") ? std::stoul(ctx.options.at("stride")) : 20;
        const Trajectory tr = two_electron_trajectory(cfg, 0.0, phase, to);
        const double period = constants::two_pi / cfg.rf->omega_rf;
        o.columns = {{"t_over_rf_period", op("two_electron_trajectory")},
                     {"primary_z_m", op("two_electron_trajectory")},
                     {"target_x_m", op("two_electron_trajectory")},
                     {"target_y_m", op("two_electron_trajectory")},
                     {"target_z_m", op("two_electron_trajectory")},
                     {"primary_ke_ev", op("two_electron_trajectory")}};
        for (const auto& smp : tr.samples)
            o.rows.push_back({smp.t / period, smp.primary_r[2], smp.target_r[0], smp.target_r[1], smp.target_r[2],
                              smp.primary_ke});
        o.inputs["impact_m"] = to.impact_b;
        o.inputs["phase_rad"] = phase;
        o.summary = {{"e_s_ev", tr.e_s}, {"e_col_ev", tr.e_col}, {"escaped", tr.escaped}};
        return o;
    }
    if (panel != "c" && panel != "d") throw ConfigError("--panel must be one of a, b, c, d");
    const auto br = s.nums("impact_range_m");
    const auto grid = log_grid(br[0], br[1], static_cast<std::size_t>(s.integer("impact_points")));
    const PhaseScan scan = rf_phase_scan(cfg, grid, phases, ctx.worker_count());
    o.summary = {{"median_spread", scan.median_spread},
                 {"mean_half_spread", scan.mean_half_spread},
                 {"e_col_min_ev", scan.e_col_min},
                 {"e_col_max_ev", scan.e_col_max}};
    if (panel == "c") {
        o.columns = {{"impact_m", "input:impact_range_m"}, {"e_min_ev", op("rf_phase_scan")},
                     {"e_median_ev", op("rf_phase_scan")}, {"e_max_ev", op("rf_phase_scan")},
                     {"static_kick_ev", op("static_kick")},  {"spread", op("rf_phase_scan")}};
        for (const auto& r : scan.rows)
            o.rows.push_back({r.impact_b, r.e_min, r.e_median, r.e_max, r.static_kick, r.spread});
        return o;
    }
    // Panel d: phase-averaged kick against the static-trap bound over beam radii inside the scanned grid.
    o.columns = {{"beam_radius_m", "input:beam radius grid"},
                 {"phase_averaged_kick_ev", op("phase_averaged_kick")},
                 {"bound_ev", op("kick_bound")},
                 {"bound_worst_phase_ev", op("scatter_gamma")}};
    const double g_worst = scatter_gamma(cfg.e_thresh, scan.e_col_min);
    for (double r0 : log_grid(10e-6, br[1], 7)) {
        CollisionConfig c = cfg;
        c.beam_radius_r0 = r0;
        o.rows.push_back({r0, phase_averaged_kick(scan, r0), kick_bound(c).mean_kick, g_worst * coulomb_k_ev / r0});
    }
    o.summary["gamma_worst_phase"] = g_worst;
    return o;
}

using Runner = Output (*)(const Context&);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> m{
        {"table1", run_table1},
        {"table2", run_table2},
        {"table5", run_table5},
        {"fig7", run_fig7},
        {"fig9", [](const Context& c) { return run_loading_map(c, false); }},
        {"fig10", [](const Context& c) { return run_loading_map(c, true); }},
        {"fig14", run_fig14},
        {"fig15", run_fig15},
        {"quartz-shunt", run_quartz_shunt},
    };
    return m;
}

// --- output ---

struct Common {
    std::string database;
    std::vector<std::string> params;
    std::uint64_t seed = 1;
    bool check = false;
    std::string profile = "paper";
    std::string out;
    unsigned workers = 0;
};

Context make_context(const Common& c) {
    Database base = Database::load(c.database.empty() ? Database::default_path() : c.database);
    json doc = base.json();
    json ov = json::object();
    for (const auto& p : c.params) {
        apply_override(doc, p);
        ov[p.substr(0, p.find('='))] = p.substr(p.find('=') + 1);
    }
    Context ctx{Database(std::move(doc), base.path()), ov, c.seed, c.workers, {}};
    return ctx;
}

int run_checks(const Context& ctx, const std::vector<int>& ids, const std::string& profile, json* record) {
    acc::Options opt;
    opt.profile = acc::parse_profile(profile);
    opt.seed = ctx.seed;
    opt.workers = ctx.workers;
    bool all = true;
    for (int id : ids) {
        const acc::CriterionResult r = acc::run_criterion(id, ctx.db, opt);
        std::cerr << acc::summary_line(r) << "\n";
        if (record) (*record)[std::to_string(id)] = r.pass();
        if (!r.pass()) {
            all = false;
            break;  // fail loudly on the first breach
        }
    }
    return all ? ok : check_failure;
}

void write_outputs(const Output& o, const Context& ctx, const Common& c, const json& checks) {
    std::filesystem::path csv = c.out.empty() ? std::filesystem::path(o.kind + ".csv") : std::filesystem::path(c.out);
    if (csv.extension() != ".csv") csv += ".csv";
    if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
    std::filesystem::path side = csv;
    side.replace_extension(".json");

    json meta;
    meta["tool"] = "hybrid";
    meta["version"] = tool_version;
    meta["scenario"] = o.kind;
    meta["seed"] = ctx.seed;
    meta["database"] = {{"path", ctx.db.path()}, {"schema_version", database_schema_version}, {"overrides", ctx.overrides}};
    json opts = json::object();
    for (const auto& [k, v] : ctx.options) opts[k] = v;
    meta["options"] = opts;
    meta["inputs"] = o.inputs;
    meta["defaults"] = {{"frequency_unit", "Hz"}, {"tolerance_profile", c.profile}};
    json cols = json::array();
    for (const auto& col : o.columns) cols.push_back({{"name", col.name}, {"provenance", col.provenance}});
    meta["columns"] = cols;
    meta["rows"] = o.rows.size();
    meta["summary"] = o.summary;
    if (!checks.is_null()) meta["checks"] = checks;

    std::ofstream(csv, std::ios::binary) << to_csv(o);
    std::ofstream(side, std::ios::binary) << meta.dump(2) << "\n";
    if (!std::filesystem::exists(csv)) throw ConfigError("cannot write '" + csv.string() + "'");
    std::cerr << "wrote " << csv.string() << " and " << side.string() << "\n";
}

int run_scenario(const std::string& kind, const Common& c, std::map<std::string, std::string> options) {
    Context ctx = make_context(c);
    ctx.options = std::move(options);
    const auto it = runners().find(kind);
    if (it == runners().end()) {
        std::string known;
        for (const auto& [k, _] : runners()) known += (known.empty() ? "" : ", ") + k;
        throw ConfigError("unknown scenario '" + kind + "' (known: " + known + ")");
    }
    const Output o = it->second(ctx);
    json checks;
    int status = ok;
    if (c.check) {
        checks = json::object();
        status = run_checks(ctx, o.criteria, c.profile, &checks);
    }
    write_outputs(o, ctx, c, checks);
    return status;
}

// Runs a scenario file: {"kind": ..., "parameters": {"a.b": value}, "seed": n, "options": {...}}.
int run_scenario_file(const std::string& file, Common c, std::map<std::string, std::string> options) {
    std::ifstream in(file);
    if (!in) throw ConfigError("scenario: cannot open '" + file + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("scenario '" + file + "': " + e.what());
    }
    const Node s(j, "$");
    const std::string kind = s.str("kind");
    if (s.has("seed")) c.seed = static_cast<std::uint64_t>(s.integer("seed"));
    if (s.has("output_path") && c.out.empty()) c.out = s.str("output_path");
    if (s.has("parameters"))
        for (const auto& [k, v] : j["parameters"].items()) c.params.insert(c.params.begin(), k + "=" + v.dump());
    if (s.has("options"))
        for (const auto& [k, v] : j["options"].items())
            if (!options.count(k)) options[k] = v.is_string() ? v.get<std::string>() : v.dump();
    return run_scenario(kind, c, std::move(options));
}

// --- other subcommands ---

int modes_list(const Common& c) {
    const Context ctx = make_context(c);
    std::cout << "name,kind,material,overtones\n";
    for (const auto& name : ctx.db.mode_names()) {
        const Node m = ctx.db.mode_node(name);
        std::string ov;
        for (int n : ctx.db.mode_overtones(name)) ov += (ov.empty() ? "" : " ") + std::to_string(n);
        std::cout << name << "," << m.str("kind") << "," << (m.has("material") ? m.str("material") : "") << "," << ov
                  << "\n";
    }
    return ok;
}

int modes_describe(const Common& c, const std::string& name, int overtone) {
    const Context ctx = make_context(c);
    const auto ovs = ctx.db.mode_overtones(name);
    if (overtone == 0 && !ovs.empty()) overtone = ovs.front();
    const ModeModel m = ctx.db.mode(name, overtone);
    json j = {{"name", name},
              {"kind", to_string(m.kind)},
              {"frequency_hz", rad_to_hz(m.omega0)},
              {"mode_mass_kg", m.mode_mass},
              {"total_mass_kg", m.total_mass()},
              {"density_kg_per_m3", m.density}};
    if (m.overtone) j["overtone"] = m.overtone;
    if (m.thickness > 0) j["thickness_m"] = m.thickness;
    if (m.length > 0) j["length_m"] = m.length;
    if (m.sigma > 0) j["sigma_m"] = m.sigma;
    j["database"] = ctx.db.mode_node(name).raw();
    std::cout << j.dump(2) << "\n";
    return ok;
}

// Validates a user design: stability, depth, critical-current margin and dissipation against a budget.
int trap_check(const Common& c, const std::string& file) {
    const Context ctx = make_context(c);
    std::ifstream in(file);
    if (!in) throw ConfigError("trap check: cannot open '" + file + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("design '" + file + "': " + e.what());
    }
    const Node d(j, "$");
    const TrapDesign t = Database::design_from(d, d.has("name") ? d.str("name") : file);
    const Particle p = ctx.db.particle(d.has("species") ? d.str("species") : "electron");
    const MathieuResult mq = mathieu_q(p, t);
    std::cout << "check,value,limit,pass\n";
    bool pass = true;
    auto line = [&](const std::string& name, double v, double lim, bool okay) {
        std::printf("%s,%.6g,%.6g,%s\n", name.c_str(), v, lim, okay ? "yes" : "no");
        pass = pass && okay;
    };
    line("mathieu_q", mq.q, 1.0, mq.stable);
    if (mq.stable) {
        const DepthSecular ds = trap_depth_and_secular(t, p);
        const double need = d.has("budget") ? d.at("budget").num("min_depth_ev", 0.0) : 0.0;
        line("depth_ev", ds.depth_ev, need, ds.depth_ev >= need);
        line("secular_hz", rad_to_hz(ds.omega_secular), 0.0, true);
    }
    if (d.has("budget")) {
        const Node b = d.at("budget");
        const double c_total = b.has("c_total_f") ? b.positive("c_total_f") : t.c_trap;
        if (c_total <= 0.0) throw ConfigError(b.path() + ": needs c_total_f or a design c_trap_f");
        const RfPower pw = rf_power_current(t.omega_rf, c_total, t.v_rf, b.positive("quality_factor"));
        if (b.has("cooling_power_w"))
            line("dissipation_w", pw.dissipation, b.positive("cooling_power_w"),
                 pw.dissipation <= b.positive("cooling_power_w"));
        if (b.has("superconductor")) {
            const SuperconductorEntry sc = ctx.db.superconductor(b.str("superconductor"));
            const double ic = critical_current(sc.wire(b.positive("wire_width_m"), b.positive("wire_thickness_m")));
            line("critical_current_margin", ic / pw.peak_current, 1.0, ic > pw.peak_current);
        }
    }
    return pass ? ok : check_failure;
}

int heating_cmd(const Common& c, const std::string& from, const std::string& to) {
    const Context ctx = make_context(c);
    const HeatingReference ref = ctx.db.heating_reference(from);
    std::vector<std::string> parts;
    std::stringstream ss(to);
    for (std::string s; std::getline(ss, s, ',');) parts.push_back(s);
    if (parts.size() != 4) throw ConfigError("--to expects species,distance_m,frequency_hz,alpha");
    double d = 0, f = 0, a = 0;
    try {
        d = std::stod(parts[1]);
        f = std::stod(parts[2]);
        a = std::stod(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError("--to '" + to + "': distance, frequency and alpha must be numbers");
    }
    const Particle target = ctx.db.particle(parts[0]);
    const double rate = extrapolate(ref, target, d, f, a);
    std::cout << "from,species,distance_m,frequency_hz,alpha,rate_quanta_per_s,citation\n";
    std::printf("%s,%s,%.6g,%.6g,%.3g,%.6g,%s\n", ref.label.c_str(), target.name.c_str(), d, f, a, rate,
                ref.citation.c_str());
    return ok;
}

int check_all(const Common& c, const std::vector<int>& only) {
    const Context ctx = make_context(c);
    acc::Options opt;
    opt.profile = acc::parse_profile(c.profile);
    opt.seed = ctx.seed;
    opt.workers = ctx.workers;
    bool all = true;
    for (const auto& spec : acc::criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), spec.id) == only.end()) continue;
        const acc::CriterionResult r = acc::run_criterion(spec.id, ctx.db, opt);
        std::cout << acc::summary_line(r) << "\n";
        all = all && r.pass();
    }
    return all ? ok : check_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupling, trap-design, loading and scattering calculations for hybrid trapped-particle systems"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--database", common.database, "Database JSON (default from HYBRID_DATABASE or the built-in path)");
    app.add_option("--seed", common.seed, "Seed for stochastic scenarios");
    app.add_flag("--check", common.check, "Run the acceptance checks tied to the scenario; exit 2 on a breach");
    app.add_option("--tolerance-profile", common.profile, "Tolerance profile for checks")
        ->check(CLI::IsMember({"paper", "strict"}));
    app.add_option("--out", common.out, "Output CSV path; the JSON sidecar sits next to it");
    app.add_option("--param", common.params, "Database override, dotted.path=value (repeatable)");
    app.add_option("--workers", common.workers, "Worker threads (0 = hardware concurrency)");

    std::map<std::string, std::string> options;
    std::string scenario, panel, convention, samples, points, tolerance;
    auto scenario_options = [&](CLI::App* sub) {
        sub->add_option("--panel", panel, "fig15 panel")->check(CLI::IsMember({"a", "b", "c", "d"}));
        sub->add_option("--convention", convention, "table1 swap-time convention")
            ->check(CLI::IsMember({"pi", "2pi"}));
        sub->add_option("--samples", samples, "fig14 sample count");
        sub->add_option("--points", points, "fig7 height points");
        sub->add_option("--quad-tolerance", tolerance, "table5 quadrature relative tolerance");
    };
    auto* run = app.add_subcommand("run", "Run a scenario and write CSV plus a JSON sidecar");
    run->add_option("scenario", scenario,
                    "table1, table2, table5, fig7, fig9, fig10, fig14, fig15, quartz-shunt, or a scenario .json")
        ->required();
    scenario_options(run);
    // Scenario names are also accepted as top-level subcommands.
    std::vector<CLI::App*> shortcuts;
    for (const auto& [name, _] : runners()) {
        auto* s = app.add_subcommand(name, "Same as 'run " + name + "'");
        scenario_options(s);
        shortcuts.push_back(s);
    }
    auto* modes = app.add_subcommand("modes", "Mode presets")->require_subcommand(1);
    modes->add_subcommand("list", "List mode presets");
    std::string mode_name;
    int overtone = 0;
    auto* describe = modes->add_subcommand("describe", "Describe one mode preset");
    describe->add_option("name", mode_name)->required();
    describe->add_option("--overtone", overtone);

    auto* trap = app.add_subcommand("trap", "Trap design tools")->require_subcommand(1);
    std::string design_file;
    auto* tcheck = trap->add_subcommand("check", "Validate a design JSON");
    tcheck->add_option("design", design_file)->required()->check(CLI::ExistingFile);

    std::string from, to;
    auto* heat = app.add_subcommand("heating", "Extrapolate a heating-rate reference");
    heat->add_option("--from", from, "Reference label")->required();
    heat->add_option("--to", to, "species,distance_m,frequency_hz,alpha")->required();

    std::vector<int> only;
    auto* chk = app.add_subcommand("check", "Run the acceptance criteria");
    chk->add_option("--only", only, "Criterion ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_failure;
    }

    try {
        if (!panel.empty()) options["panel"] = panel;
        if (!convention.empty()) options["convention"] = convention;
        if (!samples.empty()) options["samples"] = samples;
        if (!points.empty()) options["points"] = points;
        if (!tolerance.empty()) options["tolerance"] = tolerance;
        if (*run) {
            if (scenario.size() > 5 && scenario.substr(scenario.size() - 5) == ".json")
                return run_scenario_file(scenario, common, options);
            return run_scenario(scenario, common, options);
        }
        for (auto* s : shortcuts)
            if (*s) return run_scenario(s->get_name(), common, options);
        if (*modes) {
            if (*describe) return modes_describe(common, mode_name, overtone);
            return modes_list(common);
        }
        if (*tcheck) return trap_check(common, design_file);
        if (*heat) return heating_cmd(common, from, to);
        if (*chk) return check_all(common, only);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config_failure;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config_failure;
    }
    return ok;
}
