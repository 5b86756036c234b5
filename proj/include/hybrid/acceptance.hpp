#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "hybrid/circuits.hpp"
#include "hybrid/database.hpp"
#include "hybrid/etrap.hpp"
#include "hybrid/heatex.hpp"
#include "hybrid/loading.hpp"
#include "hybrid/mech.hpp"
#include "hybrid/piezo.hpp"
#include "hybrid/scatter.hpp"

namespace hybrid::acceptance {

enum class ToleranceProfile { paper, strict };

inline ToleranceProfile parse_profile(const std::string& s) {
    if (s == "paper") return ToleranceProfile::paper;
    if (s == "strict") return ToleranceProfile::strict;
    throw ConfigError("tolerance profile must be 'paper' or 'strict', got '" + s + "'");
}

inline const char* to_string(ToleranceProfile p) { return p == ToleranceProfile::paper ? "paper" : "strict"; }

struct Check {
    std::string name;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    std::vector<std::string> notes;
    double seconds = 0.0;

    bool pass() const {
        return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }
    const Check* first_failure() const {
        for (const auto& c : checks)
            if (!c.pass) return &c;
        return nullptr;
    }
};

// Collects checks. The strict profile halves relative tolerances, takes the square root of
// multiplicative bands and halves interval widths about their midpoint; exact checks are unchanged.
class Checker {
public:
    Checker(CriterionResult& r, ToleranceProfile p) : r_(r), s_(p == ToleranceProfile::paper ? 1.0 : 0.5) {}

    void rel(const std::string& name, double value, double ref, double tol) {
        const double t = tol * s_;
        const double a = ref * (1.0 - t), b = ref * (1.0 + t);
        add(name, value, std::min(a, b), std::max(a, b));
    }
    void exact(const std::string& name, double value, double ref, double tol = 1e-12) {
        const double w = tol * std::max(std::abs(ref), std::numeric_limits<double>::min());
        add(name, value, ref - w, ref + w);
    }
    void factor(const std::string& name, double value, double ref, double f) {
        const double ff = std::pow(f, s_);
        add(name, value, ref / ff, ref * ff);
    }
    void range(const std::string& name, double value, double lo, double hi) {
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo) * s_;
        add(name, value, mid - half, mid + half);
    }
    void at_most(const std::string& name, double value, double limit) {
        add(name, value, -std::numeric_limits<double>::infinity(), limit);
    }
    void truth(const std::string& name, bool ok) { add(name, ok ? 1.0 : 0.0, 1.0, 1.0); }
    void note(const std::string& s) { r_.notes.push_back(s); }

private:
    void add(const std::string& name, double value, double lo, double hi) {
        r_.checks.push_back(Check{name, value, lo, hi, std::isfinite(value) && value >= lo && value <= hi});
    }
    CriterionResult& r_;
    double s_;
};

struct Options {
    ToleranceProfile profile = ToleranceProfile::paper;
    unsigned workers = 0;  // 0 selects the hardware concurrency
    std::size_t mc_samples = 0;  // 0 selects the database value
    std::uint64_t seed = 1;

    unsigned worker_count() const {
        return workers > 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
    }
};

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 1: particle-resonator coupling and the minimal Q columns.
inline void table_one(const Database& db, Checker& c) {
    const Node s = db.setup("table1");
    const double d = s.positive("gap_m"), ct = s.positive("c_trap_f"), alpha = s.positive("alpha");
    for (const auto& row : db.table1()) {
        const double g = particle_resonator_coupling(row.species, d, alpha, ct);
        c.rel(row.species.name + " g", g, row.g_ref, 0.05);
        const auto conv = SwapConvention::two_pi_over_g;
        c.factor(row.species.name + " Q_min 4 K", min_quality_factor(g, row.omega0, Environment{4.0}, 1.0, conv),
                 row.q_min_4k_ref, 2.0);
        c.factor(row.species.name + " Q_min 50 mK", min_quality_factor(g, row.omega0, Environment{0.05}, 1.0, conv),
                 row.q_min_50mk_ref, 2.0);
    }
    c.note("Q_min uses the 2pi/g swap-time convention");
}

// 2: quarter-wave lumped equivalent and the coupling penalty it implies.
inline void quarter_wave(const Database& db, Checker& c) {
    const Node q = db.setup("quarter_wave");
    const Node s = db.setup("table1");
    const double w = hz_to_rad(q.positive("frequency_hz"));
    const LumpedLC lc = quarterwave_lumped(q.positive("z0_ohm"), w);
    c.rel("C equivalent [F]", lc.capacitance, 250e-12, 0.02);
    for (const auto& row : db.table1()) {
        const BVDEquivalent b = particle_bvd(row.species, s.positive("gap_m"), s.positive("alpha"), row.omega0);
        const double g14 = particle_resonator_coupling(row.species, s.positive("gap_m"), s.positive("alpha"),
                                                       s.positive("c_trap_f"));
        const double g16 = quarterwave_coupling(b.series_capacitance, lc.capacitance, s.positive("c_trap_f"), row.omega0);
        c.rel(row.species.name + " degradation factor", g14 / g16, 70.0, 0.20);
    }
}

// 3: membrane couplings and an independent long-double evaluation of the closed form.
inline void membranes(const Database& db, Checker& c) {
    const Node s = db.setup("membrane");
    const Particle p = db.particle(s.str("species"));
    const double u = s.num("bias_v"), d0 = s.positive("gap_m"), alpha = s.positive("alpha");
    const ModeModel drum = db.mode("sin_drum");
    const ModeModel tramp = db.mode("sin_trampoline");
    const double g_drum = membrane_coupling(p, u, d0, drum.omega0, drum.mode_mass, alpha);
    const double g_tramp = membrane_coupling(p, u, d0, tramp.omega0, tramp.mode_mass, alpha);
    c.factor("drum g [rad/s]", g_drum, hz_to_rad(0.24), 3.0);
    c.factor("trampoline g [rad/s]", g_tramp, hz_to_rad(12.0), 3.0);
    for (const ModeModel* m : {&drum, &tramp}) {
        const long double q = std::abs(static_cast<long double>(p.charge));
        const long double oracle = static_cast<long double>(alpha) * q * u /
                                   (2.0L * d0 * d0 * static_cast<long double>(m->omega0) *
                                    std::sqrt(static_cast<long double>(p.mass) * m->mode_mass));
        const double g = membrane_coupling(p, u, d0, m->omega0, m->mode_mass, alpha);
        c.exact(std::string(to_string(m->kind)) + " formula vs oracle", g, static_cast<double>(oracle), 1e-12);
    }
    c.note("membrane thickness 100 nm, density 3100 kg/m^3 (assumed)");
}

// 4: GaN cantilever coupling, optimal ion position and height scaling.
inline void gan_beam(const Database& db, Checker& c) {
    const Node s = db.setup("gan");
    const Particle p = db.particle(s.str("species"));
    const ModeModel beam = db.mode("gan_beam");
    const PiezoMaterial mat = db.piezo_material(db.mode_material("gan_beam"));
    const double h = s.positive("height_m");
    const double x = s.positive("position_fraction") * beam.length;
    const Vec3 axis = Vec3::UnitZ();
    const double g = overlap_coupling(beam, mat, p, Vec3(x, 0, h), axis);
    c.factor("g(h = 50 um) [rad/s]", g, hz_to_rad(235.0), 2.0);
    const PositionOptimum opt = optimize_ion_along_beam(beam, mat, p, h, axis);
    c.range("r1_opt / l", opt.position / beam.length, 0.5, 0.7);
    const auto hs = s.nums("height_sweep_m");
    std::vector<double> hh, gg;
    for (double hi = hs[0]; hi <= hs[1] * (1 + 1e-12); hi *= std::pow(hs[1] / hs[0], 1.0 / 6.0)) {
        hh.push_back(hi);
        gg.push_back(overlap_coupling(beam, mat, p, Vec3(x, 0, hi), axis));
    }
    c.range("log-log slope over h", loglog_slope(hh, gg), -3.5, -2.5);
    const ModeModel phys = db.mode("gan_beam_physical");
    const double g_phys =
        overlap_coupling(phys, db.piezo_material(db.mode_material("gan_beam_physical")), p, Vec3(x, 0, h), axis);
    c.note("physical-density variant g/2pi = " + fmt("%.1f Hz", rad_to_hz(g_phys)));
}

// 5: direct quartz couplings, the aligned-dipole bound and the two overlap formulations.
inline void quartz_direct(const Database& db, Checker& c) {
    const Node s = db.setup("quartz_direct");
    const Particle p = db.particle(s.str("species"));
    const double h = s.positive("height_m");
    const PiezoMaterial mat = db.piezo_material(db.mode_material("bva"));
    QuadratureSpec quad;
    quad.relative_tolerance = 1e-4;
    const char* axes = "xyz";
    for (const auto& row : db.table5()) {
        const ModeModel m = db.mode("bva", row.overtone);
        const Vec3 ion(0, m.thickness + h, 0);
        const AxisCouplings a = overlap_coupling_axes(m, mat, p, ion, quad);
        const AxisCouplings b = overlap_coupling_dipole_axes(m, mat, p, ion, quad);
        const double bound = aligned_dipole_bound(p, m, mat, h);
        for (int i = 0; i < 3; ++i) {
            const std::string tag = "n=" + std::to_string(row.overtone) + " g_" + axes[i];
            c.rel(tag + " [rad/s]", a.g[i], row.g_ref[i], 0.30);
            c.at_most(tag + " <= aligned bound", a.g[i], bound);
            const double tol = a.error[i] + b.error[i] + 2.0 * quad.relative_tolerance * std::max(a.g[i], b.g[i]);
            c.at_most(tag + " |matrix - dipole| [rad/s]", std::abs(a.g[i] - b.g[i]), tol);
        }
    }
    const ModeModel beam = db.mode("gan_beam");
    const PiezoMaterial gan = db.piezo_material(db.mode_material("gan_beam"));
    const Vec3 ion(0.6 * beam.length, 0, 50e-6);
    const AxisCouplings a = overlap_coupling_axes(beam, gan, p, ion, quad);
    const AxisCouplings b = overlap_coupling_dipole_axes(beam, gan, p, ion, quad);
    const double tol = a.error[2] + b.error[2] + 2.0 * quad.relative_tolerance * std::max(a.g[2], b.g[2]);
    c.at_most("GaN |matrix - dipole| [rad/s]", std::abs(a.g[2] - b.g[2]), tol);
}

// 6: Cauchy-Schwarz bound, shunt-capacitor coupling, optimal electrode and overtone scaling.
inline void quartz_bounds(const Database& db, Checker& c) {
    const Particle p = db.particle(db.setup("quartz_direct").str("species"));
    const double h = db.setup("quartz_direct").positive("height_m");
    const Node s = db.setup("quartz_shunt");
    const PiezoMaterial mat = db.piezo_material(db.mode_material("bva"));
    const ModeModel m3 = db.mode("bva", 3);
    c.factor("CS bound [rad/s]", cs_bound(m3, mat, p, h), hz_to_rad(1e3), 2.0);
    const double ebar = mode_weighted_coefficient(mat.e_matrix, m3.polarization_axis);
    const double dT = s.positive("trap_gap_m"), ct = s.positive("c_trap_f");
    const ElectrodeOptimum opt = optimize_electrode(p, dT, ebar, mat.permittivity, m3, ct);
    c.rel("shunt g [rad/s]", opt.coupling, hz_to_rad(10.0), 0.30);
    c.rel("L_e,opt / sigma", opt.radius / m3.sigma, 1.05, 0.05);
    const auto span = s.nums("overtones");
    std::vector<double> ns, gs, gs_opt;
    for (int n = static_cast<int>(span[0]); n <= static_cast<int>(span[1]); n += 2) {
        const ModeModel m = db.mode("bva", n);
        ns.push_back(n);
        gs.push_back(shunt_coupling_fixed_prefactor(p, dT, ebar, mat.permittivity, m, 0.58));
        gs_opt.push_back(optimize_electrode(p, dT, ebar, mat.permittivity, m, ct).coupling);
    }
    c.range("overtone exponent (fixed loading)", loglog_slope(ns, gs), -0.6, -0.4);
    c.note("re-optimised electrode per overtone: exponent " + fmt("%.3f", loglog_slope(ns, gs_opt)));
}

// 7: cooling limit and coherence time of the quartz mode.
inline void cooling(const Database& db, Checker& c) {
    const Node s = db.setup("cooling");
    const double g = hz_to_rad(s.positive("g_hz")), q = s.positive("quality_factor");
    const auto temps = s.nums("temperatures_k");
    const CoolingLimit hot = cooling_limit(g, q, Environment{temps[0]});
    const CoolingLimit cold = cooling_limit(g, q, Environment{temps[1]});
    c.factor("n_bar 4 K", hot.steady_quanta, 16.0, 2.0);
    c.factor("n_bar 50 mK", cold.steady_quanta, 0.2, 2.0);
    c.rel("tau_coh 4 K [s]", hot.coherence_time, 2e-3, 0.10);
}

// 8: trap design consistency, critical currents and dissipation.
inline void trap_designs(const Database& db, Checker& c) {
    const Particle e = db.particle("electron");
    for (const std::string name : {"fig11a", "fig11b"}) {
        const TrapDesign t = db.design(name);
        const DesignReference ref = db.design_reference(name);
        const DepthSecular ds = trap_depth_and_secular(t, e);
        c.rel(name + " q_mathieu", ds.q, ref.get("q_mathieu"), 0.15);
        c.rel(name + " omega_z [rad/s]", ds.omega_secular, hz_to_rad(ref.get("secular_z_hz")), 0.15);
        c.rel(name + " depth [eV]", ds.depth_ev, ref.get("depth_ev"), 0.15);
        const RfPower pw = rf_power_current(t.omega_rf, t.c_trap, t.v_rf, 1.0);
        c.exact(name + " I_rf formula", pw.peak_current, t.omega_rf * t.c_trap * t.v_rf);
        c.rel(name + " I_rf [A]", pw.peak_current, ref.get("i_rf_a"), 0.15);
        c.rel(name + " g [rad/s]", particle_resonator_coupling(e, t.scale_d, t.alpha, t.c_trap),
              hz_to_rad(ref.get("g_hz")), 0.15);
    }
    for (const std::string sc : {"Nb", "Al"}) {
        const SuperconductorEntry s = db.superconductor(sc);
        c.exact(sc + " I_c [A]", critical_current(s.wire(s.calib_width, s.calib_thickness)), s.calib_current);
    }
    const Node d = db.root().at("dissipation");
    const auto fr = d.nums("rf_frequency_hz");
    double worst = 0.0;
    for (double f : fr)
        worst = std::max(worst, rf_power_current(hz_to_rad(f), d.positive("c_total_f"), d.positive("v_rf_v"),
                                                 d.positive("quality_factor"))
                                    .dissipation);
    c.at_most("P_dis at the corner [W]", worst, d.positive("limit_w") * (1.0 + 0.15));
    const double high = rf_power_current(hz_to_rad(fr.back()), d.positive("c_total_f"), d.positive("v_rf_high_v"),
                                         d.positive("quality_factor"))
                            .dissipation;
    c.note("P_dis at " + fmt("%.0f V", d.positive("v_rf_high_v")) + ": " + fmt("%.2f mW", high * 1e3));
}

// 9: detection network capacitance, signal linewidth and crosstalk symmetry.
inline void detection(const Database& db, Checker& c) {
    const Particle e = db.particle("electron");
    const Node det = db.root().at("detection");
    const double qd = det.positive("quality_factor"), w0 = hz_to_rad(det.positive("secular_frequency_hz"));
    for (const std::string name : {"fig11a", "fig11b"}) {
        const TrapDesign t = db.design(name);
        const DesignReference ref = db.design_reference(name);
        const DetectionMetrics dm = detection_metrics(t, e, qd, w0);
        const auto& k = t.capacitances;
        const double algebra =
            k.c_cap + 1.0 / (1.0 / k.c_rf1 + 1.0 / k.c_rf2) + 1.0 / (1.0 / k.c_iso1 + 1.0 / k.c_iso2);
        c.exact(name + " C_total network algebra", dm.c_total, algebra, 1e-12);
        c.rel(name + " C_total [F]", dm.c_total, ref.get("c_total_f"), 0.005);
        c.rel(name + " linewidth [rad/s]", dm.linewidth, hz_to_rad(ref.get("linewidth_hz")), 0.10);
        const Crosstalk x = crosstalk(t, qd, qd, w0, t.omega_rf);
        c.truth(name + " crosstalk vanishes at epsilon = 0", x.epsilon == 0.0 && x.dq_rf_rel == 0.0 && x.dq_det_rel == 0.0);
    }
}

// 10: parametric x-z exchange rate.
inline void parametric(const Database& db, Checker& c) {
    const Node s = db.root().at("parametric");
    const std::string name = s.str("design");
    const TrapDesign t = db.design(name);
    const DesignReference ref = db.design_reference(name);
    const Particle e = db.particle("electron");
    const double wx = hz_to_rad(ref.get("secular_xy_hz")), wz = hz_to_rad(ref.get("secular_z_hz"));
    const ParametricDrive unit = parametric_rate(t, e, wx, wz, 1.0);
    c.rel("rate per volt [rad/s/V]", unit.rate_2xialpha, hz_to_rad(s.positive("rate_per_volt_hz")), 0.05);
    const ParametricDrive drv = parametric_rate(t, e, wx, wz, s.positive("drive_v"));
    c.rel("rate at drive [rad/s]", drv.rate_2xialpha, hz_to_rad(s.positive("target_rate_hz")), 0.10);
    c.note("drive amplitude " + fmt("%.2f um", drv.drive_amplitude * 1e6));
}

// 11: loading anchors, ODE fixed point and the structure of the (J, P) maps.
inline void loading_maps(const Database& db, Checker& c, const Options& opt) {
    const LoadingConfig cfg = db.loading();
    const LoadingRates r = rates(cfg);
    c.rel("1/Gamma_He [s]", 1.0 / r.gamma_he, 1.3e-6, 0.15);
    c.rel("E_capture crossover [Pa]", capture_crossover_pressure(cfg, cfg.e_init), 0.027, 0.20);
    const PopulationResult pop = integrate_population(cfg);
    c.exact("N_ss analytic vs ODE", pop.n_final, pop.n_steady_analytic, 1e-6);

    const Node mp = db.root().at("loading").at("map");
    const auto jr = mp.nums("current_density_a_per_m2");
    const auto pr = mp.nums("helium_pressure_pa");
    const auto n = static_cast<std::size_t>(mp.integer("points"));
    const auto js = log_grid(jr[0], jr[1], n);
    const auto ps = log_grid(pr[0], pr[1], 4 * n);
    const double knee = capture_crossover_pressure(cfg, cfg.e_init);
    for (double td : {0.0, mp.nonnegative("t_detect_fig10b_s")}) {
        LoadingConfig base = cfg;
        base.t_detect = td;
        const auto cells = time_to_trap(base, js, ps, opt.worker_count());
        bool n_mono = true, below = true, above = true;
        double worst_ridge = 0.0;
        for (std::size_t i = 0; i < js.size(); ++i) {
            std::size_t best = 0;
            for (std::size_t k = 0; k < ps.size(); ++k) {
                const auto& cell = cells[i * ps.size() + k];
                if (cell.t_total < cells[i * ps.size() + best].t_total) best = k;
                if (k > 0) {
                    const auto& prev = cells[i * ps.size() + k - 1];
                    n_mono = n_mono && cell.n_steady > prev.n_steady;
                    if (ps[k] <= knee) below = below && cell.t_total < prev.t_total;
                    if (ps[k - 1] >= knee) above = above && cell.t_total > prev.t_total;
                }
                if (i > 0) n_mono = n_mono && cell.n_steady > cells[(i - 1) * ps.size() + k].n_steady;
            }
            worst_ridge = std::max(worst_ridge, std::abs(ps[best] / 0.027 - 1.0));
        }
        const std::string tag = td > 0.0 ? " (t_det 10 us)" : " (t_det 0)";
        c.truth("N_ss increasing in J and P" + tag, n_mono);
        c.truth("t_total falls below the knee" + tag, below);
        c.truth("t_total rises above the knee" + tag, above);
        c.at_most("optimal pressure ridge, max |P/0.027 - 1|" + tag, worst_ridge, 0.20);
    }
}

// 12: analytic kick bounds and the static-trap collision Monte Carlo.
inline void scatter_static(const Database& db, Checker& c, const Options& opt) {
    CollisionConfig cfg = db.scatter("fig14");
    cfg.seed = opt.seed;
    c.range("gamma(1 eV, 30 eV)", scatter_gamma(1.0, 30.0), 1.825, 1.835);
    c.range("gamma(0.3 meV, 30 eV)", scatter_gamma(3e-4, 30.0), 1.005, 1.015);
    const double k_r0 = coulomb_k_ev / cfg.beam_radius_r0 / cfg.primary_energy_ep;
    c.range("bound / E_p (gamma = 1)", k_r0, 4.75e-7, 4.85e-7);
    CollisionConfig c7 = cfg;
    c7.e_thresh = 3e-4;
    c.note("bound / E_p with gamma(0.3 meV): " + fmt("%.4g", kick_bound(c7).mean_kick / cfg.primary_energy_ep));

    const std::size_t n = opt.mc_samples > 0 ? opt.mc_samples
                                             : static_cast<std::size_t>(db.scatter_node("fig14").integer("samples"));
    McOptions mo;
    mo.workers = opt.worker_count();
    const KickHistogram h = collision_mc(cfg, n, mo);
    c.range("MC mean |dE| / E_p", h.mean_abs_de / cfg.primary_energy_ep, 0.25 * 0.74e-7, 2.0 * 0.74e-7);
    c.exact("per-sample bound violations", static_cast<double>(h.bound_violations), 0.0, 0.0);
    c.note("samples " + std::to_string(h.sample_count) + ", rejected " + std::to_string(h.rejected) +
           ", max |dE|/bound " + fmt("%.3f", h.max_bound_ratio));

    TrajectoryOptions to;
    to.with_primary = false;
    to.follow_time = 100.0 * constants::two_pi / cfg.trap_freqs.minCoeff();
    const Trajectory tr = two_electron_trajectory(cfg, 0.5, 0.3, to);
    c.at_most("energy drift over 100 periods", tr.energy_drift, 1e-6);

    McOptions m1, m4;
    m1.workers = 1;
    m4.workers = 4;
    const KickHistogram a = collision_mc(cfg, 256, m1);
    const KickHistogram b = collision_mc(cfg, 256, m4);
    c.truth("seed determinism across worker counts",
            a.counts == b.counts && a.bin_edges == b.bin_edges && a.mean_abs_de == b.mean_abs_de);
}

// 13: rf phase scan on the design-b preset and the escape/confine dichotomy.
inline void scatter_rf(const Database& db, Checker& c, const Options& opt) {
    const CollisionConfig cfg = db.scatter("fig15");
    const Node s = db.scatter_node("fig15");
    const auto br = s.nums("impact_range_m");
    const auto grid = log_grid(br[0], br[1], static_cast<std::size_t>(s.integer("impact_points")));
    const PhaseScan scan = rf_phase_scan(cfg, grid, static_cast<std::size_t>(s.integer("phases")), opt.worker_count());
    c.range("phase spread (median std/mean)", scan.median_spread, 0.4, 0.8);
    c.rel("decelerated primary energy [eV]", scan.e_col_min, 15.0, 0.15);
    c.rel("accelerated primary energy [eV]", scan.e_col_max, 46.0, 0.15);
    bool tracks = true;
    for (const auto& row : scan.rows) tracks = tracks && row.static_kick >= row.e_min && row.static_kick <= row.e_max;
    c.truth("static curve inside the phase band at every b", tracks);
    c.note("mean half-range / static curve " + fmt("%.2f", scan.mean_half_spread));

    TrajectoryOptions to;
    to.impact_b = s.positive("escape_impact_m");
    const int n_phase = static_cast<int>(s.integer("phases"));
    std::vector<Trajectory> runs;
    for (int i = 0; i < n_phase; ++i)
        runs.push_back(two_electron_trajectory(cfg, 0.0, constants::two_pi * i / n_phase, to));
    const auto slow = static_cast<int>(
        std::min_element(runs.begin(), runs.end(), [](auto& a, auto& b) { return a.e_col < b.e_col; }) -
        runs.begin());
    const Trajectory& dec = runs[slow];
    const Trajectory& acc = runs[(slow + n_phase / 2) % n_phase];
    c.truth("decelerated phase ejects the target", dec.escaped);
    c.truth("pi-shifted phase stays confined", !acc.escaped);
    c.truth("ejecting phase has the lower impact energy", dec.e_col < acc.e_col);
    c.note("E_col " + fmt("%.1f eV", dec.e_col) + " (escape) vs " + fmt("%.1f eV", acc.e_col) + " (confined)");
}

// 14: heating-rate extrapolation.
inline void heating(const Database& db, Checker& c) {
    const Node t = db.root().at("heating_target");
    const Particle target = db.particle(t.str("species"));
    const double d = t.positive("distance_m"), f = t.positive("frequency_hz");
    const auto band = t.nums("band_quanta_per_s");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, worst2 = 0.0;
    bool identity = true;
    for (const auto& ref : db.heating_references()) {
        const double r = extrapolate(ref, target, d, f, 0.5);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        worst2 = std::max(worst2, extrapolate(ref, target, d, f, 2.0));
        identity = identity && extrapolate(ref, ref.species, ref.distance_d, ref.frequency_f, 0.5) == ref.rate;
    }
    c.rel("band low [quanta/s]", lo, band[0], 0.10);
    c.rel("band high [quanta/s]", hi, band[1], 0.10);
    c.truth("identity extrapolation exact", identity);
    c.at_most("alpha = 2 worst row [quanta/s]", worst2, 0.02);
}

struct CriterionSpec {
    int id;
    const char* title;
    std::function<void(const Database&, Checker&, const Options&)> run;
};

inline const std::vector<CriterionSpec>& criteria() {
    static const std::vector<CriterionSpec> all{
        {1, "Table I couplings and Q_min", [](auto& db, auto& c, auto&) { table_one(db, c); }},
        {2, "quarter-wave equivalent", [](auto& db, auto& c, auto&) { quarter_wave(db, c); }},
        {3, "membrane couplings", [](auto& db, auto& c, auto&) { membranes(db, c); }},
        {4, "GaN cantilever", [](auto& db, auto& c, auto&) { gan_beam(db, c); }},
        {5, "quartz direct coupling", [](auto& db, auto& c, auto&) { quartz_direct(db, c); }},
        {6, "quartz bounds and shunt", [](auto& db, auto& c, auto&) { quartz_bounds(db, c); }},
        {7, "cooling limit", [](auto& db, auto& c, auto&) { cooling(db, c); }},
        {8, "trap designs", [](auto& db, auto& c, auto&) { trap_designs(db, c); }},
        {9, "detection and crosstalk", [](auto& db, auto& c, auto&) { detection(db, c); }},
        {10, "parametric cooling", [](auto& db, auto& c, auto&) { parametric(db, c); }},
        {11, "loading", [](auto& db, auto& c, auto& o) { loading_maps(db, c, o); }},
        {12, "scattering", [](auto& db, auto& c, auto& o) { scatter_static(db, c, o); }},
        {13, "rf phase scan", [](auto& db, auto& c, auto& o) { scatter_rf(db, c, o); }},
        {14, "heating extrapolation", [](auto& db, auto& c, auto&) { heating(db, c); }},
    };
    return all;
}

// Runs one criterion. Library errors become a failing check instead of escaping.
inline CriterionResult run_criterion(int id, const Database& db, const Options& opt) {
    for (const auto& spec : criteria()) {
        if (spec.id != id) continue;
        CriterionResult r;
        r.id = id;
        r.title = spec.title;
        Checker c(r, opt.profile);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            spec.run(db, c, opt);
        } catch (const NumericalError& e) {
            c.truth(std::string("numerical failure: ") + e.what(), false);
        } catch (const Error& e) {
            c.truth(std::string("error: ") + e.what(), false);
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }
    throw ConfigError("unknown acceptance criterion " + std::to_string(id));
}

inline std::string summary_line(const CriterionResult& r) {
    std::string s = (r.pass() ? "PASS " : "FAIL ") + std::to_string(r.id) + " " + r.title;
    if (const Check* f = r.first_failure()) {
        char buf[256];
        std::snprintf(buf, sizeof buf, " | first breach: %s = %.6g outside [%.6g, %.6g]", f->name.c_str(), f->value,
                      f->lo, f->hi);
        s += buf;
    }
    return s;
}

}  // namespace hybrid::acceptance
