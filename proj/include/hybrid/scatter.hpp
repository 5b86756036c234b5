#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "hybrid/constants.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/parallel.hpp"
#include "hybrid/quadrature.hpp"

namespace hybrid {

// Coulomb constant q^2 / (4 pi eps0) in J m and in eV m.
inline constexpr double coulomb_k = constants::elementary_charge * constants::elementary_charge /
                                    (4.0 * constants::pi * constants::epsilon0);
inline constexpr double coulomb_k_ev = coulomb_k / constants::electron_volt;

// Quadrupole rf drive, U = -(q m Omega^2 / 8)(x^2 + y^2 - 2 z^2) cos(Omega t + phase) inside
// the electrode cylinder |z| <= z_extent, rho <= rho_extent, and field free outside it.
struct RfDrive {
    double omega_rf = 0.0;       // rad/s
    double q_mathieu = 0.0;      // axial q
    double initial_phase = 0.0;  // rad at t = 0
    double z_extent = 100e-6;    // m
    double rho_extent = 120e-6;  // m
};

struct CollisionConfig {
    double primary_energy_ep = 30.0;  // eV
    double beam_radius_r0 = 100e-6;   // m
    Vec3 trap_freqs = Vec3::Constant(constants::two_pi * 1e9);  // rad/s
    double trap_volume_l = 95e-6;     // m
    double u_depth = 1.01;            // eV, cap of the static pseudopotential
    double e_thresh = 1.01;           // eV, largest initial target energy entering gamma
    std::optional<RfDrive> rf;
    double injection_z = -1e-3;       // m
    std::uint64_t seed = 1;
    double current_density_j = 1.0;   // A/m^2, only used for the beam heating bound
    double rel_tol = 1e-10;
    double clamp_fraction = 0.05;     // dt <= fraction * distance / relative speed

    void validate() const {
        require(primary_energy_ep > 0.0 && beam_radius_r0 > 0.0 && trap_volume_l > 0.0 && u_depth > 0.0,
                "collision: E_p, r0, l, u_depth must be positive");
        require(e_thresh > 0.0, "collision: e_thresh must be positive");
        require(trap_freqs.minCoeff() > 0.0, "collision: trap frequencies must be positive");
        require(injection_z < 0.0, "collision: injection_z must be negative (primary travels along +z)");
        require(current_density_j >= 0.0, "collision: current density must be >= 0");
        require(rel_tol > 0.0 && rel_tol < 1e-3, "collision: rel_tol must be in (0, 1e-3)");
        require(clamp_fraction > 0.0 && clamp_fraction <= 1.0, "collision: clamp_fraction must be in (0, 1]");
        if (rf) {
            require(rf->omega_rf > 0.0 && rf->q_mathieu > 0.0, "collision: rf omega and q must be positive");
            require(rf->z_extent > 0.0 && rf->rho_extent > 0.0, "collision: rf electrode extents must be positive");
        }
    }
};

// --- analytic kinematics ---

inline double rutherford_angle(double impact_b, double rel_speed_v) {
    require(impact_b > 0.0 && rel_speed_v > 0.0, "rutherford_angle: b and v must be positive");
    const double mu = 0.5 * constants::electron_mass;
    return 2.0 * std::atan(coulomb_k / impact_b / (mu * rel_speed_v * rel_speed_v));
}

inline double scatter_gamma(double e_thresh, double e_p) {
    require(e_thresh >= 0.0 && e_p > 0.0, "scatter_gamma: energies must be positive");
    const double s = std::sqrt(e_thresh / e_p);
    return (1.0 + s) * (1.0 + 3.0 * s);
}

// Target at rest, primary of energy e_p at impact parameter b: E_s = E_p x^2 / (1 + x^2).
inline double static_kick(double e_p, double impact_b) {
    require(e_p > 0.0 && impact_b > 0.0, "static_kick: E_p and b must be positive");
    const double x = coulomb_k_ev / impact_b / e_p;
    return e_p * x * x / (1.0 + x * x);
}

// Per-collision bound gamma E_p |sin(theta_R / 2)| with x = k / (b mu v^2).
inline double kick_sample_bound(double gamma, double e_p, double x) {
    if (!std::isfinite(x)) return gamma * e_p;
    return gamma * e_p * x / std::sqrt(1.0 + x * x);
}

struct KickBound {
    double gamma = 0.0;
    double mean_kick = 0.0;        // eV, gamma q^2 / (4 pi eps0 r0)
    double mean_kick_exact = 0.0;  // eV, beam average evaluated in closed form
    double beam_heating = 0.0;     // eV/s, q J r0 / (4 eps0), gamma ~ 1
};

inline KickBound kick_bound(const CollisionConfig& cfg) {
    cfg.validate();
    KickBound out;
    const double ep = cfg.primary_energy_ep;
    const double r0 = cfg.beam_radius_r0;
    out.gamma = scatter_gamma(cfg.e_thresh, ep);
    out.mean_kick = out.gamma * coulomb_k_ev / r0;
    // (gamma E_p / 2 r0^2) int_0^{2 r0} b db / sqrt(1 + (b/a)^2), a = k / E_p.
    const double a = coulomb_k_ev / ep;
    const double u = 2.0 * r0 / a;
    out.mean_kick_exact = out.gamma * ep * a * a * (u * u / (std::sqrt(1.0 + u * u) + 1.0)) / (2.0 * r0 * r0);
    out.beam_heating = cfg.current_density_j * r0 / (4.0 * constants::epsilon0);
    return out;
}

// --- two-electron dynamics ---

namespace detail {

// Primary r, v (0..5), target r, v (6..11), Coulomb impulse on the target (12..14).
using PairState = std::array<double, 15>;

inline Vec3 seg(const PairState& x, int i) { return Vec3(x[i], x[i + 1], x[i + 2]); }
inline void put(PairState& x, int i, const Vec3& v) {
    x[i] = v[0];
    x[i + 1] = v[1];
    x[i + 2] = v[2];
}

struct PairSystem {
    const CollisionConfig* cfg;
    bool with_primary = true;

    // Static pseudopotential energy in joules, flat beyond the depth.
    double static_energy(const Vec3& r) const {
        const double m = constants::electron_mass;
        const Vec3& w = cfg->trap_freqs;
        const double u = 0.5 * m * (w.cwiseProduct(w).cwiseProduct(r.cwiseProduct(r))).sum();
        return std::min(u, ev_to_joule(cfg->u_depth));
    }

    Vec3 trap_accel(const Vec3& r, double t) const {
        if (cfg->rf) {
            const RfDrive& rf = *cfg->rf;
            const double amp = rf.q_mathieu * rf.omega_rf * rf.omega_rf / 8.0;  // A / m
            const double c = std::cos(rf.omega_rf * t + rf.initial_phase);
            Vec3 a = Vec3::Zero();
            const double rho2 = r[0] * r[0] + r[1] * r[1];
            if (rho2 <= rf.rho_extent * rf.rho_extent && std::abs(r[2]) <= rf.z_extent) {
                a[0] = 2.0 * amp * c * r[0];
                a[1] = 2.0 * amp * c * r[1];
                a[2] = -4.0 * amp * c * r[2];
            }
            return a;
        }
        if (static_energy(r) >= ev_to_joule(cfg->u_depth)) return Vec3::Zero();
        const Vec3& w = cfg->trap_freqs;
        return -(w.cwiseProduct(w).cwiseProduct(r));
    }

    void operator()(const PairState& x, PairState& dxdt, double t) const {
        const double m = constants::electron_mass;
        const Vec3 rp = seg(x, 0), vp = seg(x, 3), rs = seg(x, 6), vs = seg(x, 9);
        Vec3 fc = Vec3::Zero();  // Coulomb force on the primary
        if (with_primary) {
            const Vec3 d = rp - rs;
            const double r = d.norm();
            fc = coulomb_k * d / (r * r * r);
        }
        put(dxdt, 0, vp);
        put(dxdt, 3, with_primary ? (trap_accel(rp, t) + fc / m).eval() : Vec3::Zero().eval());
        put(dxdt, 6, vs);
        put(dxdt, 9, trap_accel(rs, t) - fc / m);
        put(dxdt, 12, -fc);
    }
};

}  // namespace detail

struct TrajectorySample {
    double t = 0.0;
    Vec3 primary_r, primary_v, target_r, target_v;
    double primary_ke = 0.0;  // eV
    double target_energy = 0.0;  // eV, kinetic plus static trap energy (kinetic only with rf)
};

struct PairRunOptions {
    bool with_primary = true;
    double duration = 0.0;       // s, used without a primary, and as extra follow time after exit
    double max_time = 0.0;       // s, 0 selects 50 nominal transit times
    bool record = false;
    std::size_t record_stride = 1;
    double collision_radius = 10e-9;  // m, primary energy is sampled before entering this distance
    bool allow_timeout = false;       // return the partial run instead of throwing at max_time
    double stop_time = 0.0;           // s, fixed end time when positive; disables the exit test
};

struct PairRunResult {
    detail::PairState final_state{};
    double t_end = 0.0;
    std::size_t steps = 0;
    std::size_t rejected_steps = 0;
    double r_min = std::numeric_limits<double>::infinity();
    double t_min = 0.0;
    double e_col = 0.0;      // eV, primary kinetic energy at the start of the collision
    double mu_v2_col = 0.0;  // J, mu v_rel^2 at the same instant
    bool left_region = false;
    bool timed_out = false;
    std::vector<TrajectorySample> samples;
};

namespace detail {

inline TrajectorySample make_sample(const PairSystem& sys, const PairState& x, double t) {
    const double m = constants::electron_mass;
    TrajectorySample s;
    s.t = t;
    s.primary_r = seg(x, 0);
    s.primary_v = seg(x, 3);
    s.target_r = seg(x, 6);
    s.target_v = seg(x, 9);
    s.primary_ke = joule_to_ev(0.5 * m * s.primary_v.squaredNorm());
    double e = 0.5 * m * s.target_v.squaredNorm();
    if (!sys.cfg->rf) e += sys.static_energy(s.target_r);
    s.target_energy = joule_to_ev(e);
    return s;
}

inline bool outside_trap(const CollisionConfig& cfg, const PairSystem& sys, const Vec3& r) {
    if (cfg.rf) {
        return std::abs(r[2]) > cfg.rf->z_extent || std::hypot(r[0], r[1]) > cfg.rf->rho_extent;
    }
    return sys.static_energy(r) >= ev_to_joule(cfg.u_depth);
}

}  // namespace detail

// Adaptive Dormand-Prince 4(5) with a per-component error norm and a closest-approach clamp.
inline PairRunResult run_pair(const CollisionConfig& cfg, const detail::PairState& x0, const PairRunOptions& opt) {
    namespace ode = boost::numeric::odeint;
    using detail::PairState;
    using detail::seg;
    const double m = constants::electron_mass;
    detail::PairSystem sys{&cfg, opt.with_primary};

    const double vp0 = std::sqrt(2.0 * ev_to_joule(cfg.primary_energy_ep) / m);
    const double exit_radius = 2.0 * std::abs(cfg.injection_z);
    const double transit = 3.0 * std::abs(cfg.injection_z) / vp0;
    const double t_max = opt.stop_time > 0.0 ? opt.stop_time
                         : opt.max_time > 0.0 ? opt.max_time
                         : opt.with_primary ? 50.0 * transit + opt.duration
                                            : opt.duration;
    require(opt.with_primary || opt.duration > 0.0 || opt.stop_time > 0.0,
            "run_pair: duration required without a primary");

    // Absolute floors: positions 1e-9 m, velocities 1 m/s, impulses 1e-33 kg m/s, all times rel_tol.
    std::array<double, 15> atol{};
    for (int i = 0; i < 15; ++i) atol[i] = cfg.rel_tol * (i >= 12 ? 1e-33 : ((i / 3) % 2 == 0 ? 1e-9 : 1.0));

    ode::runge_kutta_dopri5<PairState> stepper;
    PairState x = x0, dxdt{}, xn{}, dxdtn{}, xerr{};
    double t = 0.0;
    sys(x, dxdt, t);
    const double w_max = cfg.rf ? std::max(cfg.rf->omega_rf, cfg.trap_freqs.maxCoeff()) : cfg.trap_freqs.maxCoeff();
    double dt = 1e-3 / w_max;

    PairRunResult out;
    double ke_outside = joule_to_ev(0.5 * m * seg(x, 3).squaredNorm());
    double rel_outside = 0.5 * m * (seg(x, 3) - seg(x, 9)).squaredNorm();
    if (opt.record) out.samples.push_back(detail::make_sample(sys, x, t));
    double t_stop = std::numeric_limits<double>::infinity();
    if (!opt.with_primary) t_stop = opt.duration;
    if (opt.stop_time > 0.0) t_stop = opt.stop_time;

    while (t < t_stop) {
        if (t > t_max && t < t_stop) {
            if (!opt.allow_timeout) throw NumericalError("run_pair: primary did not leave the window in time", t, t_max);
            out.timed_out = true;
            break;
        }
        double dt_cap = t_stop - t;
        Vec3 d_rel = Vec3::Zero(), v_rel = Vec3::Zero();
        if (opt.with_primary) {
            d_rel = seg(x, 0) - seg(x, 6);
            v_rel = seg(x, 3) - seg(x, 9);
            dt_cap = std::min(dt_cap, cfg.clamp_fraction * d_rel.norm() / std::max(v_rel.norm(), 1e-300));
        }
        dt = std::min(dt, dt_cap);
        stepper.do_step(sys, x, dxdt, t, xn, dxdtn, dt, xerr);
        double err = 0.0;
        for (int i = 0; i < 15; ++i) {
            const double sc = atol[i] + cfg.rel_tol * std::max(std::abs(x[i]), std::abs(xn[i]));
            err = std::max(err, std::abs(xerr[i]) / sc);
        }
        if (!std::isfinite(err)) throw NumericalError("run_pair: non-finite state", t, dt);
        if (err > 1.0) {
            dt *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            ++out.rejected_steps;
            if (dt < 1e-30) throw NumericalError("run_pair: step size underflow", t, dt);
            continue;
        }
        // Accepted step: refine the closest approach along the step, assuming straight relative motion.
        if (opt.with_primary) {
            const Vec3 d1 = seg(xn, 0) - seg(xn, 6);
            const Vec3 dd = d1 - d_rel;
            double tau = dd.squaredNorm() > 0.0 ? std::clamp(-d_rel.dot(dd) / dd.squaredNorm(), 0.0, 1.0) : 0.0;
            const double dist = (d_rel + tau * dd).norm();
            const double ke_now = joule_to_ev(0.5 * m * seg(xn, 3).squaredNorm());
            const double rel_now = 0.5 * m * (seg(xn, 3) - seg(xn, 9)).squaredNorm();
            if (dist < out.r_min) {
                out.r_min = dist;
                out.t_min = t + tau * dt;
                const bool far = dist >= opt.collision_radius;
                out.e_col = far ? ke_now : ke_outside;
                out.mu_v2_col = far ? rel_now : rel_outside;
            }
            if (d1.norm() >= opt.collision_radius) {
                ke_outside = ke_now;
                rel_outside = rel_now;
            }
        }
        t += dt;
        x = xn;
        dxdt = dxdtn;
        ++out.steps;
        if (detail::outside_trap(cfg, sys, seg(x, 6))) out.left_region = true;
        if (opt.record && out.steps % std::max<std::size_t>(1, opt.record_stride) == 0)
            out.samples.push_back(detail::make_sample(sys, x, t));
        if (opt.with_primary && !std::isfinite(t_stop)) {
            // Either electron may carry the primary's momentum away after a hard collision.
            const Vec3 rp = seg(x, 0), rs = seg(x, 6);
            if ((rp.norm() > exit_radius && rp.dot(seg(x, 3)) > 0.0) ||
                (rs.norm() > exit_radius && rs.dot(seg(x, 9)) > 0.0))
                t_stop = t + opt.duration;
        }
        dt *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
    }
    if (opt.record && (out.samples.empty() || out.samples.back().t != t))
        out.samples.push_back(detail::make_sample(sys, x, t));
    out.final_state = x;
    out.t_end = t;
    return out;
}

// Initial state: primary at (x, y, injection_z) moving along +z with E_p; target given explicitly.
inline detail::PairState pair_initial_state(const CollisionConfig& cfg, double px, double py, const Vec3& target_r,
                                            const Vec3& target_v) {
    detail::PairState x{};
    const double vp = std::sqrt(2.0 * ev_to_joule(cfg.primary_energy_ep) / constants::electron_mass);
    detail::put(x, 0, Vec3(px, py, cfg.injection_z));
    detail::put(x, 3, Vec3(0, 0, vp));
    detail::put(x, 6, target_r);
    detail::put(x, 9, target_v);
    return x;
}

// --- Monte Carlo over the beam and the target phase space (static pseudopotential) ---

struct KickSample {
    double target_e0 = 0.0;  // eV
    double abs_de = 0.0;     // eV
    double bound = 0.0;      // eV, per-sample gamma E |sin(theta_R/2)|
    double b_col = 0.0;      // m
    bool rejected = false;
};

struct KickHistogram {
    std::vector<double> bin_edges;  // eV
    std::vector<std::uint64_t> counts;
    double mean_abs_de = 0.0;  // eV
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;
    std::uint64_t rejected = 0;
    std::uint64_t bound_violations = 0;
    double max_bound_ratio = 0.0;
    std::vector<KickSample> samples;
};

// Effective impact parameter from the closest approach of a Rutherford orbit, r_min = a + sqrt(a^2 + b^2).
inline double impact_from_rmin(double r_min, double mu_v2) {
    const double a = coulomb_k / mu_v2;
    return std::sqrt(std::max(r_min * (r_min - 2.0 * a), 0.0));
}

struct McOptions {
    unsigned workers = 1;
    std::size_t bins = 40;
    double bound_rel_tol = 1e-3;   // numerical slack on the per-sample bound
    double bound_abs_tol = 1e-9;   // eV
    bool keep_samples = false;
    double target_energy_max = 0.0;  // eV, 0 selects u_depth
};

// Target energy is drawn uniformly on [0, e_max].
inline KickSample collision_sample(const CollisionConfig& cfg, std::uint64_t index, double e_max) {
    const double m = constants::electron_mass;
    CounterRng rng(cfg.seed, index);
    KickSample s;
    s.target_e0 = e_max * rng.uniform();
    const double cz = 2.0 * rng.uniform() - 1.0;
    const double ph = constants::two_pi * rng.uniform();
    const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
    const Vec3 dir(sz * std::cos(ph), sz * std::sin(ph), cz);
    const double phase = constants::two_pi * rng.uniform();
    const double rb = cfg.beam_radius_r0 * std::sqrt(rng.uniform());
    const double ab = constants::two_pi * rng.uniform();

    const double v0 = std::sqrt(2.0 * ev_to_joule(s.target_e0) / m);
    Vec3 r0, vv0;
    for (int i = 0; i < 3; ++i) {
        r0[i] = v0 * dir[i] / cfg.trap_freqs[i] * std::sin(phase);
        vv0[i] = v0 * dir[i] * std::cos(phase);
    }
    const auto x0 = pair_initial_state(cfg, rb * std::cos(ab), rb * std::sin(ab), r0, vv0);
    try {
        PairRunOptions opt;
        const PairRunResult run = run_pair(cfg, x0, opt);
        detail::PairSystem sys{&cfg, true};
        const double e1 = joule_to_ev(0.5 * m * detail::seg(run.final_state, 9).squaredNorm() +
                                      sys.static_energy(detail::seg(run.final_state, 6)));
        const double e0 = joule_to_ev(0.5 * m * vv0.squaredNorm() + sys.static_energy(r0));
        s.abs_de = std::abs(e1 - e0);
        s.b_col = impact_from_rmin(run.r_min, run.mu_v2_col);
        const double x = coulomb_k / (s.b_col * run.mu_v2_col);
        s.bound = kick_sample_bound(scatter_gamma(s.target_e0, run.e_col), run.e_col, x);
    } catch (const NumericalError&) {
        s.rejected = true;
    }
    return s;
}

inline KickHistogram collision_mc(const CollisionConfig& cfg, std::size_t n_samples, const McOptions& opt = {}) {
    cfg.validate();
    require(!cfg.rf, "collision_mc: rf must be absent (pseudopotential mode)");
    require(n_samples >= 1, "collision_mc: need at least one sample");
    require(opt.bins >= 1, "collision_mc: need at least one bin");
    require(opt.target_energy_max >= 0.0 && opt.target_energy_max <= cfg.u_depth,
            "collision_mc: target_energy_max must be in [0, u_depth]");
    const double e_max = opt.target_energy_max > 0.0 ? opt.target_energy_max : cfg.u_depth;
    std::vector<KickSample> samples(n_samples);
    parallel_for(n_samples, opt.workers, [&](std::size_t i) { samples[i] = collision_sample(cfg, i, e_max); });

    KickHistogram h;
    h.seed = cfg.seed;
    double sum = 0.0, hi = 0.0;
    for (const auto& s : samples) {
        if (s.rejected) {
            ++h.rejected;
            continue;
        }
        ++h.sample_count;
        sum += s.abs_de;
        hi = std::max(hi, s.abs_de);
        const double ratio = s.bound > 0.0 ? s.abs_de / s.bound : std::numeric_limits<double>::infinity();
        h.max_bound_ratio = std::max(h.max_bound_ratio, ratio);
        if (s.abs_de > s.bound * (1.0 + opt.bound_rel_tol) + opt.bound_abs_tol) ++h.bound_violations;
    }
    if (h.rejected * 1000 >= n_samples)
        throw NumericalError("collision_mc: rejected sample fraction reached 0.1%", static_cast<double>(h.rejected),
                             static_cast<double>(n_samples));
    h.mean_abs_de = h.sample_count ? sum / static_cast<double>(h.sample_count) : 0.0;
    if (hi <= 0.0) hi = 1.0;
    h.bin_edges.resize(opt.bins + 1);
    for (std::size_t i = 0; i <= opt.bins; ++i) h.bin_edges[i] = hi * static_cast<double>(i) / static_cast<double>(opt.bins);
    h.counts.assign(opt.bins, 0);
    for (const auto& s : samples) {
        if (s.rejected) continue;
        auto k = static_cast<std::size_t>(s.abs_de / hi * static_cast<double>(opt.bins));
        ++h.counts[std::min(k, opt.bins - 1)];
    }
    if (opt.keep_samples) h.samples = std::move(samples);
    return h;
}

// --- rf drive ---

struct PhasePoint {
    double phase = 0.0;   // rad
    double e_s = 0.0;     // eV, |impulse|^2 / 2m on a target initially at rest
    double e_col = 0.0;   // eV, primary energy entering the collision
    double b_col = 0.0;   // m
    double c11_integrand = 0.0;  // eV, gamma(E_col) E_col / sqrt(1 + (b_col E_col / k)^2)
};

struct PhaseScanRow {
    double impact_b = 0.0;
    double e_min = 0.0, e_median = 0.0, e_max = 0.0;  // eV
    double static_kick = 0.0;                          // eV
    double half_spread = 0.0;  // (max - min) / (2 static_kick)
    double spread = 0.0;       // standard deviation over the phase grid divided by the mean
    double c11_mean = 0.0;     // eV, phase average of the integrand
    std::vector<PhasePoint> phases;
};

struct PhaseScan {
    std::vector<PhaseScanRow> rows;
    double e_col_min = 0.0, e_col_max = 0.0;  // eV over the whole scan
    double mean_half_spread = 0.0;
    double median_spread = 0.0;  // median over the impact grid of the per-b spread
};

inline PhasePoint rf_collision(const CollisionConfig& cfg, double impact_b, double phase) {
    CollisionConfig c = cfg;
    c.rf->initial_phase = phase;
    const auto x0 = pair_initial_state(c, impact_b, 0.0, Vec3::Zero(), Vec3::Zero());
    const PairRunResult run = run_pair(c, x0, PairRunOptions{});
    PhasePoint p;
    p.phase = phase;
    const Vec3 dp = detail::seg(run.final_state, 12);
    p.e_s = joule_to_ev(dp.squaredNorm() / (2.0 * constants::electron_mass));
    p.e_col = run.e_col;
    p.b_col = impact_from_rmin(run.r_min, run.mu_v2_col);
    const double x = coulomb_k / (p.b_col * run.mu_v2_col);
    p.c11_integrand = kick_sample_bound(scatter_gamma(cfg.e_thresh, p.e_col), p.e_col, x);
    return p;
}

inline PhaseScan rf_phase_scan(const CollisionConfig& cfg, const std::vector<double>& impact_grid,
                               std::size_t n_phases = 32, unsigned workers = 1) {
    cfg.validate();
    require(cfg.rf.has_value(), "rf_phase_scan: rf drive required");
    require(!impact_grid.empty() && n_phases >= 2, "rf_phase_scan: need impact grid and >= 2 phases");
    for (double b : impact_grid) require(b > 0.0, "rf_phase_scan: impact parameters must be positive");
    const std::size_t nb = impact_grid.size();
    std::vector<PhasePoint> pts(nb * n_phases);
    parallel_for(pts.size(), workers, [&](std::size_t i) {
        const double phase = constants::two_pi * static_cast<double>(i % n_phases) / static_cast<double>(n_phases);
        pts[i] = rf_collision(cfg, impact_grid[i / n_phases], phase);
    });
    PhaseScan scan;
    scan.e_col_min = std::numeric_limits<double>::infinity();
    scan.e_col_max = 0.0;
    for (std::size_t ib = 0; ib < nb; ++ib) {
        PhaseScanRow row;
        row.impact_b = impact_grid[ib];
        row.phases.assign(pts.begin() + static_cast<std::ptrdiff_t>(ib * n_phases),
                          pts.begin() + static_cast<std::ptrdiff_t>((ib + 1) * n_phases));
        std::vector<double> es;
        double c11 = 0.0;
        for (const auto& p : row.phases) {
            es.push_back(p.e_s);
            c11 += p.c11_integrand;
            scan.e_col_min = std::min(scan.e_col_min, p.e_col);
            scan.e_col_max = std::max(scan.e_col_max, p.e_col);
        }
        std::sort(es.begin(), es.end());
        row.e_min = es.front();
        row.e_max = es.back();
        const std::size_t n = es.size();
        row.e_median = n % 2 ? es[n / 2] : 0.5 * (es[n / 2 - 1] + es[n / 2]);
        row.static_kick = static_kick(cfg.primary_energy_ep, row.impact_b);
        row.half_spread = (row.e_max - row.e_min) / (2.0 * row.static_kick);
        row.c11_mean = c11 / static_cast<double>(n);
        double mean = 0.0, var = 0.0;
        for (double e : es) mean += e / static_cast<double>(n);
        for (double e : es) var += (e - mean) * (e - mean) / static_cast<double>(n);
        row.spread = std::sqrt(var) / mean;
        scan.mean_half_spread += row.half_spread / static_cast<double>(nb);
        scan.rows.push_back(std::move(row));
    }
    std::vector<double> spreads;
    for (const auto& row : scan.rows) spreads.push_back(row.spread);
    std::sort(spreads.begin(), spreads.end());
    const std::size_t k = spreads.size();
    scan.median_spread = k % 2 ? spreads[k / 2] : 0.5 * (spreads[k / 2 - 1] + spreads[k / 2]);
    return scan;
}

// Phase-averaged kick for beam radius r0: (1 / r0^2) int_0^{r0} b <integrand>_phase db, trapezoid over
// the scanned impact parameters with the b = 0 end contributing zero and the last interval cut at r0.
inline double phase_averaged_kick(const PhaseScan& scan, double r0) {
    require(r0 > 0.0, "phase_averaged_kick: r0 must be positive");
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (const auto& row : scan.rows) pts.emplace_back(row.impact_b, row.impact_b * row.c11_mean);
    std::sort(pts.begin(), pts.end());
    require(pts.back().first >= r0 * (1.0 - 1e-12), "phase_averaged_kick: impact grid must reach r0");
    double integral = 0.0;
    for (std::size_t i = 1; i < pts.size() && pts[i - 1].first < r0; ++i) {
        const auto [b0, f0] = pts[i - 1];
        auto [b1, f1] = pts[i];
        if (b1 > r0) {
            f1 = f0 + (f1 - f0) * (r0 - b0) / (b1 - b0);
            b1 = r0;
        }
        integral += 0.5 * (f0 + f1) * (b1 - b0);
    }
    return integral / (r0 * r0);
}

// --- single trajectory ---

struct TrajectoryOptions {
    double impact_b = 3e-10;      // m
    bool with_primary = true;
    double follow_time = 5e-9;    // s after the primary leaves (or total duration without a primary)
    std::size_t record_stride = 1;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double e_s = 0.0;          // eV, final target energy (impulse based with rf)
    double e_col = 0.0;        // eV
    bool escaped = false;
    double energy_drift = 0.0; // relative, static trap without a primary
};

// With rf, `phase` is the rf phase at injection; without rf it is the target oscillation phase
// (target moving along x with energy target_e0).
inline Trajectory two_electron_trajectory(const CollisionConfig& cfg, double target_e0, double phase,
                                          const TrajectoryOptions& opt = {}) {
    cfg.validate();
    require(target_e0 >= 0.0 && target_e0 <= cfg.u_depth, "two_electron_trajectory: need 0 <= e0 <= u_depth");
    require(opt.follow_time > 0.0, "two_electron_trajectory: follow_time must be positive");
    const double m = constants::electron_mass;
    CollisionConfig c = cfg;
    Vec3 r0 = Vec3::Zero(), v0 = Vec3::Zero();
    const double vs = std::sqrt(2.0 * ev_to_joule(target_e0) / m);
    if (c.rf) {
        c.rf->initial_phase = phase;
        v0[0] = vs;
    } else {
        r0[0] = vs / c.trap_freqs[0] * std::sin(phase);
        v0[0] = vs * std::cos(phase);
    }
    const auto x0 = pair_initial_state(c, opt.impact_b, 0.0, r0, v0);
    PairRunOptions ro;
    ro.with_primary = opt.with_primary;
    ro.duration = opt.follow_time;
    ro.record = true;
    ro.record_stride = opt.record_stride;
    const PairRunResult run = run_pair(c, x0, ro);

    Trajectory tr;
    tr.samples = run.samples;
    tr.e_col = run.e_col;
    if (c.rf) {
        const Vec3 p = m * v0 + detail::seg(run.final_state, 12);
        tr.e_s = joule_to_ev(p.squaredNorm() / (2.0 * m));
    } else {
        tr.e_s = tr.samples.back().target_energy;
        const double e_first = tr.samples.front().target_energy;
        double worst = 0.0;
        for (const auto& s : tr.samples) worst = std::max(worst, std::abs(s.target_energy - e_first));
        tr.energy_drift = e_first > 0.0 ? worst / e_first : worst;
    }
    tr.escaped = run.left_region || tr.e_s > c.u_depth;
    return tr;
}

}  // namespace hybrid
