#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "hybrid/constants.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/parallel.hpp"

namespace hybrid {

struct LoadingConfig {
    double current_density_j = 10.0;   // A/m^2
    double beam_radius_r0 = 10e-6;     // m
    double helium_pressure = 1e-2;     // Pa
    double gas_temperature = 4.0;      // K
    double trap_radius_l = 58.9e-6;    // m, sphere with the volume of a (95 um)^3 cube
    double trap_depth = 1.0;           // eV
    double sigma_ion = 0.05e-20;       // m^2
    double sigma_elastic = 6e-20;      // m^2
    double gamma_cool = 1e5;           // 1/s
    double e_init = 3e-4;              // eV
    double t_detect = 0.0;             // s

    void validate() const {
        require(current_density_j >= 0.0, "loading: current_density_j must be >= 0");
        require(helium_pressure >= 0.0, "loading: helium_pressure must be >= 0");
        require(beam_radius_r0 > 0.0 && gas_temperature > 0.0 && trap_radius_l > 0.0 && trap_depth > 0.0,
                "loading: r0, T, l, U_depth must be positive");
        require(sigma_ion > 0.0 && sigma_elastic > 0.0, "loading: cross sections must be positive");
        require(sigma_ion < sigma_elastic, "loading: sigma_ion must be smaller than sigma_elastic");
        require(gamma_cool > 0.0 && e_init > 0.0, "loading: gamma_cool and e_init must be positive");
        require(t_detect >= 0.0, "loading: t_detect must be >= 0");
    }

    double helium_density() const { return helium_pressure / (constants::boltzmann * gas_temperature); }
};

struct LoadingRates {
    double gamma_ion = 0.0;  // 1/s
    double gamma_e = 0.0;    // 1/s
    double gamma_he = 0.0;   // 1/s
    double n_steady = 0.0;
    double tau_1e = 0.0;     // s, infinite when nothing is lost
};

inline LoadingRates rates(const LoadingConfig& cfg) {
    cfg.validate();
    using namespace constants;
    const double n_he = cfg.helium_density();
    const double q = elementary_charge;
    const double ud = ev_to_joule(cfg.trap_depth);
    LoadingRates r;
    r.gamma_ion = cfg.current_density_j * pi * cfg.beam_radius_r0 * cfg.beam_radius_r0 / q * n_he *
                  cfg.trap_radius_l * cfg.sigma_ion;
    r.gamma_e = cfg.current_density_j * cfg.beam_radius_r0 * q / (4.0 * epsilon0 * ud);
    r.gamma_he = cfg.sigma_elastic * n_he * std::sqrt(2.0 * ud / electron_mass) / (3.0 * pi);
    const double loss = r.gamma_e + r.gamma_he;
    r.n_steady = loss > 0.0 ? r.gamma_ion / loss : 0.0;
    r.tau_1e = loss > 0.0 ? 1.0 / loss : std::numeric_limits<double>::infinity();
    return r;
}

struct CaptureEnergy {
    double e_capture = 0.0;  // eV
    double e_thresh = 0.0;   // eV
};

inline CaptureEnergy capture_energy(const LoadingConfig& cfg) {
    cfg.validate();
    using namespace constants;
    const double n_he = cfg.helium_density();
    CaptureEnergy c;
    if (n_he <= 0.0) {
        c.e_capture = std::numeric_limits<double>::infinity();
    } else {
        const double v = pi * cfg.gamma_cool / (cfg.sigma_elastic * n_he);
        c.e_capture = joule_to_ev(0.5 * electron_mass * v * v);
    }
    c.e_thresh = std::min(c.e_capture, cfg.e_init);
    return c;
}

// Pressure at which E_capture equals a given energy (inverse of the closed form).
inline double capture_crossover_pressure(const LoadingConfig& cfg, double energy_ev) {
    require(energy_ev > 0.0, "capture_crossover_pressure: energy must be positive");
    using namespace constants;
    const double v = std::sqrt(2.0 * ev_to_joule(energy_ev) / electron_mass);
    const double n_he = pi * cfg.gamma_cool / (cfg.sigma_elastic * v);
    return n_he * boltzmann * cfg.gas_temperature;
}

// dE/dt in eV/s: resonator cooling against helium rf-heating.
inline double energy_rate(double e_ev, const LoadingConfig& cfg) {
    using namespace constants;
    const double e = std::max(e_ev, 0.0);
    const double v = std::sqrt(2.0 * ev_to_joule(e) / electron_mass);
    return -cfg.gamma_cool * e + cfg.sigma_elastic * cfg.helium_density() / pi * v * e;
}

// Closed-form solution of the energy ODE: with w = sqrt(E), dw/dt = -(G/2) w + (c/2) w^2.
inline double energy_closed_form(double e0_ev, const LoadingConfig& cfg, double t) {
    using namespace constants;
    const double G = cfg.gamma_cool;
    const double c = cfg.sigma_elastic * cfg.helium_density() / pi * std::sqrt(2.0 * elementary_charge / electron_mass);
    const double w0 = std::sqrt(e0_ev);
    const double w = G / (c + (G / w0 - c) * std::exp(0.5 * G * t));
    return w * w;
}

struct EnergyTrajectory {
    std::vector<double> time;    // s
    std::vector<double> energy;  // eV
    bool boiled_off = false;
    double boil_off_time = 0.0;  // s, valid when boiled_off
    std::size_t steps = 0;
};

inline EnergyTrajectory energy_ode(double e0_ev, const LoadingConfig& cfg, double horizon, double rel_tol = 1e-9) {
    cfg.validate();
    require(e0_ev > 0.0 && e0_ev <= cfg.trap_depth, "energy_ode: need 0 < e0 <= trap_depth");
    require(horizon > 0.0, "energy_ode: horizon must be positive");
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 1>;
    auto rhs = [&](const State& x, State& dxdt, double) { dxdt[0] = energy_rate(x[0], cfg); };

    // Absolute tolerance scaled to the energy range so the decaying tail does not stall the stepper.
    auto stepper = ode::make_dense_output(rel_tol * 1e-6 * cfg.trap_depth, rel_tol, ode::runge_kutta_dopri5<State>());
    State x{e0_ev};
    const double dt0 = std::min(horizon * 1e-6, 1e-3 / cfg.gamma_cool);
    stepper.initialize(x, 0.0, dt0);

    EnergyTrajectory out;
    out.time.push_back(0.0);
    out.energy.push_back(e0_ev);
    if (e0_ev >= cfg.trap_depth) {
        out.boiled_off = true;
        return out;
    }
    try {
        while (stepper.current_time() < horizon) {
            const auto [t0, t1] = stepper.do_step(rhs);
            ++out.steps;
            if (t1 - t0 < horizon * 1e-15)
                throw NumericalError("energy_ode: step size underflow", t1, t1 - t0);
            const double e1 = stepper.current_state()[0];
            if (e1 >= cfg.trap_depth) {
                // Bisect the dense-output interpolant for the boil-off instant.
                double lo = t0, hi = t1;
                State xm;
                for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    stepper.calc_state(mid, xm);
                    (xm[0] >= cfg.trap_depth ? hi : lo) = mid;
                }
                out.boiled_off = true;
                out.boil_off_time = hi;
                out.time.push_back(hi);
                out.energy.push_back(cfg.trap_depth);
                return out;
            }
            if (t1 > horizon) {
                State xh;
                stepper.calc_state(horizon, xh);
                out.time.push_back(horizon);
                out.energy.push_back(xh[0]);
                break;
            }
            out.time.push_back(t1);
            out.energy.push_back(e1);
        }
    } catch (const ode::step_adjustment_error& e) {
        throw NumericalError(std::string("energy_ode: ") + e.what(), stepper.current_time(), 0.0);
    }
    return out;
}

struct PopulationResult {
    double n_final = 0.0;
    double t_final = 0.0;
    double n_steady_analytic = 0.0;
};

// Integrates dN/dt = G_ion - N (G_e + G_He) from N = 0 for `time_constants` 1/e times.
inline PopulationResult integrate_population(const LoadingConfig& cfg, double time_constants = 40.0,
                                             double rel_tol = 1e-10) {
    const LoadingRates r = rates(cfg);
    PopulationResult out;
    out.n_steady_analytic = r.n_steady;
    const double loss = r.gamma_e + r.gamma_he;
    if (loss <= 0.0) return out;
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 1>;
    State x{0.0};
    auto rhs = [&](const State& s, State& d, double) { d[0] = r.gamma_ion - s[0] * loss; };
    const double t_end = time_constants / loss;
    ode::integrate_adaptive(ode::make_controlled(rel_tol * std::max(r.n_steady, 1e-300), rel_tol,
                                                 ode::runge_kutta_dopri5<State>()),
                            rhs, x, 0.0, t_end, 1e-3 / loss);
    out.n_final = x[0];
    out.t_final = t_end;
    return out;
}

struct TrapTimeCell {
    double current_density_j = 0.0;
    double helium_pressure = 0.0;
    double n_steady = 0.0;
    double tau_1e = 0.0;
    double e_capture = 0.0;
    double e_thresh = 0.0;
    double pulses_needed = 0.0;
    double t_total = 0.0;
};

inline TrapTimeCell time_to_trap_cell(const LoadingConfig& cfg) {
    const LoadingRates r = rates(cfg);
    const CaptureEnergy c = capture_energy(cfg);
    TrapTimeCell cell;
    cell.current_density_j = cfg.current_density_j;
    cell.helium_pressure = cfg.helium_pressure;
    cell.n_steady = r.n_steady;
    cell.tau_1e = r.tau_1e;
    cell.e_capture = c.e_capture;
    cell.e_thresh = c.e_thresh;
    cell.pulses_needed = r.n_steady > 0.0 ? (cfg.trap_depth / c.e_thresh) / r.n_steady
                                          : std::numeric_limits<double>::infinity();
    cell.t_total = cell.pulses_needed * (r.tau_1e + cfg.t_detect);
    return cell;
}

// Row-major over (J, P): cell index = iJ * P.size() + iP. Cells are independent, so the result
// does not depend on the worker count.
inline std::vector<TrapTimeCell> time_to_trap(const LoadingConfig& base, const std::vector<double>& j_grid,
                                              const std::vector<double>& p_grid, unsigned workers = 1) {
    require(!j_grid.empty() && !p_grid.empty(), "time_to_trap: grid must be non-empty");
    base.validate();
    const std::size_t n = j_grid.size() * p_grid.size();
    std::vector<TrapTimeCell> out(n);
    parallel_for(n, workers, [&](std::size_t i) {
        LoadingConfig c = base;
        c.current_density_j = j_grid[i / p_grid.size()];
        c.helium_pressure = p_grid[i % p_grid.size()];
        out[i] = time_to_trap_cell(c);
    });
    return out;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    require(lo > 0.0 && hi > lo && n >= 2, "log_grid: need 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
}

}  // namespace hybrid
