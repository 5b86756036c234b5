#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "hybrid/constants.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/physcore.hpp"
#include "hybrid/quadrature.hpp"

namespace hybrid {

enum class ModeKind { clamped_drum, trampoline, cantilever, bva };

inline const char* to_string(ModeKind k) {
    switch (k) {
        case ModeKind::clamped_drum: return "clamped_drum";
        case ModeKind::trampoline: return "trampoline";
        case ModeKind::cantilever: return "cantilever";
        case ModeKind::bva: return "bva";
    }
    return "?";
}

// Displacement pattern s(r), max|s| = 1, together with its gradient J_ij = d s_i / d r_j.
struct ModeModel {
    ModeKind kind = ModeKind::trampoline;
    double omega0 = 0.0;     // rad/s
    double mode_mass = 0.0;  // kg, closed form where one exists
    double density = 0.0;    // kg/m^3
    double total_volume = 0.0;
    Region volume;
    std::function<bool(const Vec3&)> contains;
    std::function<Vec3(const Vec3&)> shape;
    std::function<Mat3(const Vec3&)> shape_gradient;
    Vec3 polarization_axis = Vec3::UnitZ();

    // Geometry kept for bounds and reports; zero when not applicable.
    double thickness = 0.0;
    double length = 0.0;
    double sigma = 0.0;
    double wavenumber = 0.0;
    int overtone = 0;

    double total_mass() const { return density * total_volume; }
};

enum class MembraneKind { clamped_drum, trampoline_com };

// Square membrane of side a in the x-y plane, thickness along z, moving along z.
inline ModeModel membrane_mode(MembraneKind kind, double side, double thickness, double density,
                               double omega0) {
    require(side > 0.0 && thickness > 0.0 && density > 0.0, "membrane_mode: dimensions must be positive");
    require(omega0 > 0.0, "membrane_mode: omega0 must be positive");
    ModeModel m;
    m.omega0 = omega0;
    m.density = density;
    m.thickness = thickness;
    m.length = side;
    m.total_volume = side * side * thickness;
    m.volume.pieces.push_back(identity_box(Vec3(0, 0, 0), Vec3(side, side, thickness)));
    m.contains = [=](const Vec3& r) {
        return r[0] >= 0 && r[0] <= side && r[1] >= 0 && r[1] <= side && r[2] >= 0 && r[2] <= thickness;
    };
    if (kind == MembraneKind::clamped_drum) {
        const double k = constants::pi / side;
        m.kind = ModeKind::clamped_drum;
        m.mode_mass = density * thickness * side * side / 4.0;
        m.shape = [=](const Vec3& r) { return Vec3(0, 0, std::sin(k * r[0]) * std::sin(k * r[1])); };
        m.shape_gradient = [=](const Vec3& r) {
            Mat3 J = Mat3::Zero();
            J(2, 0) = k * std::cos(k * r[0]) * std::sin(k * r[1]);
            J(2, 1) = k * std::sin(k * r[0]) * std::cos(k * r[1]);
            return J;
        };
    } else {
        m.kind = ModeKind::trampoline;
        m.mode_mass = density * thickness * side * side;
        m.shape = [](const Vec3&) { return Vec3(0, 0, 1); };
        m.shape_gradient = [](const Vec3&) { return Mat3::Zero().eval(); };
    }
    return m;
}

// g = alpha q U / (2 d0^2 w0 sqrt(m M)); the bias U sets the static charge on the membrane.
inline double membrane_coupling(const Particle& p, double bias_u, double d0, double omega0, double mode_mass,
                                double alpha = 1.0) {
    require(d0 > 0.0 && omega0 > 0.0 && mode_mass > 0.0, "membrane_coupling: d0, omega0, M must be positive");
    require(alpha >= 0.5 && alpha <= 1.0, "membrane_coupling: alpha must be in [0.5, 1]");
    return alpha * std::abs(p.charge) * std::abs(bias_u) /
           (2.0 * d0 * d0 * omega0 * std::sqrt(p.mass * mode_mass));
}

enum class SectionShape { circular, hexagonal };

struct BeamSection {
    SectionShape shape = SectionShape::hexagonal;
    double radius_a = 0.0;  // circumradius for the hexagon

    double beta_factor() const { return shape == SectionShape::circular ? 3.09 : 2.57; }
    double area() const {
        return shape == SectionShape::circular ? constants::pi * radius_a * radius_a
                                               : 1.5 * std::sqrt(3.0) * radius_a * radius_a;
    }
};

inline double cantilever_omega(double length_l, const BeamSection& s, double youngs_e, double density) {
    return std::sqrt(s.beta_factor() * s.radius_a * s.radius_a * youngs_e /
                     (density * std::pow(length_l, 4)));
}

// Radius giving a target flexure frequency.
inline double cantilever_radius_for(double length_l, SectionShape shape, double youngs_e, double density,
                                    double omega_target) {
    BeamSection unit{shape, 1.0};
    return omega_target / cantilever_omega(length_l, unit, youngs_e, density);
}

namespace detail {
inline constexpr double clamped_free_kl = 1.8751040687119611;

struct ClampedFree {
    double k;
    double sig;
    double tip;

    explicit ClampedFree(double l) : k(clamped_free_kl / l) {
        const double kl = clamped_free_kl;
        sig = (std::cosh(kl) + std::cos(kl)) / (std::sinh(kl) + std::sin(kl));
        tip = raw(l);
    }
    double raw(double x) const {
        const double u = k * x;
        return (std::cosh(u) - std::cos(u)) - sig * (std::sinh(u) - std::sin(u));
    }
    double value(double x) const { return raw(x) / tip; }
    double slope(double x) const {
        const double u = k * x;
        return k * ((std::sinh(u) + std::sin(u)) - sig * (std::cosh(u) - std::cos(u))) / tip;
    }
};
}  // namespace detail

// Beam along x from the clamp at x = 0, flexing along z. Euler-Bernoulli fundamental,
// tip displacement normalised to 1.
inline ModeModel cantilever_mode(double length_l, const BeamSection& section, double youngs_e, double density) {
    require(length_l > 0.0 && section.radius_a > 0.0 && youngs_e > 0.0 && density > 0.0,
            "cantilever_mode: dimensions and material constants must be positive");
    ModeModel m;
    m.kind = ModeKind::cantilever;
    m.omega0 = cantilever_omega(length_l, section, youngs_e, density);
    m.density = density;
    m.length = length_l;
    m.total_volume = section.area() * length_l;
    const double a = section.radius_a;
    if (section.shape == SectionShape::circular) {
        m.volume.pieces.push_back(cylinder_x(a, 0.0, length_l));
        m.contains = [=](const Vec3& r) {
            return r[0] >= 0 && r[0] <= length_l && r[1] * r[1] + r[2] * r[2] <= a * a;
        };
    } else {
        m.volume.pieces = hex_prism_x(a, 0.0, length_l);
        m.contains = [=](const Vec3& r) {
            const double zmax = a * std::sqrt(3.0) / 2.0;
            return r[0] >= 0 && r[0] <= length_l && std::abs(r[2]) <= zmax &&
                   std::abs(r[1]) <= a - std::abs(r[2]) / std::sqrt(3.0);
        };
    }
    const detail::ClampedFree cf(length_l);
    m.shape = [=](const Vec3& r) { return Vec3(0, 0, cf.value(r[0])); };
    m.shape_gradient = [=](const Vec3& r) {
        Mat3 J = Mat3::Zero();
        J(2, 0) = cf.slope(r[0]);
        return J;
    };
    // Modal mass of the tip-normalised fundamental is exactly a quarter of the beam.
    m.mode_mass = 0.25 * density * m.total_volume;
    return m;
}

struct BvaGeometry {
    double thickness_t = 1.08e-3;
    double curvature_r = 0.3;
    double disk_radius_l = 6.5e-3;
};

inline double bva_sigma(double t, double R, int n) {
    return std::pow(R * t * t * t / (3.0 * n * n * constants::pi * constants::pi), 0.25);
}

// Plano-convex disk modelled as a flat cylinder of thickness t, axis along y, faces at y = 0 and y = t.
// The standing wave is sin(k_n (y - t/2)): y is measured from the mid-plane, so for odd n
// both faces are displacement antinodes (stress free).
inline ModeModel bva_mode(const BvaGeometry& g, int overtone_n, double density, double sound_speed,
                          const Vec3& direction) {
    require(overtone_n >= 3, "bva_mode: overtone must be >= 3");
    if (overtone_n % 2 == 0)
        throw PreconditionError("bva_mode: even overtone " + std::to_string(overtone_n) +
                                " rejected, only odd quasi-longitudinal overtones are supported");
    require(g.curvature_r > 10.0 * g.thickness_t, "bva_mode: curvature radius must be much larger than thickness");
    require(density > 0.0 && sound_speed > 0.0, "bva_mode: density and sound speed must be positive");
    require(direction.norm() > 0.0, "bva_mode: direction must be nonzero");
    const double t = g.thickness_t;
    const double L = g.disk_radius_l;
    const double sigma = bva_sigma(t, g.curvature_r, overtone_n);
    const double k = overtone_n * constants::pi / t;
    const Vec3 n = direction.normalized();

    ModeModel m;
    m.kind = ModeKind::bva;
    m.omega0 = sound_speed * k;
    m.density = density;
    m.thickness = t;
    m.length = L;
    m.sigma = sigma;
    m.wavenumber = k;
    m.overtone = overtone_n;
    m.polarization_axis = n;
    m.total_volume = constants::pi * L * L * t;
    m.mode_mass = density * constants::pi * sigma * sigma * (t / 2.0) * (1.0 - std::exp(-L * L / (sigma * sigma)));
    m.volume.pieces.push_back(cylinder_y(L, 0.0, t));
    m.contains = [=](const Vec3& r) { return r[1] >= 0 && r[1] <= t && r[0] * r[0] + r[2] * r[2] <= L * L; };
    const double s2 = 2.0 * sigma * sigma;
    const double ymid = 0.5 * t;
    m.shape = [=](const Vec3& r) {
        const double G = std::exp(-(r[0] * r[0] + r[2] * r[2]) / s2);
        return (G * std::sin(k * (r[1] - ymid)) * n).eval();
    };
    m.shape_gradient = [=](const Vec3& r) {
        const double G = std::exp(-(r[0] * r[0] + r[2] * r[2]) / s2);
        const double S = std::sin(k * (r[1] - ymid));
        const double C = std::cos(k * (r[1] - ymid));
        const Vec3 grad(-r[0] / (sigma * sigma) * G * S, G * k * C, -r[2] / (sigma * sigma) * G * S);
        return (n * grad.transpose()).eval();
    };
    return m;
}

// rho * integral |s|^2 dV by adaptive cubature.
inline double mode_mass(const ModeModel& mode, const QuadratureSpec& quad = {}) {
    require(static_cast<bool>(mode.shape), "mode_mass: mode has no shape");
    auto r = integrate_scalar(mode.volume, [&](const Vec3& x) { return mode.shape(x).squaredNorm(); }, quad);
    return mode.density * r.value[0];
}

}  // namespace hybrid
