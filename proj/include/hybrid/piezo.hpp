#pragma once

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "hybrid/constants.hpp"
#include "hybrid/errors.hpp"
#include "hybrid/mech.hpp"
#include "hybrid/physcore.hpp"
#include "hybrid/quadrature.hpp"

namespace hybrid {

using PiezoMatrix = Eigen::Matrix<double, 3, 6>;
using Voigt6 = Eigen::Matrix<double, 6, 1>;

struct PiezoMaterial {
    std::string name;
    PiezoMatrix e_matrix = PiezoMatrix::Zero();  // C/m^2
    double permittivity = constants::epsilon0;   // dielectric permittivity, F/m
    double density = 0.0;                        // kg/m^3
    double sound_speed = 0.0;                    // m/s

    // Ion field inside the dielectric: vacuum monopole with the mean permittivity.
    double mean_permittivity() const { return 0.5 * (constants::epsilon0 + permittivity); }
};

// Voigt pairs (11, 22, 33, 23, 13, 12), zero based.
inline constexpr std::array<std::array<int, 2>, 6> voigt_pairs{{{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

inline int voigt_index(int j, int k) {
    if (j == k) return j;
    const int s = j + k;
    return s == 3 ? 3 : (s == 2 ? 4 : 5);
}

// Engineering strain (shear entries doubled) from the displacement gradient J_ij = d s_i / d r_j.
inline Voigt6 strain_voigt(const Mat3& J) {
    Voigt6 s;
    s << J(0, 0), J(1, 1), J(2, 2), J(1, 2) + J(2, 1), J(0, 2) + J(2, 0), J(0, 1) + J(1, 0);
    return s;
}

// Passive rotation: rows of the result are the new axes expressed in the old frame.
inline Mat3 rot_z(double a) {
    Mat3 R;
    R << std::cos(a), std::sin(a), 0, -std::sin(a), std::cos(a), 0, 0, 0, 1;
    return R;
}

inline Mat3 rot_x(double a) {
    Mat3 R;
    R << 1, 0, 0, 0, std::cos(a), std::sin(a), 0, -std::sin(a), std::cos(a);
    return R;
}

// z-x-z Euler sequence: phi about z, then theta about the new x, then psi about the new z.
inline Mat3 euler_zxz(double phi, double theta, double psi) { return rot_z(psi) * rot_x(theta) * rot_z(phi); }

// e'_ijk = a_il a_jm a_kn e_lmn, via the full rank-3 tensor.
inline PiezoMatrix rotate_piezo(const PiezoMatrix& e_base, double phi, double theta, double psi = 0.0) {
    require(std::isfinite(phi) && std::isfinite(theta) && std::isfinite(psi), "rotate_piezo: angles must be finite");
    const Mat3 A = euler_zxz(phi, theta, psi);
    double T[3][3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) T[i][j][k] = e_base(i, voigt_index(j, k));
    PiezoMatrix out;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 6; ++a) {
            const int j = voigt_pairs[a][0];
            const int k = voigt_pairs[a][1];
            double s = 0.0;
            for (int l = 0; l < 3; ++l)
                for (int m = 0; m < 3; ++m)
                    for (int n = 0; n < 3; ++n) s += A(i, l) * A(j, m) * A(k, n) * T[l][m][n];
            out(i, a) = s;
        }
    return out;
}

// Trigonal (class 32) matrix from e11 and e14.
inline PiezoMatrix quartz_matrix(double e11, double e14) {
    PiezoMatrix e = PiezoMatrix::Zero();
    e(0, 0) = e11;
    e(0, 1) = -e11;
    e(0, 3) = e14;
    e(1, 4) = -e14;
    e(1, 5) = -e11;
    return e;
}

// Hexagonal (class 6mm) matrix with the c axis along z.
inline PiezoMatrix wurtzite_matrix(double e31, double e33, double e15) {
    PiezoMatrix e = PiezoMatrix::Zero();
    e(0, 4) = e15;
    e(1, 3) = e15;
    e(2, 0) = e31;
    e(2, 1) = e31;
    e(2, 2) = e33;
    return e;
}

inline double largest_singular_value(const PiezoMatrix& e) {
    Eigen::JacobiSVD<PiezoMatrix> svd(e);
    return svd.singularValues()(0);
}

// Mode-direction weighted coefficient n_y e22 + n_z e24 + n_x e26 driven by a field along y.
inline double mode_weighted_coefficient(const PiezoMatrix& e, const Vec3& n) {
    return n[1] * e(1, 1) + n[2] * e(1, 3) + n[0] * e(1, 5);
}

// Field-gradient tensor of a point charge: d_i E_j = q (3 R_i R_j - delta_ij R^2) / (4 pi eps R^5),
// with R the vector from the charge to the field point.
inline Mat3 point_charge_field_gradient(double q, double eps, const Vec3& R) {
    const double R2 = R.squaredNorm();
    const double R5 = R2 * R2 * std::sqrt(R2);
    return (q / (4.0 * constants::pi * eps * R5)) * (3.0 * R * R.transpose() - R2 * Mat3::Identity());
}

namespace detail {
inline void check_outside(const ModeModel& mode, const Vec3& ion) {
    if (mode.contains && mode.contains(ion))
        throw PreconditionError("overlap_coupling: ion position lies inside the resonator volume");
    require(mode.mode_mass > 0.0, "overlap_coupling: mode mass must be positive");
}
}  // namespace detail

struct AxisCouplings {
    Vec3 g = Vec3::Zero();  // rad/s, |g| for ion motion along x, y, z
    Vec3 error = Vec3::Zero();
    int subdivisions = 0;
};

// Matrix form: g_i = |int (d_i E) . (e s') dV| / (2 w0 sqrt(M m)), all three axes at once.
inline AxisCouplings overlap_coupling_axes(const ModeModel& mode, const PiezoMaterial& mat, const Particle& p,
                                           const Vec3& ion_position, const QuadratureSpec& quad = {}) {
    detail::check_outside(mode, ion_position);
    const double eps = mat.mean_permittivity();
    const PiezoMatrix& e = mat.e_matrix;
    auto integrand = [&](const Vec3& r) {
        const Vec3 P = e * strain_voigt(mode.shape_gradient(r));
        const Mat3 dE = point_charge_field_gradient(p.charge, eps, r - ion_position);
        return (dE * P).eval();  // row i: d_i E . P
    };
    auto res = integrate<3>(mode.volume, integrand, quad);
    const double scale = 1.0 / (2.0 * mode.omega0 * std::sqrt(mode.mode_mass * p.mass));
    AxisCouplings out;
    out.g = res.value.cwiseAbs() * scale;
    out.error = Vec3::Constant(res.error * scale);
    out.subdivisions = res.subdivisions;
    return out;
}

inline double overlap_coupling(const ModeModel& mode, const PiezoMaterial& mat, const Particle& p,
                               const Vec3& ion_position, const Vec3& motion_axis, const QuadratureSpec& quad = {}) {
    require(motion_axis.norm() > 0.0, "overlap_coupling: motion axis must be nonzero");
    detail::check_outside(mode, ion_position);
    const Vec3 u = motion_axis.normalized();
    const double eps = mat.mean_permittivity();
    auto integrand = [&](const Vec3& r) {
        const Vec3 P = mat.e_matrix * strain_voigt(mode.shape_gradient(r));
        const Mat3 dE = point_charge_field_gradient(p.charge, eps, r - ion_position);
        return Eigen::Matrix<double, 1, 1>(u.dot(dE * P));
    };
    auto res = integrate<1>(mode.volume, integrand, quad);
    return std::abs(res.value[0]) / (2.0 * mode.omega0 * std::sqrt(mode.mode_mass * p.mass));
}

// Dipole form: the ion's zero-point dipole p = q x_zp u against the polarisation density
// P = e s' X_zp of the mode; g = |U_dd| / hbar. Written independently of the matrix form.
inline AxisCouplings overlap_coupling_dipole_axes(const ModeModel& mode, const PiezoMaterial& mat,
                                                  const Particle& p, const Vec3& ion_position,
                                                  const QuadratureSpec& quad = {}) {
    detail::check_outside(mode, ion_position);
    using constants::hbar;
    const double w = mode.omega0;
    const double x_ion = std::sqrt(hbar / (2.0 * p.mass * w));
    const double x_mode = std::sqrt(hbar / (2.0 * mode.mode_mass * w));
    const double k_dd = 1.0 / (4.0 * constants::pi * mat.mean_permittivity());
    auto integrand = [&](const Vec3& r) {
        const Mat3 J = mode.shape_gradient(r);
        Vec3 P = Vec3::Zero();
        for (int a = 0; a < 6; ++a) {
            const int j = voigt_pairs[a][0];
            const int k = voigt_pairs[a][1];
            const double strain = j == k ? J(j, j) : J(j, k) + J(k, j);
            for (int i = 0; i < 3; ++i) P[i] += mat.e_matrix(i, a) * strain;
        }
        P *= x_mode;
        const Vec3 d = r - ion_position;
        const double dist = d.norm();
        const Vec3 nhat = d / dist;
        const double inv3 = 1.0 / (dist * dist * dist);
        Vec3 u;
        for (int i = 0; i < 3; ++i) {
            const double pi_ = p.charge * x_ion;  // dipole along axis i
            u[i] = k_dd * inv3 * (pi_ * P[i] - 3.0 * pi_ * nhat[i] * P.dot(nhat));
        }
        return u;
    };
    auto res = integrate<3>(mode.volume, integrand, quad);
    AxisCouplings out;
    out.g = res.value.cwiseAbs() / hbar;
    out.error = Vec3::Constant(res.error / hbar);
    out.subdivisions = res.subdivisions;
    return out;
}

// Cauchy-Schwarz estimate with the order-unity prefactor set to 1.
inline double cs_bound(const ModeModel& mode, const PiezoMaterial& mat, const Particle& p, double height_h) {
    (void)mode;
    require(height_h > 0.0, "cs_bound: height must be positive");
    const double e_max = largest_singular_value(mat.e_matrix);
    return e_max * std::abs(p.charge) /
           (4.0 * constants::pi * mat.mean_permittivity() * mat.sound_speed *
            std::sqrt(p.mass * mat.density * height_h * height_h * height_h));
}

// Strain scale used for the largest mode polarisation.
enum class StrainScale { gaussian_envelope, wavenumber };

inline constexpr double aligned_dipole_geometry_constant = 3.2;

// Both dipoles aligned with the separation vector everywhere: g <= 3.2 |p| |P_max| / (4 pi hbar eps).
inline double aligned_dipole_bound(const Particle& p, const ModeModel& mode, const PiezoMaterial& mat,
                                   double height_h, StrainScale scale = StrainScale::gaussian_envelope) {
    require(mode.kind == ModeKind::bva, "aligned_dipole_bound: needs a BVA standing-wave mode");
    require(height_h > 0.0, "aligned_dipole_bound: height must be positive");
    using constants::hbar;
    const double w = mode.omega0;
    const double p_ion = std::abs(p.charge) * std::sqrt(hbar / (2.0 * p.mass * w));
    const double strain = scale == StrainScale::gaussian_envelope ? 1.0 / mode.sigma : mode.wavenumber;
    const double P_max = largest_singular_value(mat.e_matrix) * strain * std::sqrt(hbar / (2.0 * mode.mode_mass * w));
    return aligned_dipole_geometry_constant * p_ion * P_max / (4.0 * constants::pi * hbar * mat.mean_permittivity());
}

struct ShuntGeometry {
    double trap_gap_dT = 200e-6;     // m
    double plate_separation = 0.0;   // m, shunt plates; 0 means the disk thickness
    double c_trap = 50e-15;          // F
};

inline double shunt_capacitance(double permittivity, double electrode_radius, double plate_separation) {
    return permittivity * constants::pi * electrode_radius * electrode_radius / plate_separation;
}

// Image-charge drive through shunt plates of radius L_e on the disk faces.
inline double shunt_coupling(const Particle& p, double trap_gap_dT, double e_bar, double permittivity,
                             const ModeModel& mode, double electrode_radius_Le, double c_trap,
                             double plate_separation = 0.0) {
    require(trap_gap_dT > 0.0 && permittivity > 0.0 && electrode_radius_Le > 0.0 && c_trap > 0.0,
            "shunt_coupling: arguments must be positive");
    require(mode.sigma > 0.0, "shunt_coupling: needs a Gaussian-confined mode");
    const double dQ = plate_separation > 0.0 ? plate_separation : mode.thickness;
    const double s2 = mode.sigma * mode.sigma;
    const double Le2 = electrode_radius_Le * electrode_radius_Le;
    const double c_shunt = shunt_capacitance(permittivity, electrode_radius_Le, dQ);
    const double gc = 4.0 * std::abs(p.charge) * e_bar / (permittivity * trap_gap_dT) * (s2 / Le2) *
                      (1.0 - std::exp(-Le2 / (2.0 * s2))) / (1.0 + c_trap / c_shunt);
    return gc / (2.0 * mode.omega0 * std::sqrt(mode.mode_mass * p.mass));
}

struct ElectrodeOptimum {
    double radius = 0.0;
    double coupling = 0.0;
};

inline ElectrodeOptimum optimize_electrode(const Particle& p, double trap_gap_dT, double e_bar, double permittivity,
                                           const ModeModel& mode, double c_trap, double plate_separation = 0.0) {
    auto neg = [&](double u) {
        return -shunt_coupling(p, trap_gap_dT, e_bar, permittivity, mode, u * mode.sigma, c_trap, plate_separation);
    };
    const auto r = boost::math::tools::brent_find_minima(neg, 0.05, 20.0, 40);
    return ElectrodeOptimum{r.first * mode.sigma, -r.second};
}

// Closed-form overtone scaling with the loading prefactor held fixed:
// g = k_fix q e / (eps d_T w0 sqrt(M m)).
inline double shunt_coupling_fixed_prefactor(const Particle& p, double trap_gap_dT, double e_bar,
                                             double permittivity, const ModeModel& mode, double prefactor) {
    return prefactor * std::abs(p.charge) * e_bar /
           (permittivity * trap_gap_dT * mode.omega0 * std::sqrt(mode.mode_mass * p.mass));
}

struct CapacitiveQuartzResult {
    double g = 0.0;
    bool weak_loading = true;  // false when C_trap + C_shunt is not much larger than C_ion, C_quartz
};

inline CapacitiveQuartzResult quartz_capacitive_coupling(double c_ion, double c_quartz, double c_trap, double c_shunt,
                                                         double omega0) {
    require(c_ion >= 0.0 && c_quartz >= 0.0 && c_trap + c_shunt > 0.0,
            "quartz_capacitive_coupling: capacitances must be nonnegative");
    CapacitiveQuartzResult r;
    const double c_total = c_trap + c_shunt;
    r.g = 0.5 * omega0 * std::sqrt(c_ion * c_quartz) / c_total;
    r.weak_loading = c_total >= 10.0 * std::max(c_ion, c_quartz);
    return r;
}

// 1D search over the ion position along a cantilever for the strongest coupling.
struct PositionOptimum {
    double position = 0.0;
    double coupling = 0.0;
};

inline PositionOptimum optimize_ion_along_beam(const ModeModel& beam, const PiezoMaterial& mat, const Particle& p,
                                               double height_h, const Vec3& motion_axis,
                                               const QuadratureSpec& quad = {}) {
    require(beam.kind == ModeKind::cantilever, "optimize_ion_along_beam: needs a cantilever mode");
    auto neg = [&](double x) {
        return -overlap_coupling(beam, mat, p, Vec3(x, 0.0, height_h), motion_axis, quad);
    };
    const auto r = boost::math::tools::brent_find_minima(neg, 0.0, beam.length, 30);
    return PositionOptimum{r.first, -r.second};
}

}  // namespace hybrid
