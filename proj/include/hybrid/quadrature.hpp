#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "hybrid/errors.hpp"

namespace hybrid {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct MappedPoint {
    Vec3 x;
    double jacobian = 1.0;
};

// One box in parameter space and the smooth map taking it into physical space.
struct RegionPiece {
    Vec3 lo;
    Vec3 hi;
    std::function<MappedPoint(const Vec3&)> map;
};

struct Region {
    std::vector<RegionPiece> pieces;
};

inline RegionPiece identity_box(const Vec3& lo, const Vec3& hi) {
    return RegionPiece{lo, hi, [](const Vec3& u) { return MappedPoint{u, 1.0}; }};
}

// Cylinder with axis along y: parameters (rho, phi, y).
inline RegionPiece cylinder_y(double radius, double y0, double y1) {
    return RegionPiece{Vec3(0.0, 0.0, y0), Vec3(radius, 2.0 * std::numbers::pi, y1), [](const Vec3& u) {
                           return MappedPoint{Vec3(u[0] * std::cos(u[1]), u[2], u[0] * std::sin(u[1])), u[0]};
                       }};
}

// Cylinder with axis along x: parameters (x, rho, phi).
inline RegionPiece cylinder_x(double radius, double x0, double x1) {
    return RegionPiece{Vec3(x0, 0.0, 0.0), Vec3(x1, radius, 2.0 * std::numbers::pi), [](const Vec3& u) {
                           return MappedPoint{Vec3(u[0], u[1] * std::cos(u[2]), u[1] * std::sin(u[2])), u[1]};
                       }};
}

// Regular hexagonal prism along x, circumradius a, vertices on the y axis.
// Split at z = 0 so each half is a smooth map of (x, v, w) with v in [-1, 1], w in [0, 1].
inline std::vector<RegionPiece> hex_prism_x(double a, double x0, double x1) {
    const double zmax = a * std::sqrt(3.0) / 2.0;
    std::vector<RegionPiece> out;
    for (double side : {1.0, -1.0}) {
        out.push_back(RegionPiece{Vec3(x0, -1.0, 0.0), Vec3(x1, 1.0, 1.0), [=](const Vec3& u) {
                                      const double z = side * u[2] * zmax;
                                      const double half = a - std::abs(z) / std::sqrt(3.0);
                                      return MappedPoint{Vec3(u[0], u[1] * half, z), zmax * half};
                                  }});
    }
    return out;
}

enum class QuadratureRule { tensor_gauss, adaptive_subdivision };

struct QuadratureSpec {
    double relative_tolerance = 1e-4;
    double absolute_tolerance = 0.0;
    int max_subdivisions = 20000;
    QuadratureRule rule = QuadratureRule::adaptive_subdivision;
    int initial_divisions = 2;  // per axis, per region piece
    int batch = 4;              // cells refined per round; fixes the result independent of workers
    unsigned workers = 1;
};

template <int N>
struct QuadResult {
    Eigen::Matrix<double, N, 1> value;
    double error = 0.0;
    int subdivisions = 0;
    long evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 4> gl4_nodes{-0.8611363115940526, -0.3399810435848563,
                                                 0.3399810435848563, 0.8611363115940526};
inline constexpr std::array<double, 4> gl4_weights{0.3478548451374539, 0.6521451548625461,
                                                   0.6521451548625461, 0.3478548451374539};

template <int N, class F>
Eigen::Matrix<double, N, 1> gauss_cell(const RegionPiece& piece, const Vec3& lo, const Vec3& hi, F& f) {
    Eigen::Matrix<double, N, 1> acc = Eigen::Matrix<double, N, 1>::Zero();
    const Vec3 c = 0.5 * (lo + hi);
    const Vec3 h = 0.5 * (hi - lo);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                const Vec3 u(c[0] + h[0] * gl4_nodes[i], c[1] + h[1] * gl4_nodes[j], c[2] + h[2] * gl4_nodes[k]);
                const MappedPoint p = piece.map(u);
                acc += (gl4_weights[i] * gl4_weights[j] * gl4_weights[k] * p.jacobian) * f(p.x);
            }
    return acc * (h[0] * h[1] * h[2]);
}

template <int N>
struct Cell {
    int piece = 0;
    Vec3 lo;
    Vec3 hi;
    Eigen::Matrix<double, N, 1> coarse = Eigen::Matrix<double, N, 1>::Zero();
    std::array<Eigen::Matrix<double, N, 1>, 8> child;
    double error = 0.0;
    long id = 0;

    Eigen::Matrix<double, N, 1> fine() const {
        Eigen::Matrix<double, N, 1> s = Eigen::Matrix<double, N, 1>::Zero();
        for (const auto& c : child) s += c;
        return s;
    }
};

inline void octant(const Vec3& lo, const Vec3& hi, int k, Vec3& clo, Vec3& chi) {
    const Vec3 mid = 0.5 * (lo + hi);
    for (int d = 0; d < 3; ++d) {
        const bool upper = (k >> d) & 1;
        clo[d] = upper ? mid[d] : lo[d];
        chi[d] = upper ? hi[d] : mid[d];
    }
}

template <int N, class F>
void fill_children(const Region& region, Cell<N>& cell, F& f) {
    Vec3 clo, chi;
    for (int k = 0; k < 8; ++k) {
        octant(cell.lo, cell.hi, k, clo, chi);
        cell.child[k] = gauss_cell<N>(region.pieces[cell.piece], clo, chi, f);
    }
    cell.error = (cell.coarse - cell.fine()).norm();
}

// Order-independent sum: pairwise reduction over a fixed ordering.
template <class V>
V pairwise_sum(const std::vector<V>& xs, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return xs[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi);
}

}  // namespace detail

// Integrates an R^N-valued function over a region. Cells are refined octree-style,
// largest |coarse - sum of children| first, until the summed estimate meets tolerance.
template <int N, class F>
QuadResult<N> integrate(const Region& region, F f, const QuadratureSpec& spec = {}) {
    using detail::Cell;
    using V = Eigen::Matrix<double, N, 1>;
    require(spec.relative_tolerance > 0.0 && spec.relative_tolerance < 1.0,
            "quadrature: relative tolerance must be in (0, 1)");
    require(!region.pieces.empty(), "quadrature: empty region");

    std::vector<Cell<N>> leaves;
    long next_id = 0;
    const int nd = std::max(1, spec.initial_divisions);
    for (int p = 0; p < static_cast<int>(region.pieces.size()); ++p) {
        const RegionPiece& piece = region.pieces[p];
        const Vec3 step = (piece.hi - piece.lo) / nd;
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j)
                for (int k = 0; k < nd; ++k) {
                    Cell<N> c;
                    c.piece = p;
                    c.lo = piece.lo + Vec3(i * step[0], j * step[1], k * step[2]);
                    c.hi = c.lo + step;
                    c.id = next_id++;
                    leaves.push_back(c);
                }
    }

    // Each cell is a leaf whose children are already integrated; the first pass
    // fills coarse and children for the initial grid.
    long evaluations = 0;
    auto prepare = [&](std::vector<Cell<N>*>& cells) {
        const unsigned workers = std::max(1u, std::min<unsigned>(spec.workers, cells.size()));
        auto work = [&](unsigned w) {
            for (std::size_t i = w; i < cells.size(); i += workers) {
                Cell<N>& c = *cells[i];
                if (c.coarse.size() == 0 || std::isnan(c.coarse[0]))
                    c.coarse = detail::gauss_cell<N>(region.pieces[c.piece], c.lo, c.hi, f);
                detail::fill_children<N>(region, c, f);
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
            for (auto& t : pool) t.join();
        }
        evaluations += static_cast<long>(cells.size()) * 8 * 64;
    };

    for (auto& c : leaves) c.coarse = V::Constant(std::nan(""));
    {
        std::vector<Cell<N>*> ptrs;
        for (auto& c : leaves) ptrs.push_back(&c);
        prepare(ptrs);
        evaluations += static_cast<long>(leaves.size()) * 64;
    }

    auto total_of = [](const std::vector<Cell<N>>& cells, double& err) {
        std::vector<V> parts;
        parts.reserve(cells.size());
        err = 0.0;
        for (const auto& c : cells) {
            parts.push_back(c.fine());
            err += c.error;
        }
        return detail::pairwise_sum(parts, 0, parts.size());
    };

    double err = 0.0;
    V total = total_of(leaves, err);
    int splits = 0;
    auto tolerance = [&](const V& t) {
        return std::max(spec.relative_tolerance * t.norm(), spec.absolute_tolerance);
    };

    if (spec.rule == QuadratureRule::adaptive_subdivision) {
        auto cmp = [&](std::size_t a, std::size_t b) {
            if (leaves[a].error != leaves[b].error) return leaves[a].error < leaves[b].error;
            return leaves[a].id > leaves[b].id;
        };
        std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
        for (std::size_t i = 0; i < leaves.size(); ++i) heap.push(i);
        std::vector<char> dead(leaves.size(), 0);
        double run_err = err;
        V run_total = total;

        while (run_err > tolerance(run_total)) {
            if (splits >= spec.max_subdivisions) {
                throw NumericalError("quadrature did not converge within " +
                                         std::to_string(spec.max_subdivisions) +
                                         " subdivisions (estimate " + std::to_string(run_total.norm()) +
                                         ", error bound " + std::to_string(run_err) + ")",
                                     run_total.norm(), run_err);
            }
            std::vector<std::size_t> chosen;
            while (!heap.empty() && static_cast<int>(chosen.size()) < std::max(1, spec.batch)) {
                chosen.push_back(heap.top());
                heap.pop();
            }
            if (chosen.empty()) break;
            std::vector<Cell<N>> fresh;
            for (std::size_t idx : chosen) {
                const Cell<N>& parent = leaves[idx];
                dead[idx] = 1;
                run_err -= parent.error;
                run_total -= parent.fine();
                for (int k = 0; k < 8; ++k) {
                    Cell<N> c;
                    c.piece = parent.piece;
                    detail::octant(parent.lo, parent.hi, k, c.lo, c.hi);
                    c.coarse = parent.child[k];
                    c.id = next_id++;
                    fresh.push_back(c);
                }
                ++splits;
            }
            std::vector<Cell<N>*> ptrs;
            for (auto& c : fresh) ptrs.push_back(&c);
            prepare(ptrs);
            for (auto& c : fresh) {
                run_err += c.error;
                run_total += c.fine();
                leaves.push_back(c);
                dead.push_back(0);
                heap.push(leaves.size() - 1);
            }
        }
        std::vector<Cell<N>> alive;
        alive.reserve(leaves.size());
        for (std::size_t i = 0; i < leaves.size(); ++i)
            if (!dead[i]) alive.push_back(leaves[i]);
        std::sort(alive.begin(), alive.end(), [](const Cell<N>& a, const Cell<N>& b) { return a.id < b.id; });
        total = total_of(alive, err);
    } else if (err > tolerance(total)) {
        throw NumericalError("fixed tensor Gauss rule misses tolerance (estimate " +
                                 std::to_string(total.norm()) + ", error bound " + std::to_string(err) + ")",
                             total.norm(), err);
    }

    QuadResult<N> out;
    out.value = total;
    out.error = err;
    out.subdivisions = splits;
    out.evaluations = evaluations;
    return out;
}

template <class F>
QuadResult<1> integrate_scalar(const Region& region, F f, const QuadratureSpec& spec = {}) {
    return integrate<1>(region, [&](const Vec3& x) { return Eigen::Matrix<double, 1, 1>(f(x)); }, spec);
}

}  // namespace hybrid
