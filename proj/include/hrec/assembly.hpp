#pragma once

#include "hrec/mesh.hpp"
#include "hrec/quadrature.hpp"
#include "hrec/types.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace hrec {

/// Stiffness of the Dirichlet energy on Omega split by dof class.
struct StiffnessBlocks {
    SparseMatrix full;     // all dofs
    SparseMatrix interior; // K_N: interior x interior
    SparseMatrix coupling; // K_b: interior x boundary
};

/// Mass and Laplace-Beltrami stiffness of P1 elements on the boundary cycle.
struct BoundaryOperators {
    SparseMatrix mass;
    SparseMatrix stiffness;

    [[nodiscard]] Eigen::Index size() const { return mass.rows(); }
};

struct ExactSolution {
    std::string name;
    std::function<double(double, double)> value;
    std::function<std::array<double, 2>(double, double)> gradient;
    double h1_norm_reference = 0.0;
};

/// u(x,y) = e^x cos(y).
inline ExactSolution smooth_solution()
{
    return {"smooth",
            [](double x, double y) { return std::exp(x) * std::cos(y); },
            [](double x, double y) {
                return std::array<double, 2>{std::exp(x) * std::cos(y), -std::exp(x) * std::sin(y)};
            },
            2.648};
}

/// Polar angle in [0, 2pi); on the L-shape it covers [0, 3pi/2].
inline double lshape_angle(double x, double y)
{
    double theta = std::atan2(y, x);
    if (theta < 0.0) {
        theta += 2.0 * std::numbers::pi;
    }
    return theta;
}

/// u = r^{2/3} sin(2 theta / 3), vanishing on both edges at the reentrant corner.
inline ExactSolution nonsmooth_solution()
{
    return {"nonsmooth",
            [](double x, double y) {
                const double r = std::hypot(x, y);
                return std::pow(r, 2.0 / 3.0) * std::sin(2.0 * lshape_angle(x, y) / 3.0);
            },
            [](double x, double y) {
                const double r = std::hypot(x, y);
                if (r == 0.0) {
                    return std::array<double, 2>{0.0, 0.0};
                }
                const double theta = lshape_angle(x, y);
                const double a = 2.0 / 3.0;
                // grad = a r^{a-1} (sin(a t) e_r + cos(a t) e_t)
                const double scale = a * std::pow(r, a - 1.0);
                const double s = std::sin(a * theta);
                const double c = std::cos(a * theta);
                const double ct = std::cos(theta);
                const double st = std::sin(theta);
                return std::array<double, 2>{scale * (s * ct - c * st), scale * (s * st + c * ct)};
            },
            1.709};
}

namespace detail {

/// Q1 shape functions on [0,1]^2, counterclockwise from the origin.
inline std::array<double, 4> q1_values(double a, double b)
{
    return {(1 - a) * (1 - b), a * (1 - b), a * b, (1 - a) * b};
}

/// Reference gradients (d/da, d/db).
inline std::array<std::array<double, 2>, 4> q1_gradients(double a, double b)
{
    return {{{-(1 - b), -(1 - a)}, {1 - b, -a}, {b, a}, {-b, 1 - a}}};
}

inline void split_blocks(const QuadMesh& mesh, StiffnessBlocks& k)
{
    const int n = mesh.n_interior;
    const int nb = mesh.n_boundary;
    k.interior = k.full.topLeftCorner(n, n);
    k.coupling = k.full.topRightCorner(n, nb);
}

} // namespace detail

/// Q1 stiffness; on squares the element matrix does not depend on the side.
inline StiffnessBlocks assemble_stiffness(const QuadMesh& mesh)
{
    static constexpr double local[4][4] = {{4.0 / 6, -1.0 / 6, -2.0 / 6, -1.0 / 6},
                                           {-1.0 / 6, 4.0 / 6, -1.0 / 6, -2.0 / 6},
                                           {-2.0 / 6, -1.0 / 6, 4.0 / 6, -1.0 / 6},
                                           {-1.0 / 6, -2.0 / 6, -1.0 / 6, 4.0 / 6}};
    std::vector<Triplet> triplets;
    triplets.reserve(mesh.cells.size() * 16);
    for (const auto& cell : mesh.cells) {
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                triplets.emplace_back(cell[a], cell[b], local[a][b]);
            }
        }
    }
    StiffnessBlocks k;
    k.full.resize(mesh.n_dofs(), mesh.n_dofs());
    k.full.setFromTriplets(triplets.begin(), triplets.end());
    detail::split_blocks(mesh, k);
    return k;
}

/// Q1 mass matrix on Omega.
inline SparseMatrix assemble_mass(const QuadMesh& mesh)
{
    static constexpr double local[4][4] = {{4, 2, 1, 2}, {2, 4, 2, 1}, {1, 2, 4, 2}, {2, 1, 2, 4}};
    const double scale = mesh.side * mesh.side / 36.0;
    std::vector<Triplet> triplets;
    triplets.reserve(mesh.cells.size() * 16);
    for (const auto& cell : mesh.cells) {
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                triplets.emplace_back(cell[a], cell[b], scale * local[a][b]);
            }
        }
    }
    SparseMatrix m(mesh.n_dofs(), mesh.n_dofs());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

inline BoundaryOperators assemble_boundary_operators(const BoundaryMesh& bmesh)
{
    const int nb = bmesh.size();
    std::vector<Triplet> mass;
    std::vector<Triplet> stiff;
    for (int e = 0; e < nb; ++e) {
        const int a = e;
        const int b = (e + 1) % nb;
        const double len = bmesh.edge_lengths[e];
        mass.emplace_back(a, a, len / 3.0);
        mass.emplace_back(b, b, len / 3.0);
        mass.emplace_back(a, b, len / 6.0);
        mass.emplace_back(b, a, len / 6.0);
        stiff.emplace_back(a, a, 1.0 / len);
        stiff.emplace_back(b, b, 1.0 / len);
        stiff.emplace_back(a, b, -1.0 / len);
        stiff.emplace_back(b, a, -1.0 / len);
    }
    BoundaryOperators ops;
    ops.mass.resize(nb, nb);
    ops.stiffness.resize(nb, nb);
    ops.mass.setFromTriplets(mass.begin(), mass.end());
    ops.stiffness.setFromTriplets(stiff.begin(), stiff.end());
    return ops;
}

/// Integrates a weight against every basis function: entry i is int_Omega f phi_i.
inline DualVector assemble_load(const QuadMesh& mesh, const std::function<double(double, double)>& f,
                                int quad_order = 4)
{
    const UnitSquareRule rule = unit_square_rule(quad_order);
    const double area = mesh.side * mesh.side;
    DualVector load = DualVector::zero(mesh.n_dofs());
    for (const auto& cell : mesh.cells) {
        const Point origin = mesh.node_coords[cell[0]];
        std::array<double, 4> local{};
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const double x = origin.x + rule.xi[q] * mesh.side;
            const double y = origin.y + rule.eta[q] * mesh.side;
            const double fw = f(x, y) * rule.weights[q] * area;
            const auto phi = detail::q1_values(rule.xi[q], rule.eta[q]);
            for (int a = 0; a < 4; ++a) {
                local[a] += fw * phi[a];
            }
        }
        for (int a = 0; a < 4; ++a) {
            load[cell[a]] += local[a];
        }
    }
    return load;
}

/// Load restricted to interior dofs (the homogeneous Dirichlet test space).
inline Vector interior_part(const QuadMesh& mesh, const DualVector& load)
{
    return load.values.head(mesh.n_interior);
}

struct H1Error {
    double error = 0.0;
    double exact_norm = 0.0;
    [[nodiscard]] double relative() const { return error / exact_norm; }
};

/// ||u - u_h||_{H^1} and ||u||_{H^1} by tensor Gauss quadrature per cell.
inline H1Error h1_error(const QuadMesh& mesh, const PrimalVector& u_h, const ExactSolution& exact,
                        int quad_order = 4)
{
    if (u_h.size() != mesh.n_dofs()) {
        throw std::invalid_argument("h1_error: coefficient vector does not match the mesh");
    }
    const UnitSquareRule rule = unit_square_rule(quad_order);
    const double area = mesh.side * mesh.side;
    const double inv_side = 1.0 / mesh.side;
    double err2 = 0.0;
    double norm2 = 0.0;
    for (const auto& cell : mesh.cells) {
        const Point origin = mesh.node_coords[cell[0]];
        double cell_err = 0.0;
        double cell_norm = 0.0;
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const double x = origin.x + rule.xi[q] * mesh.side;
            const double y = origin.y + rule.eta[q] * mesh.side;
            const auto phi = detail::q1_values(rule.xi[q], rule.eta[q]);
            const auto dphi = detail::q1_gradients(rule.xi[q], rule.eta[q]);
            double uh = 0.0;
            double gx = 0.0;
            double gy = 0.0;
            for (int a = 0; a < 4; ++a) {
                const double c = u_h[cell[a]];
                uh += c * phi[a];
                gx += c * dphi[a][0] * inv_side;
                gy += c * dphi[a][1] * inv_side;
            }
            const double u = exact.value(x, y);
            const auto g = exact.gradient(x, y);
            const double w = rule.weights[q] * area;
            cell_err += w * ((u - uh) * (u - uh) + (g[0] - gx) * (g[0] - gx) + (g[1] - gy) * (g[1] - gy));
            cell_norm += w * (u * u + g[0] * g[0] + g[1] * g[1]);
        }
        err2 += cell_err;
        norm2 += cell_norm;
    }
    return {std::sqrt(err2), std::sqrt(norm2)};
}

/// Nodal interpolant of a continuous function.
inline PrimalVector interpolate(const QuadMesh& mesh, const std::function<double(double, double)>& f)
{
    PrimalVector v = PrimalVector::zero(mesh.n_dofs());
    for (int d = 0; d < mesh.n_dofs(); ++d) {
        v[d] = f(mesh.node_coords[d].x, mesh.node_coords[d].y);
    }
    return v;
}

} // namespace hrec
