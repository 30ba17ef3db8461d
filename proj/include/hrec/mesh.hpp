#pragma once

#include "hrec/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hrec {

/// Membership in the open L-shape (-1,1)^2 minus [0,1) x (-1,0].
inline bool point_in_domain(double x, double y)
{
    const bool in_square = x > -1.0 && x < 1.0 && y > -1.0 && y < 1.0;
    return in_square && !(x >= 0.0 && y <= 0.0);
}

/**
 * Uniform quadrilateral mesh of the L-shaped domain.
 *
 * Nodes are numbered interior first (indices 0..n_interior-1, row-major
 * over the grid), then boundary nodes in counterclockwise order starting
 * from (-1,-1). Cells are axis-aligned squares of side 2^-level with their
 * four vertices listed counterclockwise from the lower-left corner.
 */
struct QuadMesh {
    int level = 0;
    double side = 0.0;
    int grid = 0; // grid cells per direction on the enclosing square
    std::vector<Point> node_coords;
    std::vector<std::array<int, 4>> cells;
    int n_interior = 0;
    int n_boundary = 0;
    std::vector<int> grid_to_node; // (grid+1)^2 lattice, -1 outside the domain
    std::vector<int> grid_to_cell; // grid^2 lattice, -1 for removed cells

    [[nodiscard]] int n_dofs() const { return n_interior + n_boundary; }
    [[nodiscard]] int n_cells() const { return static_cast<int>(cells.size()); }
    [[nodiscard]] bool is_boundary(int dof) const { return dof >= n_interior; }
    /// Diameter of a cell.
    [[nodiscard]] double mesh_size() const { return std::sqrt(2.0) * side; }
    [[nodiscard]] int node_at(int i, int j) const { return grid_to_node[j * (grid + 1) + i]; }
    [[nodiscard]] int cell_at(int i, int j) const { return grid_to_cell[j * grid + i]; }
};

inline QuadMesh build_lshape_mesh(int n)
{
    if (n < 1) {
        throw std::invalid_argument("build_lshape_mesh: refinement level must be >= 1, got " + std::to_string(n));
    }
    if (n > 12) {
        throw std::invalid_argument("build_lshape_mesh: refinement level " + std::to_string(n) + " is too large");
    }
    QuadMesh mesh;
    mesh.level = n;
    mesh.side = std::ldexp(1.0, -n);
    const int g = 2 << n; // 2^{n+1}
    const int half = g / 2;
    mesh.grid = g;

    const auto removed_node = [half](int i, int j) { return i > half && j < half; };
    const auto on_boundary = [g, half](int i, int j) {
        return i == 0 || i == g || j == 0 || j == g || (i == half && j <= half) || (j == half && i >= half);
    };

    mesh.grid_to_node.assign(static_cast<std::size_t>(g + 1) * (g + 1), -1);
    auto& lattice = mesh.grid_to_node;
    const auto at = [g](int i, int j) { return static_cast<std::size_t>(j) * (g + 1) + i; };

    int next = 0;
    for (int j = 0; j <= g; ++j) {
        for (int i = 0; i <= g; ++i) {
            if (!removed_node(i, j) && !on_boundary(i, j)) {
                lattice[at(i, j)] = next++;
            }
        }
    }
    mesh.n_interior = next;

    // counterclockwise walk along the six straight pieces of the boundary
    const std::array<std::pair<int, int>, 7> corners = {
        {{0, 0}, {half, 0}, {half, half}, {g, half}, {g, g}, {0, g}, {0, 0}}};
    for (std::size_t c = 0; c + 1 < corners.size(); ++c) {
        auto [i, j] = corners[c];
        const auto [ie, je] = corners[c + 1];
        const int di = (ie > i) - (ie < i);
        const int dj = (je > j) - (je < j);
        while (i != ie || j != je) {
            if (lattice[at(i, j)] < 0) {
                lattice[at(i, j)] = next++;
            }
            i += di;
            j += dj;
        }
    }
    mesh.n_boundary = next - mesh.n_interior;

    mesh.node_coords.resize(next);
    for (int j = 0; j <= g; ++j) {
        for (int i = 0; i <= g; ++i) {
            if (const int id = lattice[at(i, j)]; id >= 0) {
                mesh.node_coords[id] = {-1.0 + i * mesh.side, -1.0 + j * mesh.side};
            }
        }
    }

    mesh.grid_to_cell.assign(static_cast<std::size_t>(g) * g, -1);
    for (int j = 0; j < g; ++j) {
        for (int i = 0; i < g; ++i) {
            if (i >= half && j < half) {
                continue;
            }
            mesh.grid_to_cell[static_cast<std::size_t>(j) * g + i] = static_cast<int>(mesh.cells.size());
            mesh.cells.push_back({lattice[at(i, j)], lattice[at(i + 1, j)], lattice[at(i + 1, j + 1)],
                                  lattice[at(i, j + 1)]});
        }
    }
    return mesh;
}

/// The boundary curve as a closed chain of P1 edges.
struct BoundaryMesh {
    std::vector<int> boundary_dofs;    // cyclic, counterclockwise
    std::vector<double> edge_lengths;  // edge e joins boundary_dofs[e] and boundary_dofs[e+1 mod N_b]
    std::vector<int> global_to_boundary; // -1 for interior dofs

    [[nodiscard]] int size() const { return static_cast<int>(boundary_dofs.size()); }
};

/**
 * Traces the boundary edges of @p mesh as one closed counterclockwise cycle.
 *
 * Boundary edges are those owned by a single cell; since cells are
 * counterclockwise, each boundary edge carries the outward orientation.
 * The cycle starts at @p start_dof when given, otherwise at (-1,-1).
 */
inline BoundaryMesh extract_boundary(const QuadMesh& mesh, std::optional<int> start_dof = std::nullopt)
{
    std::map<std::pair<int, int>, int> edge_count;
    std::vector<std::pair<int, int>> directed;
    for (const auto& cell : mesh.cells) {
        for (int e = 0; e < 4; ++e) {
            const int a = cell[e];
            const int b = cell[(e + 1) % 4];
            directed.emplace_back(a, b);
            ++edge_count[{std::min(a, b), std::max(a, b)}];
        }
    }

    std::vector<int> successor(mesh.n_dofs(), -1);
    int n_edges = 0;
    for (const auto& [a, b] : directed) {
        if (edge_count[{std::min(a, b), std::max(a, b)}] != 1) {
            continue;
        }
        if (!mesh.is_boundary(a) || !mesh.is_boundary(b)) {
            throw std::runtime_error("extract_boundary: boundary edge touches an interior dof");
        }
        if (successor[a] >= 0) {
            throw std::runtime_error("extract_boundary: boundary is not a simple closed curve");
        }
        successor[a] = b;
        ++n_edges;
    }
    if (n_edges != mesh.n_boundary) {
        throw std::runtime_error("extract_boundary: edge count does not match boundary dof count");
    }

    int start = -1;
    if (start_dof) {
        start = *start_dof;
    } else {
        for (int d = mesh.n_interior; d < mesh.n_dofs(); ++d) {
            if (mesh.node_coords[d].x == -1.0 && mesh.node_coords[d].y == -1.0) {
                start = d;
            }
        }
    }
    if (start < 0 || start >= mesh.n_dofs() || successor[start] < 0) {
        throw std::runtime_error("extract_boundary: invalid start node");
    }

    BoundaryMesh bmesh;
    bmesh.global_to_boundary.assign(mesh.n_dofs(), -1);
    int current = start;
    do {
        if (current < 0 || bmesh.global_to_boundary[current] >= 0) {
            throw std::runtime_error("extract_boundary: boundary edges do not form a single cycle");
        }
        bmesh.global_to_boundary[current] = bmesh.size();
        bmesh.boundary_dofs.push_back(current);
        const int nxt = successor[current];
        if (nxt < 0) {
            throw std::runtime_error("extract_boundary: open boundary chain");
        }
        const Point p = mesh.node_coords[current];
        const Point q = mesh.node_coords[nxt];
        bmesh.edge_lengths.push_back(std::hypot(q.x - p.x, q.y - p.y));
        current = nxt;
    } while (current != start);

    if (bmesh.size() != mesh.n_boundary) {
        throw std::runtime_error("extract_boundary: boundary splits into several cycles");
    }
    return bmesh;
}

/// Cell containing (x, y) and the local coordinates in [0,1]^2, if inside the closed domain.
struct CellLocation {
    int cell = -1;
    double xi = 0.0;
    double eta = 0.0;
};

inline std::optional<CellLocation> locate(const QuadMesh& mesh, double x, double y)
{
    const double tol = 1e-12;
    const double u = (x + 1.0) / mesh.side;
    const double v = (y + 1.0) / mesh.side;
    const int i0 = static_cast<int>(std::floor(u));
    const int j0 = static_cast<int>(std::floor(v));
    // points on cell faces may belong to a removed neighbour; try adjacent cells
    for (int dj : {0, -1}) {
        for (int di : {0, -1}) {
            const int i = i0 + di;
            const int j = j0 + dj;
            if (i < 0 || j < 0 || i >= mesh.grid || j >= mesh.grid) {
                continue;
            }
            const int c = mesh.cell_at(i, j);
            if (c < 0) {
                continue;
            }
            const double xi = u - i;
            const double eta = v - j;
            if (xi >= -tol && xi <= 1.0 + tol && eta >= -tol && eta <= 1.0 + tol) {
                return CellLocation{c, std::clamp(xi, 0.0, 1.0), std::clamp(eta, 0.0, 1.0)};
            }
        }
    }
    return std::nullopt;
}

/// Value of the Q1 function with coefficients @p u at (x, y).
inline double evaluate(const QuadMesh& mesh, const PrimalVector& u, double x, double y)
{
    const auto loc = locate(mesh, x, y);
    if (!loc) {
        throw std::out_of_range("evaluate: point outside the mesh");
    }
    const auto& c = mesh.cells[loc->cell];
    const double a = loc->xi;
    const double b = loc->eta;
    return (1 - a) * (1 - b) * u[c[0]] + a * (1 - b) * u[c[1]] + a * b * u[c[2]] + (1 - a) * b * u[c[3]];
}

inline void write_mesh_csv(std::ostream& out, const QuadMesh& mesh)
{
    out << "node_id,x,y,kind\n";
    out.precision(17);
    for (int d = 0; d < mesh.n_dofs(); ++d) {
        out << d << ',' << mesh.node_coords[d].x << ',' << mesh.node_coords[d].y << ','
            << (mesh.is_boundary(d) ? "boundary" : "interior") << '\n';
    }
}

} // namespace hrec
