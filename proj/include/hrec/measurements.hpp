#pragma once

#include "hrec/assembly.hpp"
#include "hrec/mesh.hpp"
#include "hrec/types.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace hrec {

inline constexpr double kDefaultGaussianRadius = 0.1;

/// lambda(v; z) = (2 pi r^2)^{-1/2} int_Omega exp(-|x - z|^2 / (2 r^2)) v(x) dx.
struct GaussianMeasurement {
    Point center;
    double radius = kDefaultGaussianRadius;

    GaussianMeasurement(Point c, double r = kDefaultGaussianRadius) : center(c), radius(r)
    {
        if (!point_in_domain(c.x, c.y)) {
            throw std::invalid_argument("GaussianMeasurement: center outside the domain");
        }
        if (!(r > 0.0)) {
            throw std::invalid_argument("GaussianMeasurement: radius must be positive");
        }
    }

    [[nodiscard]] double weight(double x, double y) const
    {
        const double dx = x - center.x;
        const double dy = y - center.y;
        const double r2 = radius * radius;
        return std::exp(-(dx * dx + dy * dy) / (2.0 * r2)) / std::sqrt(2.0 * std::numbers::pi * r2);
    }
};

/**
 * Grid centers z_ij = (-1 + i d, -1 + j d), d = 2/(p+1), 1 <= i,j <= p,
 * kept when inside the domain; i is the outer loop.
 */
inline std::vector<Point> generate_centers(int p)
{
    if (p < 1) {
        throw std::invalid_argument("generate_centers: p must be >= 1");
    }
    std::vector<Point> centers;
    const double denom = p + 1.0;
    for (int i = 1; i <= p; ++i) {
        for (int j = 1; j <= p; ++j) {
            // exact zero when 2i == p+1
            const double x = (2.0 * i - denom) / denom;
            const double y = (2.0 * j - denom) / denom;
            if (point_in_domain(x, y)) {
                centers.push_back({x, y});
            }
        }
    }
    return centers;
}

/// Per-cell Gauss points per direction.
struct QuadratureOrders {
    int dual = 2;  // measurement duals
    int data = 4;  // omega = lambda(u)
    int error = 4; // H^1 errors and loads
};

/// nu_i = lambda(phi_i) for every dof.
inline DualVector assemble_measurement_dual(const QuadMesh& mesh, const GaussianMeasurement& meas, int quad_order = 2)
{
    return assemble_load(mesh, [&meas](double x, double y) { return meas.weight(x, y); }, quad_order);
}

struct MeasurementSet {
    int p = 0;
    std::vector<GaussianMeasurement> measurements;
    std::vector<DualVector> duals;

    [[nodiscard]] int size() const { return static_cast<int>(measurements.size()); }
};

inline MeasurementSet make_measurement_set(const QuadMesh& mesh, int p, double radius = kDefaultGaussianRadius,
                                           int quad_order = 2)
{
    MeasurementSet set;
    set.p = p;
    for (const Point& c : generate_centers(p)) {
        set.measurements.emplace_back(c, radius);
        set.duals.push_back(assemble_measurement_dual(mesh, set.measurements.back(), quad_order));
    }
    return set;
}

/// lambda(f) for a continuous f by per-cell Gauss quadrature.
inline double measure_function(const QuadMesh& mesh, const GaussianMeasurement& meas,
                               const std::function<double(double, double)>& f, int quad_order = 4)
{
    const UnitSquareRule rule = unit_square_rule(quad_order);
    const double area = mesh.side * mesh.side;
    double total = 0.0;
    for (const auto& cell : mesh.cells) {
        const Point origin = mesh.node_coords[cell[0]];
        double local = 0.0;
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const double x = origin.x + rule.xi[q] * mesh.side;
            const double y = origin.y + rule.eta[q] * mesh.side;
            local += rule.weights[q] * meas.weight(x, y) * f(x, y);
        }
        total += local * area;
    }
    return total;
}

/// omega = (lambda^1(u), ..., lambda^m(u)) for the exact solution.
inline Vector measure_exact(const QuadMesh& mesh, const MeasurementSet& set, const ExactSolution& exact,
                            int quad_order = 4)
{
    Vector omega(set.size());
    for (int i = 0; i < set.size(); ++i) {
        omega[i] = measure_function(mesh, set.measurements[i], exact.value, quad_order);
    }
    return omega;
}

inline void write_measurements_csv(std::ostream& out, const MeasurementSet& set, const Vector& omega)
{
    out << "index,x,y,radius,omega\n";
    out.precision(17);
    for (int i = 0; i < set.size(); ++i) {
        const auto& m = set.measurements[i];
        out << i << ',' << m.center.x << ',' << m.center.y << ',' << m.radius << ',' << omega[i] << '\n';
    }
}

} // namespace hrec
