#pragma once

#include "hrec/assembly.hpp"
#include "hrec/fractional.hpp"
#include "hrec/linalg.hpp"
#include "hrec/measurements.hpp"
#include "hrec/mesh.hpp"
#include "hrec/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hrec {

/**
 * Everything assembled once per mesh: the Dirichlet stiffness blocks with
 * a factorization of the interior block, and the boundary operators.
 *
 * Boundary vectors are always ordered along the boundary cycle; the
 * coupling block is stored with its columns permuted to that order.
 */
class Discretization {
  public:
    explicit Discretization(int level, const SpdSolverOptions& options = {})
        : Discretization(build_lshape_mesh(level), options)
    {
    }

    explicit Discretization(QuadMesh mesh, const SpdSolverOptions& options = {})
        : mesh_(std::move(mesh)), boundary_(extract_boundary(mesh_)), stiffness_(assemble_stiffness(mesh_)),
          boundary_ops_(assemble_boundary_operators(boundary_))
    {
        const int nb = boundary_.size();
        std::vector<Triplet> perm;
        perm.reserve(nb);
        for (int i = 0; i < nb; ++i) {
            perm.emplace_back(boundary_.boundary_dofs[i] - mesh_.n_interior, i, 1.0);
        }
        SparseMatrix p(nb, nb);
        p.setFromTriplets(perm.begin(), perm.end());
        coupling_ = stiffness_.coupling * p;
        interior_solver_ = std::make_shared<const SpdFactorization>(stiffness_.interior, options);
    }

    [[nodiscard]] const QuadMesh& mesh() const { return mesh_; }
    [[nodiscard]] const BoundaryMesh& boundary() const { return boundary_; }
    [[nodiscard]] const StiffnessBlocks& stiffness() const { return stiffness_; }
    [[nodiscard]] const BoundaryOperators& boundary_operators() const { return boundary_ops_; }
    /// K_b with columns in cycle order.
    [[nodiscard]] const SparseMatrix& coupling() const { return coupling_; }
    [[nodiscard]] const SpdFactorization& interior_solver() const { return *interior_solver_; }
    [[nodiscard]] int n_interior() const { return mesh_.n_interior; }
    [[nodiscard]] int n_boundary() const { return boundary_.size(); }

    /// Boundary entries of a full-length vector, in cycle order.
    [[nodiscard]] Vector gather_boundary(const Vector& full) const
    {
        Vector out(n_boundary());
        for (int i = 0; i < n_boundary(); ++i) {
            out[i] = full[boundary_.boundary_dofs[i]];
        }
        return out;
    }

    [[nodiscard]] Vector assemble_full(const Vector& interior, const Vector& trace) const
    {
        Vector full(mesh_.n_dofs());
        full.head(n_interior()) = interior;
        for (int i = 0; i < n_boundary(); ++i) {
            full[boundary_.boundary_dofs[i]] = trace[i];
        }
        return full;
    }

  private:
    QuadMesh mesh_;
    BoundaryMesh boundary_;
    StiffnessBlocks stiffness_;
    BoundaryOperators boundary_ops_;
    SparseMatrix coupling_;
    std::shared_ptr<const SpdFactorization> interior_solver_;
};

/// Lagrange multiplier xi with K_N xi = nu_N.
inline Vector solve_lagrange_multiplier(const Discretization& disc, const DualVector& nu)
{
    if (nu.size() != disc.mesh().n_dofs()) {
        throw std::invalid_argument("solve_lagrange_multiplier: dual vector has wrong length");
    }
    return disc.interior_solver().solve(Vector(nu.values.head(disc.n_interior())));
}

/// nu_b - K_b^T xi: the dual vector of lambda composed with the discrete harmonic extension.
inline DualVector boundary_rhs(const Discretization& disc, const DualVector& nu, const Vector& xi)
{
    if (xi.size() != disc.n_interior()) {
        throw std::invalid_argument("boundary_rhs: multiplier has wrong length");
    }
    return DualVector(disc.gather_boundary(nu.values) - disc.coupling().transpose() * xi);
}

/// Boundary values equal @p trace; interior values solve K_N phi_0 = -K_b trace.
inline PrimalVector discrete_harmonic_extension(const Discretization& disc, const Vector& trace)
{
    if (trace.size() != disc.n_boundary()) {
        throw std::invalid_argument("discrete_harmonic_extension: trace has wrong length");
    }
    const Vector rhs = -(disc.coupling() * trace);
    return PrimalVector(disc.assemble_full(disc.interior_solver().solve(rhs), trace));
}

/// ||K_N v_N + K_b v_b|| / ||K_b v_b||; zero for discretely harmonic functions.
inline double harmonic_residual(const Discretization& disc, const PrimalVector& v)
{
    const Vector interior = v.values.head(disc.n_interior());
    const Vector kb = disc.coupling() * disc.gather_boundary(v.values);
    const double denom = kb.norm();
    const double res = (disc.stiffness().interior * interior + kb).norm();
    return denom > 0.0 ? res / denom : res;
}

struct RieszRepresenter {
    PrimalVector coefficients;
    PrimalVector boundary_trace;
    int measurement_index = -1;
};

/**
 * Approximate Riesz representers of several functionals at once.
 *
 * For each dual vector: multiplier solve, boundary data nu_b - K_b^T xi,
 * fractional solve on the boundary, discrete harmonic extension. The
 * boundary stage is shared across all measurements.
 */
inline std::vector<RieszRepresenter> riesz_representers(const Discretization& disc, const FractionalExponent& exponent,
                                                        double k, const std::vector<DualVector>& duals)
{
    const auto m = static_cast<Eigen::Index>(duals.size());
    Matrix data(disc.n_boundary(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Vector xi = solve_lagrange_multiplier(disc, duals[j]);
        data.col(j) = boundary_rhs(disc, duals[j], xi).values;
    }
    const Matrix traces = fractional_inverse(disc.boundary_operators(), exponent, k, data);
    std::vector<RieszRepresenter> reps;
    reps.reserve(duals.size());
    for (Eigen::Index j = 0; j < m; ++j) {
        RieszRepresenter rep;
        rep.boundary_trace = PrimalVector(traces.col(j));
        rep.coefficients = discrete_harmonic_extension(disc, rep.boundary_trace.values);
        rep.measurement_index = static_cast<int>(j);
        reps.push_back(std::move(rep));
    }
    return reps;
}

inline RieszRepresenter riesz_representer(const Discretization& disc, const FractionalExponent& exponent, double k,
                                          const DualVector& nu)
{
    return riesz_representers(disc, exponent, k, {nu}).front();
}

/// Homogeneous Dirichlet Q1 solution of -Laplace u = f.
inline PrimalVector solve_forcing(const Discretization& disc, const std::function<double(double, double)>& f,
                                  int quad_order = 4)
{
    const DualVector load = assemble_load(disc.mesh(), f, quad_order);
    const Vector interior = disc.interior_solver().solve(interior_part(disc.mesh(), load));
    return PrimalVector(disc.assemble_full(interior, Vector::Zero(disc.n_boundary())));
}

struct RecoveryResult {
    Matrix gram;
    Vector omega_hat;
    Vector coefficients;
    PrimalVector u_hat;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    std::optional<double> relative_h1_error;
};

/**
 * Gram system and reconstruction.
 *
 * g_ij = lambda^i(phi^j), omega_hat = omega - lambda(u_f), U = G^+ omega_hat,
 * u = sum_j U_j phi^j + u_f.
 */
inline RecoveryResult gram_and_recover(const std::vector<RieszRepresenter>& representers,
                                       const std::vector<DualVector>& duals, const Vector& omega,
                                       const PrimalVector& u_f_hat)
{
    const auto m = static_cast<Eigen::Index>(representers.size());
    if (static_cast<Eigen::Index>(duals.size()) != m || omega.size() != m || m == 0) {
        throw std::invalid_argument("gram_and_recover: inconsistent number of measurements");
    }
    RecoveryResult result;
    result.gram.resize(m, m);
    result.omega_hat.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            result.gram(i, j) = apply_functional(duals[i], representers[j].coefficients);
        }
        result.omega_hat[i] = omega[i] - apply_functional(duals[i], u_f_hat);
    }
    result.coefficients = pinv_solve(result.gram, result.omega_hat);

    Vector u = u_f_hat.values;
    for (Eigen::Index j = 0; j < m; ++j) {
        u += result.coefficients[j] * representers[j].coefficients.values;
    }
    result.u_hat = PrimalVector(std::move(u));

    const Matrix sym = 0.5 * (result.gram + result.gram.transpose());
    const Vector sv = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs();
    result.sigma_min = sv.minCoeff();
    result.sigma_max = sv.maxCoeff();
    return result;
}

} // namespace hrec
