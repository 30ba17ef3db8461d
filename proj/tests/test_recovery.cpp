#include "hrec/recovery.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace hrec {
namespace {

Vector random_vector(Eigen::Index size, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    Vector v(size);
    for (auto& x : v) {
        x = normal(rng);
    }
    return v;
}

/// Dense harmonic extension operator: column i extends the i-th boundary hat.
Matrix dense_extension(const Discretization& disc)
{
    const Matrix kn = Matrix(disc.stiffness().interior);
    const Matrix kb = Matrix(disc.coupling());
    const Matrix interior = -kn.llt().solve(kb);
    Matrix e(disc.mesh().n_dofs(), disc.n_boundary());
    for (int i = 0; i < disc.n_boundary(); ++i) {
        Vector trace = Vector::Zero(disc.n_boundary());
        trace[i] = 1.0;
        e.col(i) = disc.assemble_full(interior.col(i), trace);
    }
    return e;
}

DualVector gaussian_dual(const Discretization& disc, Point c)
{
    return assemble_measurement_dual(disc.mesh(), GaussianMeasurement(c));
}

TEST(LagrangeMultiplier, ZeroAndResidual)
{
    const Discretization disc(3);
    EXPECT_EQ(solve_lagrange_multiplier(disc, DualVector::zero(disc.mesh().n_dofs())).norm(), 0.0);
    const DualVector nu = gaussian_dual(disc, {-0.5, 0.5});
    const Vector xi = solve_lagrange_multiplier(disc, nu);
    const Vector rhs = nu.values.head(disc.n_interior());
    EXPECT_LE((disc.stiffness().interior * xi - rhs).norm() / rhs.norm(), 1e-10);
    EXPECT_THROW(solve_lagrange_multiplier(disc, DualVector::zero(4)), std::invalid_argument);
}

TEST(LagrangeMultiplier, Regression)
{
    const Discretization disc(3);
    const Vector xi = solve_lagrange_multiplier(disc, gaussian_dual(disc, {-0.5, 0.5}));
    const double pinned = 0.24732932502865473;
    EXPECT_NEAR(xi.norm(), pinned, 1e-12 * pinned);
}

TEST(BoundaryRhs, EqualsDualOfHarmonicExtension)
{
    const Discretization disc(2);
    const Matrix e = dense_extension(disc);
    for (const Point c : {Point{-0.5, 0.5}, Point{-0.9, -0.9}, Point{0.5, 0.5}}) {
        const DualVector nu = gaussian_dual(disc, c);
        const Vector g = boundary_rhs(disc, nu, solve_lagrange_multiplier(disc, nu)).values;
        const Vector expected = e.transpose() * nu.values;
        EXPECT_LE((g - expected).norm() / expected.norm(), 1e-12);
    }
}

TEST(BoundaryRhs, PureBoundaryDataPassesThrough)
{
    const Discretization disc(2);
    DualVector nu = DualVector::zero(disc.mesh().n_dofs());
    const Vector nb = random_vector(disc.n_boundary(), 4);
    for (int i = 0; i < disc.n_boundary(); ++i) {
        nu[disc.boundary().boundary_dofs[i]] = nb[i];
    }
    const Vector xi = solve_lagrange_multiplier(disc, nu);
    EXPECT_EQ(xi.norm(), 0.0);
    EXPECT_LE((boundary_rhs(disc, nu, xi).values - nb).norm(), 1e-15);
}

TEST(HarmonicExtension, ConstantsAndLinearity)
{
    const Discretization disc(3);
    const PrimalVector one = discrete_harmonic_extension(disc, Vector::Ones(disc.n_boundary()));
    EXPECT_LE((one.values - Vector::Ones(disc.mesh().n_dofs())).cwiseAbs().maxCoeff(), 1e-12);

    const Vector a = random_vector(disc.n_boundary(), 1);
    const Vector b = random_vector(disc.n_boundary(), 2);
    const Vector lhs = discrete_harmonic_extension(disc, 3.0 * a + b).values;
    const Vector rhs = 3.0 * discrete_harmonic_extension(disc, a).values + discrete_harmonic_extension(disc, b).values;
    EXPECT_LE((lhs - rhs).norm() / rhs.norm(), 1e-12);
}

TEST(HarmonicExtension, MinimisesDirichletEnergy)
{
    const Discretization disc(3);
    const Vector trace = random_vector(disc.n_boundary(), 6);
    const Vector ext = discrete_harmonic_extension(disc, trace).values;
    EXPECT_LE(harmonic_residual(disc, PrimalVector(ext)), 1e-10);
    const SparseMatrix& k = disc.stiffness().full;
    const double energy = ext.dot(k * ext);
    for (unsigned seed = 0; seed < 10; ++seed) {
        const Vector bump = random_vector(disc.n_interior(), 50 + seed);
        const Vector other = disc.assemble_full(ext.head(disc.n_interior()) + 0.1 * bump, trace);
        EXPECT_GT(other.dot(k * other), energy);
    }
}

TEST(RieszRepresenter, MatchesDenseSaddlePointRouteAtUnitExponent)
{
    const Discretization disc(2);
    const Matrix e = dense_extension(disc);
    const BoundaryOperators& ops = disc.boundary_operators();
    const Matrix l = Matrix(ops.mass + ops.stiffness);
    const DualVector nu = gaussian_dual(disc, {-0.4, 0.6});
    const Vector expected = e * l.llt().solve(e.transpose() * nu.values);
    const RieszRepresenter rep = riesz_representer(disc, FractionalExponent(1.0), 0.25, nu);
    EXPECT_LE((rep.coefficients.values - expected).norm() / expected.norm(), 1e-10);
}

TEST(RieszRepresenter, DiscretelyHarmonicAndLinear)
{
    const Discretization disc(4);
    const DualVector a = gaussian_dual(disc, {-0.5, 0.5});
    const DualVector b = gaussian_dual(disc, {0.5, 0.5});
    const FractionalExponent s(0.75);
    const auto reps = riesz_representers(disc, s, 0.25, {a, b, DualVector(2.0 * a.values - b.values)});
    for (const auto& rep : reps) {
        EXPECT_LE(harmonic_residual(disc, rep.coefficients), 1e-9);
    }
    EXPECT_EQ(reps[2].measurement_index, 2);
    const Vector combo = 2.0 * reps[0].coefficients.values - reps[1].coefficients.values;
    EXPECT_LE((reps[2].coefficients.values - combo).norm() / combo.norm(), 1e-10);
    const RieszRepresenter single = riesz_representer(disc, s, 0.25, a);
    EXPECT_LE((single.coefficients.values - reps[0].coefficients.values).norm(), 1e-14);
}

TEST(RieszRepresenter, GramIsSymmetricPositiveDefinite)
{
    const Discretization disc(4);
    const MeasurementSet set = make_measurement_set(disc.mesh(), 4);
    for (double s : {0.55, 1.0, 1.45}) {
        const auto reps = riesz_representers(disc, FractionalExponent(s), 0.25, set.duals);
        const RecoveryResult r = gram_and_recover(reps, set.duals, Vector::Ones(set.size()),
                                                  PrimalVector::zero(disc.mesh().n_dofs()));
        EXPECT_LE((r.gram - r.gram.transpose()).norm() / r.gram.norm(), 1e-8) << "s=" << s;
        const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (r.gram + r.gram.transpose())).eigenvalues();
        EXPECT_GT(ev.minCoeff(), 0.0) << "s=" << s;
        EXPECT_EQ(r.sigma_max, ev.cwiseAbs().maxCoeff());
    }
}

TEST(Recovery, SingleMeasurement)
{
    const Discretization disc(3);
    const DualVector nu = gaussian_dual(disc, {-0.5, 0.5});
    const RieszRepresenter rep = riesz_representer(disc, FractionalExponent(1.0), 0.25, nu);
    const double g11 = apply_functional(nu, rep.coefficients);
    const RecoveryResult r =
        gram_and_recover({rep}, {nu}, Vector::Constant(1, g11), PrimalVector::zero(disc.mesh().n_dofs()));
    EXPECT_NEAR(r.coefficients[0], 1.0, 1e-12);
    EXPECT_LE((r.u_hat.values - rep.coefficients.values).norm(), 1e-12 * rep.coefficients.values.norm());
}

TEST(Recovery, ReproducesMeasurements)
{
    const Discretization disc(4);
    const MeasurementSet set = make_measurement_set(disc.mesh(), 2);
    const Vector omega = measure_exact(disc.mesh(), set, smooth_solution());
    const auto reps = riesz_representers(disc, FractionalExponent(1.0), 0.25, set.duals);
    const RecoveryResult r = gram_and_recover(reps, set.duals, omega, PrimalVector::zero(disc.mesh().n_dofs()));
    for (int i = 0; i < set.size(); ++i) {
        EXPECT_NEAR(apply_functional(set.duals[i], r.u_hat), omega[i], 1e-8 * std::abs(omega[i]));
    }
    EXPECT_LE(harmonic_residual(disc, r.u_hat), 1e-9);
}

TEST(Recovery, ForcingIsSubtractedFromData)
{
    const Discretization disc(3);
    const MeasurementSet set = make_measurement_set(disc.mesh(), 2);
    const PrimalVector uf = solve_forcing(disc, [](double, double) { return 1.0; });
    Vector omega(set.size());
    for (int i = 0; i < set.size(); ++i) {
        omega[i] = apply_functional(set.duals[i], uf);
    }
    const auto reps = riesz_representers(disc, FractionalExponent(1.0), 0.25, set.duals);
    const RecoveryResult r = gram_and_recover(reps, set.duals, omega, uf);
    EXPECT_LE(r.omega_hat.norm(), 1e-15);
    EXPECT_LE((r.u_hat.values - uf.values).norm(), 1e-14);
    EXPECT_THROW(gram_and_recover(reps, set.duals, Vector::Zero(1), uf), std::invalid_argument);
}

TEST(SolveForcing, ZeroAndPositivity)
{
    const Discretization disc(3);
    EXPECT_EQ(solve_forcing(disc, [](double, double) { return 0.0; }).values.norm(), 0.0);
    const PrimalVector u = solve_forcing(disc, [](double, double) { return 1.0; });
    for (int d = 0; d < disc.n_interior(); ++d) {
        EXPECT_GT(u[d], 0.0);
    }
    for (int d = disc.n_interior(); d < disc.mesh().n_dofs(); ++d) {
        EXPECT_EQ(u[d], 0.0);
    }
    const PrimalVector twice = solve_forcing(disc, [](double, double) { return 2.0; });
    EXPECT_LE((twice.values - 2.0 * u.values).norm(), 1e-13);
}

TEST(Recovery, ErrorShrinksWithRefinement)
{
    double errs[2];
    int idx = 0;
    for (int n : {3, 5}) {
        const Discretization disc(n);
        const MeasurementSet set = make_measurement_set(disc.mesh(), 7);
        const Vector omega = measure_exact(disc.mesh(), set, smooth_solution());
        const auto reps = riesz_representers(disc, FractionalExponent(1.0), 0.25, set.duals);
        const RecoveryResult r = gram_and_recover(reps, set.duals, omega, PrimalVector::zero(disc.mesh().n_dofs()));
        errs[idx++] = h1_error(disc.mesh(), r.u_hat, smooth_solution()).relative();
    }
    EXPECT_LT(errs[1], errs[0]);
}

} // namespace
} // namespace hrec
