#include "hrec/assembly.hpp"
#include "hrec/fractional.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace hrec {
namespace {

BoundaryOperators boundary_ops(int n)
{
    return assemble_boundary_operators(extract_boundary(build_lshape_mesh(n)));
}

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

double relative_mass_error(const BoundaryOperators& ops, const Vector& a, const Vector& b)
{
    return mass_norm(ops, a - b) / mass_norm(ops, b);
}

TEST(FractionalExponent, Splits)
{
    const FractionalExponent a(1.45);
    EXPECT_EQ(a.integer_part, 1);
    EXPECT_NEAR(a.fractional_part, 0.45, 1e-15);
    const FractionalExponent b(0.55);
    EXPECT_EQ(b.integer_part, 0);
    const FractionalExponent c(2.0);
    EXPECT_EQ(c.integer_part, 2);
    EXPECT_EQ(c.fractional_part, 0.0);
    EXPECT_THROW(FractionalExponent(0.0), std::invalid_argument);
    EXPECT_THROW(FractionalExponent(-1.0), std::invalid_argument);
    EXPECT_THROW(FractionalExponent(std::nan("")), std::invalid_argument);
}

TEST(SincParameters, NodeCounts)
{
    const SincScheme a = sinc_parameters(1.0, 0.75);
    EXPECT_EQ(a.M, 40);
    EXPECT_EQ(a.N, 40);
    EXPECT_EQ(a.n_nodes(), 81);
    const SincScheme b = sinc_parameters(0.25, 0.55);
    EXPECT_EQ(b.M, 351);
    EXPECT_EQ(b.N, 3159);
    const SincScheme c = sinc_parameters(0.5, 0.3);
    EXPECT_EQ(c.N, static_cast<int>(std::ceil(std::numbers::pi * std::numbers::pi / (0.3 * 0.25))));
    EXPECT_NEAR(a.prefactor(), std::sin(0.75 * std::numbers::pi) / std::numbers::pi, 1e-15);
}

TEST(SincParameters, HalvingSpacingQuadruplesNodes)
{
    const SincScheme coarse = sinc_parameters(0.5, 0.75);
    const SincScheme fine = sinc_parameters(0.25, 0.75);
    EXPECT_NEAR(static_cast<double>(fine.M) / coarse.M, 4.0, 0.1);
    EXPECT_NEAR(static_cast<double>(fine.N) / coarse.N, 4.0, 0.1);
}

TEST(SincParameters, RejectsBadArguments)
{
    EXPECT_THROW(sinc_parameters(0.25, 0.0), std::invalid_argument);
    EXPECT_THROW(sinc_parameters(0.25, 1.0), std::invalid_argument);
    EXPECT_THROW(sinc_parameters(0.0, 0.5), std::invalid_argument);
}

TEST(SincApply, ConstantsAreEigenvectorsWithUnitEigenvalue)
{
    const BoundaryOperators ops = boundary_ops(3);
    const Vector ones = Vector::Ones(ops.size());
    const DualVector g(ops.mass * ones);
    for (double s : {0.3, 0.55, 0.75}) {
        const PrimalVector psi = sinc_apply(ops, sinc_parameters(0.25, s), g);
        EXPECT_LE((psi.values - ones).cwiseAbs().maxCoeff(), 1e-10) << "s=" << s;
    }
}

TEST(SincApply, AgreesWithSpectralOracle)
{
    const BoundaryOperators ops = boundary_ops(3);
    const SpectralOracle oracle(ops);
    const Vector g = random_vector(ops.size(), 11);
    for (double s : {0.3, 0.55, 0.75, 0.95}) {
        const Vector sinc = sinc_apply(ops, sinc_parameters(0.25, s), Matrix(g)).col(0);
        const Vector exact = oracle.apply(s, Matrix(g)).col(0);
        EXPECT_LE(relative_mass_error(ops, sinc, exact), 1e-6) << "s=" << s;
    }
}

TEST(SincApply, LinearInData)
{
    const BoundaryOperators ops = boundary_ops(2);
    const SincScheme scheme = sinc_parameters(0.5, 0.55);
    const Vector a = random_vector(ops.size(), 1);
    const Vector b = random_vector(ops.size(), 2);
    const Vector lhs = sinc_apply(ops, scheme, Matrix(2.0 * a - 3.0 * b)).col(0);
    const Vector rhs =
        2.0 * sinc_apply(ops, scheme, Matrix(a)).col(0) - 3.0 * sinc_apply(ops, scheme, Matrix(b)).col(0);
    EXPECT_LE((lhs - rhs).norm() / rhs.norm(), 1e-12);
}

TEST(SincApply, SymmetricPositiveSemidefinite)
{
    const BoundaryOperators ops = boundary_ops(3);
    const SincScheme scheme = sinc_parameters(0.5, 0.75);
    const Matrix g(Matrix::Identity(ops.size(), ops.size()));
    const Matrix t = sinc_apply(ops, scheme, g);
    EXPECT_LE((t - t.transpose()).norm() / t.norm(), 1e-12);
    for (unsigned seed = 0; seed < 5; ++seed) {
        const Vector v = random_vector(ops.size(), 100 + seed);
        EXPECT_GT(v.dot(t * v), 0.0);
    }
}

TEST(SincApply, ExponentialDecayInSpacing)
{
    const BoundaryOperators ops = boundary_ops(3);
    const SpectralOracle oracle(ops);
    const Vector g = random_vector(ops.size(), 5);
    const double s = 0.75;
    const Vector exact = oracle.apply(s, Matrix(g)).col(0);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const auto err = [&](double k) {
        return relative_mass_error(ops, sinc_apply(ops, sinc_parameters(k, s), Matrix(g)).col(0), exact);
    };
    // C fitted at k = 1 bounds the error at finer spacings
    const double c = err(1.0) * std::exp(pi2);
    for (double k : {0.5, 1.0 / 3.0, 0.25}) {
        EXPECT_LE(err(k), std::max(10.0 * c * std::exp(-pi2 / k), 1e-12)) << "k=" << k;
    }
}

TEST(FractionalInverse, IntegerExponentsAreDirectSolves)
{
    const BoundaryOperators ops = boundary_ops(3);
    const Vector g = random_vector(ops.size(), 21);
    const SparseMatrix l = ops.mass + ops.stiffness;
    const Matrix dense = Matrix(l);
    const Vector one = fractional_inverse(ops, FractionalExponent(1.0), 0.25, Matrix(g)).col(0);
    const Vector direct = dense.llt().solve(g);
    EXPECT_LE((one - direct).norm() / direct.norm(), 1e-10);

    const Vector two = fractional_inverse(ops, FractionalExponent(2.0), 0.25, Matrix(g)).col(0);
    const Vector twice = dense.llt().solve(Vector(ops.mass * direct));
    EXPECT_LE((two - twice).norm() / twice.norm(), 1e-10);
}

TEST(FractionalInverse, MatchesOracleAcrossExponents)
{
    const BoundaryOperators ops = boundary_ops(3);
    const SpectralOracle oracle(ops);
    const Vector g = random_vector(ops.size(), 33);
    for (double s : {0.55, 0.75, 1.0, 7.0 / 6.0, 1.45, 1.5, 2.0, 2.7}) {
        const Vector approx = fractional_inverse(ops, FractionalExponent(s), 0.25, Matrix(g)).col(0);
        EXPECT_LE(relative_mass_error(ops, approx, oracle.apply(s, Matrix(g)).col(0)), 1e-6) << "s=" << s;
    }
}

TEST(SpectralOracle, LimitingExponents)
{
    const BoundaryOperators ops = boundary_ops(3);
    const SpectralOracle oracle(ops);
    const Vector g = random_vector(ops.size(), 8);
    const Vector m_inv = Matrix(ops.mass).llt().solve(g);
    EXPECT_LE((oracle.apply(0.0, Matrix(g)).col(0) - m_inv).norm() / m_inv.norm(), 1e-10);
    const Vector direct = Matrix(ops.mass + ops.stiffness).llt().solve(g);
    EXPECT_LE((oracle.apply(1.0, Matrix(g)).col(0) - direct).norm() / direct.norm(), 1e-10);
    const PrimalVector wrapped = spectral_oracle(ops, 1.0, DualVector(g));
    EXPECT_LE((wrapped.values - direct).norm() / direct.norm(), 1e-10);
    EXPECT_THROW((void)oracle.apply(1.0, Matrix(Vector::Ones(3))), std::invalid_argument);
}

TEST(SpectralOracle, NormDecreasesWithExponent)
{
    const BoundaryOperators ops = boundary_ops(3);
    const SpectralOracle oracle(ops);
    const Vector g = random_vector(ops.size(), 9);
    double previous = std::numeric_limits<double>::infinity();
    for (double s : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double norm = mass_norm(ops, oracle.apply(s, Matrix(g)).col(0));
        EXPECT_LT(norm, previous) << "s=" << s;
        previous = norm;
    }
}

} // namespace
} // namespace hrec
