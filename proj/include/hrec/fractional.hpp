#pragma once

#include "hrec/assembly.hpp"
#include "hrec/linalg.hpp"
#include "hrec/types.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hrec {

/// s = integer_part + fractional_part with fractional_part in [0, 1).
struct FractionalExponent {
    double s = 1.0;
    int integer_part = 1;
    double fractional_part = 0.0;

    explicit FractionalExponent(double value) : s(value)
    {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw std::invalid_argument("FractionalExponent: s must be a positive finite number");
        }
        integer_part = static_cast<int>(std::floor(value));
        fractional_part = value - integer_part;
    }
};

inline constexpr double kDefaultSincSpacing = 0.25;

/**
 * Sinc quadrature of the Balakrishnan integral
 *   L^{-s} = sin(pi s)/pi int_R e^{(1-s)y} (e^y I + L)^{-1} dy
 * on nodes y_l = l k, l = -M..N.
 */
struct SincScheme {
    double k = kDefaultSincSpacing;
    double s_bar = 0.5;
    int M = 0;
    int N = 0;

    [[nodiscard]] double node(int l) const { return l * k; }
    [[nodiscard]] double prefactor() const { return k * std::sin(std::numbers::pi * s_bar) / std::numbers::pi; }
    [[nodiscard]] int n_nodes() const { return M + N + 1; }
};

/// Node counts balancing both truncation tails against e^{-pi^2/k}.
inline SincScheme sinc_parameters(double k, double s_bar)
{
    if (!(k > 0.0)) {
        throw std::invalid_argument("sinc_parameters: spacing k must be positive");
    }
    if (!(s_bar > 0.0 && s_bar < 1.0)) {
        throw std::invalid_argument("sinc_parameters: exponent must lie in (0,1), got " + std::to_string(s_bar));
    }
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double k2 = k * k;
    SincScheme scheme;
    scheme.k = k;
    scheme.s_bar = s_bar;
    scheme.M = static_cast<int>(std::ceil(pi2 / ((1.0 - s_bar) * k2)));
    // decay rate of the right tail
    const double right_rate = s_bar > 0.5 ? s_bar - 0.5 : s_bar;
    scheme.N = static_cast<int>(std::ceil(pi2 / (right_rate * k2)));
    return scheme;
}

/**
 * Applies the sinc approximation of L_h^{-s_bar} to each column of @p g.
 *
 * Columns of @p g are dual vectors over the boundary space; the result
 * columns are coefficient vectors. For y > 0 the shifted system is scaled
 * by e^{-y} so that the large nodes never overflow.
 */
inline Matrix sinc_apply(const BoundaryOperators& ops, const SincScheme& scheme, const Matrix& g)
{
    if (g.rows() != ops.size()) {
        throw std::invalid_argument("sinc_apply: right-hand side has wrong length");
    }
    Matrix sum = Matrix::Zero(g.rows(), g.cols());
    Eigen::SimplicialLLT<SparseMatrix> llt;
    llt.analyzePattern(ops.mass + ops.stiffness);
    for (int l = -scheme.M; l <= scheme.N; ++l) {
        const double y = scheme.node(l);
        SparseMatrix shifted;
        double weight = 0.0;
        if (y <= 0.0) {
            shifted = (std::exp(y) + 1.0) * ops.mass + ops.stiffness;
            weight = std::exp((1.0 - scheme.s_bar) * y);
        } else {
            const double decay = std::exp(-y);
            shifted = (1.0 + decay) * ops.mass + decay * ops.stiffness;
            weight = std::exp(-scheme.s_bar * y);
        }
        llt.factorize(shifted);
        if (llt.info() != Eigen::Success) {
            throw SolverError("sinc_apply: shifted boundary system is not positive definite at node " +
                              std::to_string(l));
        }
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            sum.col(j) += weight * llt.solve(Vector(g.col(j)));
        }
    }
    return scheme.prefactor() * sum;
}

inline PrimalVector sinc_apply(const BoundaryOperators& ops, const SincScheme& scheme, const DualVector& g)
{
    return PrimalVector(sinc_apply(ops, scheme, Matrix(g.values)).col(0));
}

/**
 * Discrete L_h^{-s} for any s > 0: integer_part solves with M + A, then the
 * sinc stage for the fractional remainder.
 *
 * The first solve turns the dual data into coefficients; later solves
 * act on M times the previous iterate.
 */
inline Matrix fractional_inverse(const BoundaryOperators& ops, const FractionalExponent& exponent, double k,
                                 const Matrix& g)
{
    if (g.rows() != ops.size()) {
        throw std::invalid_argument("fractional_inverse: right-hand side has wrong length");
    }
    Matrix dual = g;
    Matrix primal;
    if (exponent.integer_part > 0) {
        const SpdFactorization solver = factor_spd(ops.mass + ops.stiffness);
        for (int i = 0; i < exponent.integer_part; ++i) {
            primal = solver.solve(dual);
            dual = ops.mass * primal;
        }
    }
    if (exponent.fractional_part > 0.0) {
        return sinc_apply(ops, sinc_parameters(k, exponent.fractional_part), dual);
    }
    return primal;
}

inline PrimalVector fractional_inverse(const BoundaryOperators& ops, const FractionalExponent& exponent, double k,
                                       const DualVector& g)
{
    return PrimalVector(fractional_inverse(ops, exponent, k, Matrix(g.values)).col(0));
}

/// Dense eigendecomposition of (M + A, M), reusable across exponents.
class SpectralOracle {
  public:
    explicit SpectralOracle(const BoundaryOperators& ops, Eigen::Index cap = kDenseEigenCap)
        : eig_(eig_sym_dense(Matrix(ops.mass + ops.stiffness), Matrix(ops.mass), cap))
    {
    }

    [[nodiscard]] const Vector& eigenvalues() const { return eig_.values; }
    [[nodiscard]] const Matrix& eigenvectors() const { return eig_.vectors; }

    /// sum_j tau_j^{-s} (v_j . g) v_j
    [[nodiscard]] Matrix apply(double s, const Matrix& g) const
    {
        if (g.rows() != eig_.values.size()) {
            throw std::invalid_argument("SpectralOracle::apply: right-hand side has wrong length");
        }
        const Vector scale = eig_.values.array().pow(-s).matrix();
        return eig_.vectors * (scale.asDiagonal() * (eig_.vectors.transpose() * g));
    }

  private:
    SymmetricEigen eig_;
};

inline PrimalVector spectral_oracle(const BoundaryOperators& ops, double s, const DualVector& g)
{
    return PrimalVector(SpectralOracle(ops).apply(s, Matrix(g.values)).col(0));
}

/// sqrt(v^T M v)
inline double mass_norm(const BoundaryOperators& ops, const Vector& v)
{
    return std::sqrt(v.dot(ops.mass * v));
}

} // namespace hrec
