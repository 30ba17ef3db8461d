#pragma once

#include "hrec/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cassert>
#include <memory>
#include <string>
#include <variant>

namespace hrec {

struct SpdSolverOptions {
    /// Systems larger than this use preconditioned CG instead of a factorization.
    Eigen::Index direct_max_rows = 1'000'000;
    double cg_tolerance = 1e-12;
    int cg_max_iterations = 20'000;
};

/**
 * Reusable solver for a sparse symmetric positive definite matrix.
 *
 * Holds a simplicial Cholesky factorization (AMD ordering), or a Jacobi
 * preconditioned conjugate gradient solver past the size cap. solve() is
 * const and touches no mutable state, so concurrent solves are safe.
 */
class SpdFactorization {
  public:
    explicit SpdFactorization(const SparseMatrix& a, const SpdSolverOptions& options = {})
        : matrix_(a)
    {
        if (a.rows() != a.cols()) {
            throw std::invalid_argument("factor_spd: matrix is not square");
        }
        if (a.rows() <= options.direct_max_rows) {
            auto llt = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>();
            llt->compute(matrix_);
            if (llt->info() != Eigen::Success) {
                throw SolverError("factor_spd: Cholesky failed, matrix is not positive definite");
            }
            solver_ = std::move(llt);
        } else {
            auto cg = std::make_unique<Cg>();
            cg->setTolerance(options.cg_tolerance);
            cg->setMaxIterations(options.cg_max_iterations);
            cg->compute(matrix_);
            if (cg->info() != Eigen::Success) {
                throw SolverError("factor_spd: CG setup failed");
            }
            solver_ = std::move(cg);
        }
    }

    [[nodiscard]] Eigen::Index rows() const { return matrix_.rows(); }
    [[nodiscard]] bool is_direct() const { return std::holds_alternative<DirectPtr>(solver_); }
    [[nodiscard]] const SparseMatrix& matrix() const { return matrix_; }

    [[nodiscard]] Vector solve(const Vector& b) const
    {
        if (b.size() != rows()) {
            throw std::invalid_argument("SpdFactorization::solve: right-hand side has wrong length");
        }
        Vector x;
        if (const auto* direct = std::get_if<DirectPtr>(&solver_)) {
            x = (*direct)->solve(b);
        } else {
            const auto& cg = *std::get<CgPtr>(solver_);
            x = cg.solve(b);
            if (cg.info() != Eigen::Success) {
                throw SolverError("SpdFactorization::solve: CG did not converge");
            }
        }
        if (!x.allFinite()) {
            throw SolverError("SpdFactorization::solve: non-finite solution");
        }
        assert(relative_residual(x, b) <= 1e-10);
        return x;
    }

    [[nodiscard]] Matrix solve(const Matrix& b) const
    {
        Matrix x(b.rows(), b.cols());
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            x.col(j) = solve(Vector(b.col(j)));
        }
        return x;
    }

    [[nodiscard]] double relative_residual(const Vector& x, const Vector& b) const
    {
        const double nb = b.norm();
        const double r = (matrix_ * x - b).norm();
        return nb > 0.0 ? r / nb : r;
    }

  private:
    using Cg = Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>>;
    using DirectPtr = std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>>;
    using CgPtr = std::unique_ptr<Cg>;

    SparseMatrix matrix_;
    std::variant<DirectPtr, CgPtr> solver_;
};

inline SpdFactorization factor_spd(const SparseMatrix& a, const SpdSolverOptions& options = {})
{
    return SpdFactorization(a, options);
}

struct SymmetricEigen {
    Vector values;  // ascending
    Matrix vectors; // columns, B-orthonormal
};

inline constexpr Eigen::Index kDenseEigenCap = 5000;

/// Generalized problem A v = tau B v for symmetric A and SPD B.
inline SymmetricEigen eig_sym_dense(const Matrix& a, const Matrix& b, Eigen::Index cap = kDenseEigenCap)
{
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw std::invalid_argument("eig_sym_dense: shape mismatch");
    }
    if (a.rows() > cap) {
        throw std::invalid_argument("eig_sym_dense: dimension " + std::to_string(a.rows()) +
                                    " exceeds dense cap " + std::to_string(cap));
    }
    if (Eigen::LLT<Matrix>(b).info() != Eigen::Success) {
        throw std::invalid_argument("eig_sym_dense: B is not positive definite");
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(a, b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success) {
        throw SolverError("eig_sym_dense: eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline constexpr double kPinvRelativeCutoff = 1e-12;

/**
 * Minimum-norm least-squares solution of G x = w.
 *
 * G is symmetrized first; eigenvalues with modulus below
 * kPinvRelativeCutoff times the largest modulus are dropped.
 */
inline Vector pinv_solve(const Matrix& g, const Vector& w, double cutoff = kPinvRelativeCutoff)
{
    if (g.rows() != g.cols() || g.rows() != w.size() || g.rows() == 0) {
        throw std::invalid_argument("pinv_solve: shape mismatch");
    }
    const Matrix sym = 0.5 * (g + g.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const Vector& lambda = eig.eigenvalues();
    const Matrix& v = eig.eigenvectors();
    const double largest = lambda.cwiseAbs().maxCoeff();
    Vector coeffs = v.transpose() * w;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double l = lambda[i];
        coeffs[i] = (largest > 0.0 && std::abs(l) > cutoff * largest) ? coeffs[i] / l : 0.0;
    }
    return v * coeffs;
}

} // namespace hrec
