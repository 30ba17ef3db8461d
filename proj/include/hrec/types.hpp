#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace hrec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Raised when a linear solve or factorization breaks down.
class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct PrimalTag {};
struct DualTag {};

/**
 * Dense coefficient vector tagged with its role.
 *
 * A primal vector expands a finite element function in the nodal basis; a
 * dual vector holds the values of a linear functional on the basis
 * functions (loads, measurements). The two only meet through
 * apply_functional() or a mass matrix.
 */
template <class Tag>
struct TaggedVector {
    Vector values;

    TaggedVector() = default;
    explicit TaggedVector(Vector v) : values(std::move(v)) {}
    static TaggedVector zero(Eigen::Index size) { return TaggedVector(Vector::Zero(size)); }

    [[nodiscard]] Eigen::Index size() const { return values.size(); }
    double operator[](Eigen::Index i) const { return values[i]; }
    double& operator[](Eigen::Index i) { return values[i]; }
};

using PrimalVector = TaggedVector<PrimalTag>;
using DualVector = TaggedVector<DualTag>;

/// Dual pairing in the nodal basis.
inline double apply_functional(const DualVector& dual, const PrimalVector& v)
{
    if (dual.size() != v.size()) {
        throw std::invalid_argument("apply_functional: length mismatch (" + std::to_string(dual.size()) +
                                    " vs " + std::to_string(v.size()) + ")");
    }
    return dual.values.dot(v.values);
}

} // namespace hrec
