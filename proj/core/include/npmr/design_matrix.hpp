#pragma once

#include <span>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace npmr {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// n x p design matrix held either densely or in compressed row storage.
///
/// Only the two products the likelihood needs are exposed, so callers never
/// branch on the storage kind. One-hot designs (a handful of nonzeros per
/// row) should be built sparse.
class DesignMatrix {
public:
    DesignMatrix() = default;
    DesignMatrix(Matrix dense);
    DesignMatrix(SparseMatrix sparse);

    Index rows() const;
    Index cols() const;
    bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }

    /// X * B  (n x K)
    Matrix times(const Matrix& B) const;
    /// X^T * R  (p x K)
    Matrix transpose_times(const Matrix& R) const;

    double squared_norm() const;
    bool all_finite() const;

    /// Rows `idx` in the given order, same storage kind.
    DesignMatrix select_rows(std::span<const Index> idx) const;
    /// Columns `idx` in the given order, same storage kind.
    DesignMatrix select_cols(std::span<const Index> idx) const;

    Matrix to_dense() const;
    const Matrix& dense() const { return std::get<Matrix>(storage_); }
    const SparseMatrix& sparse() const { return std::get<SparseMatrix>(storage_); }

private:
    std::variant<Matrix, SparseMatrix> storage_;
};

} // namespace npmr
