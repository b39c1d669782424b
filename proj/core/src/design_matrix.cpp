#include "npmr/design_matrix.hpp"

#include <vector>

namespace npmr {

DesignMatrix::DesignMatrix(Matrix dense) : storage_(std::move(dense)) {}

DesignMatrix::DesignMatrix(SparseMatrix sparse) : storage_(std::move(sparse))
{
    std::get<SparseMatrix>(storage_).makeCompressed();
}

Index DesignMatrix::rows() const
{
    return std::visit([](const auto& m) { return static_cast<Index>(m.rows()); }, storage_);
}

Index DesignMatrix::cols() const
{
    return std::visit([](const auto& m) { return static_cast<Index>(m.cols()); }, storage_);
}

Matrix DesignMatrix::times(const Matrix& B) const
{
    return std::visit([&](const auto& m) -> Matrix { return m * B; }, storage_);
}

Matrix DesignMatrix::transpose_times(const Matrix& R) const
{
    return std::visit([&](const auto& m) -> Matrix { return m.transpose() * R; }, storage_);
}

double DesignMatrix::squared_norm() const
{
    return std::visit([](const auto& m) { return m.squaredNorm(); }, storage_);
}

bool DesignMatrix::all_finite() const
{
    if (is_sparse()) {
        const auto& s = sparse();
        const double* v = s.valuePtr();
        for (Index i = 0; i < s.nonZeros(); ++i) {
            if (!std::isfinite(v[i])) return false;
        }
        return true;
    }
    return dense().allFinite();
}

DesignMatrix DesignMatrix::select_rows(std::span<const Index> idx) const
{
    if (!is_sparse()) {
        const auto& d = dense();
        Matrix out(static_cast<Index>(idx.size()), d.cols());
        for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Index>(r)) = d.row(idx[r]);
        return DesignMatrix(std::move(out));
    }
    const auto& s = sparse();
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t r = 0; r < idx.size(); ++r) {
        for (SparseMatrix::InnerIterator it(s, idx[r]); it; ++it) {
            triplets.emplace_back(static_cast<Index>(r), it.col(), it.value());
        }
    }
    SparseMatrix out(static_cast<Index>(idx.size()), s.cols());
    out.setFromTriplets(triplets.begin(), triplets.end());
    return DesignMatrix(std::move(out));
}

DesignMatrix DesignMatrix::select_cols(std::span<const Index> idx) const
{
    if (!is_sparse()) {
        const auto& d = dense();
        Matrix out(d.rows(), static_cast<Index>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c) out.col(static_cast<Index>(c)) = d.col(idx[c]);
        return DesignMatrix(std::move(out));
    }
    const auto& s = sparse();
    std::vector<Index> position(static_cast<std::size_t>(s.cols()), -1);
    for (std::size_t c = 0; c < idx.size(); ++c) position[static_cast<std::size_t>(idx[c])] = static_cast<Index>(c);
    std::vector<Eigen::Triplet<double>> triplets;
    for (Index r = 0; r < s.rows(); ++r) {
        for (SparseMatrix::InnerIterator it(s, r); it; ++it) {
            Index c = position[static_cast<std::size_t>(it.col())];
            if (c >= 0) triplets.emplace_back(r, c, it.value());
        }
    }
    SparseMatrix out(s.rows(), static_cast<Index>(idx.size()));
    out.setFromTriplets(triplets.begin(), triplets.end());
    return DesignMatrix(std::move(out));
}

Matrix DesignMatrix::to_dense() const
{
    if (is_sparse()) return Matrix(sparse());
    return dense();
}

} // namespace npmr
