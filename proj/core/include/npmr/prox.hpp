#pragma once

#include <vector>

#include "npmr/design_matrix.hpp"

namespace npmr {

/// Thin SVD M = U diag(sigma) V^T with r = min(p, K).
///
/// Canonical form: sigma non-increasing, and the first entry of each V
/// column whose magnitude exceeds 1e-12 is positive (the matching U column
/// is flipped with it).
struct SvdTriple {
    Matrix U;      // p x r
    Vector sigma;  // r
    Matrix V;      // K x r

    Matrix reconstruct() const;
};

/// Partition of the rows of B into penalty blocks. Row indices are 0-based.
struct PenaltyGroups {
    std::vector<std::vector<Index>> groups;
    std::vector<Index> unpenalized;

    /// Throws InvalidArgument unless groups and unpenalized cover 0..p-1
    /// exactly once.
    void validate(Index p) const;

    /// Single group covering every row.
    static PenaltyGroups whole(Index p);
};

/// sigma_d counts toward the rank iff sigma_d > 1e-8 * max(1, sigma_1).
inline constexpr double kRankTolerance = 1e-8;
int numerical_rank(const Vector& sigma);

SvdTriple thin_svd(const Matrix& M);
double nuclear_norm(const Matrix& M);

/// Singular-value soft-thresholding.
Matrix svt(const Matrix& M, double threshold);

/// svt plus the nuclear norm of the result, which falls out of the
/// thresholded singular values for free.
struct SvtResult {
    Matrix Z;
    double nuclear_norm = 0.0;
};
SvtResult svt_with_norm(const Matrix& M, double threshold);

/// svt applied per group block; unpenalized rows pass through.
Matrix grouped_svt(const Matrix& M, const PenaltyGroups& groups, double threshold);
SvtResult grouped_svt_with_norm(const Matrix& M, const PenaltyGroups& groups, double threshold);

/// Sum of group-block nuclear norms (unpenalized rows contribute nothing).
double grouped_nuclear_norm(const Matrix& M, const PenaltyGroups& groups);

/// M - (M 1_K / K) 1_K^T.
Matrix center_rows(const Matrix& M);

Matrix gather_rows(const Matrix& M, std::span<const Index> rows);
void scatter_rows(Matrix& target, std::span<const Index> rows, const Matrix& block);

} // namespace npmr
