#include "npmr/prox.hpp"

#include <algorithm>
#include <string>

#include <Eigen/SVD>

#include "npmr/errors.hpp"

namespace npmr {

Matrix SvdTriple::reconstruct() const
{
    return U * sigma.asDiagonal() * V.transpose();
}

void PenaltyGroups::validate(Index p) const
{
    std::vector<int> seen(static_cast<std::size_t>(std::max<Index>(p, 0)), 0);
    auto mark = [&](Index row) {
        if (row < 0 || row >= p) {
            throw InvalidArgument("penalty group row " + std::to_string(row) + " outside 0.." +
                                  std::to_string(p - 1));
        }
        if (seen[static_cast<std::size_t>(row)]++) {
            throw InvalidArgument("row " + std::to_string(row) + " appears in more than one penalty group");
        }
    };
    for (const auto& g : groups) {
        if (g.empty()) throw InvalidArgument("empty penalty group");
        for (Index r : g) mark(r);
    }
    for (Index r : unpenalized) mark(r);
    for (Index r = 0; r < p; ++r) {
        if (!seen[static_cast<std::size_t>(r)]) {
            throw InvalidArgument("row " + std::to_string(r) + " is in no penalty group and not unpenalized");
        }
    }
}

PenaltyGroups PenaltyGroups::whole(Index p)
{
    PenaltyGroups g;
    g.groups.emplace_back();
    for (Index r = 0; r < p; ++r) g.groups.back().push_back(r);
    return g;
}

int numerical_rank(const Vector& sigma)
{
    if (sigma.size() == 0) return 0;
    double cutoff = kRankTolerance * std::max(1.0, sigma(0));
    return static_cast<int>((sigma.array() > cutoff).count());
}

SvdTriple thin_svd(const Matrix& M)
{
    if (!M.allFinite()) throw InvalidArgument("thin_svd: non-finite entries");
    SvdTriple out;
    const Index r = std::min(M.rows(), M.cols());
    if (r == 0) {
        out.U = Matrix(M.rows(), 0);
        out.sigma = Vector(0);
        out.V = Matrix(M.cols(), 0);
        return out;
    }
    Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(
        M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = svd.matrixU();
    out.sigma = svd.singularValues();
    out.V = svd.matrixV();
    if (!out.U.allFinite() || !out.V.allFinite() || !out.sigma.allFinite()) {
        throw NumericError("thin_svd: decomposition did not converge");
    }
    for (Index j = 0; j < r; ++j) {
        for (Index i = 0; i < out.V.rows(); ++i) {
            double v = out.V(i, j);
            if (std::abs(v) > 1e-12) {
                if (v < 0) {
                    out.V.col(j) = -out.V.col(j);
                    out.U.col(j) = -out.U.col(j);
                }
                break;
            }
        }
    }
    return out;
}

double nuclear_norm(const Matrix& M)
{
    return thin_svd(M).sigma.sum();
}

SvtResult svt_with_norm(const Matrix& M, double threshold)
{
    if (!(threshold >= 0.0)) throw InvalidArgument("svt: threshold must be nonnegative");
    SvtResult out;
    if (M.size() == 0) {
        out.Z = M;
        return out;
    }
    SvdTriple svd = thin_svd(M);
    Index kept = 0;
    while (kept < svd.sigma.size() && svd.sigma(kept) > threshold) ++kept;
    Vector shrunk = (svd.sigma.head(kept).array() - threshold).matrix();
    out.Z = svd.U.leftCols(kept) * shrunk.asDiagonal() * svd.V.leftCols(kept).transpose();
    out.nuclear_norm = shrunk.sum();
    return out;
}

Matrix svt(const Matrix& M, double threshold)
{
    return svt_with_norm(M, threshold).Z;
}

Matrix gather_rows(const Matrix& M, std::span<const Index> rows)
{
    Matrix block(static_cast<Index>(rows.size()), M.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) block.row(static_cast<Index>(i)) = M.row(rows[i]);
    return block;
}

void scatter_rows(Matrix& target, std::span<const Index> rows, const Matrix& block)
{
    for (std::size_t i = 0; i < rows.size(); ++i) target.row(rows[i]) = block.row(static_cast<Index>(i));
}

SvtResult grouped_svt_with_norm(const Matrix& M, const PenaltyGroups& groups, double threshold)
{
    if (!(threshold >= 0.0)) throw InvalidArgument("grouped_svt: threshold must be nonnegative");
    groups.validate(M.rows());
    SvtResult out;
    out.Z = M;
    for (const auto& g : groups.groups) {
        SvtResult block = svt_with_norm(gather_rows(M, g), threshold);
        scatter_rows(out.Z, g, block.Z);
        out.nuclear_norm += block.nuclear_norm;
    }
    return out;
}

Matrix grouped_svt(const Matrix& M, const PenaltyGroups& groups, double threshold)
{
    return grouped_svt_with_norm(M, groups, threshold).Z;
}

double grouped_nuclear_norm(const Matrix& M, const PenaltyGroups& groups)
{
    groups.validate(M.rows());
    double total = 0.0;
    for (const auto& g : groups.groups) total += nuclear_norm(gather_rows(M, g));
    return total;
}

Matrix center_rows(const Matrix& M)
{
    if (M.cols() == 0) return M;
    Vector means = M.rowwise().mean();
    return M.colwise() - means;
}

} // namespace npmr
