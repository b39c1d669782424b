#include "npmr/model.hpp"

#include <cmath>

#include "npmr/errors.hpp"

namespace npmr {

const char* to_string(PenaltyKind kind)
{
    switch (kind) {
    case PenaltyKind::nuclear: return "nuclear";
    case PenaltyKind::frobenius_squared: return "ridge";
    case PenaltyKind::none: return "none";
    }
    return "none";
}

PenaltyKind penalty_kind_from_string(const std::string& s)
{
    if (s == "nuclear") return PenaltyKind::nuclear;
    if (s == "ridge" || s == "frobenius_squared") return PenaltyKind::frobenius_squared;
    if (s == "none") return PenaltyKind::none;
    throw InvalidArgument("unknown penalty kind '" + s + "' (expected nuclear, ridge or none)");
}

namespace {

void check_dims(const Vector& alpha, const Matrix& B, const DesignMatrix& X)
{
    if (B.rows() != X.cols()) {
        throw InvalidArgument("B has " + std::to_string(B.rows()) + " rows but X has " +
                              std::to_string(X.cols()) + " columns");
    }
    if (alpha.size() != B.cols()) {
        throw InvalidArgument("alpha has length " + std::to_string(alpha.size()) + " but B has " +
                              std::to_string(B.cols()) + " columns");
    }
}

void check_labels(std::span<const int> y, Index n, int K)
{
    if (static_cast<Index>(y.size()) != n) throw InvalidArgument("label count does not match design rows");
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 1 || y[i] > K) {
            throw InvalidArgument("label " + std::to_string(y[i]) + " at row " + std::to_string(i + 1) +
                                  " outside 1.." + std::to_string(K));
        }
    }
}

Matrix linear_predictor(const Vector& alpha, const Matrix& B, const DesignMatrix& X)
{
    Matrix eta = X.times(B);
    eta.rowwise() += alpha.transpose();
    return eta;
}

// Overwrites eta with softmax probabilities; returns per-row log-sum-exp.
Vector softmax_in_place(Matrix& eta)
{
    Vector lse(eta.rows());
    for (Index i = 0; i < eta.rows(); ++i) {
        double m = eta.row(i).maxCoeff();
        auto row = eta.row(i);
        row.array() = (row.array() - m).exp();
        double z = row.sum();
        row /= z;
        lse(i) = m + std::log(z);
    }
    return lse;
}

} // namespace

Matrix predict_probabilities(const Vector& alpha, const Matrix& B, const DesignMatrix& X)
{
    check_dims(alpha, B, X);
    if (!alpha.allFinite() || !B.allFinite() || !X.all_finite()) {
        throw InvalidArgument("predict_probabilities: non-finite input");
    }
    Matrix P = linear_predictor(alpha, B, X);
    softmax_in_place(P);
    return P;
}

Matrix indicator_matrix(std::span<const int> y, int K)
{
    check_labels(y, static_cast<Index>(y.size()), K);
    Matrix Y = Matrix::Zero(static_cast<Index>(y.size()), K);
    for (std::size_t i = 0; i < y.size(); ++i) Y(static_cast<Index>(i), y[i] - 1) = 1.0;
    return Y;
}

PointEvaluation evaluate_point(const Vector& alpha, const Matrix& B, const Dataset& data)
{
    check_dims(alpha, B, data.X);
    PointEvaluation out;
    out.probs = linear_predictor(alpha, B, data.X);
    // eta_{i,y_i} must be read before the softmax overwrites it.
    double picked = 0.0;
    for (Index i = 0; i < out.probs.rows(); ++i) picked += out.probs(i, data.y[static_cast<std::size_t>(i)] - 1);
    Vector lse = softmax_in_place(out.probs);
    out.nll = lse.sum() - picked;
    return out;
}

Vector observation_losses(const Vector& alpha, const Matrix& B, const Dataset& data)
{
    check_dims(alpha, B, data.X);
    Matrix eta = linear_predictor(alpha, B, data.X);
    Vector picked(eta.rows());
    for (Index i = 0; i < eta.rows(); ++i) picked(i) = eta(i, data.y[static_cast<std::size_t>(i)] - 1);
    Vector lse = softmax_in_place(eta);
    return lse - picked;
}

double negative_log_likelihood(const Vector& alpha, const Matrix& B, const Dataset& data)
{
    check_labels(data.y, data.n(), data.K);
    return evaluate_point(alpha, B, data).nll;
}

void subtract_indicator(Matrix& probs, std::span<const int> y)
{
    for (std::size_t i = 0; i < y.size(); ++i) probs(static_cast<Index>(i), y[i] - 1) -= 1.0;
}

Gradient gradient(const Vector& alpha, const Matrix& B, const Dataset& data)
{
    check_labels(data.y, data.n(), data.K);
    Matrix R = evaluate_point(alpha, B, data).probs;
    subtract_indicator(R, data.y);
    return {R.colwise().sum().transpose(), data.X.transpose_times(R)};
}

double lipschitz_bound(const DesignMatrix& X, int K)
{
    return std::sqrt(static_cast<double>(K)) * X.squared_norm();
}

} // namespace npmr
