#pragma once

#include <vector>

#include "npmr/dataset.hpp"

namespace npmr {

enum class PenaltyKind { nuclear, frobenius_squared, none };

const char* to_string(PenaltyKind kind);
PenaltyKind penalty_kind_from_string(const std::string& s);

/// Fitted intercepts and coefficients plus diagnostics.
struct ModelFit {
    Vector alpha;  // K
    Matrix B;      // p x K
    std::vector<double> objective_trace;
    int final_rank = 0;
    std::vector<int> group_ranks;  // one entry per penalty group (one entry if ungrouped)
    double lambda = 0.0;
    PenaltyKind penalty_kind = PenaltyKind::none;
};

struct Gradient {
    Vector alpha;  // K
    Matrix B;      // p x K
};

/// Row-wise softmax of alpha + x_i^T B with per-row max subtraction.
Matrix predict_probabilities(const Vector& alpha, const Matrix& B, const DesignMatrix& X);

/// n x K one-hot matrix for 1-based labels.
Matrix indicator_matrix(std::span<const int> y, int K);

/// -sum_i log P_{i,y_i}, evaluated through log-sum-exp of the linear predictors.
double negative_log_likelihood(const Vector& alpha, const Matrix& B, const Dataset& data);

/// Gradient of the negative log-likelihood: (1^T (P - Y), X^T (P - Y)).
/// The descent direction is the negation.
Gradient gradient(const Vector& alpha, const Matrix& B, const Dataset& data);

/// sqrt(K) * ||X||_F^2, a Lipschitz constant for the B-gradient.
double lipschitz_bound(const DesignMatrix& X, int K);

/// Probabilities and likelihood at one point, sharing the linear predictor.
/// Used by the solvers, which need both at every accepted iterate.
struct PointEvaluation {
    Matrix probs;  // n x K
    double nll = 0.0;
};
PointEvaluation evaluate_point(const Vector& alpha, const Matrix& B, const Dataset& data);

/// Per-observation -log P_{i,y_i}.
Vector observation_losses(const Vector& alpha, const Matrix& B, const Dataset& data);

/// Residual P - Y in place of Y's one-hot form.
void subtract_indicator(Matrix& probs, std::span<const int> y);

} // namespace npmr
