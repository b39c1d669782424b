#pragma once

#include <optional>
#include <utility>

#include "npmr/model.hpp"
#include "npmr/prox.hpp"

namespace npmr {

struct SolverConfig {
    double lambda = 0.0;
    double step_init = 0.1;
    int max_iter = 10000;
    double rel_tol = 1e-7;
    bool accelerate = true;
    std::optional<PenaltyGroups> groups;
    double step_floor = 1e-12;

    void validate() const;
};

struct FitTrace {
    std::vector<double> objectives;  // objectives[0] is the starting point
    std::vector<double> step_sizes;  // accepted step per iteration
    int iterations = 0;
    bool converged = false;
    int halvings = 0;
    int restarts = 0;  // momentum resets that avoided a halving
};

/// Starting point for a fit. Zero when absent.
struct WarmStart {
    Vector alpha;
    Matrix B;
    double step = 0.0;  // <= 0 means use config.step_init
};

/// -loglik + lambda * (sum of group nuclear norms, or ||B||_* without groups).
double objective(const Vector& alpha, const Matrix& B, const Dataset& data, double lambda,
                 const PenaltyGroups* groups = nullptr);

/// -loglik + lambda * ||B_penalized||_F^2.
double ridge_objective(const Vector& alpha, const Matrix& B, const Dataset& data, double lambda,
                       const PenaltyGroups* groups = nullptr);

/// One proximal gradient step with step size s:
///   alpha' = alpha + s 1^T (Y - P),  B' = S*_{s lambda}(B + s X^T (Y - P)).
std::pair<Vector, Matrix> pgd_step(const Vector& alpha, const Matrix& B, const Dataset& data,
                                   double s, double lambda, const PenaltyGroups* groups = nullptr);

std::pair<ModelFit, FitTrace> fit_npmr(const Dataset& data, const SolverConfig& config,
                                       const WarmStart* warm = nullptr);

/// Squared-Frobenius penalty; config.groups only contributes its
/// unpenalized row set.
std::pair<ModelFit, FitTrace> fit_ridge(const Dataset& data, const SolverConfig& config,
                                        const WarmStart* warm = nullptr);

/// No penalty at all (maximum likelihood).
std::pair<ModelFit, FitTrace> fit_unpenalized(const Dataset& data, const SolverConfig& config,
                                              const WarmStart* warm = nullptr);

/// Intercept-only fit at the empirical class proportions.
ModelFit fit_null(const Dataset& data);

/// Subtract mean(alpha); center the rows of every penalized block of B
/// (all of B when groups is null).
void normalize_fit(Vector& alpha, Matrix& B, const PenaltyGroups* groups);

/// Per-group numerical ranks of B (one entry for the whole matrix when
/// groups is null).
std::vector<int> group_ranks(const Matrix& B, const PenaltyGroups* groups);

} // namespace npmr
