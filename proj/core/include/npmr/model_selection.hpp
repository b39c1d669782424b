#pragma once

#include <cstdint>
#include <optional>

#include "npmr/solver.hpp"

namespace npmr {

struct LambdaPath {
    std::vector<double> values;  // strictly decreasing

    /// n_lambda log-spaced values from lambda_max down to lambda_max * ratio_min.
    static LambdaPath log_spaced(double lambda_max, int n_lambda = 30, double ratio_min = 1e-3);
    static LambdaPath single(double lambda);
};

struct CvResult {
    std::vector<double> lambda_grid;
    std::vector<double> mean_deviance;
    std::vector<double> se_deviance;
    double chosen_lambda = 0.0;
    std::size_t chosen_index = 0;
    std::vector<int> fold_assignments;  // 1..n_folds
};

struct CvOptions {
    int n_folds = 5;
    PenaltyKind penalty_kind = PenaltyKind::nuclear;
    std::uint64_t seed = 1;
    SolverConfig solver;  // lambda ignored; groups used
};

/// Largest singular value of each penalized block of X^T (Y - P0), maximised
/// over blocks, where P0 is the fit with every penalized row held at zero.
double path_lambda_max(const Dataset& data, const PenaltyGroups* groups = nullptr);

/// Default regularization path for a penalty kind: 30 log-spaced values
/// from path_lambda_max down to 1e-3 of it for the nuclear penalty, and down
/// to 1e-4 for ridge, whose useful range sits lower relative to that
/// scale. `none` and a zero lambda_max give the single value 0.
LambdaPath default_path(const Dataset& data, PenaltyKind kind, const PenaltyGroups* groups = nullptr);

/// Stratified fold labels in 1..n_folds. Throws if some class has fewer
/// than two observations (its training part would miss that class).
std::vector<int> stratified_folds(std::span<const int> y, int K, int n_folds, std::uint64_t seed);

/// Fits along a path with warm starts; the returned fits align with path.
std::vector<ModelFit> fit_path(const Dataset& data, const LambdaPath& path, PenaltyKind kind,
                               const SolverConfig& solver);

CvResult cross_validate(const Dataset& data, const LambdaPath& path, const CvOptions& options);
/// Same, with caller-supplied fold labels (1..n_folds).
CvResult cross_validate(const Dataset& data, const LambdaPath& path, const CvOptions& options,
                        std::vector<int> folds);

/// Index chosen by the one-standard-error rule: the largest lambda whose
/// mean deviance is within one SE of the minimum.
std::size_t one_se_index(std::span<const double> lambdas, std::span<const double> mean,
                         std::span<const double> se);

struct Evaluation {
    double deviance_per_obs = 0.0;
    double se = 0.0;
};

/// 2 * NLL / n and the standard error of the per-observation deviances.
Evaluation evaluate(const ModelFit& fit, const Dataset& data);

/// Fit with the penalty kind dispatched; lambda ignored for `none`.
std::pair<ModelFit, FitTrace> fit_with(const Dataset& data, PenaltyKind kind, const SolverConfig& config,
                                       const WarmStart* warm = nullptr);

} // namespace npmr
