#include "npmr/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "npmr/errors.hpp"
#include "npmr/parallel.hpp"
#include "npmr/rng.hpp"

namespace npmr {

LambdaPath LambdaPath::log_spaced(double lambda_max, int n_lambda, double ratio_min)
{
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) throw InvalidArgument("lambda_max must be positive");
    if (n_lambda < 1) throw InvalidArgument("n_lambda must be positive");
    if (!(ratio_min > 0.0 && ratio_min < 1.0)) throw InvalidArgument("ratio_min must lie in (0, 1)");
    LambdaPath path;
    if (n_lambda == 1) {
        path.values = {lambda_max};
        return path;
    }
    const double step = std::log(ratio_min) / (n_lambda - 1);
    for (int i = 0; i < n_lambda; ++i) path.values.push_back(lambda_max * std::exp(step * i));
    return path;
}

LambdaPath LambdaPath::single(double lambda)
{
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
    return LambdaPath{{lambda}};
}

std::pair<ModelFit, FitTrace> fit_with(const Dataset& data, PenaltyKind kind, const SolverConfig& config,
                                       const WarmStart* warm)
{
    switch (kind) {
    case PenaltyKind::nuclear: return fit_npmr(data, config, warm);
    case PenaltyKind::frobenius_squared: return fit_ridge(data, config, warm);
    case PenaltyKind::none: return fit_unpenalized(data, config, warm);
    }
    throw InvalidArgument("unknown penalty kind");
}

double path_lambda_max(const Dataset& data, const PenaltyGroups* groups)
{
    ModelFit null_fit = fit_null(data);
    Matrix B0 = Matrix::Zero(data.p(), data.K);
    Vector alpha0 = null_fit.alpha;

    if (groups && !groups->unpenalized.empty()) {
        // Unpenalized rows are free at the top of the path; fit them first.
        groups->validate(data.p());
        Dataset restricted = data;
        restricted.X = data.X.select_cols(groups->unpenalized);
        restricted.feature_names.clear();
        for (Index r : groups->unpenalized) restricted.feature_names.push_back(data.feature_names[static_cast<std::size_t>(r)]);
        SolverConfig config;
        config.rel_tol = 1e-13;
        config.max_iter = 100000;
        WarmStart warm{alpha0, Matrix::Zero(restricted.p(), data.K), 0.0};
        auto [fit, trace] = fit_unpenalized(restricted, config, &warm);
        alpha0 = fit.alpha;
        scatter_rows(B0, groups->unpenalized, fit.B);
    }

    Matrix residual = evaluate_point(alpha0, B0, data).probs;
    subtract_indicator(residual, data.y);
    Matrix G = data.X.transpose_times(residual);

    if (!groups) {
        Vector sigma = thin_svd(G).sigma;
        return sigma.size() ? sigma(0) : 0.0;
    }
    double best = 0.0;
    for (const auto& g : groups->groups) {
        Vector sigma = thin_svd(gather_rows(G, g)).sigma;
        if (sigma.size()) best = std::max(best, sigma(0));
    }
    return best;
}

LambdaPath default_path(const Dataset& data, PenaltyKind kind, const PenaltyGroups* groups)
{
    if (kind == PenaltyKind::none) return LambdaPath::single(0.0);
    double lambda_max = path_lambda_max(data, groups);
    if (!(lambda_max > 0.0)) return LambdaPath::single(0.0);
    return LambdaPath::log_spaced(lambda_max, 30, kind == PenaltyKind::nuclear ? 1e-3 : 1e-4);
}

std::vector<int> stratified_folds(std::span<const int> y, int K, int n_folds, std::uint64_t seed)
{
    if (n_folds < 2) throw InvalidArgument("n_folds must be at least 2");
    if (static_cast<std::size_t>(n_folds) > y.size()) throw InvalidArgument("n_folds exceeds the number of observations");
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(K));
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 1 || y[i] > K) throw InvalidArgument("label outside 1..K");
        by_class[static_cast<std::size_t>(y[i] - 1)].push_back(i);
    }
    Rng rng(seed);
    std::vector<int> folds(y.size(), 0);
    std::size_t cursor = 0;
    for (int k = 0; k < K; ++k) {
        auto& members = by_class[static_cast<std::size_t>(k)];
        if (members.size() < 2) {
            throw InvalidArgument("class " + std::to_string(k + 1) + " has " + std::to_string(members.size()) +
                                  " observation(s); every training fold must observe every class "
                                  "(use fewer folds or more data)");
        }
        std::shuffle(members.begin(), members.end(), rng.engine());
        for (std::size_t i : members) folds[i] = static_cast<int>(cursor++ % static_cast<std::size_t>(n_folds)) + 1;
    }
    return folds;
}

std::vector<ModelFit> fit_path(const Dataset& data, const LambdaPath& path, PenaltyKind kind,
                               const SolverConfig& solver)
{
    std::vector<ModelFit> fits;
    fits.reserve(path.values.size());
    WarmStart warm;
    bool have_warm = false;
    for (double lambda : path.values) {
        SolverConfig config = solver;
        config.lambda = lambda;
        auto [fit, trace] = fit_with(data, kind, config, have_warm ? &warm : nullptr);
        warm.alpha = fit.alpha;
        warm.B = fit.B;
        warm.step = trace.step_sizes.empty() ? warm.step : trace.step_sizes.back();
        have_warm = true;
        fits.push_back(std::move(fit));
    }
    return fits;
}

std::size_t one_se_index(std::span<const double> lambdas, std::span<const double> mean, std::span<const double> se)
{
    if (mean.empty() || mean.size() != se.size() || mean.size() != lambdas.size()) {
        throw InvalidArgument("one_se_index: misaligned inputs");
    }
    auto best = static_cast<std::size_t>(std::min_element(mean.begin(), mean.end()) - mean.begin());
    const double cutoff = mean[best] + se[best];
    std::size_t chosen = best;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        if (mean[i] <= cutoff && lambdas[i] > lambdas[chosen]) chosen = i;
    }
    return chosen;
}

CvResult cross_validate(const Dataset& data, const LambdaPath& path, const CvOptions& options)
{
    return cross_validate(data, path, options, stratified_folds(data.y, data.K, options.n_folds, options.seed));
}

CvResult cross_validate(const Dataset& data, const LambdaPath& path, const CvOptions& options, std::vector<int> folds)
{
    data.validate();
    if (path.values.empty()) throw InvalidArgument("empty lambda path");
    if (folds.size() != data.y.size()) throw InvalidArgument("fold labels must have length n");
    const int n_folds = options.n_folds;
    if (n_folds < 2) throw InvalidArgument("n_folds must be at least 2");
    for (int f : folds) {
        if (f < 1 || f > n_folds) throw InvalidArgument("fold label outside 1..n_folds");
    }

    const auto n = static_cast<std::size_t>(data.n());
    const std::size_t n_lambda = path.values.size();
    // deviance[l * n + i]: held-out deviance of observation i at lambda l.
    std::vector<double> deviance(n_lambda * n, 0.0);

    std::vector<std::vector<Index>> train(static_cast<std::size_t>(n_folds));
    std::vector<std::vector<Index>> test(static_cast<std::size_t>(n_folds));
    for (std::size_t i = 0; i < n; ++i) {
        for (int f = 1; f <= n_folds; ++f) {
            (f == folds[i] ? test : train)[static_cast<std::size_t>(f - 1)].push_back(static_cast<Index>(i));
        }
    }
    for (int f = 0; f < n_folds; ++f) {
        if (test[static_cast<std::size_t>(f)].empty()) throw InvalidArgument("fold " + std::to_string(f + 1) + " is empty");
        std::vector<char> seen(static_cast<std::size_t>(data.K), 0);
        for (Index i : train[static_cast<std::size_t>(f)]) seen[static_cast<std::size_t>(data.y[static_cast<std::size_t>(i)] - 1)] = 1;
        for (int k = 0; k < data.K; ++k) {
            if (!seen[static_cast<std::size_t>(k)]) {
                throw InvalidArgument("training part of fold " + std::to_string(f + 1) + " never observes class '" +
                                      data.class_names[static_cast<std::size_t>(k)] + "'; use fewer folds");
            }
        }
    }

    parallel_for(static_cast<std::size_t>(n_folds), [&](std::size_t f) {
        Dataset train_data = data.subset(train[f]);
        Dataset test_data = data.subset(test[f]);
        // Keep the penalty-to-likelihood ratio of the full-data fit.
        const double scale = static_cast<double>(train[f].size()) / static_cast<double>(n);
        LambdaPath scaled;
        for (double l : path.values) scaled.values.push_back(l * scale);
        auto fits = fit_path(train_data, scaled, options.penalty_kind, options.solver);
        for (std::size_t l = 0; l < n_lambda; ++l) {
            Vector losses = observation_losses(fits[l].alpha, fits[l].B, test_data);
            for (std::size_t j = 0; j < test[f].size(); ++j) {
                deviance[l * n + static_cast<std::size_t>(test[f][j])] = 2.0 * losses(static_cast<Index>(j));
            }
        }
    });

    CvResult result;
    result.lambda_grid = path.values;
    result.fold_assignments = std::move(folds);
    for (std::size_t l = 0; l < n_lambda; ++l) {
        const double* d = deviance.data() + l * n;
        double mean = std::accumulate(d, d + n, 0.0) / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (d[i] - mean) * (d[i] - mean);
        double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        result.mean_deviance.push_back(mean);
        result.se_deviance.push_back(sd / std::sqrt(static_cast<double>(n)));
    }
    result.chosen_index = one_se_index(result.lambda_grid, result.mean_deviance, result.se_deviance);
    result.chosen_lambda = result.lambda_grid[result.chosen_index];
    return result;
}

Evaluation evaluate(const ModelFit& fit, const Dataset& data)
{
    Vector dev = 2.0 * observation_losses(fit.alpha, fit.B, data);
    const auto n = static_cast<double>(dev.size());
    Evaluation e;
    e.deviance_per_obs = dev.mean();
    if (dev.size() > 1) {
        double var = (dev.array() - e.deviance_per_obs).square().sum() / (n - 1.0);
        e.se = std::sqrt(var / n);
    }
    return e;
}

} // namespace npmr
