#include "npmr/simulation.hpp"

#include <cmath>
#include <ostream>

#include "npmr/csv.hpp"
#include "npmr/errors.hpp"
#include "npmr/parallel.hpp"

namespace npmr {

const char* to_string(Regime regime)
{
    return regime == Regime::full_rank ? "full_rank" : "low_rank";
}

Regime regime_from_string(const std::string& s)
{
    if (s == "full_rank" || s == "full") return Regime::full_rank;
    if (s == "low_rank" || s == "low") return Regime::low_rank;
    throw InvalidArgument("unknown regime '" + s + "' (expected full_rank or low_rank)");
}

const char* to_string(Method method)
{
    switch (method) {
    case Method::npmr: return "npmr";
    case Method::ridge: return "ridge";
    case Method::null: return "null";
    case Method::bayes: return "bayes";
    }
    return "";
}

void SimulationScenario::validate() const
{
    if (n_train < 2 || n_test < 1) throw InvalidArgument("n_train must be >= 2 and n_test >= 1");
    if (p < 1 || K < 2) throw InvalidArgument("need p >= 1 and K >= 2");
    if (regime == Regime::low_rank && (latent_rank < 1 || latent_rank >= std::min(p, K))) {
        throw InvalidArgument("latent_rank must lie in 1..min(p, K) - 1");
    }
    if (n_replicates < 1) throw InvalidArgument("n_replicates must be positive");
    if (n_folds < 2) throw InvalidArgument("n_folds must be at least 2");
}

namespace {

Matrix standard_normal(Index rows, Index cols, Rng& rng)
{
    Matrix M(rows, cols);
    // Column-major fill order is part of the reproducibility contract.
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) M(i, j) = rng.normal();
    }
    return M;
}

bool every_class_twice(const Dataset& d)
{
    for (Index c : d.class_counts()) {
        if (c < 2) return false;
    }
    return true;
}

struct TunedFit {
    ModelFit fit;
    double lambda = 0.0;
};

TunedFit tune_and_fit(const Dataset& train, PenaltyKind kind, int n_folds, std::uint64_t seed)
{
    LambdaPath path = default_path(train, kind);
    CvOptions options;
    options.n_folds = n_folds;
    options.penalty_kind = kind;
    options.seed = seed;
    CvResult cv = cross_validate(train, path, options);
    LambdaPath head;
    head.values.assign(path.values.begin(), path.values.begin() + static_cast<std::ptrdiff_t>(cv.chosen_index) + 1);
    auto fits = fit_path(train, head, kind, options.solver);
    return {std::move(fits.back()), cv.chosen_lambda};
}

} // namespace

Matrix generate_coefficients(Regime regime, int p, int K, int latent_rank, Rng& rng)
{
    if (regime == Regime::full_rank) return standard_normal(p, K, rng);
    Matrix A = standard_normal(p, latent_rank, rng);
    Matrix C = standard_normal(K, latent_rank, rng);
    return A * C.transpose();
}

SimulatedData generate_dataset(const Matrix& B, int n, Rng& rng)
{
    if (n < 1) throw InvalidArgument("generate_dataset: n must be positive");
    const auto K = static_cast<int>(B.cols());
    Matrix X = standard_normal(n, B.rows(), rng);
    DesignMatrix design(std::move(X));
    Matrix P = predict_probabilities(Vector::Zero(K), B, design);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        double u = rng.uniform();
        int label = K;
        double acc = 0.0;
        for (int k = 0; k < K; ++k) {
            acc += P(i, k);
            if (u < acc) {
                label = k + 1;
                break;
            }
        }
        y[static_cast<std::size_t>(i)] = label;
    }
    SimulatedData out;
    out.data.X = std::move(design);
    out.data.y = std::move(y);
    out.data.K = K;
    for (Index j = 0; j < B.rows(); ++j) out.data.feature_names.push_back("x" + std::to_string(j + 1));
    for (int k = 0; k < K; ++k) out.data.class_names.push_back("class" + std::to_string(k + 1));
    out.true_probs = std::move(P);
    return out;
}

double bayes_deviance(const SimulatedData& sim)
{
    double total = 0.0;
    for (std::size_t i = 0; i < sim.data.y.size(); ++i) {
        total -= std::log(sim.true_probs(static_cast<Index>(i), sim.data.y[i] - 1));
    }
    return 2.0 * total / static_cast<double>(sim.data.y.size());
}

std::vector<SimulationRecord> run_study(const SimulationScenario& scenario)
{
    scenario.validate();
    constexpr std::size_t kMethods = 4;
    std::vector<SimulationRecord> records(static_cast<std::size_t>(scenario.n_replicates) * kMethods);
    const Rng root(scenario.seed);

    parallel_for(static_cast<std::size_t>(scenario.n_replicates), [&](std::size_t r) {
        Rng rng = root.substream(r);
        Matrix B = generate_coefficients(scenario.regime, scenario.p, scenario.K, scenario.latent_rank, rng);

        // Cross-validation needs every class at least twice in training.
        SimulatedData train = generate_dataset(B, scenario.n_train, rng);
        for (int attempt = 0; !every_class_twice(train.data); ++attempt) {
            if (attempt == 100) {
                throw NumericError("replicate " + std::to_string(r) + ": could not draw a training set observing every class");
            }
            train = generate_dataset(B, scenario.n_train, rng);
        }
        SimulatedData test = generate_dataset(B, scenario.n_test, rng);
        const std::uint64_t cv_seed = Rng::mix(scenario.seed ^ Rng::mix(r));

        TunedFit npmr = tune_and_fit(train.data, PenaltyKind::nuclear, scenario.n_folds, cv_seed);
        TunedFit ridge = tune_and_fit(train.data, PenaltyKind::frobenius_squared, scenario.n_folds, cv_seed);
        ModelFit null_fit = fit_null(train.data);

        const int n_train = scenario.n_train;
        const auto rep = static_cast<int>(r);
        SimulationRecord* out = &records[r * kMethods];
        out[0] = {rep, Method::npmr, n_train, evaluate(npmr.fit, test.data).deviance_per_obs, npmr.lambda,
                  npmr.fit.final_rank};
        out[1] = {rep, Method::ridge, n_train, evaluate(ridge.fit, test.data).deviance_per_obs, ridge.lambda,
                  ridge.fit.final_rank};
        out[2] = {rep, Method::null, n_train, evaluate(null_fit, test.data).deviance_per_obs, 0.0, 0};
        out[3] = {rep, Method::bayes, n_train, bayes_deviance(test), 0.0, numerical_rank(thin_svd(B).sigma)};
    });
    return records;
}

void write_records_csv(std::ostream& out, const std::vector<SimulationRecord>& records)
{
    out << "replicate,method,n_train,test_deviance,chosen_lambda,final_rank\n";
    for (const auto& r : records) {
        out << r.replicate << ',' << to_string(r.method) << ',' << r.n_train << ','
            << csv::format_double(r.test_deviance) << ',' << csv::format_double(r.chosen_lambda) << ','
            << r.final_rank << '\n';
    }
}

} // namespace npmr
