#include <benchmark/benchmark.h>

#include "npmr/model_selection.hpp"
#include "npmr/simulation.hpp"

using namespace npmr;

static Dataset simulated(int n, std::uint64_t seed)
{
    Rng rng(seed);
    Matrix B = generate_coefficients(Regime::low_rank, 12, 8, 2, rng);
    return generate_dataset(B, n, rng).data;
}

static void BM_ThinSvd(benchmark::State& state)
{
    Rng rng(1);
    const auto p = static_cast<Index>(state.range(0));
    Matrix M(p, 9);
    for (Index j = 0; j < M.cols(); ++j) {
        for (Index i = 0; i < p; ++i) M(i, j) = rng.normal();
    }
    for (auto _ : state) benchmark::DoNotOptimize(thin_svd(M));
}
BENCHMARK(BM_ThinSvd)->Arg(12)->Arg(400)->Arg(800);

static void BM_Gradient(benchmark::State& state)
{
    Dataset d = simulated(static_cast<int>(state.range(0)), 2);
    Vector a = Vector::Zero(d.K);
    Matrix B = Matrix::Constant(d.p(), d.K, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(gradient(a, B, d));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Gradient)->Arg(600)->Arg(2000)->Arg(10000);

static void BM_SparseGradient(benchmark::State& state)
{
    // One-hot style design: three indicator blocks plus two flags.
    const int n = static_cast<int>(state.range(0));
    const int nb = 400, np = 360, ns = 30;
    Rng rng(3);
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
        trip.emplace_back(i, static_cast<int>(rng.uniform() * nb), 1.0);
        trip.emplace_back(i, nb + static_cast<int>(rng.uniform() * np), 1.0);
        trip.emplace_back(i, nb + np + static_cast<int>(rng.uniform() * ns), 1.0);
        if (rng.uniform() < 0.5) trip.emplace_back(i, nb + np + ns, 1.0);
        y.push_back(1 + static_cast<int>(rng.uniform() * 9));
    }
    SparseMatrix X(n, nb + np + ns + 1);
    X.setFromTriplets(trip.begin(), trip.end());
    Dataset d = make_dataset(DesignMatrix(std::move(X)), std::move(y), 9);
    Vector a = Vector::Zero(9);
    Matrix B = Matrix::Constant(d.p(), 9, 0.01);
    for (auto _ : state) benchmark::DoNotOptimize(gradient(a, B, d));
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SparseGradient)->Arg(20000)->Arg(170000);

static void BM_FitNpmr(benchmark::State& state)
{
    Dataset d = simulated(static_cast<int>(state.range(0)), 4);
    SolverConfig cfg;
    cfg.lambda = 0.05 * path_lambda_max(d);
    cfg.accelerate = state.range(1) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(fit_npmr(d, cfg));
}
BENCHMARK(BM_FitNpmr)->Args({600, 1})->Args({600, 0})->Args({2000, 1})->Unit(benchmark::kMillisecond);

static void BM_FitPath(benchmark::State& state)
{
    Dataset d = simulated(600, 5);
    const auto kind = static_cast<PenaltyKind>(state.range(0));
    LambdaPath path = default_path(d, kind);
    for (auto _ : state) benchmark::DoNotOptimize(fit_path(d, path, kind, SolverConfig{}));
}
BENCHMARK(BM_FitPath)
    ->Arg(static_cast<int>(PenaltyKind::nuclear))
    ->Arg(static_cast<int>(PenaltyKind::frobenius_squared))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
