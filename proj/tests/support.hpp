#pragma once

// Independent oracles for the unit and acceptance suites. Nothing here
// calls into the code paths it is used to check.

#include <filesystem>
#include <functional>
#include <random>

#include "npmr/dataset.hpp"
#include "npmr/rng.hpp"

namespace npmr::testing {

/// X i.i.d. N(0, scale^2), labels uniform on 1..K with every class present
/// when n >= K.
Dataset random_dataset(int n, int p, int K, Rng& rng, double scale = 1.0);

/// Labels drawn from softmax(alpha + X B) for a given truth.
Dataset dataset_from_truth(const Matrix& X, const Vector& alpha, const Matrix& B, Rng& rng);

Matrix random_matrix(Index rows, Index cols, Rng& rng, double scale = 1.0);

/// -sum_i log P_{i,y_i} by explicit loops over observations and classes.
double naive_nll(const Vector& alpha, const Matrix& B, const Matrix& X, const std::vector<int>& y);

/// Central differences of f at x with step h, one coordinate at a time.
Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x, double h);

/// Singular values from the symmetric eigendecomposition of M^T M (or M M^T
/// when M is wide), non-increasing.
Vector gram_singular_values(const Matrix& M);

/// Largest singular value by power iteration on M^T M.
double power_iteration_norm(const Matrix& M, int iterations = 2000);

/// Unregularized multinomial fit by damped Newton's method with the last
/// class as reference level; returns the minimal negative log-likelihood.
double newton_reference_nll(const Dataset& data);

/// Plate-appearance style event table with planted batter and pitcher
/// factors and skewed appearance counts.
struct EventTableSpec {
    int n_events = 2000;
    int n_batters = 50;
    int n_pitchers = 40;
    int n_stadiums = 5;
    std::uint64_t seed = 1;
    double signal = 0.8;
};

const std::vector<std::string>& pa_outcomes();
std::string synthetic_events_csv(const EventTableSpec& spec);
std::string events_schema_json(int batter_threshold_rank, int pitcher_threshold_rank);

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Frobenius-norm of a matrix difference relative to max(1, ||b||_F).
double rel_diff(const Matrix& a, const Matrix& b);

} // namespace npmr::testing
