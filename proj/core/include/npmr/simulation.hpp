#pragma once

#include <iosfwd>
#include <string>

#include "npmr/model_selection.hpp"
#include "npmr/rng.hpp"

namespace npmr {

enum class Regime { full_rank, low_rank };
const char* to_string(Regime regime);
Regime regime_from_string(const std::string& s);

struct SimulationScenario {
    int n_train = 600;
    int n_test = 10000;
    int p = 12;
    int K = 8;
    Regime regime = Regime::low_rank;
    int latent_rank = 2;
    int n_replicates = 1;
    std::uint64_t seed = 1;
    int n_folds = 5;

    void validate() const;
};

enum class Method { npmr, ridge, null, bayes };
const char* to_string(Method method);

struct SimulationRecord {
    int replicate = 0;
    Method method = Method::npmr;
    int n_train = 0;
    double test_deviance = 0.0;
    double chosen_lambda = 0.0;
    int final_rank = 0;
};

/// full_rank: i.i.d. N(0,1) entries. low_rank: A C^T with A (p x r) and
/// C (K x r) i.i.d. N(0,1).
Matrix generate_coefficients(Regime regime, int p, int K, int latent_rank, Rng& rng);

struct SimulatedData {
    Dataset data;
    Matrix true_probs;  // n x K
};

/// X i.i.d. N(0,1); labels drawn from softmax(X B) with no intercept.
SimulatedData generate_dataset(const Matrix& B, int n, Rng& rng);

/// 2 * mean(-log P_true[i, y_i]).
double bayes_deviance(const SimulatedData& sim);

/// Records ordered by (replicate, method) with methods in enum order.
std::vector<SimulationRecord> run_study(const SimulationScenario& scenario);

/// Header: replicate,method,n_train,test_deviance,chosen_lambda,final_rank
void write_records_csv(std::ostream& out, const std::vector<SimulationRecord>& records);

} // namespace npmr
