#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include "npmr/simulation.hpp"

namespace npmr::cli {

enum ExitCode : int {
    kOk = 0,
    kMissingInput = 2,
    kValidation = 3,
    kNumeric = 4,
};

struct FitOptions {
    std::string train_csv;
    std::string schema;
    std::string penalty = "nuclear";
    std::string lambda = "auto";  // a number, or "auto" to cross-validate
    int folds = 5;
    std::uint64_t seed = 1;
    std::string out;
};

struct PredictOptions {
    std::string model;
    std::string test_csv;
    std::string out;  // empty or "-" writes to stdout
};

struct CvOptionsCli {
    std::string train_csv;
    std::string schema;
    std::string penalty = "nuclear";
    std::string lambda = "auto";  // a number gives a single-value grid
    int folds = 5;
    std::uint64_t seed = 1;
    std::string out;
};

struct SimulateOptions {
    SimulationScenario scenario;
    std::string regime = "low_rank";
    std::string out;
};

struct ReportOptions {
    std::string model;
    int top_m = 5;
    std::string format = "text";  // text | csv
    std::string out;
};

int cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err);
int cmd_predict(const PredictOptions& o, std::ostream& out, std::ostream& err);
int cmd_cv(const CvOptionsCli& o, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err);

/// Runs body, mapping library exceptions to exit codes and writing a one-line
/// JSON error record to err.
int guarded(const std::function<int()>& body, std::ostream& err);

} // namespace npmr::cli
