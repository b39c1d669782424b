#include <iostream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace npmr::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Nuclear penalized multinomial regression"};
    app.require_subcommand(1);

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a model to a training CSV");
    fit_cmd->add_option("train", fit.train_csv, "Training CSV")->required();
    fit_cmd->add_option("--schema", fit.schema, "Schema JSON")->required();
    fit_cmd->add_option("--penalty", fit.penalty, "nuclear | ridge | none")->check(CLI::IsMember({"nuclear", "ridge", "none"}));
    fit_cmd->add_option("--lambda", fit.lambda, "Penalty weight, or 'auto' to cross-validate");
    fit_cmd->add_option("--folds", fit.folds, "Cross-validation folds");
    fit_cmd->add_option("--seed", fit.seed, "Fold assignment seed");
    fit_cmd->add_option("--out", fit.out, "Model output path")->required();

    PredictOptions predict;
    auto* predict_cmd = app.add_subcommand("predict", "Class probabilities for each row of a CSV");
    predict_cmd->add_option("--model", predict.model, "Model file")->required();
    predict_cmd->add_option("test", predict.test_csv, "CSV to score")->required();
    predict_cmd->add_option("--out", predict.out, "Output CSV (default stdout)");

    CvOptionsCli cv;
    auto* cv_cmd = app.add_subcommand("cv", "Cross-validate along a lambda path");
    cv_cmd->add_option("train", cv.train_csv, "Training CSV")->required();
    cv_cmd->add_option("--schema", cv.schema, "Schema JSON")->required();
    cv_cmd->add_option("--penalty", cv.penalty, "nuclear | ridge | none")->check(CLI::IsMember({"nuclear", "ridge", "none"}));
    cv_cmd->add_option("--lambda", cv.lambda, "'auto' for the default path, or a single value");
    cv_cmd->add_option("--folds", cv.folds, "Number of folds");
    cv_cmd->add_option("--seed", cv.seed, "Fold assignment seed");
    cv_cmd->add_option("--out", cv.out, "Output CSV (default stdout)");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Run the NPMR vs ridge simulation study");
    sim_cmd->add_option("--regime", sim.regime, "low_rank | full_rank");
    sim_cmd->add_option("--n-train", sim.scenario.n_train, "Training sample size");
    sim_cmd->add_option("--n-test", sim.scenario.n_test, "Test sample size");
    sim_cmd->add_option("--p", sim.scenario.p, "Number of predictors");
    sim_cmd->add_option("--K", sim.scenario.K, "Number of classes");
    sim_cmd->add_option("--rank", sim.scenario.latent_rank, "Latent rank (low_rank only)");
    sim_cmd->add_option("--replicates", sim.scenario.n_replicates, "Number of replicates");
    sim_cmd->add_option("--folds", sim.scenario.n_folds, "Cross-validation folds");
    sim_cmd->add_option("--seed", sim.scenario.seed, "Seed");
    sim_cmd->add_option("--out", sim.out, "Output CSV (default stdout)");

    ReportOptions report;
    auto* report_cmd = app.add_subcommand("report", "Latent factors and leaderboards of a fitted model");
    report_cmd->add_option("--model", report.model, "Model file")->required();
    report_cmd->add_option("--top-m", report.top_m, "Leaderboard length")->check(CLI::PositiveNumber);
    report_cmd->add_option("--format", report.format, "text | csv")->check(CLI::IsMember({"text", "csv"}));
    report_cmd->add_option("--out", report.out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << nlohmann::json{{"error", "usage"}, {"message", e.what()}, {"exit_code", kValidation}}.dump()
                  << '\n';
        return kValidation;
    }

    if (*fit_cmd) return cmd_fit(fit, std::cout, std::cerr);
    if (*predict_cmd) return cmd_predict(predict, std::cout, std::cerr);
    if (*cv_cmd) return cmd_cv(cv, std::cout, std::cerr);
    if (*sim_cmd) return cmd_simulate(sim, std::cout, std::cerr);
    if (*report_cmd) return cmd_report(report, std::cout, std::cerr);
    return kValidation;
}
