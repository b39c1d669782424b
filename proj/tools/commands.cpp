#include "commands.hpp"

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "npmr/artifact.hpp"
#include "npmr/csv.hpp"
#include "npmr/errors.hpp"
#include "npmr/ingestion.hpp"
#include "npmr/report.hpp"

namespace npmr::cli {

namespace {

void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& writer)
{
    if (path.empty() || path == "-") {
        writer(fallback);
        return;
    }
    csv::write_atomically(path, writer);
}

double parse_lambda(const std::string& text)
{
    double v = 0.0;
    if (!csv::parse_double(text, v) || !(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument("--lambda must be 'auto' or a finite nonnegative number, got '" + text + "'");
    }
    return v;
}

struct Loaded {
    CsvSchema schema;
    DesignSpec spec;
    Design design;
};

Loaded load_training(const std::string& train_csv, const std::string& schema_path)
{
    Loaded l;
    l.schema = CsvSchema::load(schema_path);
    l.spec = DesignSpec::load(schema_path);
    EventTable table = load_csv(train_csv, l.schema);
    l.design = prepare_training_design(table, l.spec);
    return l;
}

// Walks the path down to `lambda` with warm starts and returns the last fit.
std::pair<ModelFit, FitTrace> fit_at(const Dataset& data, PenaltyKind kind, const SolverConfig& base,
                                     const LambdaPath& path, std::size_t index)
{
    WarmStart warm;
    bool have_warm = false;
    std::pair<ModelFit, FitTrace> result;
    for (std::size_t i = 0; i <= index; ++i) {
        SolverConfig config = base;
        config.lambda = path.values[i];
        result = fit_with(data, kind, config, have_warm ? &warm : nullptr);
        warm = {result.first.alpha, result.first.B,
                result.second.step_sizes.empty() ? warm.step : result.second.step_sizes.back()};
        have_warm = true;
    }
    return result;
}

} // namespace

int guarded(const std::function<int()>& body, std::ostream& err)
{
    auto report = [&](const char* kind, const std::string& message, int code) {
        err << nlohmann::json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
        return code;
    };
    try {
        return body();
    } catch (const InputError& e) {
        return report("missing_input", e.what(), kMissingInput);
    } catch (const SchemaError& e) {
        return report("schema", e.what(), kValidation);
    } catch (const InvalidArgument& e) {
        return report("validation", e.what(), kValidation);
    } catch (const NumericError& e) {
        return report("numeric", e.what(), kNumeric);
    } catch (const std::exception& e) {
        return report("internal", e.what(), kNumeric);
    }
}

int cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err)
{
    return guarded([&] {
        if (o.out.empty()) throw InvalidArgument("fit needs --out");
        const PenaltyKind kind = penalty_kind_from_string(o.penalty);
        Loaded l = load_training(o.train_csv, o.schema);
        const Dataset& data = l.design.data;

        SolverConfig config;
        config.groups = l.design.groups;
        LambdaPath path;
        std::size_t index = 0;
        if (kind == PenaltyKind::none) {
            path = LambdaPath::single(0.0);
        } else if (o.lambda == "auto") {
            path = default_path(data, kind, &l.design.groups);
            CvOptions cv_options;
            cv_options.n_folds = o.folds;
            cv_options.penalty_kind = kind;
            cv_options.seed = o.seed;
            cv_options.solver = config;
            CvResult cv = cross_validate(data, path, cv_options);
            index = cv.chosen_index;
        } else {
            path = LambdaPath::single(parse_lambda(o.lambda));
        }
        auto [fit, trace] = fit_at(data, kind, config, path, index);

        ModelArtifact artifact;
        artifact.alpha = fit.alpha;
        artifact.B = fit.B;
        artifact.schema = l.schema;
        artifact.dictionary = l.design.dictionary;
        artifact.class_names = data.class_names;
        artifact.penalty_kind = kind;
        artifact.lambda = fit.lambda;
        artifact.groups = l.design.groups;
        artifact.group_names = l.design.dictionary.group_names();
        artifact.design = l.spec;
        artifact.diagnostics.iterations = trace.iterations;
        artifact.diagnostics.converged = trace.converged;
        artifact.diagnostics.halvings = trace.halvings;
        artifact.diagnostics.group_ranks = group_ranks(fit.B, &l.design.groups);
        artifact.diagnostics.final_rank = 0;
        for (int r : artifact.diagnostics.group_ranks) artifact.diagnostics.final_rank += r;
        artifact.diagnostics.objective = fit.objective_trace.empty() ? 0.0 : fit.objective_trace.back();
        artifact.diagnostics.train_deviance = evaluate(fit, data).deviance_per_obs;
        artifact.save(o.out);

        out << "penalty " << to_string(kind) << '\n';
        out << "lambda " << csv::format_double(fit.lambda) << '\n';
        out << "iterations " << trace.iterations << (trace.converged ? " (converged)" : " (not converged)") << '\n';
        out << "train_deviance " << csv::format_double(artifact.diagnostics.train_deviance) << '\n';
        for (std::size_t g = 0; g < artifact.group_names.size(); ++g) {
            out << "rank " << artifact.group_names[g] << ' ' << artifact.diagnostics.group_ranks[g] << '\n';
        }
        return static_cast<int>(kOk);
    }, err);
}

int cmd_predict(const PredictOptions& o, std::ostream& out, std::ostream& err)
{
    return guarded([&] {
        ModelArtifact artifact = ModelArtifact::load(o.model);
        EventTable table = load_csv(o.test_csv, artifact.schema, false);
        EncodedRows rows = encode_with_dictionary(table, artifact.dictionary, artifact.design);
        Matrix P = predict_probabilities(artifact.alpha, artifact.B, rows.X);
        emit(o.out, out, [&](std::ostream& s) {
            s << csv::join(artifact.class_names) << '\n';
            for (Index i = 0; i < P.rows(); ++i) {
                for (Index k = 0; k < P.cols(); ++k) s << (k ? "," : "") << csv::format_double(P(i, k));
                s << '\n';
            }
        });
        return static_cast<int>(kOk);
    }, err);
}

int cmd_cv(const CvOptionsCli& o, std::ostream& out, std::ostream& err)
{
    return guarded([&] {
        const PenaltyKind kind = penalty_kind_from_string(o.penalty);
        Loaded l = load_training(o.train_csv, o.schema);
        const Dataset& data = l.design.data;
        LambdaPath path = o.lambda == "auto" ? default_path(data, kind, &l.design.groups)
                                             : LambdaPath::single(parse_lambda(o.lambda));
        CvOptions options;
        options.n_folds = o.folds;
        options.penalty_kind = kind;
        options.seed = o.seed;
        options.solver.groups = l.design.groups;
        CvResult cv = cross_validate(data, path, options);
        emit(o.out, out, [&](std::ostream& s) {
            s << "lambda,mean_deviance,se\n";
            for (std::size_t i = 0; i < cv.lambda_grid.size(); ++i) {
                s << csv::format_double(cv.lambda_grid[i]) << ',' << csv::format_double(cv.mean_deviance[i]) << ','
                  << csv::format_double(cv.se_deviance[i]) << '\n';
            }
            s << "chosen_lambda," << csv::format_double(cv.chosen_lambda) << '\n';
        });
        return static_cast<int>(kOk);
    }, err);
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err)
{
    return guarded([&] {
        SimulationScenario scenario = o.scenario;
        scenario.regime = regime_from_string(o.regime);
        auto records = run_study(scenario);
        emit(o.out, out, [&](std::ostream& s) { write_records_csv(s, records); });
        return static_cast<int>(kOk);
    }, err);
}

int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err)
{
    return guarded([&] {
        if (o.format != "text" && o.format != "csv") throw InvalidArgument("--format must be text or csv");
        ModelArtifact artifact = ModelArtifact::load(o.model);
        if (artifact.groups.groups.empty()) throw InvalidArgument("model has no penalized group to report on");
        LatentReport report = build_latent_report(artifact.B, artifact.groups, artifact.group_names,
                                                  artifact.dictionary.column_names(), artifact.class_names, o.top_m);
        emit(o.out, out, [&](std::ostream& s) {
            if (o.format == "csv") {
                write_report_csv(s, report);
            } else {
                write_report_text(s, report);
            }
        });
        return static_cast<int>(kOk);
    }, err);
}

} // namespace npmr::cli
