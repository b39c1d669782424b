#include "npmr/artifact.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "npmr/csv.hpp"
#include "npmr/errors.hpp"

namespace npmr {

using json = nlohmann::ordered_json;

namespace {

json index_list(const std::vector<Index>& v)
{
    json out = json::array();
    for (Index i : v) out.push_back(i);
    return out;
}

std::vector<Index> index_list(const json& j)
{
    std::vector<Index> out;
    for (const auto& v : j) out.push_back(v.get<Index>());
    return out;
}

} // namespace

std::string ModelArtifact::to_json() const
{
    json j;
    j["format"] = "npmr-model";
    j["schema_version"] = schema_version;
    j["class_names"] = class_names;

    json penalty;
    penalty["kind"] = to_string(penalty_kind);
    penalty["lambda"] = lambda;
    penalty["group_names"] = group_names;
    penalty["groups"] = json::array();
    for (const auto& g : groups.groups) penalty["groups"].push_back(index_list(g));
    penalty["unpenalized"] = index_list(groups.unpenalized);
    j["penalty"] = penalty;

    j["alpha"] = std::vector<double>(alpha.data(), alpha.data() + alpha.size());
    json b;
    b["rows"] = B.rows();
    b["cols"] = B.cols();
    b["layout"] = "row-major";
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(B.size()));
    for (Index r = 0; r < B.rows(); ++r) {
        for (Index c = 0; c < B.cols(); ++c) data.push_back(B(r, c));
    }
    b["data"] = data;
    j["B"] = b;

    j["schema"] = json::parse(schema.to_json_text());

    json cols;
    cols["mode"] = dictionary.mode == CsvSchema::Mode::numeric ? "numeric" : "events";
    cols["names"] = dictionary.column_names();
    cols["batters"] = dictionary.batters;
    cols["pitchers"] = dictionary.pitchers;
    cols["stadiums"] = dictionary.stadiums;
    cols["features"] = dictionary.features;
    cols["outcomes"] = dictionary.outcomes;
    cols["batter_replacement"] = dictionary.batter_replacement;
    cols["pitcher_replacement"] = dictionary.pitcher_replacement;
    j["columns"] = cols;

    json d;
    d["batter_threshold_rank"] = design.batter_threshold_rank;
    d["pitcher_threshold_rank"] = design.pitcher_threshold_rank;
    d["drop"] = json::array();
    for (const auto& rule : design.drop_rules) d["drop"].push_back({{"column", rule.column}, {"values", rule.values}});
    j["design"] = d;

    json diag;
    diag["iterations"] = diagnostics.iterations;
    diag["converged"] = diagnostics.converged;
    diag["halvings"] = diagnostics.halvings;
    diag["final_rank"] = diagnostics.final_rank;
    diag["group_ranks"] = diagnostics.group_ranks;
    diag["objective"] = diagnostics.objective;
    diag["train_deviance"] = diagnostics.train_deviance;
    j["diagnostics"] = diag;
    return j.dump(2) + "\n";
}

ModelArtifact ModelArtifact::from_json(const std::string& text)
{
    ModelArtifact a;
    try {
        json j = json::parse(text);
        if (j.value("format", "") != "npmr-model") throw SchemaError("not an npmr model file");
        a.schema_version = j.at("schema_version").get<int>();
        if (a.schema_version != kSchemaVersion) {
            throw SchemaError("unsupported model schema version " + std::to_string(a.schema_version));
        }
        a.class_names = j.at("class_names").get<std::vector<std::string>>();

        const json& penalty = j.at("penalty");
        a.penalty_kind = penalty_kind_from_string(penalty.at("kind").get<std::string>());
        a.lambda = penalty.at("lambda").get<double>();
        a.group_names = penalty.at("group_names").get<std::vector<std::string>>();
        for (const auto& g : penalty.at("groups")) a.groups.groups.push_back(index_list(g));
        a.groups.unpenalized = index_list(penalty.at("unpenalized"));

        auto alpha = j.at("alpha").get<std::vector<double>>();
        a.alpha = Eigen::Map<const Vector>(alpha.data(), static_cast<Index>(alpha.size()));
        const json& b = j.at("B");
        const auto rows = b.at("rows").get<Index>();
        const auto cols = b.at("cols").get<Index>();
        auto data = b.at("data").get<std::vector<double>>();
        if (static_cast<Index>(data.size()) != rows * cols) throw SchemaError("B data length does not match its shape");
        a.B.resize(rows, cols);
        for (Index r = 0; r < rows; ++r) {
            for (Index c = 0; c < cols; ++c) a.B(r, c) = data[static_cast<std::size_t>(r * cols + c)];
        }

        a.schema = CsvSchema::from_json_text(j.at("schema").dump());

        const json& c = j.at("columns");
        a.dictionary.mode = c.at("mode").get<std::string>() == "numeric" ? CsvSchema::Mode::numeric : CsvSchema::Mode::events;
        a.dictionary.batters = c.at("batters").get<std::vector<std::string>>();
        a.dictionary.pitchers = c.at("pitchers").get<std::vector<std::string>>();
        a.dictionary.stadiums = c.at("stadiums").get<std::vector<std::string>>();
        a.dictionary.features = c.at("features").get<std::vector<std::string>>();
        a.dictionary.outcomes = c.at("outcomes").get<std::vector<std::string>>();
        a.dictionary.batter_replacement = c.at("batter_replacement").get<std::map<std::string, std::string>>();
        a.dictionary.pitcher_replacement = c.at("pitcher_replacement").get<std::map<std::string, std::string>>();

        const json& d = j.at("design");
        a.design.batter_threshold_rank = d.at("batter_threshold_rank").get<int>();
        a.design.pitcher_threshold_rank = d.at("pitcher_threshold_rank").get<int>();
        for (const auto& rule : d.at("drop")) {
            a.design.drop_rules.push_back(
                {rule.at("column").get<std::string>(), rule.at("values").get<std::vector<std::string>>()});
        }

        const json& diag = j.at("diagnostics");
        a.diagnostics.iterations = diag.at("iterations").get<int>();
        a.diagnostics.converged = diag.at("converged").get<bool>();
        a.diagnostics.halvings = diag.at("halvings").get<int>();
        a.diagnostics.final_rank = diag.at("final_rank").get<int>();
        a.diagnostics.group_ranks = diag.at("group_ranks").get<std::vector<int>>();
        a.diagnostics.objective = diag.at("objective").get<double>();
        a.diagnostics.train_deviance = diag.at("train_deviance").get<double>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed model file: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw SchemaError(std::string("malformed model file: ") + e.what());
    }

    const auto K = static_cast<Index>(a.class_names.size());
    if (a.alpha.size() != K || a.B.cols() != K) throw SchemaError("model dimensions disagree with class_names");
    if (static_cast<Index>(a.dictionary.column_names().size()) != a.B.rows()) {
        throw SchemaError("model column dictionary disagrees with B");
    }
    try {
        a.groups.validate(a.B.rows());
    } catch (const InvalidArgument& e) {
        throw SchemaError(std::string("model penalty groups: ") + e.what());
    }
    return a;
}

void ModelArtifact::save(const std::filesystem::path& path) const
{
    std::string text = to_json();
    csv::write_atomically(path, [&](std::ostream& out) { out << text; });
}

ModelArtifact ModelArtifact::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open model '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

} // namespace npmr
