#pragma once

#include <filesystem>
#include <string>

#include "npmr/ingestion.hpp"
#include "npmr/model.hpp"

namespace npmr {

/// Self-describing fitted model, stored as JSON.
struct ModelArtifact {
    static constexpr int kSchemaVersion = 1;

    int schema_version = kSchemaVersion;
    Vector alpha;
    Matrix B;
    CsvSchema schema;
    ColumnDictionary dictionary;
    std::vector<std::string> class_names;
    PenaltyKind penalty_kind = PenaltyKind::none;
    double lambda = 0.0;
    PenaltyGroups groups;
    std::vector<std::string> group_names;
    DesignSpec design;

    struct Diagnostics {
        int iterations = 0;
        bool converged = false;
        int halvings = 0;
        int final_rank = 0;
        std::vector<int> group_ranks;
        double objective = 0.0;
        double train_deviance = 0.0;
    } diagnostics;

    std::string to_json() const;
    static ModelArtifact from_json(const std::string& text);

    void save(const std::filesystem::path& path) const;
    static ModelArtifact load(const std::filesystem::path& path);
};

} // namespace npmr
