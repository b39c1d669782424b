#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "npmr/dataset.hpp"
#include "npmr/prox.hpp"

namespace npmr {

/// Which CSV columns feed which roles.
///
/// `events` mode reads batter/pitcher/stadium ids, two 0/1 flags, an
/// optional batter position and the outcome. `numeric` mode forwards the
/// listed feature columns unencoded. Columns with no role are kept as
/// extras so drop rules can refer to them.
struct CsvSchema {
    enum class Mode { events, numeric };
    Mode mode = Mode::events;

    std::string outcome = "outcome";
    std::vector<std::string> outcomes;  // declared vocabulary, defines class order

    std::string batter = "batter_id";
    std::string pitcher = "pitcher_id";
    std::string stadium = "stadium_id";
    std::string home = "home";
    std::string opposite_hand = "opposite_hand";
    std::optional<std::string> batter_position;

    std::vector<std::string> features;  // numeric mode

    static CsvSchema from_json_text(const std::string& text);
    std::string to_json_text() const;
    static CsvSchema load(const std::filesystem::path& path);
};

struct Event {
    std::string batter;
    std::string pitcher;
    std::string stadium;
    int home = 0;
    int opposite_hand = 0;
    std::string batter_position;
    std::string outcome;
    std::vector<double> numeric;     // numeric mode, schema.features order
    std::vector<std::string> extras; // unmapped columns, header order
    std::size_t line = 0;            // 1-based line in the source file
};

struct EventTable {
    CsvSchema schema;
    std::vector<std::string> header;
    std::vector<Event> rows;
    std::vector<std::string> warnings;
    bool has_outcome = true;

    std::size_t size() const { return rows.size(); }
    /// Index into Event::extras for a column name, or -1.
    int extra_index(const std::string& column) const;
};

struct DropRule {
    std::string column;
    std::vector<std::string> values;  // drop a row when its value is listed
};

struct DesignSpec {
    int batter_threshold_rank = 390;
    int pitcher_threshold_rank = 360;
    std::vector<DropRule> drop_rules;

    void validate() const;

    /// Reads the optional "design" object of a schema file:
    /// {"batter_threshold_rank": .., "pitcher_threshold_rank": .., "drop": [{"column": .., "values": [..]}]}
    static DesignSpec from_json_text(const std::string& text);
    static DesignSpec load(const std::filesystem::path& path);
};

/// Column dictionary of a built design, reused to encode held-out rows.
struct ColumnDictionary {
    CsvSchema::Mode mode = CsvSchema::Mode::events;
    std::vector<std::string> batters;
    std::vector<std::string> pitchers;
    std::vector<std::string> stadiums;
    std::vector<std::string> features;  // numeric mode
    std::vector<std::string> outcomes;
    /// Training-time relabeling of below-threshold ids.
    std::map<std::string, std::string> batter_replacement;
    std::map<std::string, std::string> pitcher_replacement;

    std::vector<std::string> column_names() const;
    std::vector<std::string> group_names() const;
};

struct Design {
    Dataset data;
    PenaltyGroups groups;
    ColumnDictionary dictionary;
};

inline constexpr const char* kReplacementPrefix = "replacement-level ";
bool is_replacement_id(const std::string& id);

/// Reads a CSV whose header must contain every column the schema maps.
/// With require_outcome = false the outcome column may be absent (rows to
/// be scored rather than fitted).
EventTable load_csv(const std::filesystem::path& path, const CsvSchema& schema, bool require_outcome = true);
EventTable parse_csv(std::istream& in, const CsvSchema& schema, bool require_outcome = true);
void write_csv(std::ostream& out, const EventTable& table);

EventTable apply_drop_rules(const EventTable& table, const DesignSpec& spec);

/// Relabels batters below the rank-k PA count as "replacement-level
/// <position>" and pitchers as "replacement-level pitcher". Players tied
/// with the rank-k count stay. Already pooled ids are not ranked.
EventTable apply_replacement_grouping(const EventTable& table, const DesignSpec& spec);

/// Applies drop rules, then one-hot encodes. Column order: batters, pitchers,
/// stadiums (each sorted by id), home, opposite_hand.
Design build_design(const EventTable& table, const DesignSpec& spec);

/// Drop rules, replacement grouping, then build_design.
Design prepare_training_design(const EventTable& table, const DesignSpec& spec);

struct EncodedRows {
    DesignMatrix X;
    std::vector<int> y;  // empty when the table carries no outcomes
    std::vector<std::size_t> lines;
};

/// Encodes rows against a training dictionary after applying the drop
/// rules. Unseen batters/pitchers map to their replacement-level column;
/// anything else unseen is a SchemaError naming the line and id.
EncodedRows encode_with_dictionary(const EventTable& table, const ColumnDictionary& dict, const DesignSpec& spec);

} // namespace npmr
