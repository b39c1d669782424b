#include "npmr/ingestion.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "npmr/csv.hpp"
#include "npmr/errors.hpp"

namespace npmr {

using json = nlohmann::json;

namespace {

json parse_json(const std::string& text, const char* what)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string(what) + ": " + e.what());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class T>
void read_optional(const json& j, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("schema field '") + key + "': " + e.what());
    }
}

// Role columns in header order; -1 when a column is not in the header.
struct ColumnRoles {
    int batter = -1, pitcher = -1, stadium = -1, home = -1, opposite_hand = -1, position = -1, outcome = -1;
    std::vector<int> features;
    std::vector<char> is_extra;
};

int find_column(const std::vector<std::string>& header, const std::string& name)
{
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

ColumnRoles resolve_roles(const std::vector<std::string>& header, const CsvSchema& schema, bool require_outcome)
{
    ColumnRoles roles;
    auto require = [&](const std::string& name) {
        int idx = find_column(header, name);
        if (idx < 0) throw SchemaError("missing column '" + name + "'", 1);
        return idx;
    };
    if (schema.mode == CsvSchema::Mode::events) {
        roles.batter = require(schema.batter);
        roles.pitcher = require(schema.pitcher);
        roles.stadium = require(schema.stadium);
        roles.home = require(schema.home);
        roles.opposite_hand = require(schema.opposite_hand);
        if (schema.batter_position) roles.position = require(*schema.batter_position);
    } else {
        for (const auto& f : schema.features) roles.features.push_back(require(f));
    }
    roles.outcome = require_outcome ? require(schema.outcome) : find_column(header, schema.outcome);

    roles.is_extra.assign(header.size(), 1);
    for (int idx : {roles.batter, roles.pitcher, roles.stadium, roles.home, roles.opposite_hand, roles.position,
                    roles.outcome}) {
        if (idx >= 0) roles.is_extra[static_cast<std::size_t>(idx)] = 0;
    }
    for (int idx : roles.features) roles.is_extra[static_cast<std::size_t>(idx)] = 0;
    return roles;
}

int parse_flag(const std::string& field, const std::string& column, std::size_t line)
{
    if (field == "0") return 0;
    if (field == "1") return 1;
    throw SchemaError("unparseable flag '" + field + "' in column '" + column + "' (expected 0 or 1)", line);
}

std::string field_value(const EventTable& table, const Event& e, const std::string& column)
{
    const CsvSchema& s = table.schema;
    if (s.mode == CsvSchema::Mode::events) {
        if (column == s.batter) return e.batter;
        if (column == s.pitcher) return e.pitcher;
        if (column == s.stadium) return e.stadium;
        if (column == s.home) return std::to_string(e.home);
        if (column == s.opposite_hand) return std::to_string(e.opposite_hand);
        if (s.batter_position && column == *s.batter_position) return e.batter_position;
    }
    if (column == s.outcome && table.has_outcome) return e.outcome;
    int extra = table.extra_index(column);
    if (extra >= 0) return e.extras[static_cast<std::size_t>(extra)];
    throw SchemaError("drop rule refers to unknown column '" + column + "'");
}

// Most frequent position per batter; ties go to the lexicographically
// smallest position.
std::map<std::string, std::string> batter_positions(const EventTable& table)
{
    std::map<std::string, std::map<std::string, int>> tallies;
    for (const auto& e : table.rows) ++tallies[e.batter][e.batter_position];
    std::map<std::string, std::string> out;
    for (const auto& [batter, tally] : tallies) {
        const std::string* best = nullptr;
        int best_count = -1;
        for (const auto& [pos, count] : tally) {
            if (count > best_count) {
                best = &pos;
                best_count = count;
            }
        }
        out[batter] = *best;
    }
    return out;
}

// Ids whose PA count falls strictly below the count of the rank-k id.
std::set<std::string> below_threshold(const std::map<std::string, long>& counts, int rank, const char* who,
                                      std::vector<std::string>& warnings)
{
    std::vector<long> sorted;
    for (const auto& [id, c] : counts) {
        if (!is_replacement_id(id)) sorted.push_back(c);
    }
    if (static_cast<int>(sorted.size()) < rank) {
        warnings.push_back(std::string("only ") + std::to_string(sorted.size()) + " distinct " + who +
                           "s (threshold rank " + std::to_string(rank) + "); all kept");
        return {};
    }
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const long threshold = sorted[static_cast<std::size_t>(rank - 1)];
    std::set<std::string> out;
    for (const auto& [id, c] : counts) {
        if (!is_replacement_id(id) && c < threshold) out.insert(id);
    }
    return out;
}

std::vector<std::string> sorted_unique(const EventTable& table, std::string Event::*field)
{
    std::set<std::string> ids;
    for (const auto& e : table.rows) ids.insert(e.*field);
    return {ids.begin(), ids.end()};
}

int label_of(const std::vector<std::string>& outcomes, const Event& e)
{
    auto it = std::find(outcomes.begin(), outcomes.end(), e.outcome);
    if (it == outcomes.end()) {
        throw InvalidArgument("line " + std::to_string(e.line) + ": unknown outcome label '" + e.outcome + "'");
    }
    return static_cast<int>(it - outcomes.begin()) + 1;
}

Index index_in(const std::vector<std::string>& sorted, const std::string& id)
{
    auto it = std::lower_bound(sorted.begin(), sorted.end(), id);
    return (it != sorted.end() && *it == id) ? static_cast<Index>(it - sorted.begin()) : -1;
}

} // namespace

bool is_replacement_id(const std::string& id)
{
    return id.rfind(kReplacementPrefix, 0) == 0;
}

CsvSchema CsvSchema::from_json_text(const std::string& text)
{
    json j = parse_json(text, "schema");
    if (!j.is_object()) throw SchemaError("schema must be a JSON object");
    CsvSchema s;
    std::string mode = "events";
    read_optional(j, "mode", mode);
    if (mode == "events") {
        s.mode = Mode::events;
    } else if (mode == "numeric") {
        s.mode = Mode::numeric;
    } else {
        throw SchemaError("schema mode must be 'events' or 'numeric', got '" + mode + "'");
    }
    read_optional(j, "outcome", s.outcome);
    read_optional(j, "outcomes", s.outcomes);
    read_optional(j, "batter", s.batter);
    read_optional(j, "pitcher", s.pitcher);
    read_optional(j, "stadium", s.stadium);
    read_optional(j, "home", s.home);
    read_optional(j, "opposite_hand", s.opposite_hand);
    if (j.contains("batter_position")) {
        std::string pos;
        read_optional(j, "batter_position", pos);
        s.batter_position = pos;
    }
    read_optional(j, "features", s.features);

    if (s.outcomes.size() < 2) throw SchemaError("schema must declare at least two outcomes");
    std::set<std::string> unique(s.outcomes.begin(), s.outcomes.end());
    if (unique.size() != s.outcomes.size()) throw SchemaError("schema outcomes contain duplicates");
    if (s.mode == Mode::numeric && s.features.empty()) throw SchemaError("numeric schema needs a features list");
    return s;
}

std::string CsvSchema::to_json_text() const
{
    nlohmann::ordered_json j;
    j["mode"] = mode == Mode::numeric ? "numeric" : "events";
    j["outcome"] = outcome;
    j["outcomes"] = outcomes;
    if (mode == Mode::events) {
        j["batter"] = batter;
        j["pitcher"] = pitcher;
        j["stadium"] = stadium;
        j["home"] = home;
        j["opposite_hand"] = opposite_hand;
        if (batter_position) j["batter_position"] = *batter_position;
    } else {
        j["features"] = features;
    }
    return j.dump();
}

CsvSchema CsvSchema::load(const std::filesystem::path& path)
{
    return from_json_text(read_file(path));
}

void DesignSpec::validate() const
{
    if (batter_threshold_rank < 1 || pitcher_threshold_rank < 1) throw InvalidArgument("threshold ranks must be >= 1");
}

DesignSpec DesignSpec::from_json_text(const std::string& text)
{
    json j = parse_json(text, "schema");
    DesignSpec spec;
    if (!j.is_object() || !j.contains("design")) return spec;
    const json& d = j.at("design");
    read_optional(d, "batter_threshold_rank", spec.batter_threshold_rank);
    read_optional(d, "pitcher_threshold_rank", spec.pitcher_threshold_rank);
    if (d.contains("drop")) {
        try {
            for (const auto& rule : d.at("drop")) {
                spec.drop_rules.push_back({rule.at("column").get<std::string>(),
                                           rule.at("values").get<std::vector<std::string>>()});
            }
        } catch (const json::exception& e) {
            throw SchemaError(std::string("design.drop: ") + e.what());
        }
    }
    if (spec.batter_threshold_rank < 1 || spec.pitcher_threshold_rank < 1) {
        throw SchemaError("design threshold ranks must be >= 1");
    }
    return spec;
}

DesignSpec DesignSpec::load(const std::filesystem::path& path)
{
    return from_json_text(read_file(path));
}

int EventTable::extra_index(const std::string& column) const
{
    int extra = 0;
    ColumnRoles roles = resolve_roles(header, schema, has_outcome);
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!roles.is_extra[c]) continue;
        if (header[c] == column) return extra;
        ++extra;
    }
    return -1;
}

std::vector<std::string> ColumnDictionary::column_names() const
{
    std::vector<std::string> names;
    if (mode == CsvSchema::Mode::numeric) return features;
    for (const auto& b : batters) names.push_back("batter:" + b);
    for (const auto& p : pitchers) names.push_back("pitcher:" + p);
    for (const auto& s : stadiums) names.push_back("stadium:" + s);
    names.push_back("home");
    names.push_back("opposite_hand");
    return names;
}

std::vector<std::string> ColumnDictionary::group_names() const
{
    if (mode == CsvSchema::Mode::numeric) return {"features"};
    return {"batter", "pitcher", "stadium"};
}

EventTable parse_csv(std::istream& in, const CsvSchema& schema, bool require_outcome)
{
    EventTable table;
    table.schema = schema;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("missing header row", 1);
    table.header = csv::split_line(line);
    ColumnRoles roles = resolve_roles(table.header, schema, require_outcome);
    table.has_outcome = roles.outcome >= 0;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = csv::split_line(line);
        if (fields.size() != table.header.size()) {
            throw SchemaError("expected " + std::to_string(table.header.size()) + " fields, found " +
                                  std::to_string(fields.size()),
                              line_no);
        }
        Event e;
        e.line = line_no;
        if (schema.mode == CsvSchema::Mode::events) {
            e.batter = fields[static_cast<std::size_t>(roles.batter)];
            e.pitcher = fields[static_cast<std::size_t>(roles.pitcher)];
            e.stadium = fields[static_cast<std::size_t>(roles.stadium)];
            for (const auto* id : {&e.batter, &e.pitcher, &e.stadium}) {
                if (id->empty()) throw SchemaError("empty identifier", line_no);
            }
            e.home = parse_flag(fields[static_cast<std::size_t>(roles.home)], schema.home, line_no);
            e.opposite_hand =
                parse_flag(fields[static_cast<std::size_t>(roles.opposite_hand)], schema.opposite_hand, line_no);
            if (roles.position >= 0) e.batter_position = fields[static_cast<std::size_t>(roles.position)];
        } else {
            for (std::size_t f = 0; f < roles.features.size(); ++f) {
                double v = 0.0;
                const auto& text = fields[static_cast<std::size_t>(roles.features[f])];
                if (!csv::parse_double(text, v) || !std::isfinite(v)) {
                    throw SchemaError("unparseable number '" + text + "' in column '" + schema.features[f] + "'",
                                      line_no);
                }
                e.numeric.push_back(v);
            }
        }
        if (roles.outcome >= 0) e.outcome = fields[static_cast<std::size_t>(roles.outcome)];
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (roles.is_extra[c]) e.extras.push_back(std::move(fields[c]));
        }
        table.rows.push_back(std::move(e));
    }
    return table;
}

EventTable load_csv(const std::filesystem::path& path, const CsvSchema& schema, bool require_outcome)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return parse_csv(in, schema, require_outcome);
}

void write_csv(std::ostream& out, const EventTable& table)
{
    ColumnRoles roles = resolve_roles(table.header, table.schema, table.has_outcome);
    out << csv::join(table.header) << '\n';
    for (const auto& e : table.rows) {
        std::vector<std::string> fields(table.header.size());
        std::size_t extra = 0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto col = static_cast<int>(c);
            if (roles.is_extra[c]) {
                fields[c] = e.extras[extra++];
            } else if (col == roles.batter) {
                fields[c] = e.batter;
            } else if (col == roles.pitcher) {
                fields[c] = e.pitcher;
            } else if (col == roles.stadium) {
                fields[c] = e.stadium;
            } else if (col == roles.home) {
                fields[c] = std::to_string(e.home);
            } else if (col == roles.opposite_hand) {
                fields[c] = std::to_string(e.opposite_hand);
            } else if (col == roles.position) {
                fields[c] = e.batter_position;
            } else if (col == roles.outcome) {
                fields[c] = e.outcome;
            } else {
                auto it = std::find(roles.features.begin(), roles.features.end(), col);
                fields[c] = csv::format_double(e.numeric[static_cast<std::size_t>(it - roles.features.begin())]);
            }
        }
        out << csv::join(fields) << '\n';
    }
}

EventTable apply_drop_rules(const EventTable& table, const DesignSpec& spec)
{
    if (spec.drop_rules.empty()) return table;
    EventTable out = table;
    out.rows.clear();
    for (const auto& e : table.rows) {
        bool drop = false;
        for (const auto& rule : spec.drop_rules) {
            std::string v = field_value(table, e, rule.column);
            if (std::find(rule.values.begin(), rule.values.end(), v) != rule.values.end()) {
                drop = true;
                break;
            }
        }
        if (!drop) out.rows.push_back(e);
    }
    return out;
}

EventTable apply_replacement_grouping(const EventTable& table, const DesignSpec& spec)
{
    spec.validate();
    if (table.schema.mode != CsvSchema::Mode::events) return table;
    EventTable out = table;

    std::map<std::string, long> batter_counts, pitcher_counts;
    for (const auto& e : table.rows) {
        ++batter_counts[e.batter];
        ++pitcher_counts[e.pitcher];
    }
    auto low_batters = below_threshold(batter_counts, spec.batter_threshold_rank, "batter", out.warnings);
    auto low_pitchers = below_threshold(pitcher_counts, spec.pitcher_threshold_rank, "pitcher", out.warnings);

    if (!low_batters.empty() && !table.schema.batter_position) {
        throw InvalidArgument("replacement grouping of batters needs a batter_position column");
    }
    auto positions = batter_positions(table);
    for (auto& e : out.rows) {
        if (low_batters.count(e.batter)) e.batter = kReplacementPrefix + positions[e.batter];
        if (low_pitchers.count(e.pitcher)) e.pitcher = std::string(kReplacementPrefix) + "pitcher";
    }
    return out;
}

Design build_design(const EventTable& input, const DesignSpec& spec)
{
    EventTable table = apply_drop_rules(input, spec);
    if (table.rows.empty()) throw InvalidArgument("no rows left after drop rules");
    if (!table.has_outcome) throw InvalidArgument("training table has no outcome column");

    const auto& outcomes = table.schema.outcomes;
    std::vector<int> y;
    y.reserve(table.rows.size());
    for (const auto& e : table.rows) y.push_back(label_of(outcomes, e));

    Design design;
    ColumnDictionary& dict = design.dictionary;
    dict.mode = table.schema.mode;
    dict.outcomes = outcomes;
    const auto n = static_cast<Index>(table.rows.size());

    if (table.schema.mode == CsvSchema::Mode::numeric) {
        dict.features = table.schema.features;
        const auto p = static_cast<Index>(dict.features.size());
        Matrix X(n, p);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < p; ++j) X(i, j) = table.rows[static_cast<std::size_t>(i)].numeric[static_cast<std::size_t>(j)];
        }
        design.data = make_dataset(DesignMatrix(std::move(X)), std::move(y), static_cast<int>(outcomes.size()),
                                   dict.column_names(), outcomes);
        design.groups = PenaltyGroups::whole(p);
        return design;
    }

    dict.batters = sorted_unique(table, &Event::batter);
    dict.pitchers = sorted_unique(table, &Event::pitcher);
    dict.stadiums = sorted_unique(table, &Event::stadium);
    const auto nb = static_cast<Index>(dict.batters.size());
    const auto np = static_cast<Index>(dict.pitchers.size());
    const auto ns = static_cast<Index>(dict.stadiums.size());
    const Index home_col = nb + np + ns;
    const Index opp_col = home_col + 1;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 5);
    for (Index i = 0; i < n; ++i) {
        const Event& e = table.rows[static_cast<std::size_t>(i)];
        triplets.emplace_back(i, index_in(dict.batters, e.batter), 1.0);
        triplets.emplace_back(i, nb + index_in(dict.pitchers, e.pitcher), 1.0);
        triplets.emplace_back(i, nb + np + index_in(dict.stadiums, e.stadium), 1.0);
        if (e.home) triplets.emplace_back(i, home_col, 1.0);
        if (e.opposite_hand) triplets.emplace_back(i, opp_col, 1.0);
    }
    SparseMatrix X(n, opp_col + 1);
    X.setFromTriplets(triplets.begin(), triplets.end());

    design.data = make_dataset(DesignMatrix(std::move(X)), std::move(y), static_cast<int>(outcomes.size()),
                               dict.column_names(), outcomes);
    PenaltyGroups& groups = design.groups;
    groups.groups.resize(3);
    for (Index c = 0; c < nb; ++c) groups.groups[0].push_back(c);
    for (Index c = 0; c < np; ++c) groups.groups[1].push_back(nb + c);
    for (Index c = 0; c < ns; ++c) groups.groups[2].push_back(nb + np + c);
    groups.unpenalized = {home_col, opp_col};
    return design;
}

Design prepare_training_design(const EventTable& table, const DesignSpec& spec)
{
    EventTable kept = apply_drop_rules(table, spec);
    EventTable grouped = apply_replacement_grouping(kept, spec);
    Design design = build_design(grouped, DesignSpec{spec.batter_threshold_rank, spec.pitcher_threshold_rank, {}});
    for (std::size_t i = 0; i < kept.rows.size(); ++i) {
        const Event& before = kept.rows[i];
        const Event& after = grouped.rows[i];
        if (before.batter != after.batter) design.dictionary.batter_replacement[before.batter] = after.batter;
        if (before.pitcher != after.pitcher) design.dictionary.pitcher_replacement[before.pitcher] = after.pitcher;
    }
    return design;
}

EncodedRows encode_with_dictionary(const EventTable& input, const ColumnDictionary& dict, const DesignSpec& spec)
{
    EventTable table = apply_drop_rules(input, spec);
    if (table.schema.mode != dict.mode) throw SchemaError("table mode does not match the model's column dictionary");
    EncodedRows out;
    const auto n = static_cast<Index>(table.rows.size());
    for (const auto& e : table.rows) {
        out.lines.push_back(e.line);
        if (table.has_outcome) {
            auto it = std::find(dict.outcomes.begin(), dict.outcomes.end(), e.outcome);
            if (it == dict.outcomes.end()) throw SchemaError("unknown outcome label '" + e.outcome + "'", e.line);
            out.y.push_back(static_cast<int>(it - dict.outcomes.begin()) + 1);
        }
    }

    if (dict.mode == CsvSchema::Mode::numeric) {
        if (table.schema.features != dict.features) throw SchemaError("feature columns differ from the model's");
        const auto p = static_cast<Index>(dict.features.size());
        Matrix X(n, p);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < p; ++j) X(i, j) = table.rows[static_cast<std::size_t>(i)].numeric[static_cast<std::size_t>(j)];
        }
        out.X = DesignMatrix(std::move(X));
        return out;
    }

    const auto nb = static_cast<Index>(dict.batters.size());
    const auto np = static_cast<Index>(dict.pitchers.size());
    const auto ns = static_cast<Index>(dict.stadiums.size());
    auto resolve = [](const std::vector<std::string>& ids, const std::map<std::string, std::string>& replaced,
                      const std::string& id, const std::string& pooled) -> Index {
        Index c = index_in(ids, id);
        if (c >= 0) return c;
        auto it = replaced.find(id);
        if (it != replaced.end()) return index_in(ids, it->second);
        return index_in(ids, pooled);
    };

    std::vector<Eigen::Triplet<double>> triplets;
    for (Index i = 0; i < n; ++i) {
        const Event& e = table.rows[static_cast<std::size_t>(i)];
        Index b = resolve(dict.batters, dict.batter_replacement, e.batter, kReplacementPrefix + e.batter_position);
        if (b < 0) throw SchemaError("unseen batter '" + e.batter + "' with no replacement-level column", e.line);
        Index p = resolve(dict.pitchers, dict.pitcher_replacement, e.pitcher, std::string(kReplacementPrefix) + "pitcher");
        if (p < 0) throw SchemaError("unseen pitcher '" + e.pitcher + "' with no replacement-level column", e.line);
        Index s = index_in(dict.stadiums, e.stadium);
        if (s < 0) throw SchemaError("unseen stadium '" + e.stadium + "'", e.line);
        triplets.emplace_back(i, b, 1.0);
        triplets.emplace_back(i, nb + p, 1.0);
        triplets.emplace_back(i, nb + np + s, 1.0);
        if (e.home) triplets.emplace_back(i, nb + np + ns, 1.0);
        if (e.opposite_hand) triplets.emplace_back(i, nb + np + ns + 1, 1.0);
    }
    SparseMatrix X(n, nb + np + ns + 2);
    X.setFromTriplets(triplets.begin(), triplets.end());
    out.X = DesignMatrix(std::move(X));
    return out;
}

} // namespace npmr
