#include <gtest/gtest.h>

#include <sstream>

#include "npmr/errors.hpp"
#include "npmr/ingestion.hpp"
#include "npmr/model.hpp"
#include "support.hpp"

using namespace npmr;

namespace {

CsvSchema event_schema(bool with_position = true)
{
    std::string text = R"({"outcomes": ["F", "G", "K"])";
    if (with_position) text += R"(, "batter_position": "position")";
    text += "}";
    return CsvSchema::from_json_text(text);
}

EventTable parse(const std::string& text, const CsvSchema& schema, bool require_outcome = true)
{
    std::istringstream in(text);
    return parse_csv(in, schema, require_outcome);
}

const char* kHeader = "batter_id,pitcher_id,stadium_id,home,opposite_hand,position,outcome\n";

// Three batters; c has the fewest plate appearances.
const char* kFiveRows =
    "batter_id,pitcher_id,stadium_id,home,opposite_hand,position,outcome\n"
    "a,p1,s1,1,0,C,F\n"
    "a,p2,s1,0,1,C,G\n"
    "b,p1,s1,1,1,SS,K\n"
    "b,p2,s1,0,0,SS,F\n"
    "c,p1,s1,1,0,SS,G\n";

} // namespace

TEST(CsvSchema, RoundTripAndValidation)
{
    CsvSchema s = event_schema();
    CsvSchema again = CsvSchema::from_json_text(s.to_json_text());
    EXPECT_EQ(again.outcomes, s.outcomes);
    EXPECT_EQ(again.batter_position, s.batter_position);
    EXPECT_THROW(CsvSchema::from_json_text(R"({"outcomes": ["F"]})"), SchemaError);
    EXPECT_THROW(CsvSchema::from_json_text(R"({"outcomes": ["F", "F"]})"), SchemaError);
    EXPECT_THROW(CsvSchema::from_json_text(R"({"outcomes": ["F", "G"], "mode": "tabular"})"), SchemaError);
    EXPECT_THROW(CsvSchema::from_json_text("{not json"), SchemaError);
    EXPECT_THROW(CsvSchema::load("/nonexistent/schema.json"), InputError);
}

TEST(LoadCsv, HeaderOnlyGivesEmptyTable)
{
    EventTable t = parse(kHeader, event_schema());
    EXPECT_EQ(t.size(), 0u);
}

TEST(LoadCsv, TypedRowsAndRoundTrip)
{
    std::string text = kHeader;
    const char* outcomes[] = {"F", "G", "K"};
    for (int i = 0; i < 10; ++i) {
        text += "b" + std::to_string(i % 3) + ",p" + std::to_string(i % 4) + ",s" + std::to_string(i % 2) + "," +
                std::to_string(i % 2) + "," + std::to_string((i / 2) % 2) + ",CF," + outcomes[i % 3] + "\n";
    }
    EventTable t = parse(text, event_schema());
    ASSERT_EQ(t.size(), 10u);
    EXPECT_EQ(t.rows[3].batter, "b0");
    EXPECT_EQ(t.rows[3].pitcher, "p3");
    EXPECT_EQ(t.rows[3].home, 1);
    EXPECT_EQ(t.rows[3].opposite_hand, 1);
    EXPECT_EQ(t.rows[3].outcome, "F");
    EXPECT_EQ(t.rows[3].line, 5u);
    std::ostringstream out;
    write_csv(out, t);
    EXPECT_EQ(out.str(), text);
}

TEST(LoadCsv, ExtraColumnsRoundTrip)
{
    std::string text = "inning,batter_id,pitcher_id,stadium_id,home,opposite_hand,position,outcome,note\n"
                       "1,a,p,s,0,1,C,K,\"x, y\"\n";
    EventTable t = parse(text, event_schema());
    ASSERT_EQ(t.rows[0].extras.size(), 2u);
    EXPECT_EQ(t.rows[0].extras[1], "x, y");
    std::ostringstream out;
    write_csv(out, t);
    EXPECT_EQ(out.str(), text);
}

TEST(LoadCsv, BadFlagNamesLine)
{
    std::string text = std::string(kHeader) + "a,p,s,2,0,C,F\n";
    try {
        parse(text, event_schema());
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(LoadCsv, MissingColumnIsSchemaError)
{
    EXPECT_THROW(parse("batter_id,pitcher_id,home,opposite_hand,position,outcome\n", event_schema()), SchemaError);
    EXPECT_THROW(parse(std::string(kHeader) + "a,p,s,0,0,C\n", event_schema()), SchemaError);
    EXPECT_THROW(load_csv("/nonexistent/table.csv", event_schema()), InputError);
}

TEST(LoadCsv, OutcomeOptionalForPrediction)
{
    EventTable t = parse("batter_id,pitcher_id,stadium_id,home,opposite_hand,position\na,p,s,0,0,C\n", event_schema(),
                         false);
    EXPECT_FALSE(t.has_outcome);
    EXPECT_EQ(t.size(), 1u);
}

TEST(ReplacementGrouping, AllAboveThresholdUnchanged)
{
    EventTable t = parse(kFiveRows, event_schema());
    DesignSpec spec{3, 2, {}};
    EventTable g = apply_replacement_grouping(t, spec);
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_EQ(g.rows[i].batter, t.rows[i].batter);
        EXPECT_EQ(g.rows[i].pitcher, t.rows[i].pitcher);
    }
}

TEST(ReplacementGrouping, FiveRowFixture)
{
    EventTable t = parse(kFiveRows, event_schema());
    DesignSpec spec{2, 2, {}};
    EventTable g = apply_replacement_grouping(t, spec);
    EXPECT_EQ(g.rows[0].batter, "a");
    EXPECT_EQ(g.rows[2].batter, "b");
    EXPECT_EQ(g.rows[4].batter, "replacement-level SS");
    // p1 has 3 appearances, p2 has 2: both at or above the rank-2 count.
    EXPECT_EQ(g.rows[1].pitcher, "p2");

    DesignSpec pitchers{3, 1, {}};
    EventTable gp = apply_replacement_grouping(t, pitchers);
    EXPECT_EQ(gp.rows[1].pitcher, "replacement-level pitcher");
    EXPECT_EQ(gp.rows[0].pitcher, "p1");
}

TEST(ReplacementGrouping, TiesKeptAboveTheLine)
{
    EventTable t = parse(kFiveRows, event_schema());
    // a and b both have 2 appearances; rank 1 count is 2, so both stay.
    EventTable g = apply_replacement_grouping(t, DesignSpec{1, 360, {}});
    EXPECT_EQ(g.rows[0].batter, "a");
    EXPECT_EQ(g.rows[2].batter, "b");
    EXPECT_EQ(g.rows[4].batter, "replacement-level SS");
}

TEST(ReplacementGrouping, Idempotent)
{
    EventTable t = parse(kFiveRows, event_schema());
    DesignSpec spec{2, 1, {}};
    EventTable once = apply_replacement_grouping(t, spec);
    EventTable twice = apply_replacement_grouping(once, spec);
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_EQ(once.rows[i].batter, twice.rows[i].batter);
        EXPECT_EQ(once.rows[i].pitcher, twice.rows[i].pitcher);
    }
}

TEST(ReplacementGrouping, TooFewPlayersWarns)
{
    EventTable t = parse(kFiveRows, event_schema());
    EventTable g = apply_replacement_grouping(t, DesignSpec{10, 10, {}});
    EXPECT_EQ(g.warnings.size(), 2u);
    EXPECT_EQ(g.rows[4].batter, "c");
}

TEST(ReplacementGrouping, BattersNeedPositions)
{
    std::string text = "batter_id,pitcher_id,stadium_id,home,opposite_hand,outcome\n"
                       "a,p,s,0,0,F\na,p,s,0,0,F\nb,p,s,0,0,G\n";
    EventTable t = parse(text, event_schema(false));
    EXPECT_THROW(apply_replacement_grouping(t, DesignSpec{1, 1, {}}), InvalidArgument);
}

TEST(BuildDesign, FourEventFixture)
{
    std::string text = std::string(kHeader) +
                       "b2,p1,s1,1,0,C,F\n"
                       "b1,p2,s1,0,1,C,G\n"
                       "b1,p1,s1,1,1,C,K\n"
                       "b2,p2,s1,0,0,C,F\n";
    Design d = build_design(parse(text, event_schema()), DesignSpec{});
    Matrix X = d.data.X.to_dense();
    ASSERT_EQ(X.rows(), 4);
    ASSERT_EQ(X.cols(), 7);
    EXPECT_TRUE(d.data.X.is_sparse());
    Matrix expected(4, 7);
    expected << 0, 1, 1, 0, 1, 1, 0,
                1, 0, 0, 1, 1, 0, 1,
                1, 0, 1, 0, 1, 1, 1,
                0, 1, 0, 1, 1, 0, 0;
    EXPECT_EQ(X, expected);
    for (Index i = 0; i < 4; ++i) EXPECT_EQ(X.row(i).head(5).sum(), 3.0);
    EXPECT_EQ(d.data.y, (std::vector<int>{1, 2, 3, 1}));
    EXPECT_EQ(d.data.K, 3);
    EXPECT_EQ(d.groups.groups, (std::vector<std::vector<Index>>{{0, 1}, {2, 3}, {4}}));
    EXPECT_EQ(d.groups.unpenalized, (std::vector<Index>{5, 6}));
    EXPECT_EQ(d.data.feature_names,
              (std::vector<std::string>{"batter:b1", "batter:b2", "pitcher:p1", "pitcher:p2", "stadium:s1", "home",
                                        "opposite_hand"}));
}

TEST(BuildDesign, NineOutcomeVocabulary)
{
    CsvSchema s = CsvSchema::from_json_text(
        R"({"outcomes": ["F", "G", "K", "BB", "HBP", "1B", "2B", "3B", "HR"]})");
    Design d = build_design(parse("batter_id,pitcher_id,stadium_id,home,opposite_hand,outcome\na,p,s,0,0,HR\n", s),
                            DesignSpec{});
    EXPECT_EQ(d.data.K, 9);
    EXPECT_EQ(d.data.y, std::vector<int>{9});
}

TEST(BuildDesign, UnknownOutcomeNamesRow)
{
    std::string text = std::string(kHeader) + "a,p,s,0,0,C,F\na,p,s,0,0,C,XX\n";
    try {
        build_design(parse(text, event_schema()), DesignSpec{});
        FAIL() << "expected InvalidArgument";
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(BuildDesign, DropRules)
{
    std::string text = "batter_id,pitcher_id,stadium_id,home,opposite_hand,position,outcome,event\n"
                       "a,p,s,0,0,C,F,pa\n"
                       "a,p,s,0,0,C,K,ibb\n"
                       "b,p,s,0,0,P,G,pa\n";
    EventTable t = parse(text, event_schema());
    DesignSpec spec = DesignSpec::from_json_text(
        R"({"design": {"drop": [{"column": "event", "values": ["ibb"]}, {"column": "position", "values": ["P"]}]}})");
    Design d = build_design(t, spec);
    EXPECT_EQ(d.data.n(), 1);
    DesignSpec unknown;
    unknown.drop_rules = {{"nope", {"x"}}};
    EXPECT_THROW(build_design(t, unknown), SchemaError);
}

TEST(BuildDesign, DeterministicFromIdenticalInput)
{
    EventTable t = parse(kFiveRows, event_schema());
    Design a = build_design(t, DesignSpec{});
    Design b = build_design(t, DesignSpec{});
    EXPECT_EQ(a.data.X.to_dense(), b.data.X.to_dense());
    EXPECT_EQ(a.data.y, b.data.y);
    EXPECT_EQ(a.data.feature_names, b.data.feature_names);
}

TEST(BuildDesign, NumericPassthrough)
{
    CsvSchema s = CsvSchema::from_json_text(R"({"mode": "numeric", "features": ["x1", "x2"], "outcomes": ["a", "b"]})");
    Design d = build_design(parse("x2,x1,outcome\n1.5,2,a\n-3,0.25,b\n", s), DesignSpec{});
    Matrix expected(2, 2);
    expected << 2, 1.5, 0.25, -3;
    EXPECT_EQ(d.data.X.to_dense(), expected);
    EXPECT_FALSE(d.data.X.is_sparse());
    EXPECT_EQ(d.groups.groups.size(), 1u);
    EXPECT_THROW(parse("x2,x1,outcome\nfoo,2,a\n", s), SchemaError);
}

TEST(BuildDesign, WithinGroupShiftInvariance)
{
    Rng rng(401);
    std::string text = kHeader;
    for (int i = 0; i < 30; ++i) {
        text += "b" + std::to_string(i % 5) + ",p" + std::to_string(i % 4) + ",s" + std::to_string(i % 3) + "," +
                std::to_string(i % 2) + "," + std::to_string(i % 3 == 0) + ",C," + "FGK"[i % 3] + "\n";
    }
    Design d = build_design(parse(text, event_schema()), DesignSpec{});
    Matrix B = npmr::testing::random_matrix(d.data.p(), 3, rng);
    Vector a = npmr::testing::random_matrix(3, 1, rng);
    Matrix P0 = predict_probabilities(a, B, d.data.X);
    for (const auto& g : d.groups.groups) {
        Vector c = npmr::testing::random_matrix(3, 1, rng);
        Matrix shifted = B;
        for (Index r : g) shifted.row(r) += c.transpose();
        Matrix P1 = predict_probabilities(a - c, shifted, d.data.X);
        EXPECT_LE((P0 - P1).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(EncodeWithDictionary, UnseenIdsMapToReplacementColumns)
{
    EventTable train = parse(kFiveRows, event_schema());
    Design d = prepare_training_design(train, DesignSpec{2, 1, {}});
    EXPECT_EQ(d.dictionary.batter_replacement.at("c"), "replacement-level SS");
    EXPECT_EQ(d.dictionary.pitcher_replacement.at("p2"), "replacement-level pitcher");

    std::string test = std::string(kHeader) +
                       "c,p1,s1,0,0,SS,F\n"
                       "zz,p9,s1,1,0,SS,K\n"
                       "a,p2,s1,0,1,C,G\n";
    EncodedRows rows = encode_with_dictionary(parse(test, event_schema()), d.dictionary, DesignSpec{2, 1, {}});
    Matrix X = rows.X.to_dense();
    auto names = d.dictionary.column_names();
    auto col = [&](const std::string& name) {
        return static_cast<Index>(std::find(names.begin(), names.end(), name) - names.begin());
    };
    EXPECT_EQ(X(0, col("batter:replacement-level SS")), 1.0);
    EXPECT_EQ(X(1, col("batter:replacement-level SS")), 1.0);
    EXPECT_EQ(X(1, col("pitcher:replacement-level pitcher")), 1.0);
    EXPECT_EQ(X(2, col("pitcher:replacement-level pitcher")), 1.0);
    EXPECT_EQ(X(2, col("batter:a")), 1.0);
    EXPECT_EQ(rows.y, (std::vector<int>{1, 3, 2}));
}

TEST(EncodeWithDictionary, UnseenIdWithoutReplacementIsRowError)
{
    EventTable train = parse(kFiveRows, event_schema());
    Design d = prepare_training_design(train, DesignSpec{3, 2, {}});
    std::string test = std::string(kHeader) + "a,p1,s1,0,0,C,F\nnew,p1,s1,0,0,CF,F\n";
    try {
        encode_with_dictionary(parse(test, event_schema()), d.dictionary, DesignSpec{});
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("'new'"), std::string::npos);
    }
}
