#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stclust/csv.hpp"
#include "stclust/ingestion.hpp"

using namespace stclust;

namespace {

const std::string kPrescriptions = std::string(STCLUST_DATA_DIR) + "/prescriptions_small.csv";
const std::string kLookup = std::string(STCLUST_DATA_DIR) + "/postcodes_small.csv";

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "stclust_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("month range arithmetic") {
    const MonthRange range = make_month_range(201510, 201709);
    CHECK(range.length() == 24);
    CHECK(range.slot(201510) == 0);
    CHECK(range.slot(201709) == 23);
    CHECK(range.slot(201601) == 3);
    CHECK(range.slot(201509) == -1);
    CHECK(range.slot(201710) == -1);
    const auto months = range.months();
    REQUIRE(months.size() == 24);
    CHECK(months.front() == 201510);
    CHECK(months[3] == 201601);
    CHECK(months.back() == 201709);

    CHECK_THROWS_AS(make_month_range(201613, 201701), std::invalid_argument);
    CHECK_THROWS_AS(make_month_range(201704, 201701), std::invalid_argument);
}

TEST_CASE("load_prescriptions aggregates the fixture as hand-computed") {
    const MonthRange range = make_month_range(201601, 201604);
    const AggregatedCounts counts = load_prescriptions(kPrescriptions, "Amoxicillin", range);

    // Distinct practices matching the drug filter (P500 never matches).
    REQUIRE(counts.size() == 8);
    CHECK(counts.count("P500") == 0);

    // Duplicate rows for the same practice/month sum up.
    CHECK(counts.at("P100").at(0) == 7.0); // 3 + 4
    CHECK(counts.at("P100").at(2) == 8.0); // 6 + 2
    // Case-insensitive substring matching picks up every spelling.
    CHECK(counts.at("P700").at(0) == 3.0); // three case variants of 1 each
    // Months outside the range are dropped.
    CHECK(counts.at("P800").count(4) == 0);
    CHECK(counts.at("P900").size() == 4);
}

TEST_CASE("join_locations produces the exact expected practice table") {
    const MonthRange range = make_month_range(201601, 201604);
    const AggregatedCounts counts = load_prescriptions(kPrescriptions, "Amoxicillin", range);
    DropReport drops;
    const PracticeTable table = join_locations(counts, kLookup, range, &drops);

    // P300 has no lookup row; P400 has an empty latitude.
    CHECK(drops.retained == 6);
    CHECK(drops.dropped == std::vector<std::string>{"P300", "P400"});
    CHECK(drops.retained + static_cast<Index>(drops.dropped.size()) ==
          static_cast<Index>(counts.size()));

    REQUIRE(table.size() == 6);
    const std::vector<std::string> codes = {"P100", "P200", "P600", "P700", "P800", "P900"};
    const std::vector<std::string> postcodes = {"EH8 9JS", "G1 1XQ",   "AB10 1AB",
                                                "DD1 4HN", "KY16 9AJ", "PA1 1AB"};
    Matrix expected(6, 4);
    expected << 7, 5, 8, 5,      // P100
        10, 11, 0, 15,           // P200 (201603 zero-filled)
        20, 21, 22, 30,          // P600
        3, 5, 5, 6,              // P700
        7, 8, 9, 10,             // P800
        2, 4, 6, 8;              // P900
    for (Index i = 0; i < 6; ++i) {
        CHECK(table.practices[static_cast<std::size_t>(i)].code == codes[static_cast<std::size_t>(i)]);
        CHECK(table.practices[static_cast<std::size_t>(i)].postcode ==
              postcodes[static_cast<std::size_t>(i)]);
    }
    CHECK(table.series == expected);
    CHECK(table.practices[0].location.lat == doctest::Approx(55.9445));
    CHECK(table.practices[0].location.lon == doctest::Approx(-3.1892));
}

TEST_CASE("aggregation is order-independent") {
    const MonthRange range = make_month_range(201601, 201604);
    const CsvTable original = read_csv(kPrescriptions);

    auto shuffled_rows = original.rows;
    std::shuffle(shuffled_rows.begin(), shuffled_rows.end(), std::mt19937{2024});
    const auto path = temp_file("shuffled_prescriptions.csv");
    write_csv(path.string(), original.header, shuffled_rows);

    const AggregatedCounts a = load_prescriptions(kPrescriptions, "Amoxicillin", range);
    const AggregatedCounts b = load_prescriptions(path.string(), "Amoxicillin", range);
    CHECK(a == b);
}

TEST_CASE("ingestion error paths") {
    const MonthRange range = make_month_range(201601, 201604);
    CHECK_THROWS_AS(load_prescriptions("no_such_file.csv", "x", range), std::runtime_error);

    const auto bad_cols = temp_file("bad_cols.csv");
    {
        std::ofstream out(bad_cols);
        out << "practice,period,drug,items\nP1,201601,Amoxicillin,3\n";
    }
    CHECK_THROWS_WITH_AS(load_prescriptions(bad_cols.string(), "Amox", range),
                         doctest::Contains("month"), std::runtime_error);

    const auto bad_month = temp_file("bad_month.csv");
    {
        std::ofstream out(bad_month);
        out << "practice,month,drug,items\nP1,2016-01,Amoxicillin,3\n";
    }
    CHECK_THROWS_WITH_AS(load_prescriptions(bad_month.string(), "Amox", range),
                         doctest::Contains("row 2"), std::runtime_error);

    // All practices coordinate-less: zero retained is an error.
    const auto empty_lookup = temp_file("empty_lookup.csv");
    {
        std::ofstream out(empty_lookup);
        out << "practice,postcode,latitude,longitude\n";
    }
    const AggregatedCounts counts = load_prescriptions(kPrescriptions, "Amoxicillin", range);
    CHECK_THROWS_AS(join_locations(counts, empty_lookup.string(), range), std::runtime_error);
}

TEST_CASE("practice table CSV round trip") {
    const MonthRange range = make_month_range(201601, 201604);
    const AggregatedCounts counts = load_prescriptions(kPrescriptions, "Amoxicillin", range);
    const PracticeTable table = join_locations(counts, kLookup, range);

    const auto path = temp_file("table.csv");
    write_practice_table_csv(table, path.string());

    const CsvTable csv = read_csv(path.string());
    CHECK(csv.header == std::vector<std::string>{"practice", "postcode", "201601", "201602",
                                                 "201603", "201604", "lat", "lon"});

    const PracticeTable back = read_practice_table_csv(path.string());
    REQUIRE(back.size() == table.size());
    CHECK(back.series == table.series);
    for (Index i = 0; i < table.size(); ++i) {
        const auto& a = table.practices[static_cast<std::size_t>(i)];
        const auto& b = back.practices[static_cast<std::size_t>(i)];
        CHECK(a.code == b.code);
        CHECK(a.location.lat == b.location.lat); // full-precision round trip
        CHECK(a.location.lon == b.location.lon);
    }
}

TEST_CASE("export_geojson writes a valid FeatureCollection") {
    PracticeTable table;
    table.range = make_month_range(201601, 201602);
    table.practices = {{"A1", "EH1", {55.95, -3.19}},
                       {"B2", "G1", {55.86, -4.25}},
                       {"C3", "IV1", {57.48, -4.22}}};
    table.series = Matrix::Zero(3, 2);

    Clustering clustering;
    clustering.labels.resize(3);
    clustering.labels << 1, 2, 0;
    clustering.roles = {Role::Core, Role::Border, Role::Noise};
    clustering.cluster_count = 2;

    const auto path = temp_file("practices.geojson");
    export_geojson(table, clustering, path.string());

    std::ifstream in(path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc.at("type") == "FeatureCollection");
    REQUIRE(doc.at("features").size() == 3);
    const auto& first = doc.at("features").at(0);
    CHECK(first.at("type") == "Feature");
    CHECK(first.at("geometry").at("type") == "Point");
    // RFC 7946 order: lon, lat -- and lossless coordinates.
    CHECK(first.at("geometry").at("coordinates").at(0).get<double>() == -3.19);
    CHECK(first.at("geometry").at("coordinates").at(1).get<double>() == 55.95);
    CHECK(first.at("properties").at("practiceCode") == "A1");
    CHECK(first.at("properties").at("cluster") == 1);
    CHECK(first.at("properties").at("role") == "core");
    CHECK(doc.at("features").at(2).at("properties").at("cluster") == 0);
    CHECK(doc.at("features").at(2).at("properties").at("role") == "noise");

    Clustering short_run = clustering;
    short_run.labels.resize(2);
    CHECK_THROWS_AS(export_geojson(table, short_run, path.string()), std::invalid_argument);
}

TEST_CASE("csv parser handles quoting") {
    std::istringstream in("a,b\n\"x,y\",\"he said \"\"hi\"\"\"\n1,2\n");
    const CsvTable t = parse_csv(in, "test");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == "x,y");
    CHECK(t.rows[0][1] == "he said \"hi\"");
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("q\"q") == "\"q\"\"q\"");
}
