#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "stclust/cli.hpp"
#include "stclust/csv.hpp"

using namespace stclust;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / "stclust_cli" / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

const std::string kPrescriptions = std::string(STCLUST_DATA_DIR) + "/prescriptions_small.csv";
const std::string kLookup = std::string(STCLUST_DATA_DIR) + "/postcodes_small.csv";

} // namespace

TEST_CASE("cli simulate: output shape, manifest, reproducibility") {
    TempDir dir("simulate");
    const auto points = dir.file("pts.csv");
    const auto truth = dir.file("truth.csv");
    REQUIRE(run_cli({"simulate", "--out", points, "--truth-out", truth, "--seed", "11",
                     "--per-component", "50"}) == 0);

    const CsvTable pts = read_csv(points);
    CHECK(pts.header == std::vector<std::string>{"x", "y", "truth"});
    CHECK(pts.rows.size() == 400); // 4 centers x 2 components x 50
    CHECK(read_csv(truth).rows.size() == 400);
    CHECK(fs::exists(points + ".manifest"));

    // same seed, byte-identical output
    const std::string digest = file_digest(points);
    REQUIRE(run_cli({"simulate", "--out", points, "--truth-out", truth, "--seed", "11",
                     "--per-component", "50"}) == 0);
    CHECK(file_digest(points) == digest);

    // usage errors exit with 2
    CHECK(run_cli({"simulate", "--out", points, "--truth-out", truth, "--per-component", "0"}) ==
          2);
    CHECK(run_cli({"simulate"}) == 2);
    CHECK(run_cli({"no-such-command"}) == 2);
}

TEST_CASE("cli cluster: labels, neutrality at tiny steepness, errors") {
    TempDir dir("cluster");
    const auto points = dir.file("pts.csv");
    const auto truth = dir.file("truth.csv");
    REQUIRE(run_cli({"simulate", "--out", points, "--truth-out", truth, "--seed", "2",
                     "--per-component", "75"}) == 0);

    const auto vanilla = dir.file("vanilla.csv");
    const auto weighted = dir.file("weighted.csv");
    REQUIRE(run_cli({"cluster", "--input", points, "--eps1", "0.3", "--min-pts", "6", "--out",
                     vanilla}) == 0);
    REQUIRE(run_cli({"cluster", "--input", points, "--eps1", "0.3", "--min-pts", "6",
                     "--weighted", "--steepness", "0.000001", "--out", weighted}) == 0);

    const CsvTable a = read_csv(vanilla);
    const CsvTable b = read_csv(weighted);
    CHECK(a.header == std::vector<std::string>{"id", "cluster", "role"});
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i] == b.rows[i]);

    CHECK(run_cli({"cluster", "--input", dir.file("missing.csv"), "--eps1", "1", "--min-pts",
                   "2", "--out", dir.file("x.csv")}) == 1);
    // eps2 on a file without series columns is a runtime error
    CHECK(run_cli({"cluster", "--input", points, "--eps1", "0.3", "--eps2", "5", "--min-pts",
                   "6", "--out", dir.file("x.csv")}) == 1);
}

TEST_CASE("cli eval: identical files score perfectly") {
    TempDir dir("eval");
    const auto points = dir.file("pts.csv");
    const auto truth = dir.file("truth.csv");
    REQUIRE(run_cli({"simulate", "--out", points, "--truth-out", truth, "--seed", "3",
                     "--per-component", "25"}) == 0);

    const auto report = dir.file("report.csv");
    REQUIRE(run_cli({"eval", "--pred", truth, "--truth", truth, "--out", report}) == 0);
    const CsvTable rep = read_csv(report);
    CHECK(rep.header ==
          std::vector<std::string>{"n", "outliers", "correct", "incorrect", "ari"});
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0][0] == "200");
    CHECK(rep.rows[0][1] == "0");
    CHECK(rep.rows[0][2] == "200");
    CHECK(rep.rows[0][3] == "0");
    CHECK(rep.rows[0][4] == "1");
}

TEST_CASE("cli table1: row layout and win-rate summary") {
    TempDir dir("table1");
    const auto out = dir.file("comparison.csv");
    REQUIRE(run_cli({"table1", "--out", out, "--seeds", "3", "--per-component", "60",
                     "--steepness", "4"}) == 0);
    const CsvTable t = read_csv(out);
    CHECK(t.header == std::vector<std::string>{"seed", "method", "outliers", "correct",
                                               "incorrect", "ari"});
    REQUIRE(t.rows.size() == 9); // 3 seeds x 3 methods
    // sorted by (seed, method): dbscan < kmeans < weighted
    CHECK(t.rows[0][1] == "dbscan");
    CHECK(t.rows[1][1] == "kmeans");
    CHECK(t.rows[2][1] == "weighted");
    CHECK(t.rows[0][0] == t.rows[2][0]);
    // correct + incorrect == n for every row
    for (const auto& row : t.rows) CHECK(std::stol(row[3]) + std::stol(row[4]) == 4 * 2 * 60);
}

TEST_CASE("cli knn and kdegrid exports") {
    TempDir dir("profiles");
    const auto points = dir.file("pts.csv");
    const auto truth = dir.file("truth.csv");
    REQUIRE(run_cli({"simulate", "--out", points, "--truth-out", truth, "--seed", "4",
                     "--per-component", "30"}) == 0);

    const auto profile = dir.file("knn.csv");
    REQUIRE(run_cli({"knn", "--input", points, "--k", "4", "--out", profile}) == 0);
    const CsvTable p = read_csv(profile);
    CHECK(p.header == std::vector<std::string>{"rank", "distance"});
    CHECK(p.rows.size() == 240);
    // profile is non-increasing
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& row : p.rows) {
        const double v = std::stod(row[1]);
        CHECK(v <= prev);
        prev = v;
    }

    const auto grid = dir.file("grid.csv");
    REQUIRE(run_cli({"kdegrid", "--input", points, "--out", grid, "--nx", "10", "--ny", "8"}) ==
            0);
    const CsvTable g = read_csv(grid);
    CHECK(g.header == std::vector<std::string>{"x", "y", "density"});
    CHECK(g.rows.size() == 80);
}

TEST_CASE("cli ingest: fixture to practice table plus GeoJSON round") {
    TempDir dir("ingest");
    const auto table = dir.file("table.csv");
    const auto drops = dir.file("drops.csv");
    REQUIRE(run_cli({"ingest", "--prescriptions", kPrescriptions, "--lookup", kLookup, "--drug",
                     "Amoxicillin", "--from", "201601", "--to", "201604", "--out", table,
                     "--drops", drops}) == 0);

    const CsvTable t = read_csv(table);
    CHECK(t.rows.size() == 6);
    CHECK(t.header.size() == 2 + 4 + 2);
    const CsvTable d = read_csv(drops);
    REQUIRE(d.rows.size() == 2);
    CHECK(d.rows[0][0] == "P300");
    CHECK(d.rows[1][0] == "P400");

    // the practice table is valid geographic cluster input
    const auto labels = dir.file("labels.csv");
    const auto geojson = dir.file("practices.geojson");
    REQUIRE(run_cli({"cluster", "--input", table, "--eps1", "100", "--eps2", "50", "--min-pts",
                     "2", "--out", labels, "--geojson", geojson}) == 0);
    CHECK(read_csv(labels).rows.size() == 6);
    CHECK(fs::exists(geojson));
    // ids come from the practice column
    CHECK(read_csv(labels).rows[0][0] == "P100");
}

TEST_CASE("cli config file: flat key=value, flags win, unknown keys rejected") {
    TempDir dir("config");
    const auto points = dir.file("pts.csv");
    const auto truth = dir.file("truth.csv");

    const auto cfg = dir.file("run.cfg");
    {
        std::ofstream out(cfg);
        out << "seed = 5\nper-component = 40\n";
    }
    REQUIRE(run_cli({"simulate", "--config", cfg, "--out", points, "--truth-out", truth}) == 0);
    CHECK(read_csv(points).rows.size() == 320);

    // a flag overrides the config value
    REQUIRE(run_cli({"simulate", "--config", cfg, "--per-component", "10", "--out", points,
                     "--truth-out", truth}) == 0);
    CHECK(read_csv(points).rows.size() == 80);

    const auto bad = dir.file("bad.cfg");
    {
        std::ofstream out(bad);
        out << "per-component = 40\nno-such-key = 1\n";
    }
    CHECK(run_cli({"simulate", "--config", bad, "--out", points, "--truth-out", truth}) == 2);
}
