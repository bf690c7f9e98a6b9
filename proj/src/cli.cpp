#include "stclust/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "stclust/clustering.hpp"
#include "stclust/csv.hpp"
#include "stclust/dtw.hpp"
#include "stclust/geometry.hpp"
#include "stclust/ingestion.hpp"
#include "stclust/kde.hpp"
#include "stclust/simulation.hpp"
#include "stclust/weighting.hpp"

namespace stclust {

namespace {

// ---------------------------------------------------------------------------
// Run manifest: every command records its resolved parameters, seed and input
// digests next to its primary output, as flat `key = value` lines.

class Manifest {
  public:
    void set(const std::string& key, const std::string& value) { entries_[key] = value; }
    void set(const std::string& key, double value) { set(key, format_double(value)); }
    void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, int value) { set(key, std::to_string(value)); }

    void input(const std::string& path) { set("digest." + path, "fnv1a64:" + file_digest(path)); }

    void write(const std::string& output_path) const {
        const std::string path = output_path + ".manifest";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write manifest: " + path);
        for (const auto& [key, value] : entries_) out << key << " = " << value << '\n';
        if (!out) throw std::runtime_error("write failed: " + path);
    }

  private:
    std::map<std::string, std::string> entries_;
};

// ---------------------------------------------------------------------------
// Point/series CSV input shared by cluster, knn and kdegrid.

const std::vector<std::string> kMetaColumns = {"id",  "practice", "postcode", "x",   "y",
                                               "lat", "lon",      "truth",    "cluster", "role"};

struct PointsInput {
    bool geographic = false;
    Points coords;                 // (x, y) or (lat, lon), one row per point
    std::vector<std::string> ids;  // id/practice column, or the row index
    Matrix series;                 // n x T, T = 0 when the file has no series columns
    std::vector<GeoPoint> geo;     // filled when geographic
};

double parse_field_double(const CsvTable& table, std::size_t row, int col, const std::string& path) {
    const std::string& s = table.rows[row][static_cast<std::size_t>(col)];
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ": row " + std::to_string(row + 2) +
                                 ": unparsable number '" + s + "'");
    }
}

PointsInput load_points_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    PointsInput input;

    const int x_col = table.column("x"), y_col = table.column("y");
    const int lat_col = table.column("lat"), lon_col = table.column("lon");
    const bool planar = x_col >= 0 && y_col >= 0;
    const bool geo = lat_col >= 0 && lon_col >= 0;
    if (planar == geo)
        throw std::runtime_error(path + ": need either x,y columns or lat,lon columns");
    input.geographic = geo;

    int id_col = table.column("id");
    if (id_col < 0) id_col = table.column("practice");

    std::vector<int> series_cols;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        const auto& name = table.header[c];
        const bool meta = std::any_of(kMetaColumns.begin(), kMetaColumns.end(),
                                      [&](const std::string& m) {
                                          return m.size() == name.size() &&
                                                 std::equal(m.begin(), m.end(), name.begin(),
                                                            [](char a, char b) {
                                                                return std::tolower(a) ==
                                                                       std::tolower(b);
                                                            });
                                      });
        if (!meta) series_cols.push_back(static_cast<int>(c));
    }

    const Index n = static_cast<Index>(table.rows.size());
    if (n == 0) throw std::runtime_error(path + ": no data rows");
    input.coords.resize(n, 2);
    input.series.resize(n, static_cast<Index>(series_cols.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const Index i = static_cast<Index>(r);
        if (geo) {
            const GeoPoint p{parse_field_double(table, r, lat_col, path),
                             parse_field_double(table, r, lon_col, path)};
            if (!is_valid(p))
                throw std::runtime_error(path + ": row " + std::to_string(r + 2) +
                                         ": coordinates out of range");
            input.geo.push_back(p);
            input.coords(i, 0) = p.lat;
            input.coords(i, 1) = p.lon;
        } else {
            input.coords(i, 0) = parse_field_double(table, r, x_col, path);
            input.coords(i, 1) = parse_field_double(table, r, y_col, path);
        }
        input.ids.push_back(id_col >= 0 ? table.rows[r][static_cast<std::size_t>(id_col)]
                                        : std::to_string(r));
        for (std::size_t c = 0; c < series_cols.size(); ++c)
            input.series(i, static_cast<Index>(c)) =
                parse_field_double(table, r, series_cols[c], path);
    }
    return input;
}

Matrix spatial_matrix(const PointsInput& input) {
    if (input.geographic) return pairwise_spatial(std::span<const GeoPoint>(input.geo));
    return pairwise_spatial(input.coords);
}

double resolve_steepness(const std::string& text, const PointDensities& densities) {
    if (text == "auto") return default_steepness(densities);
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size() || !(value > 0.0))
        throw std::runtime_error("steepness must be 'auto' or a positive number, got '" + text +
                                 "'");
    return value;
}

// ---------------------------------------------------------------------------
// Subcommand option blocks.

struct SimulateOpts {
    std::string out;
    std::string truth_out;
    std::uint64_t seed = 0;
    int per_component = 300;
    double sigma_wide = 1.0;
    double sigma_tight = 0.1;
    std::string centers = "-3,-3;3,-3;-3,3;3,3";
};

std::vector<Eigen::RowVector2d> parse_centers(const std::string& text) {
    std::vector<Eigen::RowVector2d> centers;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto comma = item.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("centers must look like 'x,y;x,y;...', got '" + text + "'");
        centers.emplace_back(std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1)));
    }
    if (centers.empty()) throw std::runtime_error("centers list is empty");
    return centers;
}

void run_simulate(const SimulateOpts& opts) {
    MixtureSpec spec;
    spec.centers = parse_centers(opts.centers);
    spec.per_component = opts.per_component;
    spec.sigma_wide = opts.sigma_wide;
    spec.sigma_tight = opts.sigma_tight;
    spec.seed = opts.seed;
    const LabeledDataset data = generate(spec);

    std::vector<std::vector<std::string>> rows;
    for (Index i = 0; i < data.points.rows(); ++i)
        rows.push_back({format_double(data.points(i, 0)), format_double(data.points(i, 1)),
                        std::to_string(data.truth(i))});
    write_csv(opts.out, {"x", "y", "truth"}, rows);

    std::vector<std::vector<std::string>> truth_rows;
    for (Index i = 0; i < data.truth.size(); ++i)
        truth_rows.push_back({std::to_string(i), std::to_string(data.truth(i))});
    write_csv(opts.truth_out, {"id", "cluster"}, truth_rows);

    Manifest manifest;
    manifest.set("command", "simulate");
    manifest.set("seed", opts.seed);
    manifest.set("per_component", opts.per_component);
    manifest.set("sigma_wide", opts.sigma_wide);
    manifest.set("sigma_tight", opts.sigma_tight);
    manifest.set("centers", opts.centers);
    manifest.set("out", opts.out);
    manifest.set("truth_out", opts.truth_out);
    manifest.write(opts.out);

    std::cout << "simulate: n=" << data.points.rows() << " clusters=" << spec.centers.size()
              << " -> " << opts.out << "\n";
}

struct ClusterOpts {
    std::string input;
    std::string out;
    double eps1 = 0.0;
    std::optional<double> eps2;
    int min_pts = 1;
    bool weighted = false;
    std::string steepness = "auto";
    bool znorm = false;
    std::string geojson_out;
    std::string kdegrid_out;
    Index grid_nx = 200, grid_ny = 200;
    std::string knn_out;
    int knn_k = 0; // 0 = min_pts
};

void write_labels_csv(const std::string& path, const std::vector<std::string>& ids,
                      const Clustering& result) {
    std::vector<std::vector<std::string>> rows;
    for (Index i = 0; i < result.labels.size(); ++i)
        rows.push_back({ids[static_cast<std::size_t>(i)], std::to_string(result.labels(i)),
                        to_string(result.roles[static_cast<std::size_t>(i)])});
    write_csv(path, {"id", "cluster", "role"}, rows);
}

void write_profile_csv(const std::string& path, const Array& profile) {
    std::vector<std::vector<std::string>> rows;
    for (Index i = 0; i < profile.size(); ++i)
        rows.push_back({std::to_string(i + 1), format_double(profile(i))});
    write_csv(path, {"rank", "distance"}, rows);
}

void write_grid_csv(const std::string& path, const DensityGrid& grid) {
    std::vector<std::vector<std::string>> rows;
    for (Index iy = 0; iy < grid.ys.size(); ++iy)
        for (Index ix = 0; ix < grid.xs.size(); ++ix)
            rows.push_back({format_double(grid.xs(ix)), format_double(grid.ys(iy)),
                            format_double(grid.values(iy, ix))});
    write_csv(path, {"x", "y", "density"}, rows);
}

DensityGrid data_bbox_grid(const DensityField& field, const PointsInput& input, Index nx,
                           Index ny) {
    const double xmin = input.coords.col(0).minCoeff(), xmax = input.coords.col(0).maxCoeff();
    const double ymin = input.coords.col(1).minCoeff(), ymax = input.coords.col(1).maxCoeff();
    const double mx = std::max(1e-9, 0.05 * (xmax - xmin));
    const double my = std::max(1e-9, 0.05 * (ymax - ymin));
    return density_grid(field, xmin - mx, xmax + mx, ymin - my, ymax + my, nx, ny);
}

void run_cluster(const ClusterOpts& opts) {
    const PointsInput input = load_points_csv(opts.input);
    const Matrix S = spatial_matrix(input);

    Manifest manifest;
    manifest.set("command", "cluster");
    manifest.set("input", opts.input);
    manifest.input(opts.input);
    manifest.set("geographic", input.geographic ? "true" : "false");
    manifest.set("eps1", opts.eps1);
    manifest.set("min_pts", opts.min_pts);
    manifest.set("weighted", opts.weighted ? "true" : "false");
    manifest.set("znorm", opts.znorm ? "true" : "false");
    manifest.set("out", opts.out);

    Matrix M = S;
    if (opts.weighted) {
        const DensityField field = fit_density(input.coords);
        const PointDensities densities = point_densities(field);
        WeightConfig cfg;
        cfg.steepness = resolve_steepness(opts.steepness, densities);
        M = weight_matrix(S, densities, cfg);
        manifest.set("steepness", cfg.steepness);
        manifest.set("bandwidth", field.bandwidth);
    }

    DbscanParams params;
    params.eps1 = opts.eps1;
    params.min_pts = opts.min_pts;
    std::optional<Matrix> T;
    if (opts.eps2) {
        if (input.series.cols() == 0)
            throw std::runtime_error(opts.input +
                                     ": eps2 given but the file has no series columns");
        Matrix series = input.series;
        if (opts.znorm)
            for (Index i = 0; i < series.rows(); ++i)
                series.row(i) = znormalize(series.row(i).transpose().array()).matrix().transpose();
        T = pairwise_temporal(series);
        params.eps2 = *opts.eps2;
        manifest.set("eps2", *opts.eps2);
        manifest.set("series_length", static_cast<int>(input.series.cols()));
    }

    const Clustering result = dbscan(M, params, T ? &*T : nullptr);
    write_labels_csv(opts.out, input.ids, result);

    if (!opts.geojson_out.empty()) {
        if (!input.geographic)
            throw std::runtime_error("GeoJSON export needs geographic (lat,lon) input");
        PracticeTable table;
        for (Index i = 0; i < S.rows(); ++i)
            table.practices.push_back({input.ids[static_cast<std::size_t>(i)], "",
                                       input.geo[static_cast<std::size_t>(i)]});
        export_geojson(table, result, opts.geojson_out);
        manifest.set("geojson_out", opts.geojson_out);
    }
    if (!opts.kdegrid_out.empty()) {
        const DensityField field = fit_density(input.coords);
        write_grid_csv(opts.kdegrid_out, data_bbox_grid(field, input, opts.grid_nx, opts.grid_ny));
        manifest.set("kdegrid_out", opts.kdegrid_out);
    }
    if (!opts.knn_out.empty()) {
        const int k = opts.knn_k > 0 ? opts.knn_k : opts.min_pts;
        write_profile_csv(opts.knn_out, knn_distance_profile(M, k));
        manifest.set("knn_out", opts.knn_out);
        manifest.set("knn_k", k);
    }
    manifest.write(opts.out);

    const Index outliers = (result.labels == 0).count();
    std::cout << "clusters=" << result.cluster_count << " outliers=" << outliers
              << " n=" << result.labels.size() << "\n";
}

struct EvalOpts {
    std::string pred;
    std::string truth;
    std::string out;
};

ArrayXi read_labels_column(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int col = table.require_column("cluster", path);
    ArrayXi labels(static_cast<Index>(table.rows.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        labels(static_cast<Index>(r)) =
            static_cast<int>(parse_field_double(table, r, col, path));
    return labels;
}

void run_eval(const EvalOpts& opts) {
    const ArrayXi pred = read_labels_column(opts.pred);
    const ArrayXi truth = read_labels_column(opts.truth);
    const EvalReport report = evaluate(pred, truth);

    write_csv(opts.out, {"n", "outliers", "correct", "incorrect", "ari"},
              {{std::to_string(pred.size()), std::to_string(report.outliers),
                std::to_string(report.correct), std::to_string(report.incorrect),
                format_double(report.ari)}});

    Manifest manifest;
    manifest.set("command", "eval");
    manifest.set("pred", opts.pred);
    manifest.set("truth", opts.truth);
    manifest.input(opts.pred);
    manifest.input(opts.truth);
    manifest.set("out", opts.out);
    manifest.write(opts.out);

    std::cout << "outliers=" << report.outliers << " correct=" << report.correct
              << " incorrect=" << report.incorrect << " ari=" << format_double(report.ari)
              << "\n";
}

struct Table1Opts {
    std::string out;
    int seeds = 20;
    std::uint64_t seed_base = 1;
    double eps = 0.3;
    int min_pts = 6;
    int k = 4;
    int restarts = 1;  // single random start, as in the reference experiment
    int max_iters = 10;
    int per_component = 300;
    // Fixed default calibrated for the default generator (about 0.5/std of
    // its point densities); "auto" (1/std) over-compresses the gaps between
    // the four clusters and merges them.
    std::string steepness = "4";
};

void run_table1(const Table1Opts& opts) {
    std::vector<std::vector<std::string>> rows;
    int weighted_wins_both = 0, weighted_beats_kmeans = 0;

    for (int s = 0; s < opts.seeds; ++s) {
        MixtureSpec spec;
        spec.per_component = opts.per_component;
        spec.seed = opts.seed_base + static_cast<std::uint64_t>(s);

        Table1Params params;
        params.dbscan = {opts.eps, std::nullopt, opts.min_pts};
        params.weighted = {opts.eps, std::nullopt, opts.min_pts};
        params.steepness = 0.0; // run_table1 falls back to default_steepness
        if (opts.steepness != "auto") {
            std::size_t pos = 0;
            double value = 0.0;
            try {
                value = std::stod(opts.steepness, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != opts.steepness.size() || !(value > 0.0))
                throw std::runtime_error("steepness must be 'auto' or a positive number, got '" +
                                         opts.steepness + "'");
            params.steepness = value;
        }
        params.kmeans = {opts.k, opts.max_iters, opts.restarts, spec.seed};

        std::vector<Table1Row> result = run_table1(spec, params);
        std::sort(result.begin(), result.end(),
                  [](const Table1Row& a, const Table1Row& b) { return a.method < b.method; });

        const auto find = [&](const std::string& m) -> const EvalReport& {
            for (const auto& row : result)
                if (row.method == m) return row.report;
            throw std::logic_error("missing method row");
        };
        const EvalReport& vanilla = find("dbscan");
        const EvalReport& weighted = find("weighted");
        const EvalReport& km = find("kmeans");
        if (weighted.outliers < vanilla.outliers && weighted.correct > vanilla.correct)
            ++weighted_wins_both;
        if (weighted.correct > km.correct) ++weighted_beats_kmeans;

        for (const auto& row : result)
            rows.push_back({std::to_string(row.seed), row.method,
                            std::to_string(row.report.outliers),
                            std::to_string(row.report.correct),
                            std::to_string(row.report.incorrect),
                            format_double(row.report.ari)});
    }
    write_csv(opts.out, {"seed", "method", "outliers", "correct", "incorrect", "ari"}, rows);

    Manifest manifest;
    manifest.set("command", "table1");
    manifest.set("seeds", opts.seeds);
    manifest.set("seed_base", opts.seed_base);
    manifest.set("eps", opts.eps);
    manifest.set("min_pts", opts.min_pts);
    manifest.set("k", opts.k);
    manifest.set("restarts", opts.restarts);
    manifest.set("per_component", opts.per_component);
    manifest.set("steepness", opts.steepness);
    manifest.set("out", opts.out);
    manifest.write(opts.out);

    std::cout << "weighted beats dbscan on outliers+correct: " << weighted_wins_both << "/"
              << opts.seeds << "\n";
    std::cout << "weighted beats kmeans on correct: " << weighted_beats_kmeans << "/"
              << opts.seeds << "\n";
}

struct KnnOpts {
    std::string input;
    std::string out;
    int k = 4;
    std::string matrix = "spatial";
    std::string steepness = "auto";
    bool znorm = false;
};

void run_knn(const KnnOpts& opts) {
    const PointsInput input = load_points_csv(opts.input);

    Matrix M;
    if (opts.matrix == "temporal") {
        if (input.series.cols() == 0)
            throw std::runtime_error(opts.input + ": no series columns for a temporal profile");
        Matrix series = input.series;
        if (opts.znorm)
            for (Index i = 0; i < series.rows(); ++i)
                series.row(i) = znormalize(series.row(i).transpose().array()).matrix().transpose();
        M = pairwise_temporal(series);
    } else if (opts.matrix == "weighted") {
        const Matrix S = spatial_matrix(input);
        const DensityField field = fit_density(input.coords);
        const PointDensities densities = point_densities(field);
        WeightConfig cfg;
        cfg.steepness = resolve_steepness(opts.steepness, densities);
        M = weight_matrix(S, densities, cfg);
    } else if (opts.matrix == "spatial") {
        M = spatial_matrix(input);
    } else {
        throw std::runtime_error("unknown matrix kind '" + opts.matrix +
                                 "' (expected spatial, temporal or weighted)");
    }

    write_profile_csv(opts.out, knn_distance_profile(M, opts.k));

    Manifest manifest;
    manifest.set("command", "knn");
    manifest.set("input", opts.input);
    manifest.input(opts.input);
    manifest.set("k", opts.k);
    manifest.set("matrix", opts.matrix);
    manifest.set("out", opts.out);
    manifest.write(opts.out);

    std::cout << "knn profile (k=" << opts.k << ", " << opts.matrix << ") -> " << opts.out
              << "\n";
}

struct KdeGridOpts {
    std::string input;
    std::string out;
    Index nx = 200, ny = 200;
    std::optional<double> xmin, xmax, ymin, ymax;
};

void run_kdegrid(const KdeGridOpts& opts) {
    const PointsInput input = load_points_csv(opts.input);
    const DensityField field = fit_density(input.coords);

    Manifest manifest;
    DensityGrid grid;
    if (opts.xmin && opts.xmax && opts.ymin && opts.ymax) {
        grid = density_grid(field, *opts.xmin, *opts.xmax, *opts.ymin, *opts.ymax, opts.nx,
                            opts.ny);
        manifest.set("xmin", *opts.xmin);
        manifest.set("xmax", *opts.xmax);
        manifest.set("ymin", *opts.ymin);
        manifest.set("ymax", *opts.ymax);
    } else {
        grid = data_bbox_grid(field, input, opts.nx, opts.ny);
    }
    write_grid_csv(opts.out, grid);

    manifest.set("command", "kdegrid");
    manifest.set("input", opts.input);
    manifest.input(opts.input);
    manifest.set("nx", static_cast<int>(opts.nx));
    manifest.set("ny", static_cast<int>(opts.ny));
    manifest.set("bandwidth", field.bandwidth);
    manifest.set("out", opts.out);
    manifest.write(opts.out);

    std::cout << "density grid " << opts.nx << "x" << opts.ny << " -> " << opts.out << "\n";
}

struct IngestOpts {
    std::string prescriptions;
    std::string lookup;
    std::string out;
    std::string drops_out;
    std::string drug = "Amoxicillin";
    int from = 201510;
    int to = 201709;
    IngestConfig columns;
};

void run_ingest(const IngestOpts& opts) {
    const MonthRange range = make_month_range(opts.from, opts.to);
    const AggregatedCounts counts =
        load_prescriptions(opts.prescriptions, opts.drug, range, opts.columns);
    if (counts.empty())
        throw std::runtime_error(opts.prescriptions + ": no rows match drug filter '" +
                                 opts.drug + "' inside the month range");
    DropReport drops;
    const PracticeTable table = join_locations(counts, opts.lookup, range, &drops, opts.columns);
    write_practice_table_csv(table, opts.out);

    if (!opts.drops_out.empty()) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& code : drops.dropped) rows.push_back({code});
        write_csv(opts.drops_out, {"practice"}, rows);
    }

    Manifest manifest;
    manifest.set("command", "ingest");
    manifest.set("prescriptions", opts.prescriptions);
    manifest.set("lookup", opts.lookup);
    manifest.input(opts.prescriptions);
    manifest.input(opts.lookup);
    manifest.set("drug", opts.drug);
    manifest.set("from", opts.from);
    manifest.set("to", opts.to);
    manifest.set("retained", static_cast<int>(drops.retained));
    manifest.set("dropped", static_cast<int>(drops.dropped.size()));
    manifest.set("out", opts.out);
    manifest.write(opts.out);

    std::cout << "practices retained=" << drops.retained << " dropped=" << drops.dropped.size()
              << " months=" << range.length() << " -> " << opts.out << "\n";
}

} // namespace

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Pulls `--config <file>` / `--config=<file>` out of the argument list and
// merges the file's flat `key = value` lines in as `--key=value` tokens.
// Keys already given on the command line are skipped, so flags win; unknown
// keys surface as ordinary unknown-option parse errors.
void apply_config_file(std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config", 1, 0);
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (path.empty()) return;

    std::set<std::string> explicit_keys;
    for (const auto& arg : args)
        if (arg.rfind("--", 0) == 0) explicit_keys.insert(arg.substr(2, arg.find('=') - 2));

    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty key");
        if (explicit_keys.count(key)) continue;
        args.push_back("--" + key + "=" + value);
    }
}

} // namespace

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buffer[1 << 14];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ull;
        }
    }
    std::ostringstream ss;
    ss << std::hex << hash;
    return ss.str();
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

int run_cli(const std::vector<std::string>& raw_args) {
    std::vector<std::string> args = raw_args;
    try {
        apply_config_file(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"Spatio-temporal clustering with KDE-weighted distances"};
    app.require_subcommand(1);
    std::string config_doc; // consumed before parsing; registered for --help only

    SimulateOpts sim;
    auto* simulate = app.add_subcommand("simulate", "Generate the two-variance mixture dataset");

    simulate->add_option("--out", sim.out, "Dataset CSV (x,y,truth)")->required();
    simulate->add_option("--truth-out", sim.truth_out, "Truth labels CSV (id,cluster)")
        ->required();
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--per-component", sim.per_component, "Points per Gaussian component")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--sigma-wide", sim.sigma_wide)->check(CLI::PositiveNumber);
    simulate->add_option("--sigma-tight", sim.sigma_tight)->check(CLI::PositiveNumber);
    simulate->add_option("--centers", sim.centers, "Cluster centers as 'x,y;x,y;...'");

    ClusterOpts cl;
    double cl_eps2 = 0.0;
    auto* cluster = app.add_subcommand("cluster", "DBSCAN / ST-DBSCAN over a points CSV");

    cluster->add_option("--input", cl.input, "Points CSV (x,y or lat,lon [+ series columns])")
        ->required();
    cluster->add_option("--out", cl.out, "Labels CSV (id,cluster,role)")->required();
    cluster->add_option("--eps1", cl.eps1, "Spatial radius (matrix units)")
        ->required()
        ->check(CLI::PositiveNumber);
    auto* eps2_opt =
        cluster->add_option("--eps2", cl_eps2, "Temporal DTW radius; enables ST-DBSCAN")
            ->check(CLI::PositiveNumber);
    cluster->add_option("--min-pts", cl.min_pts, "Neighborhood size threshold (self included)")
        ->required()
        ->check(CLI::PositiveNumber);
    cluster->add_flag("--weighted", cl.weighted, "Rescale distances with KDE logistic weights");
    cluster->add_option("--steepness", cl.steepness, "Logistic steepness k, or 'auto'");
    cluster->add_flag("--znorm", cl.znorm, "z-normalize each series before DTW");
    cluster->add_option("--geojson", cl.geojson_out, "Also write a GeoJSON FeatureCollection");
    cluster->add_option("--kdegrid", cl.kdegrid_out, "Also write a density grid CSV");
    cluster->add_option("--grid-nx", cl.grid_nx)->check(CLI::Range(2, 100000));
    cluster->add_option("--grid-ny", cl.grid_ny)->check(CLI::Range(2, 100000));
    cluster->add_option("--knn", cl.knn_out, "Also write the k-NN distance profile CSV");
    cluster->add_option("--knn-k", cl.knn_k, "k for the profile (default: min-pts)");

    EvalOpts ev;
    auto* eval = app.add_subcommand("eval", "Score predicted labels against ground truth");

    eval->add_option("--pred", ev.pred, "Predicted labels CSV (cluster column)")->required();
    eval->add_option("--truth", ev.truth, "Truth labels CSV (cluster column)")->required();
    eval->add_option("--out", ev.out, "Report CSV")->required();

    Table1Opts t1;
    auto* table1 = app.add_subcommand("table1", "Three-way comparison over simulation seeds");

    table1->add_option("--out", t1.out, "Comparison CSV")->required();
    table1->add_option("--seeds", t1.seeds, "Number of seeds")->check(CLI::PositiveNumber);
    table1->add_option("--seed-base", t1.seed_base, "First seed");
    table1->add_option("--eps", t1.eps, "DBSCAN radius")->check(CLI::PositiveNumber);
    table1->add_option("--min-pts", t1.min_pts)->check(CLI::PositiveNumber);
    table1->add_option("--k", t1.k, "k-means cluster count")->check(CLI::PositiveNumber);
    table1->add_option("--restarts", t1.restarts, "k-means restarts (best of, by WSS)")
        ->check(CLI::PositiveNumber);
    table1->add_option("--kmeans-iters", t1.max_iters, "k-means iteration cap")
        ->check(CLI::PositiveNumber);
    table1->add_option("--per-component", t1.per_component)->check(CLI::PositiveNumber);
    table1->add_option("--steepness", t1.steepness,
                       "Logistic steepness k, or 'auto' for 1/std of the densities");

    KnnOpts knn;
    auto* knn_cmd = app.add_subcommand("knn", "Export the k-NN distance profile");

    knn_cmd->add_option("--input", knn.input, "Points CSV")->required();
    knn_cmd->add_option("--out", knn.out, "Profile CSV (rank,distance)")->required();
    knn_cmd->add_option("--k", knn.k, "Neighbor rank")->required()->check(CLI::PositiveNumber);
    knn_cmd->add_option("--matrix", knn.matrix, "spatial | temporal | weighted");
    knn_cmd->add_option("--steepness", knn.steepness, "For --matrix weighted");
    knn_cmd->add_flag("--znorm", knn.znorm, "z-normalize series before DTW");

    KdeGridOpts kg;
    double kg_xmin = 0, kg_xmax = 0, kg_ymin = 0, kg_ymax = 0;
    auto* kdegrid = app.add_subcommand("kdegrid", "Export the KDE density grid");

    kdegrid->add_option("--input", kg.input, "Points CSV")->required();
    kdegrid->add_option("--out", kg.out, "Grid CSV (x,y,density)")->required();
    kdegrid->add_option("--nx", kg.nx)->check(CLI::Range(2, 100000));
    kdegrid->add_option("--ny", kg.ny)->check(CLI::Range(2, 100000));
    auto* o_xmin = kdegrid->add_option("--xmin", kg_xmin);
    auto* o_xmax = kdegrid->add_option("--xmax", kg_xmax);
    auto* o_ymin = kdegrid->add_option("--ymin", kg_ymin);
    auto* o_ymax = kdegrid->add_option("--ymax", kg_ymax);

    IngestOpts ing;
    auto* ingest = app.add_subcommand("ingest", "Aggregate prescriptions into a practice table");

    ingest->add_option("--prescriptions", ing.prescriptions, "Prescriptions CSV")->required();
    ingest->add_option("--lookup", ing.lookup, "Practice -> postcode/lat/lon CSV")->required();
    ingest->add_option("--out", ing.out, "Practice table CSV")->required();
    ingest->add_option("--drops", ing.drops_out, "Dropped practices CSV");
    ingest->add_option("--drug", ing.drug, "Case-insensitive substring drug filter");
    ingest->add_option("--from", ing.from, "First month, YYYYMM");
    ingest->add_option("--to", ing.to, "Last month, YYYYMM");
    ingest->add_option("--practice-col", ing.columns.practice_column);
    ingest->add_option("--month-col", ing.columns.month_column);
    ingest->add_option("--drug-col", ing.columns.drug_column);
    ingest->add_option("--items-col", ing.columns.items_column);
    ingest->add_option("--lookup-practice-col", ing.columns.lookup_practice_column);
    ingest->add_option("--lookup-postcode-col", ing.columns.lookup_postcode_column);
    ingest->add_option("--lookup-lat-col", ing.columns.lookup_lat_column);
    ingest->add_option("--lookup-lon-col", ing.columns.lookup_lon_column);

    for (auto* sub : app.get_subcommands({}))
        sub->add_option("--config", config_doc, "Flat key=value config file; flags win");

    // CLI11's vector parse consumes arguments back to front.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) {
            run_simulate(sim);
        } else if (cluster->parsed()) {
            if (*eps2_opt) cl.eps2 = cl_eps2;
            run_cluster(cl);
        } else if (eval->parsed()) {
            run_eval(ev);
        } else if (table1->parsed()) {
            run_table1(t1);
        } else if (knn_cmd->parsed()) {
            run_knn(knn);
        } else if (kdegrid->parsed()) {
            if (*o_xmin || *o_xmax || *o_ymin || *o_ymax) {
                if (!(*o_xmin && *o_xmax && *o_ymin && *o_ymax))
                    throw std::runtime_error("kdegrid: give all four of --xmin/--xmax/--ymin/--ymax or none");
                kg.xmin = kg_xmin;
                kg.xmax = kg_xmax;
                kg.ymin = kg_ymin;
                kg.ymax = kg_ymax;
            }
            run_kdegrid(kg);
        } else if (ingest->parsed()) {
            run_ingest(ing);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace stclust
