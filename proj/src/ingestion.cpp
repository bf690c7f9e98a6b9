#include "stclust/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>

#include <nlohmann/json.hpp>

#include "stclust/csv.hpp"

namespace stclust {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
    return lower(haystack).find(lower(needle)) != std::string::npos;
}

std::optional<double> parse_double(const std::string& s) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
    while (end != begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
    if (begin == end) return std::nullopt;
    double value = 0.0;
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end) return std::nullopt;
    return value;
}

std::optional<int> parse_month(const std::string& s) {
    if (s.size() != 6) return std::nullopt;
    int value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    const int mm = value % 100;
    if (mm < 1 || mm > 12) return std::nullopt;
    return value;
}

} // namespace

int MonthRange::length() const {
    const int y0 = first / 100, m0 = first % 100;
    const int y1 = last / 100, m1 = last % 100;
    return (y1 - y0) * 12 + (m1 - m0) + 1;
}

int MonthRange::slot(int yyyymm) const {
    const int mm = yyyymm % 100;
    if (mm < 1 || mm > 12) return -1;
    const int idx = (yyyymm / 100 - first / 100) * 12 + (mm - first % 100);
    return (idx >= 0 && idx < length()) ? idx : -1;
}

std::vector<int> MonthRange::months() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(length()));
    int y = first / 100, m = first % 100;
    for (int i = 0; i < length(); ++i) {
        out.push_back(y * 100 + m);
        if (++m > 12) {
            m = 1;
            ++y;
        }
    }
    return out;
}

MonthRange make_month_range(int first, int last) {
    if (!parse_month(std::to_string(first)) || !parse_month(std::to_string(last)))
        throw std::invalid_argument("month range bounds must be valid YYYYMM values");
    MonthRange range{first, last};
    if (range.length() < 1)
        throw std::invalid_argument("month range is empty (last month precedes first)");
    return range;
}

AggregatedCounts load_prescriptions(const std::string& path, const std::string& drug_filter,
                                    const MonthRange& range, const IngestConfig& cfg) {
    const CsvTable table = read_csv(path);
    const int practice_col = table.require_column(cfg.practice_column, path);
    const int month_col = table.require_column(cfg.month_column, path);
    const int drug_col = table.require_column(cfg.drug_column, path);
    const int items_col = table.require_column(cfg.items_column, path);

    AggregatedCounts counts;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (!contains_ci(row[static_cast<std::size_t>(drug_col)], drug_filter)) continue;

        const auto month = parse_month(row[static_cast<std::size_t>(month_col)]);
        if (!month)
            throw std::runtime_error(path + ": row " + std::to_string(r + 2) +
                                     ", column '" + cfg.month_column + "': unparsable month '" +
                                     row[static_cast<std::size_t>(month_col)] + "'");
        const int s = range.slot(*month);
        if (s < 0) continue;

        const auto items = parse_double(row[static_cast<std::size_t>(items_col)]);
        if (!items || *items < 0.0)
            throw std::runtime_error(path + ": row " + std::to_string(r + 2) + ", column '" +
                                     cfg.items_column + "': invalid item count '" +
                                     row[static_cast<std::size_t>(items_col)] + "'");
        counts[row[static_cast<std::size_t>(practice_col)]][s] += *items;
    }
    return counts;
}

std::vector<GeoPoint> PracticeTable::locations() const {
    std::vector<GeoPoint> out;
    out.reserve(practices.size());
    for (const auto& p : practices) out.push_back(p.location);
    return out;
}

PracticeTable join_locations(const AggregatedCounts& aggregated, const std::string& lookup_path,
                             const MonthRange& range, DropReport* report,
                             const IngestConfig& cfg) {
    const CsvTable lookup = read_csv(lookup_path);
    const int code_col = lookup.require_column(cfg.lookup_practice_column, lookup_path);
    const int postcode_col = lookup.require_column(cfg.lookup_postcode_column, lookup_path);
    const int lat_col = lookup.require_column(cfg.lookup_lat_column, lookup_path);
    const int lon_col = lookup.require_column(cfg.lookup_lon_column, lookup_path);

    struct Location {
        std::string postcode;
        std::optional<GeoPoint> point;
    };
    std::map<std::string, Location> locations;
    for (const auto& row : lookup.rows) {
        Location loc;
        loc.postcode = row[static_cast<std::size_t>(postcode_col)];
        const auto lat = parse_double(row[static_cast<std::size_t>(lat_col)]);
        const auto lon = parse_double(row[static_cast<std::size_t>(lon_col)]);
        if (lat && lon && is_valid(GeoPoint{*lat, *lon})) loc.point = GeoPoint{*lat, *lon};
        locations[row[static_cast<std::size_t>(code_col)]] = std::move(loc);
    }

    PracticeTable table;
    table.range = range;
    DropReport drops;
    for (const auto& [code, by_slot] : aggregated) {
        const auto it = locations.find(code);
        if (it == locations.end() || !it->second.point) {
            drops.dropped.push_back(code);
            continue;
        }
        table.practices.push_back({code, it->second.postcode, *it->second.point});
    }
    drops.retained = static_cast<Index>(table.practices.size());
    if (table.practices.empty())
        throw std::runtime_error("join_locations: no practice retained (all rows lack coordinates)");

    // aggregated is an ordered map, so the table is sorted by practice code.
    table.series = Matrix::Zero(table.size(), range.length());
    for (Index i = 0; i < table.size(); ++i) {
        const auto& by_slot = aggregated.at(table.practices[static_cast<std::size_t>(i)].code);
        for (const auto& [s, items] : by_slot) table.series(i, s) = items;
    }
    if (report) *report = std::move(drops);
    return table;
}

void write_practice_table_csv(const PracticeTable& table, const std::string& path) {
    std::vector<std::string> header = {"practice", "postcode"};
    for (int month : table.range.months()) header.push_back(std::to_string(month));
    header.emplace_back("lat");
    header.emplace_back("lon");

    std::vector<std::vector<std::string>> rows;
    rows.reserve(static_cast<std::size_t>(table.size()));
    for (Index i = 0; i < table.size(); ++i) {
        const auto& p = table.practices[static_cast<std::size_t>(i)];
        std::vector<std::string> row = {p.code, p.postcode};
        for (Index t = 0; t < table.series.cols(); ++t)
            row.push_back(format_double(table.series(i, t)));
        row.push_back(format_double(p.location.lat));
        row.push_back(format_double(p.location.lon));
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

PracticeTable read_practice_table_csv(const std::string& path) {
    const CsvTable csv = read_csv(path);
    const int code_col = csv.require_column("practice", path);
    const int postcode_col = csv.require_column("postcode", path);
    const int lat_col = csv.require_column("lat", path);
    const int lon_col = csv.require_column("lon", path);

    std::vector<int> month_cols;
    std::vector<int> months;
    for (std::size_t c = 0; c < csv.header.size(); ++c) {
        if (const auto m = parse_month(csv.header[c])) {
            month_cols.push_back(static_cast<int>(c));
            months.push_back(*m);
        }
    }
    if (months.empty()) throw std::runtime_error(path + ": no YYYYMM month columns found");

    PracticeTable table;
    table.range = make_month_range(months.front(), months.back());
    if (table.range.length() != static_cast<int>(months.size()))
        throw std::runtime_error(path + ": month columns are not a contiguous range");
    table.series = Matrix::Zero(static_cast<Index>(csv.rows.size()), table.range.length());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        const auto lat = parse_double(row[static_cast<std::size_t>(lat_col)]);
        const auto lon = parse_double(row[static_cast<std::size_t>(lon_col)]);
        if (!lat || !lon)
            throw std::runtime_error(path + ": row " + std::to_string(r + 2) +
                                     ": unparsable coordinates");
        table.practices.push_back({row[static_cast<std::size_t>(code_col)],
                                   row[static_cast<std::size_t>(postcode_col)],
                                   GeoPoint{*lat, *lon}});
        for (std::size_t t = 0; t < month_cols.size(); ++t) {
            const auto value = parse_double(row[static_cast<std::size_t>(month_cols[t])]);
            if (!value)
                throw std::runtime_error(path + ": row " + std::to_string(r + 2) +
                                         ": unparsable series value");
            table.series(static_cast<Index>(r), static_cast<Index>(t)) = *value;
        }
    }
    return table;
}

void export_geojson(const PracticeTable& table, const Clustering& clustering,
                    const std::string& path) {
    if (clustering.labels.size() != table.size())
        throw std::invalid_argument("export_geojson: clustering length differs from table size");
    if (table.size() == 0) throw std::invalid_argument("export_geojson: empty table");

    nlohmann::json features = nlohmann::json::array();
    for (Index i = 0; i < table.size(); ++i) {
        const auto& p = table.practices[static_cast<std::size_t>(i)];
        nlohmann::json feature = {
            {"type", "Feature"},
            {"geometry",
             {{"type", "Point"}, {"coordinates", {p.location.lon, p.location.lat}}}},
            {"properties",
             {{"practiceCode", p.code},
              {"cluster", clustering.labels(i)},
              {"role", to_string(clustering.roles[static_cast<std::size_t>(i)])}}},
        };
        features.push_back(std::move(feature));
    }
    const nlohmann::json collection = {{"type", "FeatureCollection"}, {"features", features}};

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << collection.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace stclust
