#pragma once

#include <map>
#include <string>
#include <vector>

#include "stclust/clustering.hpp"
#include "stclust/types.hpp"

namespace stclust {

/// Inclusive range of calendar months, both ends as YYYYMM integers.
struct MonthRange {
    int first = 0;
    int last = 0;

    int length() const;                   // number of month slots
    int slot(int yyyymm) const;           // 0-based slot, -1 when outside
    std::vector<int> months() const;      // YYYYMM per slot
};

MonthRange make_month_range(int first, int last);

/// Column names of the prescriptions CSV; NHS header conventions changed
/// across publication years, so these are configuration.
struct IngestConfig {
    std::string practice_column = "practice";
    std::string month_column = "month";
    std::string drug_column = "drug";
    std::string items_column = "items";
    // Lookup file columns.
    std::string lookup_practice_column = "practice";
    std::string lookup_postcode_column = "postcode";
    std::string lookup_lat_column = "latitude";
    std::string lookup_lon_column = "longitude";
};

/// paidItems summed per practice and month slot.
using AggregatedCounts = std::map<std::string, std::map<int, double>>;

/// Streams the prescriptions CSV, keeps rows whose drug name contains
/// drug_filter (case-insensitive) and whose month lies inside the range,
/// and sums the items per (practice, month).
AggregatedCounts load_prescriptions(const std::string& path, const std::string& drug_filter,
                                    const MonthRange& range, const IngestConfig& cfg = {});

struct PracticeRow {
    std::string code;
    std::string postcode;
    GeoPoint location;
};

/// One row per retained practice, sorted by practice code; series(i, t) is
/// the paid-items count of practice i in month slot t (missing months are
/// zero-filled).
struct PracticeTable {
    std::vector<PracticeRow> practices;
    Matrix series;
    MonthRange range;

    Index size() const { return static_cast<Index>(practices.size()); }
    std::vector<GeoPoint> locations() const;
};

struct DropReport {
    std::vector<std::string> dropped; // practices without usable coordinates
    Index retained = 0;
};

/// Joins aggregated counts with the postcode/coordinate lookup CSV.
/// Practices with a missing or unparsable coordinate are dropped and
/// reported; zero retained practices is an error.
PracticeTable join_locations(const AggregatedCounts& aggregated, const std::string& lookup_path,
                             const MonthRange& range, DropReport* report = nullptr,
                             const IngestConfig& cfg = {});

/// Writes the table in the column order practice, postcode, <months...>,
/// lat, lon.
void write_practice_table_csv(const PracticeTable& table, const std::string& path);

/// Reads a CSV previously written by write_practice_table_csv.
PracticeTable read_practice_table_csv(const std::string& path);

/// One GeoJSON point feature per practice with properties
/// {practiceCode, cluster, role}; RFC 7946 coordinate order (lon, lat).
void export_geojson(const PracticeTable& table, const Clustering& clustering,
                    const std::string& path);

} // namespace stclust
