#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stclust {

/// Comma-separated table with a header row. Quoted fields may contain
/// commas, newlines and doubled quotes; CR/LF line endings are accepted.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Header position of a column, or -1 when absent. Case-insensitive.
    int column(const std::string& name) const;

    /// As column(), but throws naming the file context when absent.
    int require_column(const std::string& name, const std::string& context) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in, const std::string& context);

/// Quotes a field only when it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Shortest decimal form that round-trips the double exactly.
std::string format_double(double value);

} // namespace stclust
