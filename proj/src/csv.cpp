#include "stclust/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stclust {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::vector<std::string>> parse_records(std::istream& in, const std::string& context) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&] {
        record.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(record);
        record.clear();
    };

    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
            field_started = false;
        } else if (c == '\n') {
            if (!field.empty() || !record.empty() || field_started) end_record();
        } else if (c == '\r') {
            // consumed; the following '\n' (if any) terminates the record
        } else {
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) throw std::runtime_error(context + ": unterminated quoted field");
    if (!field.empty() || !record.empty() || field_started) end_record();
    return records;
}

} // namespace

int CsvTable::column(const std::string& name) const {
    const std::string want = lower(name);
    for (std::size_t i = 0; i < header.size(); ++i)
        if (lower(header[i]) == want) return static_cast<int>(i);
    return -1;
}

int CsvTable::require_column(const std::string& name, const std::string& context) const {
    const int idx = column(name);
    if (idx < 0) throw std::runtime_error(context + ": missing required column '" + name + "'");
    return idx;
}

CsvTable parse_csv(std::istream& in, const std::string& context) {
    auto records = parse_records(in, context);
    if (records.empty()) throw std::runtime_error(context + ": empty CSV (no header row)");
    CsvTable table;
    table.header = std::move(records.front());
    const std::size_t width = table.header.size();
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != width)
            throw std::runtime_error(context + ": row " + std::to_string(r + 1) + " has " +
                                     std::to_string(records[r].size()) + " fields, expected " +
                                     std::to_string(width));
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return parse_csv(in, path);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    auto write_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << csv_escape(row[i]);
        }
        out << '\n';
    };
    write_row(header);
    for (const auto& row : rows) write_row(row);
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

} // namespace stclust
