#pragma once
// RFC-4180 CSV primitives and round-trip-exact number formatting shared by
// the simulation summaries and the CLI.

#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "claw/error.hpp"

namespace claw {

// 17 significant digits: doubles survive a write/read round trip exactly.
inline std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return std::string(buffer);
}

inline double parse_double(const std::string& text, std::size_t line) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        raise(ErrorCode::ParseError,
              "line " + std::to_string(line) + ": not a number: '" + text + "'");
    }
    return value;
}

using CsvRow = std::vector<std::string>;

// Parses quoted fields, embedded commas/newlines and doubled quotes;
// tolerates CRLF endings.
inline std::vector<CsvRow> read_csv(std::istream& in) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false;
    bool row_started = false;
    std::size_t line = 1;
    char c;

    auto end_field = [&]() {
        row.push_back(field);
        field.clear();
    };
    auto end_row = [&]() {
        end_field();
        rows.push_back(row);
        row.clear();
        row_started = false;
    };

    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty()) {
                    raise(ErrorCode::ParseError,
                          "line " + std::to_string(line) + ": stray quote inside field");
                }
                quoted = true;
                row_started = true;
                break;
            case ',':
                end_field();
                row_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_started || !field.empty() || !row.empty()) end_row();
                ++line;
                break;
            default:
                field.push_back(c);
                row_started = true;
                break;
        }
    }
    if (quoted) raise(ErrorCode::ParseError, "line " + std::to_string(line) + ": unterminated quote");
    if (row_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

inline void write_csv_field(std::ostream& out, const std::string& field) {
    const bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

inline void write_csv_row(std::ostream& out, const CsvRow& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out << ',';
        write_csv_field(out, row[i]);
    }
    out << '\n';
}

}  // namespace claw
