#pragma once

// Text file helpers shared by the on-disk formats: INI-style key/value files
// (Boost.PropertyTree) and comma-separated grids.

#include "reoh/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace reoh::io {

namespace fs = std::filesystem;
using KeyValueTree = boost::property_tree::ptree;

/// Token for an unmeasured cell.
inline constexpr std::string_view kMissing = "NA";

inline KeyValueTree read_key_value(const fs::path& path) {
    KeyValueTree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParseError(path.string(), e.line(), e.message());
    }
    return tree;
}

inline void write_key_value(const fs::path& path, const KeyValueTree& tree) {
    try {
        boost::property_tree::ini_parser::write_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error("cannot write " + path.string() + ": " + e.message());
    }
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Parses a whole token as a double; throws on junk or trailing characters.
inline double parse_double(std::string_view token, const std::string& where) {
    double v = 0.0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || token.empty())
        throw ParseError(where + ": '" + std::string(token) + "' is not a number");
    return v;
}

inline long long parse_int(std::string_view token, const std::string& where) {
    long long v = 0;
    const auto* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), last, v);
    if (ec != std::errc() || ptr != last || token.empty())
        throw ParseError(where + ": '" + std::string(token) + "' is not an integer");
    return v;
}

/// Whitespace- or comma-separated list of numbers.
inline std::vector<double> parse_double_list(const std::string& text, const std::string& where) {
    std::string normalized = text;
    for (auto& ch : normalized)
        if (ch == ',') ch = ' ';
    std::istringstream is(normalized);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_double(tok, where));
    return out;
}

inline std::string format_double(double v) {
    if (std::isnan(v)) return std::string(kMissing);
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

template <typename Range>
std::string join(const Range& values, std::string_view sep = " ") {
    std::string out;
    bool first = true;
    for (const auto& v : values) {
        if (!first) out += sep;
        first = false;
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) out += format_double(v);
        else out += std::to_string(v);
    }
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // source line of each row
};

/// Reads a comma-separated file with a mandatory header row. Blank lines
/// and lines starting with '#' are skipped.
inline CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto cells = split(t, ',');
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size())
            throw ParseError(path.string(), lineno,
                             "expected " + std::to_string(table.header.size()) + " columns, found " +
                                 std::to_string(cells.size()));
        table.rows.push_back(std::move(cells));
        table.line_numbers.push_back(lineno);
    }
    if (!have_header) throw ParseError(path.string(), lineno, "missing header row");
    return table;
}

inline std::ofstream open_for_write(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

} // namespace reoh::io
