#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <locale>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace fret3 {

/// Locale-independent shortest-exact formatting (17 significant digits).
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(std::numeric_limits<double>::max_digits10);
    os << v;
    return os.str();
}

/// CSV table with a '#'-prefixed header block of key: value lines.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
    void describe(const std::string& column, const std::string& text) { docs_.emplace_back(column, text); }

    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_number(v));
        row(std::move(cells));
    }

    void row(std::vector<std::string> cells) {
        if (cells.size() != columns_.size()) throw ValidationError("csv: row width does not match header");
        rows_.push_back(std::move(cells));
    }

    std::size_t rows() const { return rows_.size(); }

    std::string str() const {
        std::ostringstream os;
        os.imbue(std::locale::classic());
        for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << '\n';
        for (const auto& [c, t] : docs_) os << "# column " << c << ": " << t << '\n';
        write_line(os, columns_);
        for (const auto& r : rows_) write_line(os, r);
        return os.str();
    }

    void write(const std::filesystem::path& path) const {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ValidationError("cannot write " + path.string());
        out << str();
        if (!out) throw ValidationError("write failed: " + path.string());
    }

private:
    static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            const auto& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                os << '"';
                for (char ch : c) {
                    if (ch == '"') os << '"';
                    os << ch;
                }
                os << '"';
            } else {
                os << c;
            }
        }
        os << '\n';
    }

    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::pair<std::string, std::string>> docs_;
    std::vector<std::vector<std::string>> rows_;
};

/// Parses a CsvTable back: header comments are skipped, cells returned as text.
inline std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cell += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.push_back(std::move(cell));
                cell.clear();
            } else {
                cell += c;
            }
        }
        cells.push_back(std::move(cell));
        out.push_back(std::move(cells));
    }
    return out;
}

/// Locale-independent strict number parsing of one CSV cell.
inline double parse_cell(const std::string& s) {
    std::istringstream is(s);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (is.fail() || !is.eof()) {
        if (s == "nan") return std::nan("");
        throw ValidationError("csv: not a number: '" + s + "'");
    }
    return v;
}

}  // namespace fret3
