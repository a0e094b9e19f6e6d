#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ergobox/errors.hpp"

namespace ergobox {

// Stable shortest-ish decimal rendering; identical input bits give identical
// text, which the reproducible output mode depends on.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string join_csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

}  // namespace detail

// Fields must not contain commas or newlines; every writer in this project
// emits plain numbers and short identifiers.
inline void write_csv(const std::string& path,
                      const std::vector<std::string>& comments,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot open output file: " + path);
    for (const auto& c : comments) f << "# " << c << '\n';
    f << detail::join_csv_line(header) << '\n';
    for (const auto& r : rows) {
        if (r.size() != header.size())
            throw std::invalid_argument("csv row width differs from header");
        f << detail::join_csv_line(r) << '\n';
    }
    f.flush();
    if (!f) throw ConfigError("failed while writing: " + path);
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open csv file: " + path);
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string c = line.substr(1);
            if (!c.empty() && c[0] == ' ') c = c.substr(1);
            t.comments.push_back(c);
            continue;
        }
        auto fields = detail::split_csv_line(line);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != t.header.size())
                throw ConfigError("csv row width differs from header in " + path);
            t.rows.push_back(std::move(fields));
        }
    }
    if (!have_header) throw ConfigError("csv file has no header row: " + path);
    return t;
}

inline double csv_to_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("csv field is not a number: '" + s + "'");
    }
}

}  // namespace ergobox
