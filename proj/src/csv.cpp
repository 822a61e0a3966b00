#include "geodc/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "geodc/errors.hpp"

namespace geodc {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
    const std::string wanted = trim(name);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == wanted) return i;
    }
    return std::nullopt;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (quoted) throw FormatError("unterminated quoted field");
    fields.push_back(trim(current));
    return fields;
}

CsvTable read_csv(const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool header_read = !has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        auto fields = split_csv_line(line);
        if (!header_read) {
            // Drop a UTF-8 byte-order mark on the first header cell.
            if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
            table.header = std::move(fields);
            header_read = true;
            continue;
        }
        table.rows.push_back(std::move(fields));
        table.lines.push_back(line_no);
    }
    if (!header_read) throw FormatError("'" + path.string() + "' has no header row");
    return table;
}

double parse_double(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto* begin = t.data();
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(begin, end, value);
    if (t.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(value)) {
        throw DataError("cannot parse " + std::string(what) + " from '" + t + "'");
    }
    return value;
}

std::string format_double(double value) {
    if (value == 0.0) return "0";  // folds -0.0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

}  // namespace geodc
