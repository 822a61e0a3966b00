#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geodc {

/// A parsed CSV file. Rows keep their 1-based source line for error messages.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;

    /// Index of `name` in the header (exact match, surrounding spaces ignored).
    [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const;
};

/// Splits one record. Handles double-quoted fields with `""` escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a comma-separated file. Blank lines and lines starting with `#` are
/// skipped. When `has_header` is false, `header` stays empty.
CsvTable read_csv(const std::filesystem::path& path, bool has_header = true);

/// Strict full-field parse; throws DataError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);

/// Shortest representation that round-trips to the same double.
std::string format_double(double value);

std::string trim(std::string_view s);

}  // namespace geodc
