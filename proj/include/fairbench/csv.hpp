#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fairbench {

/// Raw string table as parsed from CSV: a header and one string row per record.
struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    bool has_column(std::string_view name) const;
    /// Index of `name` in columns; throws Error naming the column otherwise.
    std::size_t column_index(std::string_view name) const;
};

/// Parse RFC-4180 CSV text. First record is the required header. Unquoted
/// fields are trimmed of surrounding ASCII whitespace; quoted fields are
/// kept verbatim ("" unescapes to ").
RawTable parse_csv(std::string_view text);

/// Read and parse a CSV file; throws Error for unreadable paths.
RawTable read_csv(const std::filesystem::path& path);

/// Header row only (cheap manifest validation against wide files).
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

/// Write a table back out with minimal quoting.
void write_csv(std::ostream& out, const RawTable& table);

}  // namespace fairbench
