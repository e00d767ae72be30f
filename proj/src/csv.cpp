#include "fairbench/csv.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fairbench/error.hpp"

namespace fairbench {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

struct Parser {
    std::string_view text;
    std::size_t pos = 0;

    bool done() const { return pos >= text.size(); }

    // Parses one record; returns false at end of input.
    bool next_record(std::vector<std::string>& fields, std::size_t record_no) {
        fields.clear();
        if (done()) return false;
        while (true) {
            fields.push_back(next_field(record_no));
            if (done()) return true;
            char c = text[pos];
            if (c == ',') {
                ++pos;
                continue;
            }
            consume_newline();
            return true;
        }
    }

    std::string next_field(std::size_t record_no) {
        if (!done() && text[pos] == '"') return quoted_field(record_no);
        std::size_t start = pos;
        while (!done() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') ++pos;
        return trim(text.substr(start, pos - start));
    }

    std::string quoted_field(std::size_t record_no) {
        ++pos;  // opening quote
        std::string out;
        while (true) {
            if (done())
                throw Error("unterminated quoted field in CSV record " + std::to_string(record_no));
            char c = text[pos++];
            if (c == '"') {
                if (!done() && text[pos] == '"') {
                    out.push_back('"');
                    ++pos;
                    continue;
                }
                break;
            }
            out.push_back(c);
        }
        // Anything but a separator after the closing quote is malformed.
        while (!done() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
            if (!is_space(text[pos]))
                throw Error("malformed quoted field in CSV record " + std::to_string(record_no));
            ++pos;
        }
        return out;
    }

    void consume_newline() {
        if (!done() && text[pos] == '\r') ++pos;
        if (!done() && text[pos] == '\n') ++pos;
    }
};

bool blank_record(const std::vector<std::string>& fields) {
    return fields.size() == 1 && fields.front().empty();
}

}  // namespace

bool RawTable::has_column(std::string_view name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::size_t RawTable::column_index(std::string_view name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error("column not found: " + std::string(name));
    return static_cast<std::size_t>(it - columns.begin());
}

RawTable parse_csv(std::string_view text) {
    Parser parser{text};
    RawTable table;
    std::vector<std::string> fields;
    std::size_t record_no = 1;
    if (!parser.next_record(fields, record_no) || blank_record(fields))
        throw Error("CSV input has no header row");
    table.columns = fields;
    while (parser.next_record(fields, ++record_no)) {
        if (blank_record(fields)) continue;  // trailing newline or stray blank line
        if (fields.size() != table.columns.size())
            throw Error("CSV record " + std::to_string(record_no) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(table.columns.size()));
        table.rows.push_back(fields);
    }
    return table;
}

RawTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open CSV file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str());
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open CSV file: " + path.string());
    std::string line;
    // Header may contain quoted embedded newlines; read until quotes balance.
    std::string header;
    while (std::getline(in, line)) {
        header += line;
        if (std::count(header.begin(), header.end(), '"') % 2 == 0) break;
        header += '\n';
    }
    if (header.empty()) throw Error("CSV file has no header row: " + path.string());
    Parser parser{header};
    std::vector<std::string> fields;
    parser.next_record(fields, 1);
    if (blank_record(fields)) throw Error("CSV file has no header row: " + path.string());
    return fields;
}

void write_csv(std::ostream& out, const RawTable& table) {
    auto write_field = [&out](const std::string& f) {
        bool needs_quotes = f.find_first_of(",\"\n\r") != std::string::npos ||
                            (!f.empty() && (is_space(f.front()) || is_space(f.back())));
        if (!needs_quotes) {
            out << f;
            return;
        }
        out << '"';
        for (char c : f) {
            if (c == '"') out << '"';
            out << c;
        }
        out << '"';
    };
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        write_field(table.columns[i]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            write_field(row[i]);
        }
        out << '\n';
    }
}

}  // namespace fairbench
