#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bioadam::harness {

using Cell = std::variant<double, std::int64_t, std::string>;

// Formats doubles with 17 significant digits so values round-trip exactly.
std::string format_cell(const Cell& c);

class CsvTable {
public:
    CsvTable() = default;
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    // "# key = value" lines written before the column header.
    void add_comment(std::string key, std::string value);
    void add_comments(const std::vector<std::pair<std::string, std::string>>& kv);
    // Throws ShapeError if the row width differs from the column count.
    void add_row(std::vector<Cell> row);
    void append(const CsvTable& other);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    const std::vector<std::pair<std::string, std::string>>& comments() const { return comments_; }
    std::size_t column_index(const std::string& name) const;
    // Numeric view of one column; string cells throw InputError.
    std::vector<double> column(const std::string& name) const;

    void write(std::ostream& os) const;
    std::string str() const;
    // "-" or empty writes to stdout.
    void write_to(const std::string& path) const;

private:
    std::vector<std::pair<std::string, std::string>> comments_;
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

}  // namespace bioadam::harness
