#include "bioadam/harness/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bioadam/error.hpp"

namespace bioadam::harness {

std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        return buf;
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

void CsvTable::add_comment(std::string key, std::string value) {
    comments_.emplace_back(std::move(key), std::move(value));
}

void CsvTable::add_comments(const std::vector<std::pair<std::string, std::string>>& kv) {
    comments_.insert(comments_.end(), kv.begin(), kv.end());
}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) {
        throw ShapeError("csv row has " + std::to_string(row.size()) + " cells for " +
                         std::to_string(columns_.size()) + " columns");
    }
    rows_.push_back(std::move(row));
}

void CsvTable::append(const CsvTable& other) {
    if (other.columns_ != columns_) throw ShapeError("csv append with different columns");
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

std::size_t CsvTable::column_index(const std::string& name) const {
    const auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) throw InputError("no csv column '" + name + "'");
    return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const std::size_t j = column_index(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) {
        if (const auto* d = std::get_if<double>(&r[j])) out.push_back(*d);
        else if (const auto* i = std::get_if<std::int64_t>(&r[j])) out.push_back(static_cast<double>(*i));
        else throw InputError("csv column '" + name + "' is not numeric");
    }
    return out;
}

void CsvTable::write(std::ostream& os) const {
    for (const auto& [k, v] : comments_) os << "# " << k << " = " << v << '\n';
    for (std::size_t j = 0; j < columns_.size(); ++j) os << (j ? "," : "") << columns_[j];
    os << '\n';
    for (const auto& r : rows_) {
        for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << format_cell(r[j]);
        os << '\n';
    }
}

std::string CsvTable::str() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

void CsvTable::write_to(const std::string& path) const {
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open output '" + path + "'");
    write(os);
    if (!os) throw IoError("failed writing '" + path + "'");
}

}  // namespace bioadam::harness
