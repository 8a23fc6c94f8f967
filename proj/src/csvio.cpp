#include "quenchlab/csvio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "quenchlab/errors.hpp"

namespace quenchlab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    return line;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream f(path, std::ios::binary);  // binary: fixed '\n' endings
    if (!f) throw IoError(path + ": cannot open file for writing");
    f << csv_join(table.header) << '\n';
    for (const auto& row : table.rows) f << csv_join(row) << '\n';
    if (!f) throw IoError(path + ": write failed");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(path + ": cannot open file");
    CsvTable table;
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && !first) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != table.header.size())
                throw IoError(path + ": row " + std::to_string(line_no) + " has " +
                              std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(table.header.size()));
            table.rows.push_back(std::move(cells));
        }
    }
    if (first) throw IoError(path + ": missing header row");
    return table;
}

void expect_header(const CsvTable& table, const std::vector<std::string>& header,
                   const std::string& path) {
    if (table.header != header) {
        std::string want = csv_join(header), got = csv_join(table.header);
        throw IoError(path + ": header mismatch (want \"" + want + "\", got \"" + got + "\")");
    }
}

double cell_as_double(const CsvTable& table, std::size_t row, std::size_t col,
                      const std::string& path) {
    const std::string& s = table.rows[row][col];
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw IoError(path + ": row " + std::to_string(row + 2) + " column " +
                      table.header[col] + ": not a number: \"" + s + "\"");
    return v;
}

std::optional<double> cell_as_optional(const CsvTable& table, std::size_t row, std::size_t col,
                                       const std::string& path) {
    if (table.rows[row][col].empty()) return std::nullopt;
    return cell_as_double(table, row, col, path);
}

}  // namespace quenchlab
