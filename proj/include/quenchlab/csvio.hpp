#ifndef QUENCHLAB_CSVIO_HPP
#define QUENCHLAB_CSVIO_HPP

#include <optional>
#include <string>
#include <vector>

namespace quenchlab {

// All numeric output goes through this: 17 significant digits, enough to
// round-trip any double bit-exactly, so identical runs produce identical
// bytes everywhere.
std::string format_double(double v);

std::string csv_join(const std::vector<std::string>& cells);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// UTF-8, '.' decimal, mandatory header row, no quoting (none of the schemas
// need embedded commas).
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

// Schema checks; throw IoError naming the file and row number.
void expect_header(const CsvTable& table, const std::vector<std::string>& header,
                   const std::string& path);
double cell_as_double(const CsvTable& table, std::size_t row, std::size_t col,
                      const std::string& path);
std::optional<double> cell_as_optional(const CsvTable& table, std::size_t row, std::size_t col,
                                       const std::string& path);

}  // namespace quenchlab

#endif
