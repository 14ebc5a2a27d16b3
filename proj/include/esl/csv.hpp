// Numeric CSV reading and writing. Values are written with 17 significant
// digits so that doubles round-trip exactly.
#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace esl {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a named column, or -1.
    int column(const std::string &name) const;
};

/// Throws Error(schema_mismatch) on ragged or non-numeric rows and
/// Error(io_error) when the file cannot be opened.
CsvTable read_csv(const std::filesystem::path &path);

void write_csv_header(std::ostream &os, std::span<const std::string> header);
void write_csv_row(std::ostream &os, std::span<const double> values);

/// Formats with 17 significant digits.
std::string format_double(double v);

} // namespace esl
