#include "esl/csv.hpp"

#include "esl/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace esl {

namespace {

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        std::size_t start = 0;
        while (start < field.size() && field[start] == ' ') ++start;
        out.push_back(field.substr(start));
    }
    return out;
}

} // namespace

int CsvTable::column(const std::string &name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::schema_mismatch, path.string() + " is empty");
    table.header = split(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split(line);
        if (fields.size() != table.header.size())
            throw Error(ErrorCode::schema_mismatch,
                        path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " fields");
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto &f : fields) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || ptr != f.data() + f.size())
                throw Error(ErrorCode::schema_mismatch,
                            path.string() + ":" + std::to_string(line_no) + ": non-numeric field '" + f + "'");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv_header(std::ostream &os, std::span<const std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
}

void write_csv_row(std::ostream &os, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << format_double(values[i]);
    os << '\n';
}

} // namespace esl
