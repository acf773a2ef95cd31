#pragma once

#include "twolevel/propagator.hpp"
#include "twolevel/spectrum.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace twolevel {

/// Numeric table with a header row. Cells are written with 17 significant digits.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of the named column; throws std::out_of_range if absent.
    std::size_t column(const std::string& name) const;
};

std::string format_number(double v);

/// Column name used for a series kind: w, d or eps.
const char* value_column(SeriesKind kind);

CsvTable to_table(const TimeSeries& series);
CsvTable to_table(const SpectrumSeries& spectrum);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
/// Throws std::runtime_error on unreadable files or malformed rows.
CsvTable read_csv(const std::filesystem::path& path);

} // namespace twolevel
