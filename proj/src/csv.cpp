#include "twolevel/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twolevel {

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::out_of_range("no column named '" + name + "'");
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* value_column(SeriesKind kind) {
    switch (kind) {
    case SeriesKind::inversion: return "w";
    case SeriesKind::dipole: return "d";
    case SeriesKind::emitted_field: return "eps";
    }
    return "value";
}

CsvTable to_table(const TimeSeries& series) {
    CsvTable t{{"tau", value_column(series.kind)}, {}};
    t.rows.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) t.rows.push_back({series.tau[i], series.value[i]});
    return t;
}

CsvTable to_table(const SpectrumSeries& spectrum) {
    CsvTable t{{"z", "re", "im", "intensity"}, {}};
    t.rows.reserve(spectrum.size());
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        t.rows.push_back(
            {spectrum.z[i], spectrum.amplitude[i].real(), spectrum.amplitude[i].imag(), spectrum.intensity[i]});
    return t;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.header.push_back(cell);
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cell.size() || cell.empty())
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != t.header.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(t.header.size()) + " columns");
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace twolevel
