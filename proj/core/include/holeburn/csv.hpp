#pragma once

// Plain CSV tables with a header line and optional "# key = value" metadata
// lines before it. Schemas:
//   signal      time_s, model_signal, scaled_counts_per_s
//   raw scan    freq_hz, fluor_counts, power_counts
//   treated     freq_hz, fluor_counts, power_counts, normalized_signal, excluded
//   hole decay  wait_s, area[, sigma_area]
//   xy          x, y

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "holeburn/data.hpp"
#include "holeburn/trace.hpp"

namespace holeburn {

struct CsvTable {
    Metadata metadata;
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    // Index of a named column; throws InputError when absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

CsvTable read_csv(std::istream& in, const std::string& source = "<stream>");
CsvTable read_csv_file(const std::filesystem::path& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);

// Shortest representation that round-trips a double.
std::string format_double(double v);

CsvTable signal_table(const std::vector<double>& time, const std::vector<double>& model_signal,
                      const std::vector<double>& scaled, const Metadata& meta = {});

// Decay curves come from signal tables; power from metadata "power_w" if present.
DecayCurve decay_curve_from_table(const CsvTable& t);
CsvTable decay_curve_table(const DecayCurve& c);

RawScan raw_scan_from_table(const CsvTable& t);
CsvTable raw_scan_table(const RawScan& s);
CsvTable treated_scan_table(const RawScan& background_free, const NormalizedScan& n);

} // namespace holeburn
