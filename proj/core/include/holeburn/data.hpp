#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace holeburn {

// Free-form provenance carried through files as "# key = value" lines.
using Metadata = std::map<std::string, std::string>;

// Fluorescence vs time at fixed laser power.
struct DecayCurve {
    std::vector<double> time;    // s, strictly increasing
    std::vector<double> counts;  // detected counts / s
    std::vector<double> model_signal; // optional, same length as time when present
    std::optional<double> power; // W
    Metadata metadata;

    void validate() const;
};

// Half-open index interval [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end > begin ? end - begin : 0; }
    bool empty() const { return size() == 0; }
    bool contains(std::size_t i) const { return i >= begin && i < end; }
};

// Parses "a:b" into [a, b).
IndexRange parse_index_range(const std::string& text);
std::string format_index_range(const IndexRange& r);

// Hole-burning readout: fluorescence and power monitor vs AOM scan frequency.
struct RawScan {
    std::vector<double> freq;         // Hz
    std::vector<double> fluor_counts;
    std::vector<double> power_monitor;
    IndexRange aom_off;
    Metadata metadata;

    std::size_t size() const { return freq.size(); }
    void validate() const;
};

} // namespace holeburn
