#pragma once

// Two-step treatment of hole-burning readout scans and the error recipe for
// hole areas:
//   1. subtract the detector background measured while the AOM is off,
//   2. divide fluorescence by the monitored laser power point by point.

#include <optional>
#include <span>
#include <vector>

#include "holeburn/data.hpp"

namespace holeburn {

struct NormalizedScan {
    std::vector<double> freq;   // Hz
    std::vector<double> signal; // NaN at excluded points
    std::vector<bool> excluded;
    std::optional<double> sigma_point;

    std::size_t size() const { return freq.size(); }
    std::size_t included() const;
    double freq_step() const;
};

// Points whose power is at most this fraction of the maximum are treated as
// zero-power and excluded.
inline constexpr double kZeroPowerFraction = 1e-3;

RawScan subtract_background(const RawScan& scan);

// Throws InputError if the AOM-off region still carries a background (the
// scan was not background-subtracted) or if every point is excluded.
NormalizedScan normalize_by_power(const RawScan& scan);

// Heuristic: longest run of samples whose power reading lies within 5% of the
// trace's power range above its minimum.
IndexRange detect_aom_off(std::span<const double> power_monitor);

enum class EdgeMode {
    Truncate, // shrink the window at the trace ends
    Wrap,     // treat the trace as periodic
};

// Centered moving mean. For even windows the extra sample is taken on the left.
std::vector<double> moving_average(std::span<const double> data, std::size_t window,
                                   EdgeMode edges = EdgeMode::Truncate);

// RMS of a hole-free normalized trace about its own mean level.
double point_rms(const NormalizedScan& scan);

struct HoleArea {
    double area = 0.0;        // sum of (baseline - signal), signal x points
    double sigma_area = 0.0;
    double area_hz = 0.0;     // area times the frequency step
    double sigma_area_hz = 0.0;
    double freq_step = 0.0;   // Hz
    std::size_t points = 0;
};

HoleArea hole_area_with_error(const NormalizedScan& scan, double baseline, double sigma_point,
                              std::optional<IndexRange> range = std::nullopt);

// Per-point sigmas, one for each scan point.
HoleArea hole_area_with_error(const NormalizedScan& scan, double baseline,
                              std::span<const double> sigma_point,
                              std::optional<IndexRange> range = std::nullopt);

// Scales the trace so the mean of the non-excluded points at or above
// freq_threshold becomes 1.
NormalizedScan normalize_level_above(const NormalizedScan& scan, double freq_threshold);

} // namespace holeburn
