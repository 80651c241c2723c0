#pragma once

// Synthetic measurements with known ground truth, for round-trip tests of
// the fitters and the scan pipeline.
//
// Random streams: std::mt19937_64 seeded with derive_seed(master_seed, index),
// a splitmix64 mix, one stream per generated curve/scan. Poisson draws use
// std::poisson_distribution, Gaussian draws std::normal_distribution; the
// bit pattern therefore depends on the C++ standard library in use.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "holeburn/data.hpp"
#include "holeburn/integrator.hpp"
#include "holeburn/model.hpp"

namespace holeburn {

enum class NoiseKind { None, Poisson, Gaussian };

NoiseKind parse_noise_kind(const std::string& s);
std::string to_string(NoiseKind k);

struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    std::uint64_t seed = 0;
    double gaussian_sigma = 0.0; // signal units
    // Poisson: values are rates; counts ~ Poisson(value * dwell) / dwell.
    double dwell = 1.0;

    void validate() const;
};

inline constexpr const char* kRngName = "mt19937_64+splitmix64";

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Applies noise to a copy of `values` using stream `stream_index`.
std::vector<double> apply_noise(std::span<const double> values, const NoiseSpec& noise,
                                std::uint64_t stream_index = 0);

struct DecayTruth {
    double gamma_trap = 7e4;
    double scale_a = 0.19;
    double background_b = 9.4e7;
    double power = 20e-6;
};

struct DecayGenConfig {
    TrapModel model = reference_rate_model();
    double focus_fwhm = kDefaultFocusFwhm;
    IntegrationDomain domain;
    SpectrumOptions spectrum;
};

DecayCurve gen_decay_curve(const DecayGenConfig& cfg, const DecayTruth& truth,
                           std::span<const double> t_grid, const NoiseSpec& noise,
                           std::uint64_t stream_index = 0);

// Same, with a precomputed spectrum for truth.power.
DecayCurve gen_decay_curve(const DecaySpectrum& spectrum, const DecayTruth& truth,
                           std::span<const double> t_grid, const NoiseSpec& noise,
                           std::uint64_t stream_index = 0);

// Laser powers of the seven-curve intensity-dependence set, W.
inline constexpr std::array<double, 7> kSevenPowers{2e-6, 4e-6, 8e-6, 13e-6, 21e-6, 29e-6, 44e-6};

struct HoleTruth {
    double baseline = 1.0;  // c
    double depth = 0.4;     // d
    double center = -50e6;  // Hz
    double fwhm = 6e6;      // Hz
};

struct HoleScanConfig {
    double f_start = -100e6;
    double f_stop = 100e6;
    std::size_t points = 5000;
    // Power monitor reading: power_level * (1 + power_slope * x), x in [-1, 1]
    // across the scan (AOM efficiency varies with drive frequency).
    double power_level = 1000.0;
    double power_slope = 0.0;
    // Response scale: fluorescence = response * (c - Lorentzian) * power.
    double response = 1.0;
    double fluor_offset = 0.0;
    double power_offset = 0.0;
    IndexRange aom_off{0, 0}; // these points see zero laser power
};

RawScan gen_hole_scan(const HoleTruth& hole, const HoleScanConfig& cfg, const NoiseSpec& noise,
                      std::uint64_t stream_index = 0);

struct HoleDecaySeries {
    std::vector<double> wait;
    std::vector<double> area;
    Metadata metadata;
};

HoleDecaySeries gen_hole_decay_series(double amplitude, double tau, double offset,
                                      std::span<const double> wait_times, const NoiseSpec& noise,
                                      std::uint64_t stream_index = 0);

std::vector<double> linspace(double start, double stop, std::size_t n);

} // namespace holeburn
