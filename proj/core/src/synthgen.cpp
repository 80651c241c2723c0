#include "holeburn/synthgen.hpp"

#include <cmath>
#include <sstream>

#include "holeburn/errors.hpp"

namespace holeburn {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

NoiseKind parse_noise_kind(const std::string& s) {
    if (s == "none") return NoiseKind::None;
    if (s == "poisson") return NoiseKind::Poisson;
    if (s == "gaussian") return NoiseKind::Gaussian;
    throw InputError("unknown noise kind '" + s + "' (none, poisson, gaussian)");
}

std::string to_string(NoiseKind k) {
    switch (k) {
    case NoiseKind::None: return "none";
    case NoiseKind::Poisson: return "poisson";
    case NoiseKind::Gaussian: return "gaussian";
    }
    return "none";
}

void NoiseSpec::validate() const {
    if (kind == NoiseKind::Gaussian && !(gaussian_sigma >= 0.0))
        throw InputError("gaussian_sigma must be >= 0");
    if (kind == NoiseKind::Poisson && !(dwell > 0.0)) throw InputError("dwell must be > 0");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 finalizer
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> apply_noise(std::span<const double> values, const NoiseSpec& noise,
                                std::uint64_t stream_index) {
    noise.validate();
    std::vector<double> out(values.begin(), values.end());
    if (noise.kind == NoiseKind::None) return out;

    std::mt19937_64 rng(derive_seed(noise.seed, stream_index));
    if (noise.kind == NoiseKind::Gaussian) {
        std::normal_distribution<double> dist(0.0, 1.0);
        for (double& v : out) v += noise.gaussian_sigma * dist(rng);
        return out;
    }
    for (double& v : out) {
        const double mean = v * noise.dwell;
        if (mean < 0.0) throw InputError("Poisson noise needs nonnegative values");
        if (mean == 0.0) continue;
        std::poisson_distribution<long long> dist(mean);
        v = static_cast<double>(dist(rng)) / noise.dwell;
    }
    return out;
}

DecayCurve gen_decay_curve(const DecaySpectrum& spectrum, const DecayTruth& truth,
                           std::span<const double> t_grid, const NoiseSpec& noise,
                           std::uint64_t stream_index) {
    ScaledSignalParams sp{truth.scale_a, truth.background_b, truth.power};
    sp.validate();
    DecayCurve c;
    c.time.assign(t_grid.begin(), t_grid.end());
    c.model_signal = spectrum.evaluate(t_grid, truth.gamma_trap);
    c.counts = apply_noise(scaled_signal(c.model_signal, sp), noise, stream_index);
    c.power = truth.power;
    c.metadata = {
        {"power_w", fmt(truth.power)},
        {"truth_gamma_trap_per_s", fmt(truth.gamma_trap)},
        {"truth_scale_a", fmt(truth.scale_a)},
        {"truth_background_b_counts_per_s_per_w", fmt(truth.background_b)},
        {"noise", to_string(noise.kind)},
        {"seed", std::to_string(noise.seed)},
        {"stream", std::to_string(stream_index)},
        {"rng", kRngName},
    };
    if (noise.kind == NoiseKind::Poisson) c.metadata["dwell_s"] = fmt(noise.dwell);
    if (noise.kind == NoiseKind::Gaussian) c.metadata["gaussian_sigma"] = fmt(noise.gaussian_sigma);
    return c;
}

DecayCurve gen_decay_curve(const DecayGenConfig& cfg, const DecayTruth& truth,
                           std::span<const double> t_grid, const NoiseSpec& noise,
                           std::uint64_t stream_index) {
    const auto geom = BeamGeometry::make(truth.power, cfg.focus_fwhm, cfg.model.material);
    const auto spectrum = build_spectrum(cfg.model, geom, cfg.domain, cfg.spectrum);
    return gen_decay_curve(spectrum, truth, t_grid, noise, stream_index);
}

std::vector<double> linspace(double start, double stop, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = start;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

RawScan gen_hole_scan(const HoleTruth& hole, const HoleScanConfig& cfg, const NoiseSpec& noise,
                      std::uint64_t stream_index) {
    if (cfg.points < 2) throw InputError("hole scan needs at least 2 points");
    if (!(hole.fwhm > 0.0)) throw InputError("hole fwhm must be > 0");
    if (cfg.aom_off.end > cfg.points) throw InputError("AOM-off range outside the scan");

    RawScan scan;
    scan.freq = linspace(cfg.f_start, cfg.f_stop, cfg.points);
    scan.aom_off = cfg.aom_off;
    std::vector<double> fluor(cfg.points);
    scan.power_monitor.resize(cfg.points);
    const double h2 = 0.25 * hole.fwhm * hole.fwhm;
    for (std::size_t i = 0; i < cfg.points; ++i) {
        const double x = 2.0 * static_cast<double>(i) / static_cast<double>(cfg.points - 1) - 1.0;
        const double power = cfg.aom_off.contains(i) ? 0.0 : cfg.power_level * (1.0 + cfg.power_slope * x);
        const double df = scan.freq[i] - hole.center;
        const double response = hole.baseline - hole.depth * h2 / (df * df + h2);
        fluor[i] = cfg.response * response * power + cfg.fluor_offset;
        scan.power_monitor[i] = power + cfg.power_offset;
    }
    scan.fluor_counts = apply_noise(fluor, noise, stream_index);
    scan.metadata = {
        {"truth_baseline", fmt(hole.baseline)},
        {"truth_depth", fmt(hole.depth)},
        {"truth_center_hz", fmt(hole.center)},
        {"truth_fwhm_hz", fmt(hole.fwhm)},
        {"aom_off", format_index_range(cfg.aom_off)},
        {"noise", to_string(noise.kind)},
        {"seed", std::to_string(noise.seed)},
        {"stream", std::to_string(stream_index)},
        {"rng", kRngName},
    };
    return scan;
}

HoleDecaySeries gen_hole_decay_series(double amplitude, double tau, double offset,
                                      std::span<const double> wait_times, const NoiseSpec& noise,
                                      std::uint64_t stream_index) {
    if (!(tau > 0.0)) throw InputError("tau must be > 0");
    for (std::size_t i = 1; i < wait_times.size(); ++i)
        if (wait_times[i] < wait_times[i - 1]) throw InputError("wait times must be ascending");
    HoleDecaySeries s;
    s.wait.assign(wait_times.begin(), wait_times.end());
    std::vector<double> clean(wait_times.size());
    for (std::size_t i = 0; i < wait_times.size(); ++i)
        clean[i] = amplitude * std::exp(-wait_times[i] / tau) + offset;
    s.area = apply_noise(clean, noise, stream_index);
    s.metadata = {
        {"truth_amplitude", fmt(amplitude)},
        {"truth_tau_s", fmt(tau)},
        {"truth_offset", fmt(offset)},
        {"noise", to_string(noise.kind)},
        {"seed", std::to_string(noise.seed)},
        {"rng", kRngName},
    };
    return s;
}

} // namespace holeburn
