#include "holeburn/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "holeburn/errors.hpp"

namespace holeburn {

std::size_t NormalizedScan::included() const {
    return static_cast<std::size_t>(std::count(excluded.begin(), excluded.end(), false));
}

double NormalizedScan::freq_step() const {
    if (freq.size() < 2) return 0.0;
    return std::abs(freq.back() - freq.front()) / static_cast<double>(freq.size() - 1);
}

namespace {

double range_mean(const std::vector<double>& v, const IndexRange& r) {
    double s = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) s += v[i];
    return s / static_cast<double>(r.size());
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

RawScan subtract_background(const RawScan& scan) {
    scan.validate();
    RawScan out = scan;
    const double fluor_bg = range_mean(scan.fluor_counts, scan.aom_off);
    const double power_bg = range_mean(scan.power_monitor, scan.aom_off);
    for (double& v : out.fluor_counts) v -= fluor_bg;
    for (double& v : out.power_monitor) v -= power_bg;
    return out;
}

NormalizedScan normalize_by_power(const RawScan& scan) {
    scan.validate();
    constexpr double kResidualTol = 1e-9;
    if (std::abs(range_mean(scan.fluor_counts, scan.aom_off)) >
            kResidualTol * max_abs(scan.fluor_counts) ||
        std::abs(range_mean(scan.power_monitor, scan.aom_off)) >
            kResidualTol * max_abs(scan.power_monitor))
        throw InputError("normalize_by_power: AOM-off region is not at zero, "
                         "subtract the background first");

    const double pmax = *std::max_element(scan.power_monitor.begin(), scan.power_monitor.end());
    const double threshold = kZeroPowerFraction * pmax;

    NormalizedScan out;
    out.freq = scan.freq;
    out.signal.resize(scan.size());
    out.excluded.resize(scan.size());
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const double p = scan.power_monitor[i];
        const bool zero = !(pmax > 0.0) || p <= threshold;
        out.excluded[i] = zero;
        out.signal[i] = zero ? std::numeric_limits<double>::quiet_NaN() : scan.fluor_counts[i] / p;
    }
    if (out.included() == 0) throw InputError("normalize_by_power: every point has zero power");
    return out;
}

IndexRange detect_aom_off(std::span<const double> power_monitor) {
    if (power_monitor.empty()) throw InputError("detect_aom_off: empty trace");
    const auto [lo, hi] = std::minmax_element(power_monitor.begin(), power_monitor.end());
    const double limit = *lo + 0.05 * (*hi - *lo);
    IndexRange best;
    std::size_t start = 0;
    bool in_run = false;
    for (std::size_t i = 0; i <= power_monitor.size(); ++i) {
        const bool low = i < power_monitor.size() && power_monitor[i] <= limit;
        if (low && !in_run) {
            start = i;
            in_run = true;
        } else if (!low && in_run) {
            if (i - start > best.size()) best = {start, i};
            in_run = false;
        }
    }
    if (best.empty()) throw InputError("detect_aom_off: no low-power region found");
    return best;
}

std::vector<double> moving_average(std::span<const double> data, std::size_t window,
                                   EdgeMode edges) {
    if (window < 1) throw InputError("moving_average: window must be >= 1");
    const std::size_t n = data.size();
    if (window > n) throw InputError("moving_average: window larger than the trace");

    const std::size_t left = window / 2;
    const std::size_t right = window - 1 - left;
    std::vector<double> out(n);
    if (edges == EdgeMode::Wrap) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < window; ++k) s += data[(i + n - left + k) % n];
            out[i] = s / static_cast<double>(window);
        }
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= left ? i - left : 0;
        const std::size_t hi = std::min(n, i + right + 1);
        double s = 0.0;
        for (std::size_t j = lo; j < hi; ++j) s += data[j];
        out[i] = s / static_cast<double>(hi - lo);
    }
    return out;
}

double point_rms(const NormalizedScan& scan) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (scan.excluded[i]) continue;
        sum += scan.signal[i];
        ++n;
    }
    if (n < 16) throw InputError("point_rms needs at least 16 included points");
    const double baseline = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < scan.size(); ++i)
        if (!scan.excluded[i]) ss += (scan.signal[i] - baseline) * (scan.signal[i] - baseline);
    return std::sqrt(ss / static_cast<double>(n));
}

namespace {

template <typename SigmaAt>
HoleArea accumulate_area(const NormalizedScan& scan, double baseline, std::optional<IndexRange> range,
                         SigmaAt sigma_at) {
    if (!std::isfinite(baseline)) throw InputError("hole area: baseline must be finite");
    const IndexRange r = range.value_or(IndexRange{0, scan.size()});
    if (r.end > scan.size()) throw InputError("hole area: range outside the scan");
    HoleArea a;
    double var = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) {
        if (scan.excluded[i]) continue;
        a.area += baseline - scan.signal[i];
        const double s = sigma_at(i);
        var += s * s;
        ++a.points;
    }
    a.sigma_area = std::sqrt(var);
    a.freq_step = scan.freq_step();
    a.area_hz = a.area * a.freq_step;
    a.sigma_area_hz = a.sigma_area * a.freq_step;
    return a;
}

} // namespace

HoleArea hole_area_with_error(const NormalizedScan& scan, double baseline, double sigma_point,
                              std::optional<IndexRange> range) {
    if (!(sigma_point >= 0.0)) throw InputError("hole area: sigma_point must be >= 0");
    return accumulate_area(scan, baseline, range, [sigma_point](std::size_t) { return sigma_point; });
}

HoleArea hole_area_with_error(const NormalizedScan& scan, double baseline,
                              std::span<const double> sigma_point,
                              std::optional<IndexRange> range) {
    if (sigma_point.size() != scan.size())
        throw InputError("hole area: one sigma per scan point required");
    return accumulate_area(scan, baseline, range, [sigma_point](std::size_t i) { return sigma_point[i]; });
}

NormalizedScan normalize_level_above(const NormalizedScan& scan, double freq_threshold) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (scan.excluded[i] || scan.freq[i] < freq_threshold) continue;
        sum += scan.signal[i];
        ++n;
    }
    if (n == 0 || sum == 0.0)
        throw InputError("normalize_level_above: no signal above the threshold frequency");
    const double level = sum / static_cast<double>(n);
    NormalizedScan out = scan;
    for (double& v : out.signal) v /= level;
    if (out.sigma_point) *out.sigma_point /= std::abs(level);
    return out;
}

} // namespace holeburn
