#include "holeburn/data.hpp"

#include <charconv>
#include <cmath>

#include "holeburn/errors.hpp"

namespace holeburn {

void DecayCurve::validate() const {
    if (time.empty()) throw InputError("decay curve is empty");
    if (time.size() != counts.size()) throw InputError("decay curve: time/counts length mismatch");
    if (!model_signal.empty() && model_signal.size() != time.size())
        throw InputError("decay curve: model_signal length mismatch");
    for (std::size_t i = 0; i < time.size(); ++i) {
        if (!std::isfinite(time[i]) || !std::isfinite(counts[i]))
            throw InputError("decay curve contains non-finite values");
        if (i > 0 && !(time[i] > time[i - 1]))
            throw InputError("decay curve time stamps must be strictly increasing");
    }
    if (power && !(*power >= 0.0)) throw InputError("decay curve power must be >= 0");
}

IndexRange parse_index_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InputError("index range must look like a:b, got '" + text + "'");
    auto parse = [&](std::string_view s) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw InputError("bad index in range '" + text + "'");
        return v;
    };
    const std::string_view sv(text);
    IndexRange r{parse(sv.substr(0, colon)), parse(sv.substr(colon + 1))};
    if (r.end <= r.begin) throw InputError("index range '" + text + "' is empty");
    return r;
}

std::string format_index_range(const IndexRange& r) {
    return std::to_string(r.begin) + ":" + std::to_string(r.end);
}

void RawScan::validate() const {
    if (freq.size() != fluor_counts.size() || freq.size() != power_monitor.size())
        throw InputError("raw scan: column lengths differ");
    if (freq.empty()) throw InputError("raw scan is empty");
    if (aom_off.empty()) throw InputError("raw scan: AOM-off range is empty");
    if (aom_off.end > freq.size()) throw InputError("raw scan: AOM-off range outside the trace");
}

} // namespace holeburn
